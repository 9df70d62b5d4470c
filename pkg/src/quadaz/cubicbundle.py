"""Quadric surface bundles from cubic fourfolds containing the plane
P = {x0 = x1 = x2 = 0}.

A cubic F in (x0,x1,x2,y0,y1,y2) that vanishes on P is written as
F = sum a_mn y_m y_n + sum b_p y_p + c with a_mn linear, b_p quadratic and
c cubic in x. The associated form is q(y, z) = sum a_mn y_m y_n +
sum b_p y_p z + c z^2 with symmetric matrix M = [[A, b/2], [b/2^T, c]], so
that q = (y,z) M (y,z)^T and det M is the discriminant sextic.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .errors import GenericallyDegenerate, ParseError, PlaneNotContained, SingularH, UnsupportedDomain
from .fieldtower import Field, PrimeField, Rationals

X_VARS = ("x0", "x1", "x2")
Y_VARS = ("y0", "y1", "y2")
ALL_VARS = X_VARS + Y_VARS + ("z",)
NV = len(ALL_VARS)


class MPoly:
    """Sparse polynomial in x0,x1,x2,y0,y1,y2,z over an exact field."""

    __slots__ = ("F", "t")

    def __init__(self, F: Field, terms=None):
        self.F = F
        self.t = {}
        for m, c in (terms or {}).items():
            c = F.coerce(c)
            if c != 0:
                self.t[m] = c

    @classmethod
    def const(cls, F, c):
        return cls(F, {(0,) * NV: c})

    @classmethod
    def var(cls, F, name):
        i = ALL_VARS.index(name)
        return cls(F, {tuple(1 if k == i else 0 for k in range(NV)): F.one})

    def __add__(self, o):
        o = self._lift(o)
        t = dict(self.t)
        for m, c in o.t.items():
            t[m] = t.get(m, self.F.zero) + c
        return MPoly(self.F, t)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.F, {m: -c for m, c in self.t.items()})

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        t = {}
        for m1, c1 in self.t.items():
            for m2, c2 in o.t.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = t.get(m, self.F.zero) + c1 * c2
        return MPoly(self.F, t)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = MPoly.const(self.F, 1)
        for _ in range(e):
            out = out * self
        return out

    def _lift(self, o):
        if isinstance(o, MPoly):
            return o
        return MPoly.const(self.F, o)

    def __eq__(self, o):
        if not isinstance(o, MPoly):
            o = MPoly.const(self.F, o)
        return self.t == o.t

    def __hash__(self):
        return hash(tuple(sorted(self.t.items(), key=lambda kv: kv[0])))

    @property
    def is_zero(self):
        return not self.t

    def degree(self, idx=None):
        if not self.t:
            return -1
        if idx is None:
            return max(sum(m) for m in self.t)
        return max(sum(m[i] for i in idx) for m in self.t)

    def is_homogeneous(self, idx=None):
        idx = range(NV) if idx is None else idx
        return len({sum(m[i] for i in idx) for m in self.t}) <= 1

    def subs(self, values: dict):
        """Substitute polynomials (or scalars) for variables by name."""
        out = MPoly(self.F)
        images = [values.get(v, MPoly.var(self.F, v)) for v in ALL_VARS]
        images = [self._lift(x) for x in images]
        for m, c in self.t.items():
            term = MPoly.const(self.F, c)
            for i, e in enumerate(m):
                if e:
                    term = term * images[i] ** e
            out = out + term
        return out

    def coefficient_in(self, idx, exps):
        """Collect the coefficient (a polynomial in the other variables) of
        the monomial with exponents exps in the variables idx."""
        out = {}
        for m, c in self.t.items():
            if tuple(m[i] for i in idx) == tuple(exps):
                mm = tuple(0 if i in idx else m[i] for i in range(NV))
                out[mm] = c
        return MPoly(self.F, out)

    def deriv(self, name):
        i = ALL_VARS.index(name)
        t = {}
        for m, c in self.t.items():
            if m[i]:
                mm = tuple(e - 1 if k == i else e for k, e in enumerate(m))
                t[mm] = c * m[i]
        return MPoly(self.F, t)

    def fmt(self) -> str:
        if not self.t:
            return "0"
        parts = []
        for m in sorted(self.t, key=lambda m: (-sum(m), tuple(-e for e in m))):
            c = self.t[m]
            mon = "*".join(
                (ALL_VARS[i] if e == 1 else f"{ALL_VARS[i]}^{e}") for i, e in enumerate(m) if e
            )
            cs = self.F.fmt(c)
            if not mon:
                parts.append(cs)
            elif cs == "1":
                parts.append(mon)
            elif cs == "-1":
                parts.append("-" + mon)
            else:
                parts.append(f"{cs}*{mon}" if "/" not in cs[1:] else f"({cs})*{mon}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return self.fmt()


# ---------------------------------------------------------------------------
# sympy boundary (gcd and factorization of the sextic)


def _sympy_gens():
    import sympy

    return sympy.symbols(" ".join(X_VARS))


def _sympy_domain(F: Field):
    import sympy

    if isinstance(F, Rationals):
        return sympy.QQ
    if isinstance(F, PrimeField):
        return sympy.GF(F.p)
    raise UnsupportedDomain(f"cubic bundles over {F.descriptor()}")


def _to_sympy(P: MPoly):
    import sympy

    F = P.F
    d = {}
    for m, c in P.t.items():
        if any(m[3:]):
            raise ValueError("only x-polynomials cross the sympy boundary")
        if isinstance(F, Rationals):
            d[m[:3]] = sympy.Rational(c.numerator, c.denominator)
        else:
            d[m[:3]] = int(c.v)
    return sympy.Poly.from_dict(d, list(_sympy_gens()), domain=_sympy_domain(F))


def _from_sympy(F: Field, S) -> MPoly:
    t = {}
    for m, c in S.as_dict().items():
        if isinstance(F, Rationals):
            c = Fraction(int(c.p), int(c.q)) if hasattr(c, "p") else Fraction(str(c))
        else:
            c = int(c) % F.p
        t[tuple(m) + (0,) * (NV - 3)] = c
    return MPoly(F, t)


def poly_gcd(P: MPoly, Q: MPoly) -> MPoly:
    import sympy

    g = sympy.gcd(_to_sympy(P), _to_sympy(Q))
    return _monic(_from_sympy(P.F, g))


def poly_divmod_exact(P: MPoly, Q: MPoly):
    """P / Q if Q divides P, else None."""
    import sympy

    q, r = sympy.div(_to_sympy(P), _to_sympy(Q))
    if not r.is_zero:
        return None
    return _from_sympy(P.F, q)


def _monic(P: MPoly) -> MPoly:
    if P.is_zero:
        return P
    lead = max(P.t, key=lambda m: (sum(m), m))
    c = P.t[lead]
    return MPoly(P.F, {m: v / c for m, v in P.t.items()})


def _linear_forms(F: Field):
    """Normalized linear forms in x0,x1,x2 (first nonzero coefficient 1),
    x0 first."""
    elts = F.elements()
    for lead in range(3):
        for rest in itertools.product(elts, repeat=2 - lead):
            coeffs = [F.zero] * lead + [F.one] + list(rest)
            t = {}
            for i, c in enumerate(coeffs):
                if c != 0:
                    t[tuple(1 if k == i else 0 for k in range(NV))] = c
            yield MPoly(F, t)


def first_factor(G: MPoly) -> MPoly:
    """A deterministic irreducible factor of G when one is found: over Q by
    sympy factorization; over F_p the first normalized linear form dividing
    G, else G itself."""
    F = G.F
    if isinstance(F, Rationals):
        import sympy

        _, facs = sympy.factor_list(_to_sympy(G))
        cands = [_monic(_from_sympy(F, f)) for f, _ in facs]
        cands.sort(key=_factor_key)
        return cands[0]
    for lf in _linear_forms(F):
        if poly_divmod_exact(G, lf) is not None:
            return lf
    return _monic(G)


def _factor_key(P: MPoly):
    return (P.degree(), sorted(((tuple(-e for e in m)), str(c)) for m, c in P.t.items()))


def multiplicity_of(P: MPoly, g: MPoly) -> int:
    e = 0
    while True:
        q = poly_divmod_exact(P, g)
        if q is None:
            return e
        P = q
        e += 1


# ---------------------------------------------------------------------------
# Cubics containing the plane


_ALLOWED = re.compile(r"^[\sxyz0-9+\-*/^().]*$")


def parse_cubic(F: Field, text: str) -> MPoly:
    """Parse a polynomial in x0,x1,x2,y0,y1,y2 with integer or fractional
    coefficients (fieldtower expression syntax)."""
    import ast

    if not _ALLOWED.match(text):
        raise ParseError(f"unexpected characters in polynomial: {text!r}")
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"malformed polynomial: {text!r}") from exc
    return _eval(tree.body, F)


def _eval(node, F):
    import ast

    if isinstance(node, ast.BinOp):
        l, r = _eval(node.left, F), _eval(node.right, F)
        if isinstance(node.op, ast.Add):
            return l + r
        if isinstance(node.op, ast.Sub):
            return l - r
        if isinstance(node.op, ast.Mult):
            return l * r
        if isinstance(node.op, ast.Div):
            if len(r.t) != 1 or any(any(m) for m in r.t):
                raise ParseError("division by a non-constant")
            return l * (1 / next(iter(r.t.values())))
        if isinstance(node.op, ast.Pow):
            if len(r.t) > 1 or any(any(m) for m in r.t):
                raise ParseError("exponent must be a constant")
            e = next(iter(r.t.values()), F.zero)
            e = int(e) if isinstance(F, Rationals) else int(e.v)
            if e < 0:
                raise ParseError("negative exponent")
            return l**e
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, F)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return MPoly.const(F, node.value)
    if isinstance(node, ast.Name) and node.id in X_VARS + Y_VARS:
        return MPoly.var(F, node.id)
    raise ParseError("malformed polynomial")


@dataclass(frozen=True)
class CubicContainingPlane:
    F: Field
    poly: MPoly

    def __post_init__(self):
        if isinstance(self.F, PrimeField) and self.F.p <= 3:
            raise UnsupportedDomain("cubic bundles need p > 3")
        P = self.poly
        if P.is_zero or not P.is_homogeneous() or P.degree() != 3:
            raise ParseError("expected a homogeneous cubic")
        if any(m[6] for m in P.t):
            raise ParseError("variable z is reserved")
        if any(sum(m[:3]) == 0 for m in P.t):
            raise PlaneNotContained("cubic does not vanish on x0 = x1 = x2 = 0")


# ---------------------------------------------------------------------------
# The bundle form


@dataclass
class BundleForm:
    F: Field
    A: tuple  # symmetric 3x3 of linear forms (A_mm = a_mm, A_mn = a_mn / 2)
    b: tuple  # three quadratic forms
    c: MPoly  # cubic form

    @property
    def matrix(self):
        """4x4 symmetric matrix M with q = (y,z) M (y,z)^T."""
        half = 1 / self.F.coerce(2)
        rows = [list(self.A[i]) + [self.b[i] * half] for i in range(3)]
        rows.append([self.b[i] * half for i in range(3)] + [self.c])
        return tuple(tuple(r) for r in rows)

    def q(self) -> MPoly:
        F = self.F
        ys = [MPoly.var(F, v) for v in Y_VARS] + [MPoly.var(F, "z")]
        M = self.matrix
        out = MPoly(F)
        for i in range(4):
            for j in range(4):
                out = out + M[i][j] * ys[i] * ys[j]
        return out

    def cubic(self) -> MPoly:
        return self.q().subs({"z": MPoly.const(self.F, 1)})

    def lines(self):
        out = []
        for i in range(3):
            for j in range(i, 3):
                coeff = self.A[i][j] if i == j else self.A[i][j] * self.F.coerce(2)
                out.append(f"a{i}{j}: {coeff.fmt()}")
        for p in range(3):
            out.append(f"b{p}: {self.b[p].fmt()}")
        out.append(f"c: {self.c.fmt()}")
        return out


def extract_bundle(Y: CubicContainingPlane) -> BundleForm:
    F = Y.F
    P = Y.poly
    yidx = (3, 4, 5)
    half = 1 / F.coerce(2)
    A = [[None] * 3 for _ in range(3)]
    for m in range(3):
        for n in range(m, 3):
            exps = [0, 0, 0]
            exps[m] += 1
            exps[n] += 1
            a = P.coefficient_in(yidx, exps)
            if m == n:
                A[m][m] = a
            else:
                A[m][n] = A[n][m] = a * half
    b = []
    for p in range(3):
        exps = [0, 0, 0]
        exps[p] = 1
        b.append(P.coefficient_in(yidx, exps))
    c = P.coefficient_in(yidx, (0, 0, 0))
    if any(P.coefficient_in(yidx, e) != MPoly(F) for e in _cubic_y_exponents()):
        raise PlaneNotContained("cubic has terms of degree 3 in y")
    Bf = BundleForm(F, tuple(tuple(r) for r in A), tuple(b), c)
    if Bf.cubic() != P:
        raise AssertionError("reassembly identity failed")
    return Bf


def _cubic_y_exponents():
    return [e for e in itertools.product(range(4), repeat=3) if sum(e) == 3]


def reassemble(Bf: BundleForm) -> MPoly:
    return Bf.cubic()


def discriminant_sextic(Bf: BundleForm) -> MPoly:
    D = la.det_cofactor(Bf.matrix)
    if D.is_zero:
        raise GenericallyDegenerate("det of the bundle form is identically zero")
    if D.degree() != 6 or not D.is_homogeneous():
        raise AssertionError("discriminant is not a sextic")
    return D


@dataclass(frozen=True)
class DegenerationCheck:
    ok: bool
    factor: MPoly = None
    exponent: int = None
    detail: str = ""

    def lines(self, name):
        if self.ok:
            return [f"{name}: pass"]
        out = [f"{name}: fail", f"factor: {self.factor.fmt()}"]
        if self.exponent is not None:
            out.append(f"exponent: {self.exponent}")
        if self.detail:
            out.append(f"detail: {self.detail}")
        return out


def multiplicity_one_check(Bf: BundleForm) -> DegenerationCheck:
    """Squarefree test of the sextic. A squarefree restriction to a line
    certifies squarefreeness (a repeated factor restricts to a repeated
    factor); otherwise gcd(det, partial derivatives) decides."""
    D = discriminant_sextic(Bf)
    for line in _probe_lines(Bf.F):
        f = restrict_to_line(D, line)
        if f.degree() == D.degree() and _univariate_squarefree(f):
            return DegenerationCheck(True)
    G = D
    for v in X_VARS:
        G = poly_gcd(G, D.deriv(v))
    if G.degree() <= 0:
        return DegenerationCheck(True)
    g = first_factor(G)
    e = multiplicity_of(D, g)
    detail = "" if g.degree() <= 1 or isinstance(Bf.F, Rationals) else "repeated part (not factored further)"
    return DegenerationCheck(False, g, e, detail)


PROBE_LINES = 24


def _probe_lines(F: Field):
    """Deterministic pseudo-random lines s -> s*P + Q in P^2."""
    import random

    rng = random.Random(20240601)
    for _ in range(PROBE_LINES):
        if isinstance(F, PrimeField):
            P = [F.coerce(rng.randrange(F.p)) for _ in range(3)]
            Q = [F.coerce(rng.randrange(F.p)) for _ in range(3)]
        else:
            P = [F.coerce(rng.randint(-9, 9)) for _ in range(3)]
            Q = [F.coerce(rng.randint(-9, 9)) for _ in range(3)]
        if la.rank(la.mat([P, Q])) == 2:
            yield P, Q


def restrict_to_line(P: MPoly, line) -> MPoly:
    """P(s*A + B) as a polynomial in the slot variable z (used as s)."""
    A, B = line
    F = P.F
    s = MPoly.var(F, "z")
    return P.subs({v: s * a + b for v, a, b in zip(X_VARS, A, B)})


def _univariate(P: MPoly):
    import sympy

    F = P.F
    s = sympy.Symbol("s")
    d = {}
    for m, c in P.t.items():
        d[(m[6],)] = sympy.Rational(c.numerator, c.denominator) if isinstance(F, Rationals) else int(c.v)
    return sympy.Poly.from_dict(d, [s], domain=_sympy_domain(F))


def _univariate_squarefree(P: MPoly) -> bool:
    f = _univariate(P)
    return f.degree() > 0 and f.gcd(f.diff()).degree() == 0


def minors3(M):
    n = len(M)
    out = []
    for rows in itertools.combinations(range(n), 3):
        for cols in itertools.combinations(range(n), 3):
            sub = tuple(tuple(M[r][c] for c in cols) for r in rows)
            out.append(la.det_cofactor(sub))
    return out


def simple_degeneration_locus_check(Bf: BundleForm) -> DegenerationCheck:
    """Radical rank at most 1 along every component of the sextic: no
    factor of det divides all 3x3 minors. A line on which det and the
    minors share no root certifies this; otherwise multivariate gcds decide."""
    D = discriminant_sextic(Bf)
    minors = [m for m in minors3(Bf.matrix) if not m.is_zero]
    for line in _probe_lines(Bf.F):
        f = restrict_to_line(D, line)
        if f.degree() != D.degree():
            continue
        g = _univariate(f)
        for m in minors:
            g = g.gcd(_univariate(restrict_to_line(m, line)))
            if g.degree() == 0:
                return DegenerationCheck(True)
    G = D
    for m in minors:
        G = poly_gcd(G, m)
        if G.degree() <= 0:
            return DegenerationCheck(True)
    g = first_factor(G)
    return DegenerationCheck(False, g, multiplicity_of(D, g), "divides det and every 3x3 minor")


# ---------------------------------------------------------------------------
# Similarities fixing the plane


@dataclass
class JLift:
    J: tuple
    checks: dict

    @property
    def ok(self):
        return all(self.checks.values())


def _matrix(F, rows, n):
    M = la.mat([[F.coerce(x) for x in r] for r in rows])
    if len(M) != n or any(len(r) != n for r in M):
        raise ParseError(f"expected a {n}x{n} matrix")
    return M


def j_matrix(F: Field, H, G, u):
    H = _matrix(F, H, 3)
    G = _matrix(F, G, 3)
    u = F.coerce(u)
    if u == 0:
        raise SingularH("u must be a unit")
    if la.det(H) == 0:
        raise SingularH("H is singular")
    rows = []
    for i in range(3):
        rows.append([u if j == i else F.zero for j in range(3)] + [F.zero] * 3)
    for i in range(3):
        rows.append(list(G[i]) + list(H[i]))
    return la.mat(rows), H, G, u


def transform_bundle(Bf: BundleForm, H, G, u, lam) -> BundleForm:
    """The bundle form q2 with q2(psi(y), psi(z)) = lam q1(y, z), where
    psi: y -> H y + (G x) z, z -> u z."""
    F = Bf.F
    _, H, G, u = j_matrix(F, H, G, u)
    lam = F.coerce(lam)
    Hi = la.inverse(H, F)
    xs = [MPoly.var(F, v) for v in X_VARS]
    Y = [MPoly.var(F, v) for v in Y_VARS]
    Z = MPoly.var(F, "z")
    Gx = [sum((G[i][j] * xs[j] for j in range(3)), MPoly(F)) for i in range(3)]
    # psi^{-1}: z = Z/u, y = H^{-1}(Y - Gx Z/u)
    zi = Z * (1 / u)
    w = [Y[i] - Gx[i] * zi for i in range(3)]
    yi = [sum((Hi[i][j] * w[j] for j in range(3)), MPoly(F)) for i in range(3)]
    q2 = Bf.q().subs({"y0": yi[0], "y1": yi[1], "y2": yi[2], "z": zi}) * lam
    F2 = q2.subs({"z": MPoly.const(F, 1)})
    return extract_bundle(CubicContainingPlane(F, F2))


def j_lift(Bf1: BundleForm, Bf2: BundleForm, H, G, u, lam) -> JLift:
    """J = [[uI, 0], [G, H]] acting by x -> u x, y -> H y + G x. Checks the
    bundle similarity q2(psi) = lam q1 and the lifted identity
    F2(J(x, y)) = u lam F1(x, y) as exact polynomial identities."""
    F = Bf1.F
    J, H, G, u = j_matrix(F, H, G, u)
    lam = F.coerce(lam)
    xs = [MPoly.var(F, v) for v in X_VARS]
    Y = [MPoly.var(F, v) for v in Y_VARS]
    Z = MPoly.var(F, "z")
    Gx = [sum((G[i][j] * xs[j] for j in range(3)), MPoly(F)) for i in range(3)]
    psi_y = [sum((H[i][j] * Y[j] for j in range(3)), MPoly(F)) + Gx[i] * Z for i in range(3)]
    lhs = Bf2.q().subs({"y0": psi_y[0], "y1": psi_y[1], "y2": psi_y[2], "z": Z * u})
    checks = {"bundle-similarity": lhs == Bf1.q() * lam}
    Jx = [xs[i] * u for i in range(3)]
    Jy = [sum((H[i][j] * Y[j] for j in range(3)), MPoly(F)) + Gx[i] for i in range(3)]
    F2 = Bf2.cubic()
    img = F2.subs({"x0": Jx[0], "x1": Jx[1], "x2": Jx[2], "y0": Jy[0], "y1": Jy[1], "y2": Jy[2]})
    checks["lifted-identity"] = img == Bf1.cubic() * (u * lam)
    return JLift(J, checks)


# ---------------------------------------------------------------------------
# Random instances


def random_cubic(F: Field, rng, height: int = 5) -> CubicContainingPlane:
    terms = {}
    for m in itertools.product(range(4), repeat=6):
        if sum(m) == 3 and sum(m[:3]) >= 1:
            terms[m + (0,)] = F.random(rng, height) if hasattr(F, "random") else rng.randint(-height, height)
    P = MPoly(F, terms)
    if P.is_zero:
        P = MPoly.var(F, "x0") ** 3
    return CubicContainingPlane(F, P)


def points_on(Bf: BundleForm, D: MPoly, limit: int = 20):
    """Points of P^2(F_p) on the sextic with the rank of M there."""
    F = Bf.F
    if not F.is_finite:
        raise UnsupportedDomain("point enumeration needs a finite field")
    out = []
    for lf in _linear_forms(F):
        pt = [lf.t.get(tuple(1 if k == i else 0 for k in range(NV)), F.zero) for i in range(3)]
        sub = {v: MPoly.const(F, c) for v, c in zip(X_VARS, pt)}
        if D.subs(sub).is_zero:
            M = tuple(tuple(_const(e.subs(sub)) for e in r) for r in Bf.matrix)
            out.append((tuple(pt), 4 - la.rank(M)))
            if len(out) >= limit:
                break
    return out


def _const(P: MPoly):
    if P.is_zero:
        return P.F.zero
    return P.t[(0,) * NV]
