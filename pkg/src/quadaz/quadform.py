"""Quadratic forms as Gram matrices of the polar bilinear form.

Conventions: a form is stored by the Gram matrix G of b_q, so that
q(v) = 1/2 v^T G v and b_q(v, v) = 2 q(v). The diagonal shorthand
<a_1, ..., a_n> (CLI: `diag(a_1,...,a_n)`) denotes the form with q(e_i) = a_i,
whose Gram matrix is diag(2 a_1, ..., 2 a_n).

A Similarity (M, lam) from `source` to `target` satisfies
M^T G_target M = lam G_source, i.e. q_target(M v) = lam q_source(v).
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

from . import linalg as la
from .errors import (
    DecompositionFailure,
    DegenerateForm,
    DyadicPlace,
    InvalidWitness,
    NonIntegralEntries,
    NonUnitValue,
    NotInvertible,
    NotSimpleDegeneration,
    ParseError,
    UnsupportedDomain,
)
from .fieldtower import (
    INF,
    DegreePlace,
    Field,
    GaussPlace,
    PAdic,
    Poly,
    PolyPlace,
    Rationals,
    RationalFunctionField,
    Valuation,
    parse_element,
    parse_field,
)


@dataclass(frozen=True)
class QuadForm:
    F: Field
    gram: tuple

    def __post_init__(self):
        if not la.is_symmetric(self.gram):
            raise ParseError("Gram matrix is not symmetric")

    @classmethod
    def diagonal(cls, F: Field, values) -> "QuadForm":
        return cls(F, la.diag(F, [2 * F.coerce(a) for a in values]))

    @classmethod
    def from_gram(cls, F: Field, rows) -> "QuadForm":
        return cls(F, la.mat([[F.coerce(x) for x in r] for r in rows]))

    @property
    def n(self) -> int:
        return len(self.gram)

    def q(self, v):
        return la.bilinear(self.gram, v, v) / 2

    def b(self, v, w):
        return la.bilinear(self.gram, v, w)

    def det(self):
        return la.det(self.gram)

    def is_diagonal(self) -> bool:
        return all(self.gram[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j)

    def values(self):
        """q(e_i) for each basis vector."""
        return tuple(self.gram[i][i] / 2 for i in range(self.n))

    def perp(self, other: "QuadForm") -> "QuadForm":
        return QuadForm(self.F, la.block_diag(self.F, self.gram, other.gram))

    def scaled(self, c) -> "QuadForm":
        return QuadForm(self.F, la.mat_scale(self.F.coerce(c), self.gram))

    def basis(self, i):
        return tuple(self.F.one if j == i else self.F.zero for j in range(self.n))

    def fmt(self) -> str:
        if self.is_diagonal():
            return "diag(" + ",".join(self.F.fmt(a) for a in self.values()) + ")"
        return f"form {{ field: {self.F.descriptor()}, gram: {la.fmt_matrix(self.F, self.gram)} }}"

    def __repr__(self):
        return self.fmt()


def hyperbolic_plane(F: Field) -> QuadForm:
    """q(x e + y f) = x y, Gram [[0,1],[1,0]]."""
    return QuadForm.from_gram(F, [[0, 1], [1, 0]])


def _split_top(text: str):
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur)
    return [s.strip() for s in out]


def parse_form(text: str, F: Field | None = None) -> QuadForm:
    """`diag(a,b,...)` (needs F) or `form { field: <F>, gram: [[...],...] }`."""
    text = text.strip()
    m = re.fullmatch(r"diag\((.*)\)", text, re.S)
    if m:
        if F is None:
            raise ParseError("diag(...) needs a --field")
        vals = [parse_element(F, s) for s in _split_top(m.group(1))]
        if not vals:
            raise ParseError("empty diagonal form")
        return QuadForm.diagonal(F, vals)
    m = re.fullmatch(r"form\s*\{\s*field\s*:\s*([^,]+?)\s*,\s*gram\s*:\s*(\[.*\])\s*\}", text, re.S)
    if m:
        FF = parse_field(m.group(1))
        if F is not None and F != FF:
            raise ParseError("form field does not match --field")
        return QuadForm.from_gram(FF, _parse_matrix(FF, m.group(2)))
    m = re.fullmatch(r"gram\s*(\[.*\])", text, re.S)
    if m and F is not None:
        return QuadForm.from_gram(F, _parse_matrix(F, m.group(1)))
    raise ParseError(f"malformed form {text[:40]!r}")


def _parse_matrix(F, text: str):
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError("matrix must be [[...],...]")
    rows = []
    for r in _split_top(text[1:-1]):
        if not (r.startswith("[") and r.endswith("]")):
            raise ParseError("matrix rows must be [...]")
        rows.append([parse_element(F, s) for s in _split_top(r[1:-1])])
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ParseError("matrix must be square")
    return rows


def parse_vector(F: Field, text: str):
    text = text.strip()
    if text.startswith("(") and text.endswith(")") or text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    return tuple(parse_element(F, s) for s in _split_top(text))


# ---------------------------------------------------------------------------
# Similarities


@dataclass(frozen=True)
class Similarity:
    matrix: tuple
    factor: object
    source: QuadForm
    target: QuadForm

    def holds(self) -> bool:
        lhs = la.congruence(self.matrix, self.target.gram)
        rhs = la.mat_scale(self.factor, self.source.gram)
        return lhs == rhs

    def verify(self) -> "Similarity":
        if not self.holds():
            raise InvalidWitness("similarity contract M^T G' M = lam G fails")
        return self

    def apply(self, v):
        return la.mat_vec(self.matrix, v)

    def compose(self, other: "Similarity") -> "Similarity":
        """self after other."""
        return Similarity(la.mat_mul(self.matrix, other.matrix), self.factor * other.factor, other.source, self.target)

    def inverse(self) -> "Similarity":
        F = self.source.F
        return Similarity(la.inverse(self.matrix, F), 1 / self.factor, self.target, self.source)

    @property
    def is_isometry(self) -> bool:
        return self.factor == 1


def identity_similarity(q: QuadForm) -> Similarity:
    return Similarity(la.identity(q.F, q.n), q.F.one, q, q)


# ---------------------------------------------------------------------------
# Field-level invariants


def radical(q: QuadForm):
    if not q.F.is_field:
        raise UnsupportedDomain("radical needs a field")
    return la.nullspace(q.gram, q.F)


def discriminant(q: QuadForm):
    d = q.det()
    if d == 0:
        raise DegenerateForm("determinant is zero")
    return q.F.squareclass(d)


def _orth_basis(q: QuadForm, vecs, pivot_ok):
    """Symmetric elimination on the span of vecs with the pivot rule:
    first vector whose value passes pivot_ok, else w_i + w_j for the lowest
    pair (i, j) with b(w_i, w_j) passing pivot_ok. Returns (pivots, rest)."""
    ws = list(vecs)
    pivots = []
    while ws:
        p_idx = next((i for i, w in enumerate(ws) if pivot_ok(q.b(w, w))), None)
        if p_idx is None:
            pair = next(
                ((i, j) for i in range(len(ws)) for j in range(i + 1, len(ws)) if pivot_ok(q.b(ws[i], ws[j]))),
                None,
            )
            if pair is None:
                break
            i, j = pair
            ws[i] = tuple(x + y for x, y in zip(ws[i], ws[j]))
            p_idx = i
        p = ws.pop(p_idx)
        bpp = q.b(p, p)
        new = []
        for w in ws:
            c = q.b(w, p) / bpp
            new.append(tuple(x - c * y for x, y in zip(w, p)) if c != 0 else w)
        ws = new
        pivots.append(p)
    return pivots, ws


@dataclass(frozen=True)
class Diagonalization:
    values: tuple  # q-values <u_1, ..., u_n>
    to_diag: Similarity  # q -> diagonal form
    basis: tuple  # columns P with P^T G P diagonal (diagonal -> q)

    @property
    def form(self) -> QuadForm:
        return self.to_diag.target

    @property
    def gram_diagonal(self):
        return tuple(2 * a for a in self.values)


def diagonalize(q: QuadForm) -> Diagonalization:
    F = q.F
    if not F.is_field:
        raise UnsupportedDomain("diagonalize needs a field")
    vecs = [q.basis(i) for i in range(q.n)]
    pivots, rest = _orth_basis(q, vecs, lambda x: x != 0)
    cols = pivots + rest
    P = la.transpose(cols)
    vals = tuple(q.q(c) for c in cols)
    D = QuadForm.diagonal(F, vals)
    iso = Similarity(la.inverse(P, F), F.one, q, D).verify()
    return Diagonalization(vals, iso, P)


# ---------------------------------------------------------------------------
# DVR-level analysis


def _check_valuation(q: QuadForm, v: Valuation):
    if v.field != q.F:
        raise UnsupportedDomain("valuation lives on a different field")
    if v.residue_characteristic == 2:
        raise DyadicPlace("residue characteristic 2")


def residue_gram(q: QuadForm, v: Valuation):
    return la.mat([[v.residue(x) for x in r] for r in q.gram])


def _check_integral(q: QuadForm, v: Valuation):
    for r in q.gram:
        for x in r:
            if x != 0 and v.val(x) < 0:
                raise NonIntegralEntries(f"entry {q.F.fmt(x)} is not integral at {v.name}")


@dataclass(frozen=True)
class DegenerationReport:
    valuation: Valuation
    radical_rank: int
    multiplicity: object  # int or INF
    verdict: str  # "regular", "simple(e)", "not-simple"

    def lines(self):
        e = "inf" if self.multiplicity == INF else str(self.multiplicity)
        return [
            f"valuation: {self.valuation.kind}({self.valuation.name})",
            f"residue-radical-rank: {self.radical_rank}",
            f"multiplicity: {e}",
            f"verdict: {self.verdict}",
        ]

    @property
    def is_simple_one(self):
        return self.verdict == "simple(1)"


def degeneration_report(q: QuadForm, v: Valuation) -> DegenerationReport:
    _check_valuation(q, v)
    _check_integral(q, v)
    rg = residue_gram(q, v)
    rad = q.n - la.rank(rg)
    d = q.det()
    e = v.val(d)
    if e == 0:
        verdict = "regular"
    elif rad == 1 and e != INF:
        verdict = f"simple({e})"
    else:
        verdict = "not-simple"
    return DegenerationReport(v, rad, e, verdict)


@dataclass(frozen=True)
class LocalDiagonalization:
    units: tuple  # u_1 .. u_{n-1}
    top: object  # u_n * pi^e
    multiplicity: int
    basis: tuple  # P with P^T G P = diag(2 u_1, ..., 2 top); integral, unit det
    valuation: Valuation

    @property
    def values(self):
        return self.units + (self.top,)

    @property
    def top_unit(self):
        return self.valuation.unit_part(self.top)


def diagonalize_local(q: QuadForm, v: Valuation) -> LocalDiagonalization:
    rep = degeneration_report(q, v)
    if rep.verdict == "not-simple":
        raise NotSimpleDegeneration(f"residue radical rank {rep.radical_rank} at {v.name}")
    vecs = [q.basis(i) for i in range(q.n)]
    pivots, rest = _orth_basis(q, vecs, lambda x: x != 0 and v.val(x) == 0)
    cols = pivots + rest
    if len(rest) > 1:
        raise NotSimpleDegeneration(f"residue radical rank {len(rest)} at {v.name}")
    vals = tuple(q.q(c) for c in cols)
    P = la.transpose(cols)
    assert v.val(la.det(P)) == 0
    top = vals[-1]
    return LocalDiagonalization(vals[:-1], top, v.val(top), P, v)


def represents_local(q: QuadForm, u, v: Valuation, precision: int = 8):
    """Decide whether q represents the unit u over the completed valuation ring.

    Returns (True, witness, exact) or (False, reason, None). The witness has
    integral coordinates; exact=False means q(witness) = u only modulo
    pi^precision (the exact value lives in the completion).
    """
    F = q.F
    u = F.coerce(u)
    if v.val(u) != 0:
        raise NonUnitValue("target value must be a unit")
    ld = diagonalize_local(q, v)
    res_units = [v.residue(a) for a in (ld.units if ld.multiplicity > 0 else ld.values)]
    kappa = v.residue_field
    if not kappa.is_finite:
        raise UnsupportedDomain("representation test needs a finite residue field")
    ub = v.residue(u)
    xbar = _represent_finite(kappa, res_units, ub)
    if xbar is None:
        return False, f"residue form <{','.join(kappa.fmt(a) for a in res_units)}> does not represent {kappa.fmt(ub)}", None
    vals = list(ld.values)
    x = [v.lift(c) for c in xbar] + [F.zero] * (len(vals) - len(xbar))
    i = next(k for k, c in enumerate(xbar) if c != 0)
    # Newton iteration on the i-th coordinate of the diagonal form
    exact = False
    for _ in range(precision.bit_length() + 1):
        val = sum((a * c * c for a, c in zip(vals, x)), F.zero)
        if val == u:
            exact = True
            break
        x[i] = _truncate(v, x[i] - (val - u) / (2 * vals[i] * x[i]), precision)
    val = sum((a * c * c for a, c in zip(vals, x)), F.zero)
    exact = val == u
    if not exact:
        # try an exact square root when the field provides one
        rest = u - sum((a * c * c for k, (a, c) in enumerate(zip(vals, x)) if k != i), F.zero)
        try:
            r = F.sqrt(rest / vals[i])
        except UnsupportedDomain:
            r = None
        if r is not None and v.val(r) >= 0:
            x[i] = r
            exact = True
    w = la.mat_vec(ld.basis, tuple(x))
    if exact:
        assert q.q(w) == u
    else:
        assert v.val(q.q(w) - u) >= precision
    return True, w, exact


def _truncate(v: Valuation, x, n: int):
    """An element congruent to the integral x modulo pi^n with small height
    (p-adic and polynomial places); other valuations return x unchanged."""
    from .fieldtower import PAdic, PolyPlace

    F = v.field
    if isinstance(v, PAdic):
        m = v.p**n
        return F.coerce(x.numerator * pow(x.denominator, -1, m) % m)
    if isinstance(v, PolyPlace):
        fn = v.f**n
        g, s, _ = x.den.xgcd(fn)
        r = (x.num * s).scale(1 / g.lc()).divmod(fn)[1] if g.deg() == 0 else None
        return x if r is None else F.from_poly(r)
    return x


def _represent_finite(kappa, units, target):
    """First vector in enumeration order with sum units_i x_i^2 = target."""
    elts = kappa.elements()
    squares = {}
    for e in elts:
        squares.setdefault(e * e, e)
    n = len(units)
    if n == 0:
        return None
    # enumerate the first n-1 coordinates, solve for the last one
    for head in itertools.product(elts, repeat=n - 1):
        s = sum((a * x * x for a, x in zip(units, head)), kappa.zero)
        rest = (target - s) / units[-1]
        r = squares.get(rest)
        if r is not None:
            vec = tuple(head) + (r,)
            if any(c != 0 for c in vec):
                return vec
    return None


def isotropic_vector_finite(kappa, values):
    """First nonzero vector in enumeration order with sum a_i x_i^2 = 0."""
    elts = kappa.elements()
    n = len(values)
    if n == 0:
        return None
    if any(a == 0 for a in values):
        i = next(k for k, a in enumerate(values) if a == 0)
        return tuple(kappa.one if k == i else kappa.zero for k in range(n))
    squares = {}
    for e in elts:
        squares.setdefault(e * e, e)
    for head in itertools.product(elts, repeat=n - 1):
        s = sum((a * x * x for a, x in zip(values, head)), kappa.zero)
        r = squares.get(-s / values[-1])
        if r is not None:
            vec = tuple(head) + (r,)
            if any(c != 0 for c in vec):
                return vec
    return None


def residue_forms(values, v: Valuation):
    """Split diagonal entries into the first (even valuation) and second
    (odd valuation) residue forms, after removing squares of the parameter."""
    first, second = [], []
    for a in values:
        e = v.val(a)
        u = v.unit_part(a)
        (first if e % 2 == 0 else second).append(v.residue(u))
    return first, second


def isotropic_complete(q: QuadForm, v: Valuation, budget: int = 20000) -> bool:
    """Isotropy over the completion K_v via the two residue forms."""
    _check_valuation(q, v)
    vals = diagonalize(q).values
    if any(a == 0 for a in vals):
        return True
    first, second = residue_forms(vals, v)
    from .quaternion import residue_field_isotropic

    return residue_field_isotropic(v.residue_field, first, budget) or residue_field_isotropic(
        v.residue_field, second, budget
    )


# ---------------------------------------------------------------------------
# Reflections, transport, cancellation


def reflection(q: QuadForm, v, valuation: Valuation | None = None) -> Similarity:
    F = q.F
    u = q.q(v)
    if u == 0 or (valuation is not None and valuation.val(u) != 0):
        raise NonUnitValue("reflection needs q(v) invertible")
    Gv = la.mat_vec(q.gram, v)
    n = q.n
    M = tuple(
        tuple((F.one if i == j else F.zero) - v[i] * Gv[j] / u for j in range(n)) for i in range(n)
    )
    return Similarity(M, F.one, q, q)


@dataclass(frozen=True)
class Transport:
    isometry: Similarity
    reflections: tuple  # vectors x_k, isometry = r_{x_1} r_{x_2} ... (leftmost applied last)


def _product_of_reflections(q, xs, valuation=None):
    iso = identity_similarity(q)
    for x in xs:
        iso = iso.compose(reflection(q, x, valuation))
    return iso


def transport(q: QuadForm, v, w) -> Transport:
    """An isometry of q mapping v to w (q(v) = q(w) != 0); at most two
    reflections: r_{v-w} when q(v-w) != 0, else r_w r_{v+w}."""
    F = q.F
    v = tuple(F.coerce(x) for x in v)
    w = tuple(F.coerce(x) for x in w)
    if q.q(v) != q.q(w) or q.q(v) == 0:
        raise NonUnitValue("transport needs q(v) = q(w) invertible")
    if v == w:
        return Transport(identity_similarity(q), ())
    d = tuple(a - b for a, b in zip(v, w))
    if q.q(d) != 0:
        xs = (d,)
    else:
        s = tuple(a + b for a, b in zip(v, w))
        xs = (w, s)
    iso = _product_of_reflections(q, xs)
    assert iso.apply(v) == w
    return Transport(iso, xs)


def crt_idempotents(vals):
    """Elements e_i of the semilocal ring with e_i = 1 mod m_i, 0 mod m_j."""
    if all(isinstance(v, PAdic) for v in vals):
        from sympy.ntheory.modular import crt

        ps = [v.p for v in vals]
        out = []
        for i in range(len(ps)):
            r = crt(ps, [1 if j == i else 0 for j in range(len(ps))])[0]
            out.append(vals[0].field.coerce(int(r)))
        return out
    if all(isinstance(v, PolyPlace) for v in vals):
        F = vals[0].field
        out = []
        for i, v in enumerate(vals):
            other = Poly.const(F.base, 1)
            for j, w in enumerate(vals):
                if j != i:
                    other = other * w.f
            g, s, _ = other.xgcd(v.f)
            out.append(F.from_poly(s * other))
        return out
    raise UnsupportedDomain("semilocal rings are supported for p-adic or polynomial places")


def _integral_unit_det(M, vals):
    for v in vals:
        for r in M:
            for x in r:
                if x != 0 and v.val(x) < 0:
                    return False
        if v.val(la.det(M)) != 0:
            return False
    return True


def transport_semilocal(q: QuadForm, v, w, vals) -> Transport:
    """Transport over the semilocal ring R of elements integral at every
    valuation in vals, by CRT-lifting local choices of reflection vectors."""
    F = q.F
    for val in vals:
        _check_valuation(q, val)
        _check_integral(q, val)
    u = q.q(v)
    if u != q.q(w) or any(val.val(u) != 0 for val in vals):
        raise NonUnitValue("transport needs q(v) = q(w) a unit")
    if v == w:
        return Transport(identity_similarity(q), ())
    idem = crt_idempotents(vals)
    vm = tuple(a - b for a, b in zip(v, w))
    vp = tuple(a + b for a, b in zip(v, w))
    xs_loc, ys_loc = [], []
    for val in vals:
        if val.val(q.q(vp)) == 0:
            xs_loc.append(vp)
            y = _unit_vector_perp(q, w, val)
            if y is None:
                if val.val(q.q(vm)) != 0:
                    raise NonUnitValue(f"no anisotropic vector orthogonal to w at {val.name}")
                xs_loc[-1] = vm
                y = w
            ys_loc.append(y)
        else:
            xs_loc.append(vm)
            ys_loc.append(w)
    x = tuple(sum((e * c[k] for e, c in zip(idem, xs_loc)), F.zero) for k in range(q.n))
    y = tuple(sum((e * c[k] for e, c in zip(idem, ys_loc)), F.zero) for k in range(q.n))
    refl = [y, x]
    tau = _product_of_reflections(q, refl, None)
    v1 = tau.apply(v)
    if v1 != w:
        d = tuple(a - b for a, b in zip(v1, w))
        refl = [d] + refl
    iso = _product_of_reflections(q, refl, None)
    assert iso.apply(v) == w
    if not _integral_unit_det(iso.matrix, vals):
        raise NonUnitValue("semilocal transport left the ring")
    return Transport(iso, tuple(refl))


def _unit_vector_perp(q, w, val):
    """A lifted vector y with b(y, w) = 0 mod m and q(y) a unit, or None."""
    kappa = val.residue_field
    G = residue_gram(q, val)
    wb = tuple(val.residue(c) for c in w)
    Gw = la.mat_vec(G, wb)
    basis = la.nullspace((Gw,), kappa) if any(c != 0 for c in Gw) else [
        tuple(kappa.one if i == j else kappa.zero for j in range(q.n)) for i in range(q.n)
    ]
    cands = list(basis)
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            cands.append(tuple(a + b for a, b in zip(basis[i], basis[j])))
    for yb in cands:
        if la.bilinear(G, yb, yb) != 0:
            y = tuple(val.lift(c) for c in yb)
            # make y exactly orthogonal to w: y - (b(y,w)/b(w,w)) w stays integral
            c = q.b(y, w) / q.b(w, w)
            y = tuple(a - c * b for a, b in zip(y, w))
            if val.val(q.q(y)) == 0:
                return y
    return None


def cancel(q1: QuadForm, q2: QuadForm, q: QuadForm, witness: Similarity) -> Similarity:
    """From an isometry q1 + q -> q2 + q (q regular diagonal) produce q1 -> q2."""
    F = q.F
    if not q.is_diagonal() or q.det() == 0:
        raise DegenerateForm("cancelled form must be regular and diagonal")
    src, tgt = q1.perp(q), q2.perp(q)
    if witness.factor != 1 or len(witness.matrix) != src.n:
        raise InvalidWitness("witness is not an isometry of the padded forms")
    if not Similarity(witness.matrix, F.one, src, tgt).holds():
        raise InvalidWitness("witness violates M^T G' M = G")
    M = witness.matrix
    pad = list(q.values())
    n = q1.n
    while pad:
        N = len(M)
        S = QuadForm(F, la.block_diag(F, q1.gram, QuadForm.diagonal(F, pad).gram))
        T = QuadForm(F, la.block_diag(F, q2.gram, QuadForm.diagonal(F, pad).gram))
        e = tuple(F.one if i == N - 1 else F.zero for i in range(N))
        img = la.mat_vec(M, e)
        tr = transport(T, img, e).isometry
        M = la.mat_mul(tr.matrix, M)
        assert all(M[N - 1][j] == 0 for j in range(N - 1)) and all(M[i][N - 1] == 0 for i in range(N - 1))
        M = tuple(r[: N - 1] for r in M[: N - 1])
        pad.pop()
    out = Similarity(M, F.one, q1, q2)
    if not out.holds():
        raise InvalidWitness("cancellation produced a non-isometry")
    assert len(M) == n
    return out


# ---------------------------------------------------------------------------
# Eichler isometries on q + h, with h(x e + y f) = 2 x y


def eichler_hyperbolic(F: Field) -> QuadForm:
    """The hyperbolic plane used for Eichler maps: Gram [[0,2],[2,0]], so that
    E_v(f) = -v - q(v)/2 e + f is an isometry."""
    return QuadForm.from_gram(F, [[0, 2], [2, 0]])


def _total(q: QuadForm) -> QuadForm:
    return q.perp(eichler_hyperbolic(q.F))


def _eichler_matrix(q: QuadForm, v, star: bool):
    F = q.F
    n = q.n
    N = n + 2
    ie, jf = (n + 1, n) if star else (n, n + 1)  # index of the fixed vector, of the moved one
    cols = []
    half = F.one / 2
    qv = q.q(v)
    for j in range(N):
        col = [F.zero] * N
        col[j] = F.one
        if j < n:
            col[ie] = half * q.b(v, q.basis(j))
        elif j == jf:
            for i in range(n):
                col[i] = -v[i]
            col[ie] = -half * qv
        cols.append(col)
    return la.transpose(cols)


def eichler_E(q: QuadForm, v) -> Similarity:
    T = _total(q)
    return Similarity(_eichler_matrix(q, tuple(q.F.coerce(x) for x in v), False), q.F.one, T, T)


def eichler_E_star(q: QuadForm, v) -> Similarity:
    T = _total(q)
    return Similarity(_eichler_matrix(q, tuple(q.F.coerce(x) for x in v), True), q.F.one, T, T)


def eichler_maps(q: QuadForm, v):
    return eichler_E(q, v), eichler_E_star(q, v)


def hyperbolic_alpha(q: QuadForm, u) -> Similarity:
    F = q.F
    n = q.n
    u = F.coerce(u)
    d = [F.one] * n + [u, 1 / u]
    T = _total(q)
    return Similarity(la.diag(F, d), F.one, T, T)


def hyperbolic_beta(q: QuadForm, u) -> Similarity:
    """beta_u(e) = u^{-1} f, beta_u(f) = u e."""
    F = q.F
    n = q.n
    u = F.coerce(u)
    rows = [[F.zero] * (n + 2) for _ in range(n + 2)]
    for i in range(n):
        rows[i][i] = F.one
    rows[n + 1][n] = 1 / u
    rows[n][n + 1] = u
    T = _total(q)
    return Similarity(la.mat(rows), F.one, T, T)


def hyperbolic_conjugation_check(q: QuadForm, v, u) -> bool:
    """The four conjugation identities between Eichler maps and O(h):
    a_u^-1 E_v a_u = E_{u^-1 v},  a_u^-1 E*_v a_u = E*_{u v},
    b_u^-1 E_v b_u = E*_{u^-1 v}, b_u^-1 E*_v b_u = E_{u v}."""
    F = q.F
    u = F.coerce(u)
    v = tuple(F.coerce(x) for x in v)
    a, ai = hyperbolic_alpha(q, u), hyperbolic_alpha(q, 1 / u)
    b = hyperbolic_beta(q, u)
    binv = b.inverse()
    uv = tuple(u * x for x in v)
    uiv = tuple(x / u for x in v)
    conj = lambda X, G, Gi: la.mat_mul(la.mat_mul(Gi.matrix, X.matrix), G.matrix)
    checks = [
        conj(eichler_E(q, v), a, ai) == eichler_E(q, uiv).matrix,
        conj(eichler_E_star(q, v), a, ai) == eichler_E_star(q, uv).matrix,
        conj(eichler_E(q, v), b, binv) == eichler_E_star(q, uiv).matrix,
        conj(eichler_E_star(q, v), b, binv) == eichler_E(q, uv).matrix,
    ]
    return all(checks)


@dataclass(frozen=True)
class Generator:
    kind: str  # "E", "E*", "alpha", "beta"
    param: object  # vector for E/E*, scalar for alpha/beta

    def matrix(self, q: QuadForm):
        if self.kind == "E":
            return eichler_E(q, self.param).matrix
        if self.kind == "E*":
            return eichler_E_star(q, self.param).matrix
        if self.kind == "alpha":
            return hyperbolic_alpha(q, self.param).matrix
        return hyperbolic_beta(q, self.param).matrix

    def fmt(self, F):
        if self.kind in ("E", "E*"):
            return f"{self.kind}(" + ",".join(F.fmt(x) for x in self.param) + ")"
        return f"{self.kind}({F.fmt(self.param)})"


@dataclass(frozen=True)
class EichlerDecomposition:
    generators: tuple  # of Generator, E or E*
    tail: Generator  # alpha or beta

    def product(self, q: QuadForm):
        M = la.identity(q.F, q.n + 2)
        for g in self.generators + (self.tail,):
            M = la.mat_mul(M, g.matrix(q))
        return M


def _push_right(tokens):
    """Rewrite a word in E, E*, alpha, beta so every alpha/beta sits at the
    right end, using the conjugation identities; merge the O(h) part."""
    out = []
    tail = ("alpha", 1)
    # process from the right; out holds the E-part already right of the
    # current token. A token A in O(h) moves right via A X = (A X A^-1) A.
    for kind, p in reversed(tokens):
        if kind in ("alpha", "beta"):
            out = [_conjugate((kind, p), t) for t in out]
            tail = _oh_mul((kind, p), tail)
        else:
            out.insert(0, (kind, p))
    return out, tail


def _conjugate(A, X):
    """A X A^-1 for A = alpha_u or beta_u and X = E_v or E*_v."""
    (ka, u), (kx, v) = A, X
    if ka == "alpha":
        if kx == "E":
            return ("E", tuple(x * u for x in v))
        return ("E*", tuple(x / u for x in v))
    # beta_u is an involution: beta_u E_v beta_u = E*_{v/u}
    if kx == "E":
        return ("E*", tuple(x / u for x in v))
    return ("E", tuple(x * u for x in v))


def _oh_mul(a, b):
    """Product a*b of alpha/beta elements."""
    (ka, u), (kb, w) = a, b
    if ka == "alpha" and kb == "alpha":
        return ("alpha", u * w)
    if ka == "beta" and kb == "beta":
        return ("alpha", u / w)
    if ka == "alpha" and kb == "beta":
        return ("beta", w * u)
    return ("beta", u / w)  # beta_u alpha_w


def eichler_decompose(phi: Similarity, q: QuadForm) -> EichlerDecomposition:
    F = q.F
    if not F.is_field:
        raise UnsupportedDomain("eichler_decompose needs a field")
    if q.det() == 0:
        raise DegenerateForm("q must be regular")
    T = _total(q)
    n = q.n
    if not Similarity(phi.matrix, F.one, T, T).holds():
        raise DecompositionFailure("input is not an isometry of q + h")
    g = phi.matrix
    left = []  # tokens L with L g = current
    col = lambda M, j: tuple(M[i][j] for i in range(n + 2))
    y = col(g, n)
    yV, ye, yf = y[:n], y[n], y[n + 1]
    if yf == 0 and ye == 0:
        w = next(q.basis(i) for i in range(n) if q.b(q.basis(i), yV) != 0)
        left.append(("E*", w))
        g = la.mat_mul(eichler_E_star(q, w).matrix, g)
        y = col(g, n)
        yV, ye, yf = y[:n], y[n], y[n + 1]
    if yf != 0:
        c = tuple(x / yf for x in yV)
        left.append(("E", c))
        g = la.mat_mul(eichler_E(q, c).matrix, g)
        left.append(("beta", 1 / yf))
        g = la.mat_mul(hyperbolic_beta(q, 1 / yf).matrix, g)
    else:
        c = tuple(x / ye for x in yV)
        left.append(("E*", c))
        g = la.mat_mul(eichler_E_star(q, c).matrix, g)
        left.append(("alpha", 1 / ye))
        g = la.mat_mul(hyperbolic_alpha(q, 1 / ye).matrix, g)
    if col(g, n) != tuple(F.one if i == n else F.zero for i in range(n + 2)):
        raise DecompositionFailure("failed to normalize the image of e")
    z = col(g, n + 1)
    zV = z[:n]
    left.append(("E", zV))
    g = la.mat_mul(eichler_E(q, zV).matrix, g)
    sigma = tuple(r[:n] for r in g[:n])
    if la.block_diag(F, sigma, la.identity(F, 2)) != g:
        raise DecompositionFailure("remainder does not fix the hyperbolic plane")
    # sigma = r_{x_1} ... r_{x_k}
    xs = _reflection_word(q, sigma)
    word = []
    for x in xs:
        c = q.q(x)
        lam = 2 / c
        word += [("E", x), ("E*", tuple(lam * a for a in x)), ("E", x), ("beta", -c / 2)]
    # phi = L^-1 g with L = l_k ... l_1 (l_1 applied first)
    inv = [_inverse_token(t) for t in left]  # L^-1 = l_1^-1 ... l_k^-1
    tokens, tail = _push_right(inv + word)
    gens = tuple(Generator(k, p) for k, p in tokens if any(x != 0 for x in p))
    dec = EichlerDecomposition(gens, Generator(*tail))
    if dec.product(q) != phi.matrix:
        raise DecompositionFailure("recomposition does not reproduce the input")
    return dec


def _inverse_token(t):
    kind, p = t
    if kind in ("E", "E*"):
        return (kind, tuple(-x for x in p))
    if kind == "alpha":
        return ("alpha", 1 / p)
    return ("beta", p)


def _reflection_word(q: QuadForm, sigma):
    """Vectors x_1..x_k with sigma = r_{x_1} ... r_{x_k}."""
    F = q.F
    n = q.n
    fixed = []
    applied = []  # reflections applied on the left, in order
    cur = sigma
    for _ in range(n):
        comp = la.nullspace(tuple(la.mat_vec(q.gram, f) for f in fixed), F) if fixed else [q.basis(i) for i in range(n)]
        x = next((c for c in comp if q.q(c) != 0), None)
        if x is None:
            x = next(
                tuple(a + b for a, b in zip(comp[i], comp[j]))
                for i in range(len(comp))
                for j in range(i + 1, len(comp))
                if q.b(comp[i], comp[j]) != 0
            )
        tr = transport(q, la.mat_vec(cur, x), x)
        cur = la.mat_mul(tr.isometry.matrix, cur)
        # tr.isometry = r_{xs[0]} r_{xs[1]} ...: the last listed acts first
        applied.extend(reversed(tr.reflections))
        fixed.append(x)
    if cur != la.identity(F, n):
        raise DecompositionFailure("orthogonal part did not reduce to the identity")
    # cur = r_{applied[-1]} ... r_{applied[0]} sigma = I  =>  sigma = r_{applied[0]} ... r_{applied[-1]}
    out = list(applied)
    M = la.identity(F, n)
    for x in out:
        M = la.mat_mul(M, reflection(q, x).matrix)
    if M != sigma:
        raise DecompositionFailure("reflection word does not reproduce the orthogonal part")
    return out


# ---------------------------------------------------------------------------
# Block relations for the orthogonal group of q1 + <pi>


def orthogonal_relations_check(A, v, w, u, Q1, pi, valuation: Valuation | None = None, F: Field | None = None):
    """Check the relations satisfied by M = [[A, v], [w, u]] preserving
    Q1 + <pi> (Gram-level): A^T Q1 A + pi w^T w = Q1, A^T Q1 v + u pi w^T = 0,
    v^T Q1 v + pi u^2 = pi. With a valuation at which pi lies in the maximal
    ideal, also check the consequences v = 0 and u^2 = 1 modulo pi."""
    n = len(A)
    At = la.transpose(A)
    lhs1 = la.mat_add(la.congruence(A, Q1), tuple(tuple(pi * w[i] * w[j] for j in range(n)) for i in range(n)))
    ok1 = lhs1 == tuple(tuple(x for x in r) for r in Q1)
    AQv = la.mat_vec(la.mat_mul(At, Q1), v)
    ok2 = all(AQv[i] + u * pi * w[i] == 0 for i in range(n))
    ok3 = la.bilinear(Q1, v, v) + pi * u * u == pi
    ok = ok1 and ok2 and ok3
    if ok and valuation is not None and valuation.val(pi) > 0:
        # Q1 regular mod pi forces v = 0 and u^2 = 1 in R/pi
        vbar = all(valuation.val(x) > 0 for x in v if x != 0)
        ubar = valuation.val(u * u - 1) > 0 if u * u != 1 else True
        ok = vbar and ubar
    return ok
