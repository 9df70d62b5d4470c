"""Even Clifford algebras of diagonal forms of rank at most 4.

Basis monomials are indexed by subsets of {1..n}; e_i^2 = a_i where a_i are
the q-values of the diagonal form, e_i e_j = -e_j e_i. The even part C0 is
stored as a structure-constant table over the base ring.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import linalg as la
from .errors import ContractViolation, DegenerateForm, NotInLieAlgebra, RankOutOfRange
from .fieldtower import DualNumbers, Field, QuadraticEtale
from .quadform import QuadForm, Similarity
from .quaternion import QuaternionAlgebra


def monomial_product(S, T):
    """e_S * e_T = sign * prod(a_i for i in squared) * e_U.

    Returns (sign, squared indices, U) with S, T, U sorted tuples.
    """
    R = list(S)
    sign = 1
    squared = []
    for t in T:
        greater = sum(1 for r in R if r > t)
        if greater % 2:
            sign = -sign
        if t in R:
            R.remove(t)
            squared.append(t)
        else:
            R.append(t)
            R.sort()
    return sign, tuple(squared), tuple(R)


def subsets(n, parity=None):
    out = []
    for k in range(n + 1):
        if parity is not None and k % 2 != parity:
            continue
        out.extend(itertools.combinations(range(1, n + 1), k))
    return out


def label(S) -> str:
    return "1" if not S else "e" + "".join(str(i) for i in S)


@dataclass
class CliffordTable:
    """Structure constants on a list of monomials closed under products."""

    F: Field
    coeffs: tuple
    basis: list
    table: dict = field(default_factory=dict)  # (i, j) -> (coef, k)

    @classmethod
    def build(cls, F, coeffs, basis):
        index = {S: i for i, S in enumerate(basis)}
        T = cls(F, tuple(coeffs), list(basis))
        for i, S in enumerate(basis):
            for j, U in enumerate(basis):
                sign, sq, R = monomial_product(S, U)
                c = F.one if sign > 0 else -F.one
                for s in sq:
                    c = c * coeffs[s - 1]
                T.table[(i, j)] = (c, index[R])
        return T

    @property
    def dim(self):
        return len(self.basis)

    def zero(self):
        return tuple(self.F.zero for _ in self.basis)

    def unit(self, i, c=None):
        c = self.F.one if c is None else c
        return tuple(c if k == i else self.F.zero for k in range(self.dim))

    def one(self):
        return self.unit(0)

    def mul(self, x, y):
        out = [self.F.zero] * self.dim
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                c, k = self.table[(i, j)]
                if c != 0:
                    out[k] = out[k] + c * xi * yj
        return tuple(out)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def scale(self, c, x):
        return tuple(c * a for a in x)

    def commutator(self, x, y):
        return self.sub(self.mul(x, y), self.mul(y, x))

    def element(self, terms: dict):
        """Element from {label: coefficient}."""
        idx = {label(S): i for i, S in enumerate(self.basis)}
        out = [self.F.zero] * self.dim
        for name, c in terms.items():
            out[idx[name]] = out[idx[name]] + self.F.coerce(c)
        return tuple(out)

    def fmt(self, x) -> str:
        parts = []
        for S, c in zip(self.basis, x):
            if c == 0:
                continue
            cs = self.F.fmt(c)
            if not S:
                parts.append(cs)
            elif cs == "1":
                parts.append(label(S))
            elif cs == "-1":
                parts.append("-" + label(S))
            else:
                parts.append(f"({cs})*{label(S)}" if any(ch in cs[1:] for ch in "+-/ ") else f"{cs}*{label(S)}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def is_associative(self) -> bool:
        d = self.dim
        for i, j, k in itertools.product(range(d), repeat=3):
            x, y, z = self.unit(i), self.unit(j), self.unit(k)
            if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)):
                return False
        return True


def clifford_full(F: Field, coeffs) -> CliffordTable:
    """The full Clifford algebra (dimension 2^n), used for generator relations
    and for images of odd vectors under similarities."""
    n = len(coeffs)
    return CliffordTable.build(F, [F.coerce(a) for a in coeffs], subsets(n))


@dataclass
class EvenCliffordAlgebra:
    F: Field
    coeffs: tuple
    n: int
    alg: CliffordTable

    @property
    def dim(self):
        return self.alg.dim

    @property
    def basis(self):
        return self.alg.basis

    @property
    def labels(self):
        return [label(S) for S in self.alg.basis]

    def mul(self, x, y):
        return self.alg.mul(x, y)

    def check_relations(self) -> bool:
        """e_i^2 = a_i and e_i e_j = -e_j e_i in the full Clifford algebra;
        C0 closed under products; associativity of C0."""
        full = clifford_full(self.F, self.coeffs)
        idx = {S: i for i, S in enumerate(full.basis)}
        for i in range(1, self.n + 1):
            ei = full.unit(idx[(i,)])
            if full.mul(ei, ei) != full.unit(0, self.coeffs[i - 1]):
                return False
            for j in range(i + 1, self.n + 1):
                ej = full.unit(idx[(j,)])
                if full.mul(ei, ej) != full.scale(-self.F.one, full.mul(ej, ei)):
                    return False
        return self.alg.is_associative()

    def dump(self) -> list:
        """Basis labels and nonzero products, e.g. `e12*e13 = -a1*e23`."""
        lines = ["basis: " + ", ".join(self.labels)]
        lines.append("coefficients: " + ", ".join(f"a{i + 1}={self.F.fmt(a)}" for i, a in enumerate(self.coeffs)))
        B = self.alg.basis
        for i, S in enumerate(B):
            for j, T in enumerate(B):
                if not S or not T:
                    continue
                c, k = self.alg.table[(i, j)]
                if c == 0:
                    continue
                sign, sq, R = monomial_product(S, T)
                sym = "*".join(f"a{s}" for s in sq)
                target = label(R)
                if sym:
                    rhs = sym if target == "1" else f"{sym}*{target}"
                else:
                    rhs = target
                lines.append(f"{label(S)}*{label(T)} = {'-' if sign < 0 else ''}{rhs}")
        return lines


def even_clifford(q: QuadForm) -> EvenCliffordAlgebra:
    if not q.is_diagonal():
        raise ContractViolation("even_clifford needs a diagonal form; diagonalize first")
    n = q.n
    if n not in (2, 3, 4):
        raise RankOutOfRange(f"rank {n} is outside 2..4")
    coeffs = tuple(q.values())
    alg = CliffordTable.build(q.F, coeffs, subsets(n, parity=0))
    return EvenCliffordAlgebra(q.F, coeffs, n, alg)


def even_clifford_of(F: Field, coeffs) -> EvenCliffordAlgebra:
    return even_clifford(QuadForm.diagonal(F, list(coeffs)))


# ---------------------------------------------------------------------------
# Center


@dataclass(frozen=True)
class CenterDescription:
    rank: int
    basis: tuple
    generator: object = None  # algebra element z with Z = K + K z when rank 2
    relation: tuple = None  # (s, t) with z^2 = s + t z

    def lines(self, C: EvenCliffordAlgebra):
        out = [f"center-rank: {self.rank}"]
        if self.generator is not None:
            s, t = self.relation
            out.append(f"generator: {C.alg.fmt(self.generator)}")
            rel = C.F.fmt(s)
            if t != 0:
                rel += f" + ({C.F.fmt(t)})*z"
            out.append(f"relation: z^2 = {rel}")
        else:
            out.append("basis: " + "; ".join(C.alg.fmt(b) for b in self.basis))
        return out


def center(C: EvenCliffordAlgebra) -> CenterDescription:
    if not C.F.is_field:
        raise ContractViolation("center computation needs a field base")
    A = C.alg
    d = A.dim
    F = C.F
    rows = []
    for k in range(d):
        bk = A.unit(k)
        cols = [A.commutator(A.unit(i), bk) for i in range(d)]
        for r in range(d):
            rows.append(tuple(cols[i][r] for i in range(d)))
    Z = la.nullspace(rows, F)
    for z in Z:
        assert all(A.commutator(z, A.unit(k)) == A.zero() for k in range(d))
    rank = len(Z)
    if rank != 2:
        return CenterDescription(rank, tuple(Z))
    top = tuple(range(1, C.n + 1))
    if C.n == 4 and top in A.basis:
        z = A.unit(A.basis.index(top))
    else:
        z = next(v for v in Z if any(c != 0 for c in v[1:]))
    z2 = A.mul(z, z)
    # z^2 = s + t z
    j = next(i for i in range(1, d) if z[i] != 0)
    t = z2[j] / z[j]
    rest = A.sub(z2, A.scale(t, z))
    s = rest[0]
    assert rest == A.unit(0, s)
    return CenterDescription(2, tuple(Z), z, (s, t))


def radical_rank_diag(coeffs) -> int:
    return sum(1 for a in coeffs if a == 0)


# ---------------------------------------------------------------------------
# Quaternionization of the rank-4 even Clifford algebra


@dataclass
class Quaternionization:
    algebra: QuaternionAlgebra
    L: QuadraticEtale
    images: dict  # quaternion basis label -> C0 element
    center_scale: object  # r with z = r s, z = e1234, s^2 = d
    verified: bool

    def lines(self, C: EvenCliffordAlgebra):
        Q = self.algebra
        out = [f"center: z = e1234, z^2 = {C.F.fmt(self.center_scale ** 2 * self.L.d)}"]
        out.append(f"L: {self.L.descriptor()}{' (split)' if self.L.split else ''}")
        out.append(f"symbol: ({Q.L.fmt(Q.a)}, {Q.L.fmt(Q.b)})")
        for k in ("i", "j", "k"):
            out.append(f"{k} -> {C.alg.fmt(self.images[k])}")
        out.append(f"isomorphism-verified: {str(self.verified).lower()}")
        return out


def quaternionize(C: EvenCliffordAlgebra) -> Quaternionization:
    if C.n != 4:
        raise RankOutOfRange("quaternionize needs rank 4")
    a1, a2, a3, a4 = C.coeffs
    if any(a == 0 for a in C.coeffs):
        raise DegenerateForm("quaternionize needs a nondegenerate form")
    K = C.F
    delta = a1 * a2 * a3 * a4
    d = K.squareclass(delta)
    r = K.sqrt(delta / d)
    L = QuadraticEtale(K, d)
    Q = QuaternionAlgebra(L, L.coerce(-a1 * a2), L.coerce(-a1 * a3))
    A = C.alg
    e12 = A.element({"e12": 1})
    e13 = A.element({"e13": 1})
    images = {"1": A.one(), "i": e12, "j": e13, "k": A.mul(e12, e13)}
    z = A.element({"e1234": 1})
    verified = _verify_quaternionization(C, Q, L, images, z, r)
    if not verified:
        raise AssertionError("quaternionization failed verification")
    return Quaternionization(Q, L, images, r, verified)


def _to_c0(C, L, images, z, r, x):
    """Image in C0 of a quaternion x = (x0, x1, x2, x3) over L, where
    s in L maps to z / r."""
    A = C.alg
    out = A.zero()
    zs = A.scale(1 / r, z)
    for coeff, name in zip(x, ("1", "i", "j", "k")):
        p0, p1 = L.parts(coeff)
        img = images[name]
        out = A.add(out, A.scale(p0, img))
        out = A.add(out, A.scale(p1, A.mul(zs, img)))
    return out


def _verify_quaternionization(C, Q, L, images, z, r) -> bool:
    A = C.alg
    K = C.F
    # K-basis of the quaternion algebra over L: s^e * basis
    qbasis = []
    for e in (0, 1):
        c = L.one if e == 0 else L.gen()
        for m in range(4):
            qbasis.append(tuple(c if t == m else L.zero for t in range(4)))
    imgs = [_to_c0(C, L, images, z, r, x) for x in qbasis]
    if la.rank(imgs) != A.dim:
        return False
    for x in qbasis:
        for y in qbasis:
            if _to_c0(C, L, images, z, r, Q.mul(x, y)) != A.mul(_to_c0(C, L, images, z, r, x), _to_c0(C, L, images, z, r, y)):
                return False
    return True


# ---------------------------------------------------------------------------
# Functoriality


@dataclass
class C0Map:
    source: EvenCliffordAlgebra
    target: EvenCliffordAlgebra
    matrix: tuple  # column i is the image of basis element i

    def apply(self, x):
        return la.mat_vec(self.matrix, x)


def c0_functor(psi: Similarity) -> C0Map:
    """C0(psi): e_i e_j -> lambda^{-1} psi(e_i) psi(e_j) for a similarity
    psi: q -> q' with M^T G' M = lambda G (both forms diagonal)."""
    q, q2 = psi.source, psi.target
    if not psi.holds():
        raise ContractViolation("similarity contract fails")
    C, C2 = even_clifford(q), even_clifford(q2)
    F = q.F
    full = clifford_full(F, C2.coeffs)
    fidx = {S: i for i, S in enumerate(full.basis)}
    M = psi.matrix
    n = q.n
    vec_img = []
    for i in range(n):
        v = full.zero()
        for k in range(n):
            v = full.add(v, full.unit(fidx[(k + 1,)], M[k][i]))
        vec_img.append(v)
    lam_inv = 1 / psi.factor
    cols = []
    for S in C.basis:
        x = full.one()
        for i in S:
            x = full.mul(x, vec_img[i - 1])
        x = full.scale(lam_inv ** (len(S) // 2), x)
        cols.append(tuple(x[fidx[T]] for T in C2.basis))
    mat = la.transpose(cols)
    phi = C0Map(C, C2, mat)
    if la.rank(cols) != C.dim:
        raise ContractViolation("C0 image is not bijective")
    A, B = C.alg, C2.alg
    for i in range(C.dim):
        for j in range(C.dim):
            xi, xj = A.unit(i), A.unit(j)
            if phi.apply(A.mul(xi, xj)) != B.mul(phi.apply(xi), phi.apply(xj)):
                raise ContractViolation("C0 image is not multiplicative")
    return phi


def compose_c0(psi2: C0Map, psi1: C0Map) -> C0Map:
    return C0Map(psi1.source, psi2.target, la.mat_mul(psi2.matrix, psi1.matrix))


# ---------------------------------------------------------------------------
# The degenerate fiber <1,-1,1,0> and its dual-number matrix model


DEGENERATE_COEFFS = (1, -1, 1, 0)


def _m2(D, rows):
    return tuple(tuple(D.coerce(x) for x in r) for r in rows)


@dataclass
class DualIso:
    k: Field
    D: DualNumbers
    C: EvenCliffordAlgebra
    images: dict  # label -> 2x2 matrix over D
    verified: bool

    def lines(self):
        out = [f"field: {self.k.descriptor()}", f"target: M2({self.D.descriptor()})"]
        for lab in self.C.labels:
            out.append(f"{lab} -> {la.fmt_matrix(self.D, self.images[lab])}")
        out.append(f"isomorphism-verified: {str(self.verified).lower()}")
        return out

    def apply(self, x):
        D = self.D
        out = la.zeros(D, 2)
        for lab, c in zip(self.C.labels, x):
            if c != 0:
                out = la.mat_add(out, la.mat_scale(D.coerce(c), self.images[lab]))
        return out


def degenerate_c0_iso(k: Field) -> DualIso:
    """psi: C0(<1,-1,1,0>) -> M2(k[eps]) extending
    1, e12, e23, e13 -> I, [[0,1],[1,0]], [[1,0],[0,-1]], [[0,1],[-1,0]] and
    e1234 -> eps I."""
    if k.characteristic == 2:
        raise ContractViolation("characteristic 2")
    D = DualNumbers(k)
    C = even_clifford_of(k, DEGENERATE_COEFFS)
    eps = D.eps()
    I = la.identity(D, 2)
    X = _m2(D, [[0, 1], [1, 0]])
    Z = _m2(D, [[1, 0], [0, -1]])
    Y = _m2(D, [[0, 1], [-1, 0]])
    E = la.mat_scale(eps, I)
    images = {
        "1": I,
        "e12": X,
        "e13": Y,
        "e23": Z,
        # e14 = eps e23, e24 = eps e13, e34 = eps e12, e1234 = eps
        "e14": la.mat_mul(E, Z),
        "e24": la.mat_mul(E, Y),
        "e34": la.mat_mul(E, X),
        "e1234": E,
    }
    iso = DualIso(k, D, C, images, False)
    iso.verified = _verify_dual_iso(iso)
    if not iso.verified:
        raise AssertionError("dual-number isomorphism failed verification")
    return iso


def _matrix_coords(D, M):
    return tuple(c for row in M for x in row for c in (x.a, x.b))


def _verify_dual_iso(iso: DualIso) -> bool:
    A = iso.C.alg
    k = iso.k
    # bijective as k-linear map (8 x 8)
    cols = [_matrix_coords(iso.D, iso.images[lab]) for lab in iso.C.labels]
    if la.rank(cols) != 8:
        return False
    for i in range(A.dim):
        for j in range(A.dim):
            x, y = A.unit(i), A.unit(j)
            if iso.apply(A.mul(x, y)) != la.mat_mul(iso.apply(x), iso.apply(y)):
                return False
    # eps-linearity: multiplication by e1234 corresponds to eps
    z = A.element({"e1234": 1})
    for i in range(A.dim):
        x = A.unit(i)
        if iso.apply(A.mul(z, x)) != la.mat_scale(iso.D.eps(), iso.apply(x)):
            return False
    return True


def unipotent_matrix(k: Field, a, b, c):
    """phi_{a,b,c}: e_j -> e_j + (a,b,c)_j e_4 (columns are images)."""
    a, b, c = k.coerce(a), k.coerce(b), k.coerce(c)
    rows = la.identity(k, 4)
    rows = [list(r) for r in rows]
    rows[3][0], rows[3][1], rows[3][2] = a, b, c
    return la.mat(rows)


def sl2_of(D, a, b, c):
    """The trace-zero matrix [[a, -b+c], [b+c, -a]]."""
    return _m2(D, [[a, -b + c], [b + c, -a]])


@dataclass
class UnipotentAction:
    phi: tuple  # 4x4 over k
    sigma: tuple  # 2x2 over k[eps]
    checks: dict

    @property
    def ok(self):
        return all(self.checks.values())


def unipotent_action(k: Field, a, b, c, iso: DualIso | None = None) -> UnipotentAction:
    iso = iso or degenerate_c0_iso(k)
    a, b, c = k.coerce(a), k.coerce(b), k.coerce(c)
    D = iso.D
    eps = D.eps()
    half = 1 / k.coerce(2)
    C = iso.C
    A = C.alg
    phi = unipotent_matrix(k, a, b, c)
    # orthogonality for <1,-1,1,0>
    q = QuadForm.diagonal(k, list(DEGENERATE_COEFFS))
    orth = la.congruence(phi, q.gram) == q.gram
    # induced automorphism of C0: e_i e_j -> phi(e_i) phi(e_j)
    full = clifford_full(k, DEGENERATE_COEFFS)
    fidx = {S: i for i, S in enumerate(full.basis)}
    vecs = []
    for i in range(4):
        v = full.zero()
        for r in range(4):
            v = full.add(v, full.unit(fidx[(r + 1,)], phi[r][i]))
        vecs.append(v)

    def induced(x):
        out = full.zero()
        for S, coef in zip(C.basis, x):
            if coef == 0:
                continue
            m = full.one()
            for i in S:
                m = full.mul(m, vecs[i - 1])
            out = full.add(out, full.scale(coef, m))
        return tuple(out[fidx[T]] for T in C.basis)

    el = lambda terms: A.element(terms)
    epsA = el({"e1234": 1})
    e12, e23, e13 = el({"e12": 1}), el({"e23": 1}), el({"e13": 1})
    em = lambda x, y: A.mul(x, y)
    expected = {
        "e12": A.add(e12, A.add(A.scale(b, em(epsA, e23)), A.scale(-a, em(epsA, e13)))),
        "e23": A.add(e23, A.add(A.scale(c, em(epsA, e13)), A.scale(-b, em(epsA, e12)))),
        "e13": A.add(e13, A.add(A.scale(c, em(epsA, e23)), A.scale(-a, em(epsA, e12)))),
    }
    checks = {"orthogonal": orth}
    for lab, exp in expected.items():
        checks[f"sigma({lab})"] = induced(el({lab: 1})) == exp
    checks["sigma(eps)"] = induced(epsA) == epsA
    # ad(1 - eps X / 2) with X = c e12 + a e23 - b e13, checked on all of C0
    X = A.add(A.scale(c, e12), A.add(A.scale(a, e23), A.scale(-b, e13)))
    g = A.sub(A.one(), A.scale(half, em(epsA, X)))
    ginv = A.add(A.one(), A.scale(half, em(epsA, X)))
    checks["g*ginv=1"] = em(g, ginv) == A.one()
    checks["ad-identity"] = all(
        induced(A.unit(i)) == em(em(g, A.unit(i)), ginv) for i in range(A.dim)
    )
    # psi(X) is the displayed trace-zero matrix
    checks["psi(X)"] = iso.apply(X) == sl2_of(D, a, b, c)
    sigma = la.mat_sub(la.identity(D, 2), la.mat_scale(eps * D.coerce(half), sl2_of(D, a, b, c)))
    checks["psi(g)"] = iso.apply(g) == sigma
    return UnipotentAction(phi, sigma, checks)


def unipotent_injectivity(k: Field) -> bool:
    """(a,b,c) -> trace-zero matrix [[a,-b+c],[b+c,-a]] is injective."""
    rows = [(1, 0, 0), (0, -1, 1), (0, 1, 1), (-1, 0, 0)]
    return la.rank(la.mat([[k.coerce(x) for x in r] for r in rows])) == 3


# ---------------------------------------------------------------------------
# Lie algebra maps for <1,-1,1>


Q1_DIAG = (1, -1, 1)


def so_q1_basis_matrix(k: Field, a, b, c):
    """[[0, a, -b], [a, 0, c], [b, c, 0]], the displayed element of so(q1)."""
    return la.mat([[k.zero, k.coerce(a), -k.coerce(b)], [k.coerce(a), k.zero, k.coerce(c)], [k.coerce(b), k.coerce(c), k.zero]])


def so_q1_coords(k: Field, A):
    """(a, b, c) of an element of so(q1) written in the displayed shape."""
    Q1 = la.diag(k, Q1_DIAG)
    AQ = la.mat_mul(A, Q1)
    if any(AQ[i][j] != -AQ[j][i] for i in range(3) for j in range(3)):
        raise NotInLieAlgebra("A*Q1 is not skew-symmetric")
    return A[0][1], A[2][0], A[1][2]


def alpha_map(k: Field, D, A):
    a, b, c = so_q1_coords(k, A)
    half = 1 / k.coerce(2)
    return la.mat_scale(D.coerce(half), sl2_of(D, a, b, c))


def beta_map(k: Field, D, w):
    a, b, c = (k.coerce(x) for x in w)
    half = 1 / k.coerce(2)
    return la.mat_scale(D.coerce(half), sl2_of(D, a, b, c))


@dataclass
class LieCheck:
    checks: dict
    notes: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())


def _bracket(X, Y):
    return la.mat_sub(la.mat_mul(X, Y), la.mat_mul(Y, X))


def induced_alpha(k: Field, A, iso: DualIso | None = None):
    """The 2x2 matrix Y with psi^{-1}(Y) inducing the derivation of C0 given by
    I + xA, i.e. D_A = -ad(psi^{-1} Y); computed by linear algebra."""
    iso = iso or degenerate_c0_iso(k)
    C = iso.C
    Al = C.alg
    M4 = [[k.zero] * 4 for _ in range(4)]
    for i in range(3):
        for j in range(3):
            M4[i][j] = A[i][j]
    gens = [Al.element({lab: 1}) for lab in ("e12", "e23", "e13")]
    rows, rhs = [], []
    for i in range(Al.dim):
        D = _derivation(C, M4, Al.unit(i))
        cols = [Al.scale(-k.one, Al.commutator(g, Al.unit(i))) for g in gens]
        for r in range(Al.dim):
            rows.append([c[r] for c in cols])
            rhs.append(D[r])
    sol = la.solve(rows, rhs, k)
    if sol is None:
        raise ContractViolation("derivation is not inner on the trace-zero part")
    Y = Al.zero()
    for c, g in zip(sol, gens):
        Y = Al.add(Y, Al.scale(c, g))
    M = iso.apply(Y)
    return tuple(tuple(x.a for x in r) for r in M)


def lie_map_check(k: Field, A, w) -> LieCheck:
    """Checks of the Lie-level maps for q = <1,-1,1,0>, q1 = <1,-1,1>:
    the product decomposition over k[eps, x]/(eps^2, x^2),
    (I - eps beta(x w)) (I - alpha(x A)) = I - x (alpha(A) + eps beta(w));
    alpha and beta are linear isomorphisms onto trace-zero matrices; alpha
    preserves brackets; beta(w) is the map induced on C0 by the translation
    part x w; the map induced on C0 by I + xA is an isomorphism so(q1) -> sl2.
    Whether the displayed alpha equals the induced map is recorded in notes."""
    A = la.mat([[k.coerce(x) for x in r] for r in A])
    so_q1_coords(k, A)
    De = DualNumbers(k, "eps")
    Dx = DualNumbers(De, "x")
    eps = Dx.coerce(De.eps())
    x = Dx.eps()
    lift = lambda M: tuple(tuple(Dx.coerce(De.coerce(e)) for e in r) for r in M)
    alpha = alpha_map(k, k, A)
    beta = beta_map(k, k, w)
    I = la.identity(Dx, 2)
    lhs = la.mat_mul(
        la.mat_sub(I, la.mat_scale(eps * x, lift(beta))),
        la.mat_sub(I, la.mat_scale(x, lift(alpha))),
    )
    rhs = la.mat_sub(I, la.mat_scale(x, la.mat_add(lift(alpha), la.mat_scale(eps, lift(beta)))))
    checks = {"product-decomposition": lhs == rhs}
    basis3 = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    Bs = [so_q1_basis_matrix(k, *t) for t in basis3]
    flat = lambda M: tuple(e for r in M for e in r)
    acols = [flat(alpha_map(k, k, B)) for B in Bs]
    bcols = [flat(beta_map(k, k, t)) for t in basis3]
    checks["alpha-rank-3"] = la.rank(acols) == 3 and all(c[0] + c[3] == 0 for c in acols)
    checks["beta-rank-3"] = la.rank(bcols) == 3 and all(c[0] + c[3] == 0 for c in bcols)
    checks["alpha-bracket"] = all(
        alpha_map(k, k, _bracket(B1, B2)) == _bracket(alpha_map(k, k, B1), alpha_map(k, k, B2)) for B1 in Bs for B2 in Bs
    )
    iso = degenerate_c0_iso(k)
    C = iso.C
    Al = C.alg
    W4 = [[k.zero] * 4 for _ in range(4)]
    for j in range(3):
        W4[3][j] = k.coerce(w[j])
    Yb = _preimage(iso, la.mat_scale(De.eps(), tuple(tuple(De.coerce(e) for e in r) for r in beta)))
    checks["beta-induced"] = all(
        _derivation(C, W4, Al.unit(i)) == Al.scale(-k.one, Al.commutator(Yb, Al.unit(i))) for i in range(Al.dim)
    )
    icols = [flat(induced_alpha(k, B, iso)) for B in Bs]
    checks["induced-alpha-rank-3"] = la.rank(icols) == 3
    notes = {"alpha-equals-induced": induced_alpha(k, A, iso) == alpha}
    return LieCheck(checks, notes)


def _preimage(iso: DualIso, Y):
    """C0 element mapping to the 2x2 matrix Y over k[eps]."""
    labs = iso.C.labels
    cols = [_matrix_coords(iso.D, iso.images[lab]) for lab in labs]
    M = la.transpose(cols)
    sol = la.solve(M, _matrix_coords(iso.D, Y), iso.k)
    if sol is None:
        raise ContractViolation("matrix outside the image")
    return sol


def _derivation(C: EvenCliffordAlgebra, M, x):
    """Derivation of C0 induced by the endomorphism M of V (columns are
    images of e_1..e_n)."""
    k = C.F
    full = clifford_full(k, C.coeffs)
    fidx = {S: i for i, S in enumerate(full.basis)}
    n = C.n
    vec = lambda i: full.unit(fidx[(i + 1,)])
    mv = []
    for i in range(n):
        v = full.zero()
        for r in range(n):
            v = full.add(v, full.scale(M[r][i], vec(r)))
        mv.append(v)
    out = full.zero()
    for S, coef in zip(C.basis, x):
        if coef == 0 or not S:
            continue
        # Leibniz rule over the word e_{s1} ... e_{sm}
        for pos in range(len(S)):
            m = full.one()
            for t, i in enumerate(S):
                m = full.mul(m, mv[i - 1] if t == pos else vec(i - 1))
            out = full.add(out, full.scale(coef, m))
    return tuple(out[fidx[T]] for T in C.basis)
