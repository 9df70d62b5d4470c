"""Quaternion symbols (a, b): i^2 = a, j^2 = b, ij = -ji = k.

Splitting certificates, tame residue symbols at discrete valuations, Hilbert
symbols over the global desk fields (Q and F_p(t)), and corestriction along a
quadratic etale extension for symbols with a descended slot.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .errors import (
    BudgetExhausted,
    DyadicPlace,
    SlotNotDescended,
    UnsupportedDomain,
    ZeroSlot,
)
from .fieldtower import (
    INF,
    DegreePlace,
    Field,
    GaussPlace,
    Poly,
    PolyPlace,
    PrimeField,
    QuadraticEtale,
    Rationals,
    RationalFunctionField,
    SimpleExtension,
    Valuation,
    etale_norm,
    factor_fp,
    sqf_decomposition,
)
from .quadform import QuadForm, isotropic_vector_finite

DEFAULT_BUDGET = 200000


# ---------------------------------------------------------------------------
# The algebra


@dataclass(frozen=True)
class QuaternionAlgebra:
    L: Field
    a: object
    b: object

    def __post_init__(self):
        if self.a == 0 or self.b == 0:
            raise ZeroSlot("quaternion slots must be nonzero")

    @classmethod
    def make(cls, L, a, b):
        return cls(L, L.coerce(a), L.coerce(b))

    def mul(self, x, y):
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        ab = a * b
        return (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - ab * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        )

    def norm(self, x):
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def basis(self):
        L = self.L
        return [tuple(L.one if i == j else L.zero for j in range(4)) for i in range(4)]

    def check_table(self) -> bool:
        """i^2 = a, j^2 = b, ij = -ji = k, k^2 = -ab and associativity on
        all basis triples."""
        one, i, j, k = self.basis()
        L = self.L
        neg = lambda v: tuple(-c for c in v)
        sc = lambda c, v: tuple(c * x for x in v)
        ok = (
            self.mul(i, i) == sc(self.a, one)
            and self.mul(j, j) == sc(self.b, one)
            and self.mul(i, j) == k
            and self.mul(j, i) == neg(k)
            and self.mul(k, k) == sc(-self.a * self.b, one)
        )
        B = self.basis()
        for x, y, z in itertools.product(B, repeat=3):
            if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)):
                return False
        return ok

    def fmt(self) -> str:
        return f"({self.L.fmt(self.a)}, {self.L.fmt(self.b)}) over {self.L.descriptor()}"


def norm_form(Q: QuaternionAlgebra) -> QuadForm:
    a, b = Q.a, Q.b
    return QuadForm.diagonal(Q.L, [1, -a, -b, a * b])


# ---------------------------------------------------------------------------
# Tame symbols and Hilbert symbols


def tame_residue(a, b, v: Valuation):
    """Residue of (-1)^{v(a)v(b)} a^{v(b)} / b^{v(a)} at v."""
    if v.residue_characteristic == 2:
        raise DyadicPlace("residue characteristic 2")
    F = v.field
    a, b = F.coerce(a), F.coerce(b)
    al, be = v.val(a), v.val(b)
    c = a**be / b**al
    if (al * be) % 2:
        c = -c
    return v.residue(c)


def residue_symbol(Q: QuaternionAlgebra, v: Valuation):
    """Square class of the tame residue; trivial iff Q is unramified at v."""
    r = tame_residue(Q.a, Q.b, v)
    return v.residue_field.squareclass(r)


def _is_fpt(K) -> bool:
    return isinstance(K, RationalFunctionField) and isinstance(K.base, PrimeField)


def is_global(K) -> bool:
    return isinstance(K, Rationals) or _is_fpt(K)


@dataclass(frozen=True)
class QPlace:
    """A place of Q: a prime p, or p = 0 for the real place."""

    p: int

    @property
    def name(self):
        return "inf" if self.p == 0 else str(self.p)


def _qval(x: Fraction, p: int) -> int:
    e = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        e += 1
    while d % p == 0:
        d //= p
        e -= 1
    return e


def _qunit(x: Fraction, p: int) -> Fraction:
    return x / Fraction(p) ** _qval(x, p)


def _legendre(u: Fraction, p: int) -> int:
    r = u.numerator * pow(u.denominator, -1, p) % p
    return 1 if pow(r, (p - 1) // 2, p) == 1 else -1


def hilbert_q(a, b, place: QPlace) -> int:
    a, b = Fraction(a), Fraction(b)
    p = place.p
    if p == 0:
        return -1 if a < 0 and b < 0 else 1
    al, be = _qval(a, p), _qval(b, p)
    u, v = _qunit(a, p), _qunit(b, p)
    if p == 2:
        um = u.numerator * u.denominator % 8
        vm = v.numerator * v.denominator % 8
        eps = lambda x: ((x - 1) // 2) % 2
        om = lambda x: ((x * x - 1) // 8) % 2
        e = eps(um) * eps(vm) + al * om(vm) + be * om(um)
        return -1 if e % 2 else 1
    s = 1
    if (al * be) % 2 and (p - 1) // 2 % 2:
        s = -s
    if be % 2:
        s *= _legendre(u, p)
    if al % 2:
        s *= _legendre(v, p)
    return s


def _q_primes(x: Fraction):
    from sympy import factorint

    return set(factorint(abs(x.numerator))) | set(factorint(x.denominator))


def _fpt_factors(K, x):
    out = []
    for P in (x.num, x.den):
        if P.deg() > 0:
            out += [g for g, _ in factor_fp(P)[1]]
    return out


def global_places(K, elems):
    """Places where some element is not a unit, plus 2 and inf (over Q) or the
    degree place (over F_p(t)); deterministic order."""
    if isinstance(K, Rationals):
        ps = {2}
        for x in elems:
            ps |= _q_primes(K.coerce(x))
        return [QPlace(0)] + [QPlace(p) for p in sorted(ps)]
    if _is_fpt(K):
        fs = {}
        for x in elems:
            for g in _fpt_factors(K, K.coerce(x)):
                fs[g] = None
        ordered = sorted(fs, key=lambda g: (g.deg(), tuple(c.v for c in g.c)))
        return [PolyPlace(K, g) for g in ordered] + [DegreePlace(K)]
    raise UnsupportedDomain(f"no place enumeration over {K.descriptor()}")


def place_name(place) -> str:
    if isinstance(place, QPlace):
        return place.name
    return place.name


def local_hilbert(K, a, b, place) -> int:
    if isinstance(place, QPlace):
        return hilbert_q(a, b, place)
    r = tame_residue(a, b, place)
    return 1 if place.residue_field.is_square(r) else -1


def local_is_square(K, d, place) -> bool:
    """Is d a square in the completion of K at place?"""
    if isinstance(place, QPlace):
        d = Fraction(d)
        if place.p == 0:
            return d > 0
        e = _qval(d, place.p)
        if e % 2:
            return False
        u = _qunit(d, place.p)
        if place.p == 2:
            return u.numerator * u.denominator % 8 == 1
        return _legendre(u, place.p) == 1
    e = place.val(d)
    if e % 2:
        return False
    return place.residue_field.is_square(place.residue(place.unit_part(d)))


def hilbert_obstructions(K, a, b, extra=()):
    """Places of the global field K where (a, b) is nonsplit."""
    return [pl for pl in global_places(K, [a, b, *extra]) if local_hilbert(K, a, b, pl) == -1]


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class SplitCertificate:
    verdict: str  # "split", "nonsplit", "unknown"
    kind: str  # "zero-divisor", "ramification", "local", "bound-exhausted"
    witness: object = None  # zero divisor (4-tuple over L)
    places: tuple = ()  # local witnesses: names of places with symbol -1
    valuation: object = None  # ramification witness (a Valuation)
    residue: object = None  # nonsquare residue class
    note: str = ""

    def lines(self, Q: QuaternionAlgebra):
        L = Q.L
        out = [f"algebra: {Q.fmt()}", f"verdict: {self.verdict}", f"witness-kind: {self.kind}"]
        if self.witness is not None:
            out.append("zero-divisor: (" + ", ".join(L.fmt(c) for c in self.witness) + ")")
            out.append("norm: 0")
        if self.places:
            out.append("local-witness-places: " + ", ".join(self.places))
        if self.valuation is not None:
            out.append(f"ramified-at: {self.valuation.kind}({self.valuation.name})")
        if self.residue is not None:
            out.append(f"residue-class: {self.residue}")
        if self.note:
            out.append(f"note: {self.note}")
        return out


def _split_cert(Q, x, note=""):
    if all(c == 0 for c in x) or Q.norm(x) != 0:
        raise AssertionError("zero-divisor witness failed re-verification")
    return SplitCertificate("split", "zero-divisor", witness=tuple(x), note=note)


def _enumerate_small(K, budget_state, max_deg=6):
    """Yield elements of K in a deterministic height order (finite fields:
    all elements; Q: small rationals; F_p(t): polynomials by degree)."""
    if K.is_finite:
        yield from K.elements()
        return
    if isinstance(K, Rationals):
        yield Fraction(0)
        for h in itertools.count(1):
            for n in range(-h, h + 1):
                for d in range(1, h + 1):
                    if max(abs(n), d) == h and _gcd(n, d) == 1:
                        yield Fraction(n, d)
        return
    if isinstance(K, RationalFunctionField):
        base_elts = list(_finite_prefix(K.base, 25))
        for deg in range(0, max_deg + 1):
            for coeffs in itertools.product(base_elts, repeat=deg + 1):
                if deg > 0 and coeffs[-1] == 0:
                    continue
                yield K.poly(list(coeffs))
        return
    raise UnsupportedDomain(f"cannot enumerate {K.descriptor()}")


def _gcd(a, b):
    import math

    return math.gcd(a, b)


def _finite_prefix(K, n):
    gen = _enumerate_small(K, None, max_deg=1)
    return itertools.islice(gen, n)


def _poly_layers(K, max_deg):
    """Polynomials over K (finite base) grouped by degree bound."""
    base = K.base.elements() if K.base.is_finite else list(_finite_prefix(K.base, 9))
    for deg in range(max_deg + 1):
        layer = []
        for coeffs in itertools.product(base, repeat=deg + 1):
            if deg > 0 and coeffs[-1] == 0:
                continue
            layer.append(K.poly(list(coeffs)))
        yield layer


def conic_point(K, a, b, budget=DEFAULT_BUDGET):
    """Nonzero (x0, x1, x2) with x0^2 = a x1^2 + b x2^2, or None if the
    search budget runs out."""
    a, b = K.coerce(a), K.coerce(b)
    r = K.sqrt(a)
    if r is not None:
        return (r, K.one, K.zero)
    r = K.sqrt(b)
    if r is not None:
        return (r, K.zero, K.one)
    if a + b == 1:
        return (K.one, K.one, K.one)
    if isinstance(K, Rationals):
        return _conic_point_q(a, b)
    if K.is_finite:
        for x1 in K.elements():
            for x2 in K.elements():
                if x1 == 0 and x2 == 0:
                    continue
                s = a * x1 * x1 + b * x2 * x2
                r = K.sqrt(s)
                if r is not None:
                    return (r, x1, x2)
        return None
    if isinstance(K, RationalFunctionField):
        # reduce slots to square-free polynomial representatives
        ra, rb = K.squareclass(a), K.squareclass(b)
        sa, sb = K.sqrt(a / ra), K.sqrt(b / rb)
        count = 0
        seen = []
        for layer in _poly_layers(K, 8):
            seen.extend(layer)
            for x1 in seen:
                for x2 in (layer if x1 not in layer else seen):
                    if x1 == 0 and x2 == 0:
                        continue
                    count += 1
                    if count > budget:
                        return None
                    s = ra * x1 * x1 + rb * x2 * x2
                    r = K.sqrt(s)
                    if r is not None:
                        return (r, x1 / sa, x2 / sb)
        return None
    raise UnsupportedDomain(f"conic search over {K.descriptor()}")


def _conic_point_q(a: Fraction, b: Fraction):
    from sympy import symbols
    from sympy.solvers.diophantine.diophantine import diop_ternary_quadratic

    Q = Rationals()
    ra, rb = Q.squareclass(a), Q.squareclass(b)
    sa, sb = Q.sqrt(a / ra), Q.sqrt(b / rb)
    X, Y, Z = symbols("X Y Z", integer=True)
    sol = diop_ternary_quadratic(int(ra) * X**2 + int(rb) * Y**2 - Z**2)
    if sol is None or sol[0] is None:
        return None
    x, y, z = (Fraction(int(c)) for c in sol)
    return (z, x / sa, y / sb)


def represent_binary(K, a, b, m, budget=DEFAULT_BUDGET):
    """(x, y) with a x^2 + b y^2 = m (m != 0), or None."""
    a, b, m = K.coerce(a), K.coerce(b), K.coerce(m)
    r = K.sqrt(-b / a)
    if r is not None:
        # a (X - rY)(X + rY) = m
        two = K.coerce(2)
        X = (1 + m / a) / two
        Y = (m / a - 1) / (two * r)
        return (X, Y)
    # a X^2 + b Y^2 = m Z^2  <=>  Z'^2 = (a/m) X'^2 + (b/m) Y'^2 with Z' = ... scaled
    pt = conic_point(K, a / m, b / m, budget)
    if pt is None:
        return None
    z, x, y = pt
    if z == 0:
        return None
    return (x / z, y / z)


def _descended(L, x):
    return not isinstance(L, QuadraticEtale) or L.in_base(x)


def is_split(Q: QuaternionAlgebra, budget: int = DEFAULT_BUDGET, valuations=()) -> SplitCertificate:
    L = Q.L
    a, b = Q.a, Q.b
    # Steinberg and square fast paths, over any base
    if a + b == 1:
        return _split_cert(Q, (L.one, L.one, L.one, L.zero), "Steinberg relation (a, 1-a)")
    if isinstance(L, QuadraticEtale):
        return _is_split_etale(Q, budget, valuations)
    if L.is_finite:
        pt = conic_point(L, a, b)
        return _split_cert(Q, (pt[0], pt[1], pt[2], L.zero), "finite field")
    if is_global(L):
        obs = hilbert_obstructions(L, a, b)
        if obs:
            if _is_fpt(L):
                v = obs[0]
                r = tame_residue(a, b, v)
                return _ramification_cert(v, r)
            return SplitCertificate("nonsplit", "local", places=tuple(place_name(p) for p in obs))
        pt = conic_point(L, a, b, budget)
        if pt is None:
            return SplitCertificate(
                "unknown", "bound-exhausted", note="all local symbols trivial; no zero found within budget"
            )
        return _split_cert(Q, (pt[0], pt[1], pt[2], L.zero))
    if isinstance(L, RationalFunctionField):
        return _is_split_function_field(Q, budget, valuations)
    raise UnsupportedDomain(f"is_split over {L.descriptor()}")


def _ramification_cert(v, r):
    kap = v.residue_field
    if kap.is_square(r):
        raise AssertionError("ramification witness is a square")
    return SplitCertificate(
        "nonsplit",
        "ramification",
        valuation=v,
        residue=kap.fmt(kap.squareclass(r)),
    )


def candidate_valuations(K: RationalFunctionField, elems):
    """Divisorial valuations of K = k(x)(y) read off the inputs: linear
    factors in y, the degree place in y, and Gauss extensions of the places
    of k(x) dividing some coefficient."""
    out = []
    seen = set()
    base = K.base
    for x in elems:
        x = K.coerce(x)
        for P in (x.num, x.den):
            if P.deg() > 0:
                _, facs = sqf_decomposition(P)
                for g, _m in facs:
                    if g.deg() == 1 and g.fmt(K.var) not in seen:
                        seen.add(g.fmt(K.var))
                        out.append(PolyPlace(K, g))
            for c in P.c:
                if c == 0:
                    continue
                if _is_fpt(base):
                    for g in _fpt_factors(base, base.coerce(c)):
                        key = "g:" + g.fmt(base.var)
                        if key not in seen:
                            seen.add(key)
                            out.append(GaussPlace(K, PolyPlace(base, g)))
    out.append(DegreePlace(K))
    if _is_fpt(base):
        out.append(GaussPlace(K, DegreePlace(base)))
    return out


def _is_split_function_field(Q, budget, valuations):
    L = Q.L
    a, b = Q.a, Q.b
    cands = list(valuations) + candidate_valuations(L, [a, b])
    for v in cands:
        try:
            r = tame_residue(a, b, v)
            if not v.residue_field.is_square(r):
                return _ramification_cert(v, r)
        except UnsupportedDomain:
            continue
    pt = conic_point(L, a, b, budget)
    if pt is not None:
        return _split_cert(Q, (pt[0], pt[1], pt[2], L.zero))
    return SplitCertificate(
        "unknown", "bound-exhausted", note="no ramification found at candidate valuations; no zero within budget"
    )


def _is_split_etale(Q, budget, valuations):
    L = Q.L
    K = L.base
    a, b = Q.a, Q.b
    if L.split:
        comps = []
        for sel in (lambda z: z.x, lambda z: z.y):
            comps.append(is_split(QuaternionAlgebra(K, sel(a), sel(b)), budget, valuations))
        for idx, c in enumerate(comps):
            if c.verdict == "nonsplit":
                return SplitCertificate(
                    "nonsplit",
                    c.kind,
                    places=c.places,
                    valuation=c.valuation,
                    residue=c.residue,
                    note=f"component {idx + 1} of the split etale algebra",
                )
        if all(c.verdict == "split" for c in comps):
            from .fieldtower import SplitElem

            w = tuple(SplitElem(L, x, y) for x, y in zip(comps[0].witness, comps[1].witness))
            return _split_cert(Q, w, "componentwise")
        return SplitCertificate("unknown", "bound-exhausted", note="componentwise search exhausted")
    if L.is_finite:
        pt = conic_point(L, a, b)
        return _split_cert(Q, (pt[0], pt[1], pt[2], L.zero), "finite field")
    if not (L.in_base(a) and L.in_base(b)):
        raise SlotNotDescended("splitness over a quadratic field extension needs slots in the base field")
    ak, bk = L.parts(a)[0], L.parts(b)[0]
    d = L.d
    if is_global(K):
        obs = hilbert_obstructions(K, ak, bk, extra=[d])
        bad = [pl for pl in obs if local_is_square(K, d, pl)]
        if bad:
            return SplitCertificate(
                "nonsplit",
                "local",
                places=tuple(place_name(p) + "(split in L)" for p in bad),
                note="(a,b) is -1 at a place of K that splits in L",
            )
        # (a,b)_K contains a pure quaternion z with z^2 = d; then z - sqrt(d) is a zero divisor
        z = pure_quaternion_with_square(K, ak, bk, d, budget)
        if z is None:
            return SplitCertificate("unknown", "bound-exhausted", note="local data split; no witness within budget")
        s = L.gen()
        w = (-s, L.coerce(z[0]), L.coerce(z[1]), L.coerce(z[2]))
        return _split_cert(Q, w, "pure quaternion squaring to d")
    if isinstance(K, RationalFunctionField):
        # certificate level: ramification at a place of K that splits in L
        cands = list(valuations) + candidate_valuations(K, [ak, bk, d])
        for v in cands:
            try:
                r = tame_residue(ak, bk, v)
                if v.residue_field.is_square(r):
                    continue
                if split_in(v, d):
                    c = _ramification_cert(v, r)
                    return SplitCertificate(
                        "nonsplit",
                        "ramification",
                        valuation=c.valuation,
                        residue=c.residue,
                        note="place of K split in L; residue field unchanged",
                    )
            except UnsupportedDomain:
                continue
        z = pure_quaternion_with_square(K, ak, bk, d, budget)
        if z is not None:
            s = L.gen()
            return _split_cert(Q, (-s, L.coerce(z[0]), L.coerce(z[1]), L.coerce(z[2])))
        return SplitCertificate("unknown", "bound-exhausted", note="no ramification found at split places")
    raise UnsupportedDomain(f"is_split over {L.descriptor()}")


def split_in(v: Valuation, d) -> bool:
    """Does the place v of K split in K(sqrt d)?"""
    e = v.val(d)
    if e % 2:
        return False
    return v.residue_field.is_square(v.residue(v.unit_part(d)))


def pure_quaternion_with_square(K, a, b, d, budget=DEFAULT_BUDGET):
    """(x1, x2, x3) in K with a x1^2 + b x2^2 - ab x3^2 = d, or None."""
    count = 0
    for x3 in _enumerate_small(K, None):
        count += 1
        if count > 64:
            return None
        m = d + a * b * x3 * x3
        if m == 0:
            # a x1^2 + b x2^2 = 0 needs -ab square; try the next x3
            continue
        if is_global(K):
            if hilbert_obstructions(K, a * m, b * m):
                continue
        sol = represent_binary(K, a, b, m, budget)
        if sol is not None:
            x1, x2 = sol
            assert a * x1 * x1 + b * x2 * x2 - a * b * x3 * x3 == d
            return (x1, x2, K.coerce(x3))
    return None


def corestriction(Q: QuaternionAlgebra) -> QuaternionAlgebra:
    """Projection formula: cores (a, b) = (a, N(b)) for a in K."""
    L = Q.L
    if not isinstance(L, QuadraticEtale):
        raise UnsupportedDomain("corestriction needs a quadratic etale base")
    K = L.base
    a, b = Q.a, Q.b
    if L.in_base(a):
        return QuaternionAlgebra(K, L.parts(a)[0], etale_norm(b, L))
    if L.in_base(b):
        return QuaternionAlgebra(K, L.parts(b)[0], etale_norm(a, L))
    raise SlotNotDescended("neither slot lies in the base field")


# ---------------------------------------------------------------------------
# Isotropy of small diagonal forms over residue fields


def residue_field_isotropic(K: Field, values, budget=DEFAULT_BUDGET) -> bool:
    return residue_isotropic_vector(K, values, budget) is not None


def residue_isotropic_vector(K: Field, values, budget=DEFAULT_BUDGET):
    """A nonzero isotropic vector of <values> over K, or None if anisotropic.

    Finite fields: exhaustive search. Global fields: Hilbert-symbol decision,
    then a witness search (BudgetExhausted if isotropic but no witness found).
    """
    values = [K.coerce(a) for a in values]
    n = len(values)
    if n == 0:
        return None
    if any(a == 0 for a in values):
        i = next(k for k, a in enumerate(values) if a == 0)
        return tuple(K.one if k == i else K.zero for k in range(n))
    if K.is_finite:
        return isotropic_vector_finite(K, values)
    if not is_global(K):
        raise UnsupportedDomain(f"isotropy over {K.descriptor()}")
    if not form_isotropic_global(K, values):
        return None
    w = _isotropic_search(K, values, budget)
    if w is None:
        raise BudgetExhausted("isotropic form, but no witness within budget")
    return w


def form_isotropic_global(K, values) -> bool:
    """Isotropy of a regular diagonal form over Q or F_p(t) (Hasse-Minkowski)."""
    n = len(values)
    if n == 1:
        return False
    if n == 2:
        return K.is_square(-values[0] * values[1])
    if n == 3:
        a, b, c = values
        return not hilbert_obstructions(K, -a * b, -a * c)
    if n == 4:
        a1, a2, a3, a4 = values
        d = a1 * a2 * a3 * a4
        obs = hilbert_obstructions(K, -a1 * a2, -a1 * a3, extra=[d])
        return not any(local_is_square(K, d, pl) for pl in obs)
    if isinstance(K, Rationals):
        return any(a > 0 for a in values) and any(a < 0 for a in values)
    return True


def _isotropic_search(K, values, budget):
    """Witness for an isotropic diagonal form over a global field."""
    n = len(values)
    # a ternary subform that is isotropic gives a witness through a conic point
    for idx in itertools.combinations(range(n), 3):
        a, b, c = (values[i] for i in idx)
        if n > 3 and hilbert_obstructions(K, -a * b, -a * c):
            continue
        if n == 2:
            break
        pt = conic_point(K, -b / a, -c / a, budget)
        if pt is not None:
            vec = [K.zero] * n
            for i, x in zip(idx, pt):
                vec[i] = x
            assert sum((values[i] * vec[i] * vec[i] for i in range(n)), K.zero) == 0
            return tuple(vec)
    if n == 2:
        r = K.sqrt(-values[1] / values[0])
        return (r, K.one)
    # quaternary: find c represented by <a1,a2> and by <-a3,-a4>
    a1, a2, a3, a4 = values[:4]
    count = 0
    for x1 in _enumerate_small(K, None):
        for x2 in _enumerate_small(K, None):
            count += 1
            if count > 4096:
                return None
            c = a1 * x1 * x1 + a2 * x2 * x2
            if c == 0:
                continue
            if is_global(K) and hilbert_obstructions(K, -a3 * c, -a4 * c):
                continue
            sol = represent_binary(K, -a3, -a4, c, budget)
            if sol is not None:
                vec = [x1, x2, sol[0], sol[1]] + [K.zero] * (n - 4)
                vec = tuple(K.coerce(x) for x in vec)
                assert sum((values[i] * vec[i] * vec[i] for i in range(n)), K.zero) == 0
                return vec
            if count > 4096:
                return None
    return None
