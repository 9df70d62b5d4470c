"""Exact coefficient domains, valuations, residues and square classes.

Supported kinds: the rationals, prime fields F_p (p odd), rational function
fields K(t), quadratic etale algebras K[s]/(s^2 - d) (stored as K x K when d is
a square in K), and dual numbers K[eps]/(eps^2). A simple algebraic extension
K[t]/(f) is also available; it is used for residue fields of places of degree
at least two.
"""

from __future__ import annotations

import ast
import itertools
import math
import random
from fractions import Fraction

from sympy import factorint, isprime

from .errors import (
    NegativeValuation,
    NotInvertible,
    ParseError,
    UnsupportedDomain,
    ZeroElement,
)

INF = math.inf


class _NoCoerce(Exception):
    pass


def _wrap(s: str) -> str:
    """Parenthesize s when it is a sum or a quotient."""
    body = s[1:] if s.startswith("-") else s
    if any(ch in body for ch in "+-/") and not (s.startswith("(") and s.endswith(")")):
        return "(" + s + ")"
    return s


# ---------------------------------------------------------------------------
# Fields


class Field:
    kind = "abstract"
    is_field = True
    depth = 1

    def descriptor(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return self.descriptor()

    def __eq__(self, other):
        return isinstance(other, Field) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(self.descriptor())

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def coerce(self, x):
        raise NotImplementedError

    def has(self, x) -> bool:
        try:
            self.coerce(x)
            return True
        except (_NoCoerce, UnsupportedDomain):
            return False

    @property
    def is_finite(self) -> bool:
        return False

    def order(self) -> int:
        raise UnsupportedDomain(f"{self.descriptor()} is not finite")

    def elements(self):
        raise UnsupportedDomain(f"cannot enumerate {self.descriptor()}")

    def is_square(self, x) -> bool:
        raise UnsupportedDomain(f"square test over {self.descriptor()}")

    def sqrt(self, x):
        """A square root of x in the field, or None."""
        raise UnsupportedDomain(f"square roots over {self.descriptor()}")

    def squareclass(self, x):
        raise UnsupportedDomain(f"square classes over {self.descriptor()}")

    def fmt(self, x) -> str:
        return str(x)

    def generators(self) -> dict:
        return {}

    def random(self, rng: random.Random, height: int = 5):
        raise NotImplementedError

    # helpers for finite fields
    def _finite_is_square(self, x):
        x = self.coerce(x)
        if x == 0:
            return True
        return x ** ((self.order() - 1) // 2) == 1

    def _finite_nonresidue(self):
        if not hasattr(self, "_nonres"):
            self._nonres = next(e for e in self.elements() if e != 0 and not self.is_square(e))
        return self._nonres

    def _finite_sqrt(self, x):
        x = self.coerce(x)
        if not hasattr(self, "_roots"):
            table = {}
            for e in self.elements():
                table.setdefault(e * e, e)
            self._roots = table
        return self._roots.get(x)

    def _finite_squareclass(self, x):
        x = self.coerce(x)
        if x == 0:
            raise ZeroElement("square class of zero")
        return self.one if self.is_square(x) else self._finite_nonresidue()


class Rationals(Field):
    kind = "Rationals"
    characteristic = 0

    def descriptor(self):
        return "Q"

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int) and not isinstance(x, bool):
            return Fraction(x)
        raise _NoCoerce

    def is_square(self, x):
        x = self.coerce(x)
        return x >= 0 and _int_sqrt(x.numerator) is not None and _int_sqrt(x.denominator) is not None

    def sqrt(self, x):
        x = self.coerce(x)
        if x < 0:
            return None
        a, b = _int_sqrt(x.numerator), _int_sqrt(x.denominator)
        if a is None or b is None:
            return None
        return Fraction(a, b)

    def squareclass(self, x):
        x = self.coerce(x)
        if x == 0:
            raise ZeroElement("square class of zero")
        n = x.numerator * x.denominator
        rep = -1 if n < 0 else 1
        for p, e in factorint(abs(n)).items():
            if e % 2:
                rep *= p
        return Fraction(rep)

    def fmt(self, x):
        x = self.coerce(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def random(self, rng, height=5):
        return Fraction(rng.randint(-height, height), rng.randint(1, height))


def _int_sqrt(n: int):
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


class FpElem:
    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _c(self, o):
        if isinstance(o, FpElem):
            if o.p != self.p:
                raise _NoCoerce
            return o.v
        if isinstance(o, int):
            return o
        if isinstance(o, Fraction):
            return o.numerator * pow(o.denominator, -1, self.p)
        raise _NoCoerce

    def __add__(self, o):
        try:
            return FpElem(self.v + self._c(o), self.p)
        except _NoCoerce:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, o):
        try:
            return FpElem(self.v - self._c(o), self.p)
        except _NoCoerce:
            return NotImplemented

    def __rsub__(self, o):
        try:
            return FpElem(self._c(o) - self.v, self.p)
        except _NoCoerce:
            return NotImplemented

    def __mul__(self, o):
        try:
            return FpElem(self.v * self._c(o), self.p)
        except _NoCoerce:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, o):
        try:
            w = self._c(o) % self.p
        except _NoCoerce:
            return NotImplemented
        if w == 0:
            raise NotInvertible("division by zero in F_p")
        return FpElem(self.v * pow(w, -1, self.p), self.p)

    def __rtruediv__(self, o):
        try:
            w = self._c(o)
        except _NoCoerce:
            return NotImplemented
        if self.v == 0:
            raise NotInvertible("division by zero in F_p")
        return FpElem(w * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return FpElem(-self.v, self.p)

    def __pow__(self, e: int):
        if e < 0:
            if self.v == 0:
                raise NotInvertible("division by zero in F_p")
            return FpElem(pow(pow(self.v, -1, self.p), -e, self.p), self.p)
        return FpElem(pow(self.v, e, self.p), self.p)

    def __eq__(self, o):
        try:
            return self.v == self._c(o) % self.p
        except _NoCoerce:
            return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return str(self.v)


class PrimeField(Field):
    kind = "PrimeField"

    def __init__(self, p: int):
        if p == 2:
            raise UnsupportedDomain("characteristic 2 is not supported")
        if p < 2 or not isprime(p):
            raise ParseError(f"{p} is not an odd prime")
        self.p = p
        self.characteristic = p

    def descriptor(self):
        return f"Fp:{self.p}"

    def coerce(self, x):
        if isinstance(x, FpElem):
            if x.p != self.p:
                raise _NoCoerce
            return x
        if isinstance(x, int) and not isinstance(x, bool):
            return FpElem(x, self.p)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise NotInvertible(f"denominator divisible by {self.p}")
            return FpElem(x.numerator * pow(x.denominator, -1, self.p), self.p)
        raise _NoCoerce

    @property
    def is_finite(self):
        return True

    def order(self):
        return self.p

    def elements(self):
        return [FpElem(i, self.p) for i in range(self.p)]

    def is_square(self, x):
        x = self.coerce(x)
        return x.v == 0 or pow(x.v, (self.p - 1) // 2, self.p) == 1

    def nonresidue(self):
        return self._finite_nonresidue()

    def sqrt(self, x):
        x = self.coerce(x)
        if not self.is_square(x):
            return None
        from sympy.ntheory import sqrt_mod

        r = sqrt_mod(x.v, self.p) if x.v else 0
        return FpElem(min(r, self.p - r), self.p)

    def squareclass(self, x):
        return self._finite_squareclass(x)

    def fmt(self, x):
        return str(self.coerce(x).v)

    def random(self, rng, height=5):
        return FpElem(rng.randrange(self.p), self.p)


# ---------------------------------------------------------------------------
# Polynomials over a field


class Poly:
    """Dense univariate polynomial over a field K, coefficients low to high."""

    __slots__ = ("K", "c")

    def __init__(self, K: Field, coeffs, _raw=False):
        c = list(coeffs) if _raw else [K.coerce(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.K = K
        self.c = tuple(c)

    @classmethod
    def x(cls, K):
        return cls(K, [K.zero, K.one], True)

    @classmethod
    def const(cls, K, a):
        return cls(K, [K.coerce(a)], True)

    def deg(self) -> int:
        return len(self.c) - 1

    def lc(self):
        return self.c[-1] if self.c else self.K.zero

    def is_zero(self):
        return not self.c

    def is_one(self):
        return len(self.c) == 1 and self.c[0] == 1

    def __eq__(self, o):
        return isinstance(o, Poly) and self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def __add__(self, o):
        a, b = self.c, o.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, y in enumerate(b):
            out[i] = out[i] + y
        return Poly(self.K, out, True)

    def __neg__(self):
        return Poly(self.K, [-x for x in self.c], True)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if not self.c or not o.c:
            return Poly(self.K, [], True)
        zero = self.K.zero
        out = [zero] * (len(self.c) + len(o.c) - 1)
        for i, x in enumerate(self.c):
            if x == 0:
                continue
            for j, y in enumerate(o.c):
                out[i + j] = out[i + j] + x * y
        return Poly(self.K, out, True)

    def scale(self, a):
        return Poly(self.K, [a * x for x in self.c], True)

    def __pow__(self, e: int):
        out = Poly.const(self.K, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def divmod(self, g: "Poly"):
        if g.is_zero():
            raise NotInvertible("polynomial division by zero")
        r = list(self.c)
        dg = g.deg()
        inv = 1 / g.lc()
        zero = self.K.zero
        q = [zero] * max(len(r) - dg, 0)
        for i in range(len(r) - 1 - dg, -1, -1):
            coef = r[i + dg] * inv
            q[i] = coef
            if coef != 0:
                for j, y in enumerate(g.c):
                    r[i + j] = r[i + j] - coef * y
        return Poly(self.K, q, True), Poly(self.K, r[:dg] if dg > 0 else [], True)

    def __floordiv__(self, g):
        return self.divmod(g)[0]

    def __mod__(self, g):
        return self.divmod(g)[1]

    def exact_div(self, g):
        q, r = self.divmod(g)
        if not r.is_zero():
            raise NotInvertible("inexact polynomial division")
        return q

    def monic(self):
        if not self.c:
            return self
        inv = 1 / self.lc()
        return Poly(self.K, [x * inv for x in self.c], True)

    def gcd(self, o):
        a, b = self, o
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def xgcd(self, o):
        """(g, s, t) with s*self + t*o = g monic."""
        K = self.K
        r0, r1 = self, o
        s0, s1 = Poly.const(K, 1), Poly(K, [], True)
        t0, t1 = Poly(K, [], True), Poly.const(K, 1)
        while not r1.is_zero():
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        inv = 1 / r0.lc()
        return r0.scale(inv), s0.scale(inv), t0.scale(inv)

    def deriv(self):
        return Poly(self.K, [self.c[i] * i for i in range(1, len(self.c))], True)

    def __call__(self, x):
        acc = self.K.zero if not isinstance(x, (Poly,)) else Poly(self.K, [], True)
        for coef in reversed(self.c):
            acc = acc * x + coef
        return acc

    def powmod(self, e: int, m: "Poly"):
        out = Poly.const(self.K, 1) % m if m.deg() > 0 else Poly(self.K, [], True)
        base = self % m
        while e:
            if e & 1:
                out = (out * base) % m
            base = (base * base) % m
            e >>= 1
        return out

    def fmt(self, var: str) -> str:
        if not self.c:
            return "0"
        K = self.K
        terms = []
        for i in range(len(self.c) - 1, -1, -1):
            a = self.c[i]
            if a == 0:
                continue
            s = K.fmt(a)
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if not mono:
                t = s
            elif s == "1":
                t = mono
            elif s == "-1":
                t = "-" + mono
            else:
                t = _wrap(s) + "*" + mono
            terms.append(t)
        out = terms[0]
        for t in terms[1:]:
            out += t if t.startswith("-") else "+" + t
        return out

    def __repr__(self):
        return self.fmt("t")


# ---------------------------------------------------------------------------
# Square-free decomposition and factorization helpers


def _pth_root_coeff(K: Field, a):
    p = K.characteristic
    if isinstance(K, PrimeField):
        return a
    if isinstance(K, SimpleExtension) and K.is_finite:
        return a ** (K.order() // p)
    if isinstance(K, RationalFunctionField):
        n, d = a.num, a.den
        if any(i % p for i, x in enumerate(n.c) if x != 0) or any(i % p for i, x in enumerate(d.c) if x != 0):
            return None
        root = lambda P: Poly(K.base, [_pth_root_coeff(K.base, P.c[i]) for i in range(0, len(P.c), p)], True)
        rn, rd = root(n), root(d)
        if any(x is None for x in rn.c + rd.c):
            return None
        return K.make(rn, rd)
    return None


def sqf_decomposition(f: Poly):
    """Square-free decomposition of a nonzero polynomial.

    Returns (lc, [(g, m), ...]) with f = lc * prod g^m, each g monic and
    square-free, pairwise coprime.
    """
    if f.is_zero():
        raise ZeroElement("square-free decomposition of zero")
    lc = f.lc()
    f = f.monic()
    out: dict = {}
    _sqf_monic(f, 1, out)
    facs = sorted(out.items(), key=lambda kv: (kv[1], kv[0].deg(), repr(kv[0].c)))
    return lc, [(g, m) for g, m in facs]


def _sqf_monic(f: Poly, scale: int, out: dict):
    if f.deg() <= 0:
        return
    K = f.K
    df = f.deriv()
    if df.is_zero():
        p = K.characteristic
        coeffs = [f.c[i] for i in range(0, len(f.c), p)]
        roots = [_pth_root_coeff(K, a) for a in coeffs]
        if any(r is None for r in roots):
            raise UnsupportedDomain("inseparable polynomial over an imperfect field")
        _sqf_monic(Poly(K, roots, True).monic(), scale * p, out)
        return
    c = f.gcd(df)
    w = f.exact_div(c)
    i = 1
    while w.deg() > 0:
        y = w.gcd(c)
        fac = w.exact_div(y)
        if fac.deg() > 0:
            out[fac] = out.get(fac, 0) + i * scale
        w = y
        c = c.exact_div(y)
        i += 1
    if c.deg() > 0:
        p = K.characteristic
        if p == 0:
            raise AssertionError("leftover content in characteristic zero")
        coeffs = [c.c[i] for i in range(0, len(c.c), p)]
        roots = [_pth_root_coeff(K, a) for a in coeffs]
        if any(r is None for r in roots):
            raise UnsupportedDomain("inseparable polynomial over an imperfect field")
        _sqf_monic(Poly(K, roots, True).monic(), scale * p, out)


def factor_fp(f: Poly):
    """Irreducible factorization of a polynomial over a prime field.

    Returns (lc, [(g, m), ...]) with g monic irreducible, sorted by degree then
    coefficients. Uses sympy's finite-field factorizer.
    """
    from sympy import Poly as SPoly, symbols

    K = f.K
    if not isinstance(K, PrimeField):
        raise UnsupportedDomain("factorization is implemented over prime fields only")
    if f.is_zero():
        raise ZeroElement("factorization of zero")
    t = symbols("t")
    sp = SPoly([int(x.v) for x in reversed(f.c)], t, modulus=K.p)
    lc, facs = sp.factor_list()
    out = []
    for g, m in facs:
        coeffs = [int(a) for a in reversed(g.all_coeffs())]
        out.append((Poly(K, coeffs).monic(), m))
    out.sort(key=lambda gm: (gm[0].deg(), tuple(x.v for x in gm[0].c)))
    return f.lc(), out


def is_irreducible(f: Poly) -> bool:
    K = f.K
    if f.deg() <= 0:
        return False
    if f.deg() == 1:
        return True
    if isinstance(K, PrimeField):
        _, facs = factor_fp(f)
        return len(facs) == 1 and facs[0][1] == 1
    if f.deg() in (2, 3):
        # no roots <=> irreducible in degree 2 and 3
        if f.deg() == 2:
            a, b, c = f.c[2], f.c[1], f.c[0]
            try:
                return not K.is_square(b * b - 4 * a * c)
            except UnsupportedDomain:
                pass
    if isinstance(K, Rationals):
        from sympy import Poly as SPoly, QQ, symbols

        t = symbols("t")
        return SPoly([x for x in reversed(f.c)], t, domain=QQ).is_irreducible
    raise UnsupportedDomain(f"irreducibility test of degree {f.deg()} over {K.descriptor()}")


# ---------------------------------------------------------------------------
# Rational function fields


class RatFunc:
    __slots__ = ("F", "num", "den")

    def __init__(self, F, num: Poly, den: Poly):
        self.F, self.num, self.den = F, num, den

    def _c(self, o):
        if isinstance(o, RatFunc) and o.F is self.F:
            return o
        return self.F.coerce(o)

    def __add__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        if self.den == o.den:
            return self.F.make(self.num + o.num, self.den)
        return self.F.make(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.F, -self.num, self.den)

    def __sub__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return o + (-self)

    def __mul__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return self.F.make(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise NotInvertible("division by zero in a rational function field")
        return self.F.make(self.den, self.num)

    def __truediv__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.F, self.num**e, self.den**e)

    def __eq__(self, o):
        try:
            o = self._c(o)
        except (_NoCoerce, UnsupportedDomain):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self.den.is_one() and self.num.deg() <= 0:
            return hash(self.num.c[0]) if self.num.c else hash(0)
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self):
        return self.den.is_one()

    def __repr__(self):
        return self.F.fmt(self)


class RationalFunctionField(Field):
    kind = "RationalFunctionField"

    def __init__(self, base: Field, var: str):
        if not base.is_field:
            raise UnsupportedDomain("rational functions need a field of coefficients")
        if not var.isidentifier() or var in ("eps", "sqrt", "inf"):
            raise ParseError(f"bad variable name {var!r}")
        if var in base.generators():
            raise ParseError(f"variable {var!r} already used")
        self.base = base
        self.var = var
        self.characteristic = base.characteristic
        self.depth = base.depth + 1
        self._desc = f"Fun:{base.descriptor()}:{var}"

    def descriptor(self):
        return self._desc

    def make(self, num: Poly, den: Poly) -> RatFunc:
        if den.is_zero():
            raise NotInvertible("zero denominator")
        if num.is_zero():
            return RatFunc(self, num, Poly.const(self.base, 1))
        if den.deg() > 0:
            g = num.gcd(den)
            if g.deg() > 0:
                num, den = num.exact_div(g), den.exact_div(g)
        lc = den.lc()
        if lc != 1:
            inv = 1 / lc
            num, den = num.scale(inv), den.scale(inv)
        return RatFunc(self, num, den)

    def poly(self, coeffs) -> RatFunc:
        return RatFunc(self, Poly(self.base, coeffs), Poly.const(self.base, 1))

    def from_poly(self, p: Poly) -> RatFunc:
        return RatFunc(self, p, Poly.const(self.base, 1))

    def gen(self) -> RatFunc:
        return self.poly([0, 1])

    def coerce(self, x):
        if isinstance(x, RatFunc):
            if x.F is self or x.F == self:
                return x if x.F is self else RatFunc(self, x.num, x.den)
        a = self.base.coerce(x)
        return RatFunc(self, Poly(self.base, [a], True), Poly(self.base, [self.base.one], True))

    def generators(self):
        g = dict(self.base.generators())
        g[self.var] = self.gen()
        return g

    def is_square(self, x):
        x = self.coerce(x)
        if x == 0:
            return True
        return self.squareclass(x) == 1

    def sqrt(self, x):
        x = self.coerce(x)
        if x == 0:
            return x
        g = x.num * x.den
        lc, facs = sqf_decomposition(g)
        if any(m % 2 for _, m in facs):
            return None
        r = self.base.sqrt(lc)
        if r is None:
            return None
        root = Poly.const(self.base, r)
        for f, m in facs:
            root = root * f ** (m // 2)
        return self.make(root, x.den)

    def squareclass(self, x):
        x = self.coerce(x)
        if x == 0:
            raise ZeroElement("square class of zero")
        lc, facs = sqf_decomposition(x.num * x.den)
        rep = Poly.const(self.base, self.base.squareclass(lc))
        for f, m in facs:
            if m % 2:
                rep = rep * f
        return self.from_poly(rep)

    def fmt(self, x):
        x = self.coerce(x)
        n = x.num.fmt(self.var)
        if x.den.is_one():
            return n
        return f"{_wrap(n) if len(x.num.c) > 1 or '/' in n else n}/{_wrap(x.den.fmt(self.var))}"

    def random(self, rng, height=5, deg=2):
        num = Poly(self.base, [self.base.random(rng, height) for _ in range(rng.randint(0, deg) + 1)])
        dd = rng.randint(0, 1)
        den = Poly(self.base, [self.base.random(rng, height) for _ in range(dd)] + [1])
        if num.is_zero():
            num = Poly.const(self.base, 1)
        return self.make(num, den)

    def random_poly(self, rng, deg, height=5):
        return self.poly([self.base.random(rng, height) for _ in range(deg + 1)])


# ---------------------------------------------------------------------------
# Simple algebraic extensions K[t]/(f)


class ExtElem:
    __slots__ = ("F", "r")

    def __init__(self, F, r: Poly):
        self.F, self.r = F, r

    def _c(self, o):
        if isinstance(o, ExtElem) and o.F is self.F:
            return o
        return self.F.coerce(o)

    def __add__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return ExtElem(self.F, self.r + o.r)

    __radd__ = __add__

    def __neg__(self):
        return ExtElem(self.F, -self.r)

    def __sub__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return ExtElem(self.F, self.r - o.r)

    def __rsub__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return ExtElem(self.F, o.r - self.r)

    def __mul__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return ExtElem(self.F, (self.r * o.r) % self.F.f)

    __rmul__ = __mul__

    def inverse(self):
        if self.r.is_zero():
            raise NotInvertible("division by zero")
        g, s, _ = self.r.xgcd(self.F.f)
        return ExtElem(self.F, s % self.F.f)

    def __truediv__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return ExtElem(self.F, self.r.powmod(e, self.F.f))

    def __eq__(self, o):
        try:
            o = self._c(o)
        except (_NoCoerce, UnsupportedDomain):
            return NotImplemented
        return self.r == o.r

    def __hash__(self):
        if self.r.deg() <= 0:
            return hash(self.r.c[0]) if self.r.c else hash(0)
        return hash(self.r)

    def __bool__(self):
        return not self.r.is_zero()

    def __repr__(self):
        return self.F.fmt(self)


class SimpleExtension(Field):
    """K[theta]/(f) for a monic irreducible f of degree at least 2."""

    kind = "SimpleExtension"

    def __init__(self, base: Field, f: Poly, name: str = "theta"):
        if f.deg() < 2:
            raise UnsupportedDomain("simple extension needs degree >= 2")
        self.base = base
        self.f = f.monic()
        self.name = name
        self.characteristic = base.characteristic
        self.depth = base.depth + 1
        self._desc = f"Alg:{base.descriptor()}:{self.f.fmt(name)}"

    def descriptor(self):
        return self._desc

    def coerce(self, x):
        if isinstance(x, ExtElem):
            if x.F is self or x.F == self:
                return x
            raise _NoCoerce
        return ExtElem(self, Poly(self.base, [self.base.coerce(x)], True))

    def from_poly(self, p: Poly):
        return ExtElem(self, p % self.f)

    def gen(self):
        return self.from_poly(Poly.x(self.base))

    def generators(self):
        g = dict(self.base.generators())
        g[self.name] = self.gen()
        return g

    @property
    def is_finite(self):
        return self.base.is_finite

    def order(self):
        return self.base.order() ** self.f.deg()

    def elements(self):
        if not hasattr(self, "_elts"):
            base = self.base.elements()
            out = []
            for tup in itertools.product(base, repeat=self.f.deg()):
                out.append(ExtElem(self, Poly(self.base, list(reversed(tup)), True)))
            self._elts = out
        return self._elts

    def is_square(self, x):
        if self.is_finite:
            return self._finite_is_square(x)
        return super().is_square(x)

    def sqrt(self, x):
        if self.is_finite:
            return self._finite_sqrt(x)
        return super().sqrt(x)

    def squareclass(self, x):
        if self.is_finite:
            return self._finite_squareclass(x)
        return super().squareclass(x)

    def fmt(self, x):
        return self.coerce(x).r.fmt(self.name)

    def random(self, rng, height=5):
        return self.from_poly(Poly(self.base, [self.base.random(rng, height) for _ in range(self.f.deg())]))


# ---------------------------------------------------------------------------
# Quadratic etale algebras


class EtaleElem:
    """a + b*s with s^2 = d (non-split case)."""

    __slots__ = ("L", "a", "b")

    def __init__(self, L, a, b):
        self.L, self.a, self.b = L, a, b

    def _c(self, o):
        if isinstance(o, EtaleElem) and o.L is self.L:
            return o
        return self.L.coerce(o)

    def __add__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return EtaleElem(self.L, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return EtaleElem(self.L, -self.a, -self.b)

    def __sub__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return EtaleElem(self.L, self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return o - self

    def __mul__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        d = self.L.d
        return EtaleElem(self.L, self.a * o.a + d * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conj(self):
        return EtaleElem(self.L, self.a, -self.b)

    def norm(self):
        return self.a * self.a - self.L.d * self.b * self.b

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise NotInvertible("division by zero")
        return EtaleElem(self.L, self.a / n, -self.b / n)

    def __truediv__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = self.L.one, self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, o):
        try:
            o = self._c(o)
        except (_NoCoerce, UnsupportedDomain):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return self.L.fmt(self)


class SplitElem:
    """Pair (x, y) in K x K; s corresponds to (r, -r) with r^2 = d."""

    __slots__ = ("L", "x", "y")

    def __init__(self, L, x, y):
        self.L, self.x, self.y = L, x, y

    def _c(self, o):
        if isinstance(o, SplitElem) and o.L is self.L:
            return o
        return self.L.coerce(o)

    def __add__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return SplitElem(self.L, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return SplitElem(self.L, -self.x, -self.y)

    def __sub__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return SplitElem(self.L, self.x - o.x, self.y - o.y)

    def __rsub__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return o - self

    def __mul__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return SplitElem(self.L, self.x * o.x, self.y * o.y)

    __rmul__ = __mul__

    def conj(self):
        return SplitElem(self.L, self.y, self.x)

    def norm(self):
        return self.x * self.y

    def inverse(self):
        if self.x == 0 or self.y == 0:
            raise NotInvertible("zero divisor in a split etale algebra")
        return SplitElem(self.L, 1 / self.x, 1 / self.y)

    def __truediv__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return SplitElem(self.L, self.x**e, self.y**e)

    def __eq__(self, o):
        try:
            o = self._c(o)
        except (_NoCoerce, UnsupportedDomain):
            return NotImplemented
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash(self.x) if self.x == self.y else hash((self.x, self.y))

    def __bool__(self):
        return bool(self.x) or bool(self.y)

    def __repr__(self):
        return self.L.fmt(self)


class QuadraticEtale(Field):
    """K[s]/(s^2 - d); split as K x K when d is a square in K."""

    kind = "QuadraticEtale"

    def __init__(self, base: Field, d):
        if not base.is_field:
            raise UnsupportedDomain("etale extension of a non-field")
        d = base.coerce(d)
        if d == 0:
            raise ZeroElement("etale extension by zero")
        self.base = base
        self.d = d
        self.characteristic = base.characteristic
        self.depth = base.depth + 1
        r = base.sqrt(d)
        self.split = r is not None
        self.root = r
        self.is_field = not self.split
        self._desc = f"Ext:{base.descriptor()}:{base.fmt(d)}"

    def descriptor(self):
        return self._desc

    def coerce(self, x):
        if isinstance(x, (EtaleElem, SplitElem)):
            if x.L is self or x.L == self:
                return x
            raise _NoCoerce
        a = self.base.coerce(x)
        if self.split:
            return SplitElem(self, a, a)
        return EtaleElem(self, a, self.base.zero)

    def from_parts(self, a, b):
        """The element a + b*s."""
        a, b = self.base.coerce(a), self.base.coerce(b)
        if self.split:
            return SplitElem(self, a + b * self.root, a - b * self.root)
        return EtaleElem(self, a, b)

    def parts(self, x):
        x = self.coerce(x)
        if self.split:
            two = self.base.coerce(2)
            return (x.x + x.y) / two, (x.x - x.y) / (two * self.root)
        return x.a, x.b

    def gen(self):
        return self.from_parts(0, 1)

    def conj(self, x):
        return self.coerce(x).conj()

    def in_base(self, x) -> bool:
        return self.parts(x)[1] == 0

    def generators(self):
        return dict(self.base.generators())

    @property
    def is_finite(self):
        return self.base.is_finite and not self.split

    def order(self):
        if not self.is_finite:
            return super().order()
        return self.base.order() ** 2

    def elements(self):
        if self.split:
            return super().elements()
        if not hasattr(self, "_elts"):
            B = self.base.elements()
            self._elts = [EtaleElem(self, a, b) for b in B for a in B]
        return self._elts

    def is_square(self, x):
        x = self.coerce(x)
        if self.split:
            return self.base.is_square(x.x) and self.base.is_square(x.y)
        if self.is_finite:
            return self._finite_is_square(x)
        if x.b == 0:
            return x.a == 0 or self.base.is_square(x.a) or self.base.is_square(x.a * self.d)
        return super().is_square(x)

    def sqrt(self, x):
        x = self.coerce(x)
        if self.split:
            a, b = self.base.sqrt(x.x), self.base.sqrt(x.y)
            return None if a is None or b is None else SplitElem(self, a, b)
        if self.is_finite:
            return self._finite_sqrt(x)
        if x.b == 0:
            r = self.base.sqrt(x.a)
            if r is not None:
                return EtaleElem(self, r, self.base.zero)
            r = self.base.sqrt(x.a / self.d)
            if r is not None:
                return EtaleElem(self, self.base.zero, r)
            return None
        return super().sqrt(x)

    def squareclass(self, x):
        x = self.coerce(x)
        if x == 0:
            raise ZeroElement("square class of zero")
        if self.split:
            if x.x == 0 or x.y == 0:
                raise ZeroElement("square class of a zero divisor")
            return SplitElem(self, self.base.squareclass(x.x), self.base.squareclass(x.y))
        if self.is_finite:
            return self._finite_squareclass(x)
        return super().squareclass(x)

    def fmt(self, x):
        x = self.coerce(x)
        if self.split:
            if x.x == x.y:
                return self.base.fmt(x.x)
            return f"[{self.base.fmt(x.x)} | {self.base.fmt(x.y)}]"
        a, b = x.a, x.b
        sq = f"sqrt({self.base.fmt(self.d)})"
        if b == 0:
            return self.base.fmt(a)
        bs = self.base.fmt(b)
        bt = sq if bs == "1" else ("-" + sq if bs == "-1" else f"{_wrap(bs)}*{sq}")
        if a == 0:
            return bt
        return f"{self.base.fmt(a)}{'' if bt.startswith('-') else '+'}{bt}"

    def random(self, rng, height=5):
        return self.from_parts(self.base.random(rng, height), self.base.random(rng, height))


def etale_norm(x, L: QuadraticEtale):
    """N_{L/K}(x) = x * conj(x), an element of K."""
    x = L.coerce(x)
    return x.norm()


# ---------------------------------------------------------------------------
# Dual numbers


class DualElem:
    __slots__ = ("D", "a", "b")

    def __init__(self, D, a, b):
        self.D, self.a, self.b = D, a, b

    def _c(self, o):
        if isinstance(o, DualElem) and o.D is self.D:
            return o
        return self.D.coerce(o)

    def __add__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return DualElem(self.D, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return DualElem(self.D, -self.a, -self.b)

    def __sub__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return DualElem(self.D, self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return o - self

    def __mul__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return DualElem(self.D, self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self):
        if self.a == 0:
            raise NotInvertible("nilpotent dual number is not invertible")
        ia = 1 / self.a
        return DualElem(self.D, ia, -self.b * ia * ia)

    def __truediv__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        try:
            o = self._c(o)
        except _NoCoerce:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.D.one
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, o):
        try:
            o = self._c(o)
        except (_NoCoerce, UnsupportedDomain):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return self.D.fmt(self)


class DualNumbers(Field):
    """K[eps]/(eps^2). A ring, not a field."""

    kind = "DualNumbers"
    is_field = False

    def __init__(self, base: Field, name: str = "eps"):
        self.base = base
        self.name = name
        self.characteristic = base.characteristic
        self.depth = base.depth + 1
        self._desc = f"Dual:{base.descriptor()}" if name == "eps" else f"Dual:{base.descriptor()}:{name}"

    def descriptor(self):
        return self._desc

    def coerce(self, x):
        if isinstance(x, DualElem) and (x.D is self or x.D == self):
            return x
        return DualElem(self, self.base.coerce(x), self.base.zero)

    def eps(self):
        return DualElem(self, self.base.zero, self.base.one)

    def generators(self):
        g = dict(self.base.generators())
        g[self.name] = self.eps()
        return g

    def is_square(self, x):
        raise UnsupportedDomain("square classes are not defined over dual numbers")

    sqrt = is_square
    squareclass = is_square

    @property
    def is_finite(self):
        return self.base.is_finite

    def order(self):
        return self.base.order() ** 2

    def elements(self):
        B = self.base.elements()
        return [DualElem(self, a, b) for b in B for a in B]

    def fmt(self, x):
        x = self.coerce(x)
        if x.b == 0:
            return self.base.fmt(x.a)
        bs = self.base.fmt(x.b)
        bt = self.name if bs == "1" else ("-" + self.name if bs == "-1" else f"{_wrap(bs)}*{self.name}")
        if x.a == 0:
            return bt
        return f"{self.base.fmt(x.a)}{'' if bt.startswith('-') else '+'}{bt}"

    def random(self, rng, height=5):
        return DualElem(self, self.base.random(rng, height), self.base.random(rng, height))


# ---------------------------------------------------------------------------
# Square classes


def squareclass_reduce(x, F: Field):
    """Canonical representative of the square class of a nonzero x."""
    if isinstance(F, DualNumbers):
        raise UnsupportedDomain("square classes are not defined over dual numbers")
    x = F.coerce(x)
    if x == 0:
        raise ZeroElement("square class of zero")
    return F.squareclass(x)


# ---------------------------------------------------------------------------
# Valuations


class Valuation:
    """A discrete valuation on a field with its residue map."""

    field: Field
    residue_field: Field
    kind = "abstract"

    def val(self, x):
        raise NotImplementedError

    def uniformizer(self):
        raise NotImplementedError

    def _residue(self, x):
        raise NotImplementedError

    def residue(self, x):
        x = self.field.coerce(x)
        if x == 0:
            return self.residue_field.zero
        if self.val(x) < 0:
            raise NegativeValuation(f"{self.field.fmt(x)} has negative valuation at {self.name}")
        return self._residue(x)

    def lift(self, r):
        raise NotImplementedError

    def unit_part(self, x):
        x = self.field.coerce(x)
        e = self.val(x)
        return x / self.uniformizer() ** e

    @property
    def residue_characteristic(self):
        return self.residue_field.characteristic

    @property
    def residue_is_finite(self):
        return self.residue_field.is_finite

    def __repr__(self):
        return f"{self.kind}({self.name})"

    def __eq__(self, o):
        return isinstance(o, Valuation) and repr(self) == repr(o) and self.field == o.field

    def __hash__(self):
        return hash(repr(self))


class PAdic(Valuation):
    kind = "p-adic"

    def __init__(self, p: int):
        if p == 2:
            from .errors import DyadicPlace

            raise DyadicPlace("p-adic(2) is not supported")
        if not isprime(p):
            raise ParseError(f"{p} is not a prime")
        self.p = p
        self.field = Rationals()
        self.residue_field = PrimeField(p)
        self.name = str(p)

    def val(self, x):
        x = self.field.coerce(x)
        if x == 0:
            return INF
        return _ival(x.numerator, self.p) - _ival(x.denominator, self.p)

    def uniformizer(self):
        return Fraction(self.p)

    def _residue(self, x):
        if self.val(x) > 0:
            return self.residue_field.zero
        return self.residue_field.coerce(x)

    def lift(self, r):
        return Fraction(self.residue_field.coerce(r).v)


def _ival(n: int, p: int) -> int:
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def _pval(P: Poly, f: Poly) -> int:
    e = 0
    while True:
        q, r = P.divmod(f)
        if not r.is_zero():
            return e
        P = q
        e += 1


class PolyPlace(Valuation):
    """Valuation of K(t) at a monic irreducible polynomial f."""

    kind = "irreducible-polynomial"

    def __init__(self, F: RationalFunctionField, f: Poly):
        if f.deg() < 1:
            raise ParseError("place polynomial must have positive degree")
        f = f.monic()
        if not is_irreducible(f):
            raise ParseError(f"{f.fmt(F.var)} is not irreducible")
        self.field = F
        self.f = f
        self.name = f.fmt(F.var)
        if f.deg() == 1:
            self.residue_field = F.base
            self.root = -f.c[0]
        else:
            self.residue_field = SimpleExtension(F.base, f, name=F.var)
        if self.residue_field.characteristic == 2:
            from .errors import DyadicPlace

            raise DyadicPlace("residue characteristic 2")

    def val(self, x):
        x = self.field.coerce(x)
        if x == 0:
            return INF
        return _pval(x.num, self.f) - _pval(x.den, self.f)

    def uniformizer(self):
        return self.field.from_poly(self.f)

    def _red(self, P: Poly):
        if self.f.deg() == 1:
            return P(self.root)
        return self.residue_field.from_poly(P)

    def _residue(self, x):
        if self.val(x) > 0:
            return self.residue_field.zero
        return self._red(x.num) / self._red(x.den)

    def lift(self, r):
        if self.f.deg() == 1:
            return self.field.coerce(self.residue_field.coerce(r))
        return self.field.from_poly(self.residue_field.coerce(r).r)


class DegreePlace(Valuation):
    """The place at infinity of K(t), uniformizer 1/t."""

    kind = "degree-place"

    def __init__(self, F: RationalFunctionField):
        self.field = F
        self.residue_field = F.base
        self.name = "inf"

    def val(self, x):
        x = self.field.coerce(x)
        if x == 0:
            return INF
        return x.den.deg() - x.num.deg()

    def uniformizer(self):
        return 1 / self.field.gen()

    def _residue(self, x):
        if self.val(x) > 0:
            return self.residue_field.zero
        return x.num.lc() / x.den.lc()

    def lift(self, r):
        return self.field.coerce(self.residue_field.coerce(r))


class GaussPlace(Valuation):
    """Extension of a valuation w of K to K(t) by v(sum c_i t^i) = min w(c_i).

    The residue field is kappa(w)(t).
    """

    kind = "gauss"

    def __init__(self, F: RationalFunctionField, w: Valuation):
        if w.field != F.base:
            raise ParseError("base valuation lives on a different field")
        self.field = F
        self.w = w
        self.residue_field = RationalFunctionField(w.residue_field, F.var)
        self.name = w.name

    def _pv(self, P: Poly):
        return min(self.w.val(c) for c in P.c) if P.c else INF

    def val(self, x):
        x = self.field.coerce(x)
        if x == 0:
            return INF
        return self._pv(x.num) - self._pv(x.den)

    def uniformizer(self):
        return self.field.coerce(self.w.uniformizer())

    def _red(self, P: Poly, m: int):
        pi_m = self.w.uniformizer() ** m
        kap = self.w.residue_field
        return Poly(kap, [self.w.residue(c / pi_m) for c in P.c], True)

    def _residue(self, x):
        if self.val(x) > 0:
            return self.residue_field.zero
        m = self._pv(x.den)
        return self.residue_field.make(self._red(x.num, m), self._red(x.den, m))

    def lift(self, r):
        r = self.residue_field.coerce(r)
        up = lambda P: Poly(self.field.base, [self.w.lift(c) for c in P.c], True)
        return self.field.make(up(r.num), up(r.den))


def valuation_of(x, v: Valuation):
    return v.val(x)


def residue_of(x, v: Valuation):
    return v.residue(x)


# ---------------------------------------------------------------------------
# Descriptors and expression syntax

MAX_DEPTH = 3


def _tower_depth(F: Field) -> int:
    return F.depth


def parse_field(desc: str, max_depth: int | None = MAX_DEPTH) -> Field:
    tokens = [t.strip() for t in desc.split(":")]
    F = _parse_field_tokens(tokens)
    if tokens:
        raise ParseError(f"trailing tokens in field descriptor: {':'.join(tokens)}")
    if max_depth is not None and F.depth > max_depth:
        raise UnsupportedDomain(f"tower depth {F.depth} exceeds the cap {max_depth}")
    return F


def _parse_field_tokens(tokens: list) -> Field:
    if not tokens:
        raise ParseError("empty field descriptor")
    head = tokens.pop(0)
    if head == "Q":
        return Rationals()
    if head == "Fp":
        if not tokens:
            raise ParseError("Fp needs a prime")
        try:
            p = int(tokens.pop(0))
        except ValueError:
            raise ParseError("Fp needs an integer prime") from None
        return PrimeField(p)
    if head == "Fun":
        base = _parse_field_tokens(tokens)
        if not tokens:
            raise ParseError("Fun needs a variable name")
        return RationalFunctionField(base, tokens.pop(0))
    if head == "Ext":
        base = _parse_field_tokens(tokens)
        if not tokens:
            raise ParseError("Ext needs an element d")
        return QuadraticEtale(base, parse_element(base, tokens.pop(0)))
    if head == "Dual":
        return DualNumbers(_parse_field_tokens(tokens))
    raise ParseError(f"unknown field kind {head!r}")


def _base_chain(F: Field):
    while True:
        yield F
        if not hasattr(F, "base"):
            return
        F = F.base


def parse_element(F: Field, text: str):
    """Parse an element of F from the textual syntax.

    Integers, fractions p/q, +,-,*,/ and ^ (or **) with integer exponents,
    declared variables, `eps` for the dual generator and `sqrt(d)` for the
    etale generator.
    """
    src = text.strip().replace("^", "**")
    if not src:
        raise ParseError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as e:
        raise ParseError(f"malformed expression {text!r}") from e
    names = F.generators()
    try:
        return F.coerce(_eval(tree.body, F, names))
    except _NoCoerce:
        raise ParseError(f"expression {text!r} does not live in {F.descriptor()}") from None


def _eval(node, F, names):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return F.coerce(node.value)
    if isinstance(node, ast.Name):
        if node.id in names:
            return F.coerce(names[node.id])
        raise ParseError(f"unknown symbol {node.id!r} for {F.descriptor()}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, F, names)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            e = node.right
            sign = 1
            if isinstance(e, ast.UnaryOp) and isinstance(e.op, ast.USub):
                sign, e = -1, e.operand
            if not (isinstance(e, ast.Constant) and isinstance(e.value, int)):
                raise ParseError("exponents must be integer literals")
            return _eval(node.left, F, names) ** (sign * e.value)
        a, b = _eval(node.left, F, names), _eval(node.right, F, names)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            try:
                return a / b
            except NotInvertible as e:
                raise ParseError(str(e)) from None
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt":
        if len(node.args) != 1:
            raise ParseError("sqrt takes one argument")
        for L in _base_chain(F):
            if isinstance(L, QuadraticEtale):
                arg = _eval(node.args[0], L.base, L.base.generators())
                if arg == L.d:
                    return F.coerce(L.gen())
                r = L.base.sqrt(arg) if L.base.is_field else None
                if r is not None:
                    return F.coerce(r)
                ratio = L.base.sqrt(arg / L.d)
                if ratio is not None:
                    return F.coerce(L.gen() * ratio)
                raise ParseError(f"sqrt({L.base.fmt(arg)}) is not available in {F.descriptor()}")
        arg = _eval(node.args[0], F, names)
        r = F.sqrt(arg)
        if r is None:
            raise ParseError("sqrt of a nonsquare")
        return r
    raise ParseError(f"unsupported syntax in expression: {ast.dump(node)[:60]}")


def parse_valuation(F: Field, text: str) -> Valuation:
    """`p` over Q; `inf` or a polynomial over K(t); a polynomial in the base
    variable alone over K(t) with K = k(x) gives the Gauss extension."""
    text = text.strip()
    if isinstance(F, Rationals):
        try:
            return PAdic(int(text))
        except ValueError:
            raise ParseError(f"bad prime {text!r}") from None
    if isinstance(F, RationalFunctionField):
        if text == "inf":
            return DegreePlace(F)
        x = parse_element(F, text)
        if not x.is_poly() or x.num.deg() < 1:
            if isinstance(F.base, (RationalFunctionField, Rationals)) and x.num.deg() <= 0:
                return GaussPlace(F, parse_valuation(F.base, text))
            raise ParseError(f"valuation {text!r} must be a polynomial of positive degree")
        return PolyPlace(F, x.num)
    raise UnsupportedDomain(f"valuations on {F.descriptor()} are not supported")


def int_height_rational(rng: random.Random, height: int) -> Fraction:
    """A random nonzero rational with numerator and denominator bounded by height."""
    while True:
        n = rng.randint(-height, height)
        if n:
            return Fraction(n, rng.randint(1, height))
