"""Sparse multivariate polynomials with exact rational coefficients.

Terms live in a fixed nine-variable universe.  Internally an exponent vector
is packed into one integer (16 bits per variable) so that multiplying
monomials is a single integer addition; the identity suite spends nearly all
of its time in that inner loop.  Coefficients are Python ints or
:class:`fractions.Fraction` (the identity builders only produce integers).
Canonical form: no zero coefficients stored, equality is structural.

:class:`RationalFn` pairs two polynomials; equality is tested by
cross-multiplication, never by gcd normalization.
"""
from __future__ import annotations

from fractions import Fraction

from ..errors import DomainError

VARS = ("x", "y", "q", "r1", "r2", "a", "b", "t", "beta")
_NV = len(VARS)
_VIDX = {name: i for i, name in enumerate(VARS)}
_BITS = 16
_MASK = (1 << _BITS) - 1
_SHIFTS = tuple(_BITS * i for i in range(_NV))


def _decode(key: int) -> tuple:
    return tuple((key >> s) & _MASK for s in _SHIFTS)


class MPoly:
    """Immutable sparse polynomial over Q in the fixed variable set."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None) -> None:
        object.__setattr__(self, "terms", {e: c for e, c in (terms or {}).items() if c != 0})

    # -- constructors -------------------------------------------------------
    @staticmethod
    def zero() -> "MPoly":
        return MPoly()

    @staticmethod
    def const(c) -> "MPoly":
        return MPoly({0: c}) if c != 0 else MPoly()

    @staticmethod
    def var(name: str, power: int = 1) -> "MPoly":
        if name not in _VIDX:
            raise DomainError(f"unknown variable {name!r}; universe is {VARS}")
        if power < 0 or power > _MASK:
            raise DomainError("variable power out of the packed-exponent range")
        return MPoly({power << _SHIFTS[_VIDX[name]]: 1}) if power else MPoly({0: 1})

    @staticmethod
    def from_terms(terms: dict) -> "MPoly":
        """Build from {exponent_tuple: coefficient}."""
        packed = {}
        for e, c in terms.items():
            key = 0
            for i, p in enumerate(e):
                key |= int(p) << _SHIFTS[i]
            packed[key] = packed.get(key, 0) + c
        return MPoly(packed)

    # -- ring operations ----------------------------------------------------
    def __add__(self, other) -> "MPoly":
        other = _coerce(other)
        out = dict(self.terms)
        get = out.get
        for e, c in other.terms.items():
            s = get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return MPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "MPoly":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "MPoly":
        other = _coerce(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        items_b = list(b.items())
        for e1, c1 in a.items():
            for e2, c2 in items_b:
                e = e1 + e2
                s = get(e, 0) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return MPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MPoly":
        if k < 0:
            raise DomainError("MPoly power must be nonnegative")
        out = MPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, MPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, name: str) -> int:
        s = _SHIFTS[_VIDX[name]]
        return max(((e >> s) & _MASK for e in self.terms), default=0)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            exps = _decode(e)
            mono = "*".join(f"{VARS[i]}^{p}" if p > 1 else VARS[i]
                            for i, p in enumerate(exps) if p)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        s = " + ".join(parts[:12])
        return s + (f" + ... ({len(parts)} terms)" if len(parts) > 12 else "")

    # -- substitution and evaluation ----------------------------------------
    def substitute(self, name: str, value) -> "MPoly":
        """Replace a variable by a polynomial (exact)."""
        i = _VIDX[name]
        shift = _SHIFTS[i]
        value = _coerce(value)
        powers = {0: MPoly.const(1)}
        out = MPoly.zero()
        for e, c in self.terms.items():
            k = (e >> shift) & _MASK
            if k not in powers:
                powers[k] = value ** k
            rest = e - (k << shift)
            out = out + MPoly({rest: c}) * powers[k]
        return out

    def eval(self, assignment: dict) -> Fraction:
        """Exact evaluation; every variable present in the terms must be assigned."""
        vals = {_VIDX[name]: Fraction(v) for name, v in assignment.items()}
        tot = Fraction(0)
        for e, c in self.terms.items():
            prod = Fraction(c)
            for i, p in enumerate(_decode(e)):
                if p:
                    if i not in vals:
                        raise DomainError(f"variable {VARS[i]!r} not assigned")
                    prod *= vals[i] ** p
            tot += prod
        return tot

    def truncate(self, name: str, max_deg: int) -> "MPoly":
        """Drop every term whose exponent in ``name`` exceeds ``max_deg``."""
        s = _SHIFTS[_VIDX[name]]
        return MPoly({e: c for e, c in self.terms.items() if ((e >> s) & _MASK) <= max_deg})


def _coerce(v) -> MPoly:
    if isinstance(v, MPoly):
        return v
    if isinstance(v, (int, Fraction)):
        return MPoly.const(v)
    raise DomainError(f"cannot coerce {type(v).__name__} into MPoly")


def prod_all(factors) -> MPoly:
    """Product of many polynomials, combining the two smallest first.

    Keeps intermediate term counts low; the identity builders assemble every
    summand through this.
    """
    fs = sorted((_coerce(f) for f in factors), key=len)
    if not fs:
        return MPoly.const(1)
    while len(fs) > 1:
        a = fs.pop(0)
        b = fs.pop(0)
        p = a * b
        # insert keeping the list sorted by size
        lo, hi = 0, len(fs)
        n = len(p)
        while lo < hi:
            mid = (lo + hi) // 2
            if len(fs[mid]) < n:
                lo = mid + 1
            else:
                hi = mid
        fs.insert(lo, p)
    return fs[0]


class RationalFn:
    """num/den pair of polynomials; den must be nonzero.

    Equality is decided by cross-multiplication (num1*den2 == num2*den1), so
    no multivariate gcd is ever needed.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1) -> None:
        num = _coerce(num)
        den = _coerce(den)
        if den.is_zero():
            raise DomainError("RationalFn denominator is zero")
        self.num = num
        self.den = den

    def __add__(self, other) -> "RationalFn":
        other = _coerce_rf(other)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)

    def __sub__(self, other) -> "RationalFn":
        return self + (-_coerce_rf(other))

    def __rsub__(self, other) -> "RationalFn":
        return _coerce_rf(other) + (-self)

    def __mul__(self, other) -> "RationalFn":
        other = _coerce_rf(other)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFn":
        other = _coerce_rf(other)
        return RationalFn(self.num * other.den, self.den * other.num)

    def __eq__(self, other) -> bool:
        other = _coerce_rf(other)
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):  # pragma: no cover
        raise TypeError("RationalFn is not hashable (no canonical form)")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def eval(self, assignment: dict) -> Fraction:
        den = self.den.eval(assignment)
        if den == 0:
            raise ZeroDivisionError("RationalFn denominator vanishes at the sample point")
        return self.num.eval(assignment) / den

    def __repr__(self) -> str:
        return f"({self.num!r}) / ({self.den!r})"


def _coerce_rf(v) -> RationalFn:
    if isinstance(v, RationalFn):
        return v
    return RationalFn(_coerce(v))
