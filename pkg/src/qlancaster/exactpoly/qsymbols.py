"""Exact q-combinatorics over :class:`MPoly`: brackets, binomials, Pochhammers,
and the recurrence-unrolled polynomial families.

The variable ``q`` is always the MPoly variable of that name.  Gaussian
binomials come from the Pascal recurrence (hence are genuine polynomials);
the factorial-ratio form is also provided as a :class:`RationalFn` so the
divisibility of the two representations can be checked.
"""
from __future__ import annotations

from functools import lru_cache

from ..errors import DomainError, SizeError
from .mpoly import MPoly, RationalFn

_ONE = MPoly.const(1)

FAMILY_SIZE_GUARD = 12


def qpow(j: int) -> MPoly:
    """q^j as an MPoly."""
    return MPoly.var("q", j) if j else _ONE


@lru_cache(maxsize=None)
def qbracket_sym(n: int) -> MPoly:
    """[n]_q = 1 + q + ... + q^(n-1) as an exact polynomial."""
    if n < 0:
        raise DomainError("qbracket_sym needs n >= 0")
    out = MPoly.zero()
    for j in range(n):
        out = out + qpow(j)
    return out


@lru_cache(maxsize=None)
def qfact_sym(n: int) -> MPoly:
    """[n]_q! as an exact polynomial."""
    out = _ONE
    for j in range(2, n + 1):
        out = out * qbracket_sym(j)
    return out


@lru_cache(maxsize=None)
def bracket_prod(lo: int, hi: int) -> MPoly:
    """prod_{i=lo..hi} [i]_q (empty product 1)."""
    out = _ONE
    for i in range(lo, hi + 1):
        out = out * qbracket_sym(i)
    return out


@lru_cache(maxsize=None)
def qbinom_poly(n: int, k: int) -> MPoly:
    """Gaussian binomial [n k]_q via the Pascal recurrence; 0 outside range."""
    if k < 0 or k > n:
        return MPoly.zero()
    if k == 0 or k == n:
        return _ONE
    return qbinom_poly(n - 1, k - 1) + qpow(k) * qbinom_poly(n - 1, k)


def qbinom_rf(n: int, k: int) -> RationalFn:
    """The factorial-ratio form [n]_q! / ([k]_q! [n-k]_q!) as a RationalFn."""
    if k < 0 or k > n:
        return RationalFn(MPoly.zero())
    return RationalFn(qfact_sym(n), qfact_sym(k) * qfact_sym(n - k))


@lru_cache(maxsize=None)
def _poch_cached(base: MPoly, n: int) -> MPoly:
    out = _ONE
    for j in range(n):
        out = out * (_ONE - base * qpow(j))
    return out


def poch_sym(base, n: int) -> MPoly:
    """(base | q)_n = prod_{j<n} (1 - base q^j), exact; base is an MPoly."""
    if n < 0:
        raise DomainError("poch_sym needs n >= 0")
    return _poch_cached(base, n)


def binom2(k: int) -> int:
    """The exponent C(k,2) appearing in the alternating q-sums."""
    return k * (k - 1) // 2


# ---------------------------------------------------------------------------
# recurrence-unrolled families (exact, in x and the stated parameter)

def _guard(n: int) -> None:
    if n > FAMILY_SIZE_GUARD:
        raise SizeError(f"symbolic family unrolling capped at n <= {FAMILY_SIZE_GUARD}")


@lru_cache(maxsize=None)
def qhermite_sym(n: int) -> MPoly:
    """q-Hermite H_n(x|q): H_{n+1} = x H_n - [n]_q H_{n-1}."""
    _guard(n)
    if n == 0:
        return _ONE
    if n == 1:
        return MPoly.var("x")
    return MPoly.var("x") * qhermite_sym(n - 1) - qbracket_sym(n - 1) * qhermite_sym(n - 2)


@lru_cache(maxsize=None)
def ultra_r_sym(n: int) -> MPoly:
    """Ultraspherical R_n(x|beta,q):

        R_{n+1} = (1 - beta q^n) x R_n - (1 - beta^2 q^{n-1}) [n]_q R_{n-1}.
    """
    _guard(n)
    x, beta = MPoly.var("x"), MPoly.var("beta")
    if n == 0:
        return _ONE
    if n == 1:
        return (_ONE - beta) * x
    m = n - 1
    return ((_ONE - beta * qpow(m)) * x * ultra_r_sym(m)
            - (_ONE - beta * beta * qpow(m - 1)) * qbracket_sym(m) * ultra_r_sym(m - 1))


@lru_cache(maxsize=None)
def bpoly_sym(n: int) -> MPoly:
    """B_n(x|q): B_{n+1} = -x q^n B_n + q^{n-1} [n]_q B_{n-1}."""
    _guard(n)
    x = MPoly.var("x")
    if n == 0:
        return _ONE
    if n == 1:
        return -x
    m = n - 1
    return -x * qpow(m) * bpoly_sym(m) + qpow(m - 1) * qbracket_sym(m) * bpoly_sym(m - 1)


@lru_cache(maxsize=None)
def cheb_u_half_sym(n: int) -> MPoly:
    """U_n(x/2): p_{n+1} = x p_n - p_{n-1}, p_0 = 1, p_1 = x.

    Used by the q = 0 special-case checks; indices below 0 are taken as 0.
    """
    _guard(n)
    if n == 0:
        return _ONE
    if n == 1:
        return MPoly.var("x")
    return MPoly.var("x") * cheb_u_half_sym(n - 1) - cheb_u_half_sym(n - 2)


def sym_family(tag: str, n: int) -> MPoly:
    """Exact recurrence unrolling of one family (n <= 12 size guard)."""
    if tag == "qhermite":
        return qhermite_sym(n)
    if tag == "ultra_r":
        return ultra_r_sym(n)
    if tag == "bpoly":
        return bpoly_sym(n)
    raise DomainError(f"no symbolic unrolling registered for {tag!r}")
