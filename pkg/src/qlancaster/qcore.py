"""q-series primitives.

Brackets, factorials, binomials, finite and truncated-infinite q-Pochhammer
symbols, the quadratic weights v/l/w, and the support interval

    S(q) = [-2/sqrt(1-q), 2/sqrt(1-q)]   for |q| < 1,   all of R for q = 1.

Every infinite product is truncated under a certified geometric tail bound
controlled by a :class:`TruncationPolicy`.  Spatial arguments (``x``, ``y``,
and the Pochhammer base ``a``) may be numpy arrays; ``q`` and the integer
indices are scalars.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArityError, DomainError, RegimeError, TruncationError

__all__ = [
    "TruncationPolicy", "QContext", "DEFAULT_POLICY",
    "q_bracket", "q_factorial", "q_binomial",
    "q_poch", "multi_poch", "q_poch_inf",
    "weight", "support",
]


@dataclass(frozen=True)
class TruncationPolicy:
    """Budget for truncated infinite products and series.

    ``term_tol`` is the target absolute tail bound; ``max_terms`` the hard
    factor budget.  ``q_limit`` guards against hopelessly slow convergence:
    infinite products reject |q| beyond it (raise it explicitly for limit
    studies near q = 1, together with ``max_terms``).
    """

    term_tol: float = 1e-12
    max_terms: int = 10_000
    q_limit: float = 0.99

    def __post_init__(self) -> None:
        if not self.term_tol > 0:
            raise DomainError("term_tol must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be a positive integer")
        if not 0 < self.q_limit < 1:
            raise DomainError("q_limit must lie in (0, 1)")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class QContext:
    """The deformation parameter together with its evaluation regime.

    ``mode`` is ``"numeric"`` for |q| < 1 (products/series are truncated) and
    ``"classical"`` for q = 1 exactly (served only by closed forms).
    """

    q: float
    trunc: TruncationPolicy = field(default_factory=TruncationPolicy)

    def __post_init__(self) -> None:
        if not -1.0 < self.q <= 1.0:
            raise DomainError(f"q must lie in (-1, 1], got {self.q}")

    @property
    def mode(self) -> str:
        return "classical" if self.q == 1.0 else "numeric"

    def support(self) -> tuple[float, float]:
        return support(self.q)


def q_bracket(n: int, q: float) -> float:
    """[n]_q = 1 + q + ... + q^(n-1), with [0]_q = 0."""
    if n < 0:
        raise DomainError("q_bracket needs n >= 0")
    if q == 1.0:
        return float(n)
    return (1.0 - q**n) / (1.0 - q)


def q_factorial(n: int, q: float) -> float:
    """[n]_q! = prod_{j=1..n} [j]_q, empty product 1."""
    if n < 0:
        raise DomainError("q_factorial needs n >= 0")
    out = 1.0
    for j in range(2, n + 1):
        out *= q_bracket(j, q)
    return out


def q_binomial(n: int, k: int, q: float) -> float:
    """Gaussian binomial [n over k]_q; 0 outside 0 <= k <= n."""
    if k < 0 or k > n:
        return 0.0
    k = min(k, n - k)
    out = 1.0
    for i in range(1, k + 1):
        out *= q_bracket(n - k + i, q) / q_bracket(i, q)
    return out


def q_poch(a, q: float, n: int):
    """Finite q-Pochhammer (a|q)_n = prod_{j=0..n-1} (1 - a q^j).

    ``a`` may be an array; the product is taken elementwise.
    """
    if n < 0:
        raise DomainError("q_poch needs n >= 0")
    a = np.asarray(a, dtype=float)
    out = np.ones_like(a)
    qj = 1.0
    for _ in range(n):
        out = out * (1.0 - a * qj)
        qj *= q
    return out if out.ndim else float(out)


def multi_poch(bases, q: float, n: int):
    """(a_1, ..., a_k | q)_n = prod_i (a_i|q)_n."""
    out = 1.0
    for a in bases:
        out = out * q_poch(a, q, n)
    return out


def _tail_bound(abs_a: float, q: float, k: int) -> float:
    # sum_{j>=k} |a| |q|^j / (1 - |a||q|^k), the multiplicative tail estimate
    aqk = abs_a * abs(q) ** k
    if aqk >= 1.0:
        return math.inf
    return aqk / ((1.0 - abs(q)) * (1.0 - aqk))


def q_poch_inf(a, q: float, trunc: TruncationPolicy = DEFAULT_POLICY):
    """Truncated infinite q-Pochhammer (a|q)_inf with a certified tail bound.

    Returns ``(value, tail_bound)`` where ``tail_bound`` bounds the relative
    error |value/(a|q)_inf - 1| via the geometric estimate
    sum_{k>=K} |a||q|^k / (1 - |a||q|^K).

    Raises ``RegimeError`` for |q| beyond the policy limit and
    ``TruncationError`` when ``max_terms`` factors do not reach ``term_tol``.
    """
    if abs(q) >= 1.0:
        raise RegimeError(f"(a|q)_inf needs |q| < 1, got q={q}")
    if abs(q) > trunc.q_limit:
        raise RegimeError(
            f"|q|={abs(q)} exceeds the policy limit {trunc.q_limit}; "
            "raise TruncationPolicy.q_limit (and max_terms) explicitly"
        )
    a = np.asarray(a, dtype=float)
    abs_a = float(np.max(np.abs(a))) if a.size else 0.0
    out = np.ones_like(a)
    qk = 1.0
    for k in range(trunc.max_terms):
        bound = _tail_bound(abs_a, q, k)
        if bound <= trunc.term_tol:
            return (out if out.ndim else float(out)), bound
        out = out * (1.0 - a * qk)
        qk *= q
    raise TruncationError(
        f"(a|q)_inf with |a|<={abs_a}, q={q}: tail bound "
        f"{_tail_bound(abs_a, q, trunc.max_terms):.3g} > {trunc.term_tol} "
        f"after {trunc.max_terms} factors"
    )


def weight(kind: str, x, y=None, a: float = 0.0):
    """The quadratic weights of the orthogonality densities.

    v(x|a) = 1 - 2ax + a^2
    l(x|a) = (1+a)^2 - 4 x^2 a
    w(x,y|a) = (1-a^2)^2 - 4xya(1+a^2) + 4a^2(x^2+y^2)

    ``y`` must be given iff ``kind == "w"``.
    """
    if kind == "w":
        if y is None:
            raise ArityError("weight 'w' takes two spatial arguments")
        a2 = a * a
        return (1.0 - a2) ** 2 - 4.0 * (x * y) * a * (1.0 + a2) + 4.0 * a2 * (x * x + y * y)
    if y is not None:
        raise ArityError(f"weight {kind!r} takes one spatial argument")
    if kind == "v":
        return 1.0 - 2.0 * a * x + a * a
    if kind == "l":
        return (1.0 + a) ** 2 - 4.0 * (x * x) * a
    raise DomainError(f"unknown weight kind {kind!r}")


def support(q: float) -> tuple[float, float]:
    """The support interval S(q); the whole line at q = 1."""
    if not -1.0 < q <= 1.0:
        raise DomainError(f"q must lie in (-1, 1], got {q}")
    if q == 1.0:
        return (-math.inf, math.inf)
    half = 2.0 / math.sqrt(1.0 - q)
    return (-half, half)
