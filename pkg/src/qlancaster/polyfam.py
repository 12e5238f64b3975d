"""Polynomial families, each evaluated by its three-term recurrence.

Forward recurrence is the single evaluation path; the classical closed forms
only appear in tests as oracles.  ``x`` may be a scalar or a numpy array.

Families and their recurrences (p_{-1} = 0, p_0 = 1 throughout):

    chebyshev_t / chebyshev_u : 2x p_n = p_{n+1} + p_{n-1}  (T_1 = x, U_1 = 2x)
    hermite      : H_{n+1} = x H_n - n H_{n-1}
    qhermite     : H_{n+1} = x H_n - [n]_q H_{n-1}
    big_qhermite : H_{n+1} = (x - a q^n) H_n - [n]_q H_{n-1}
    aschihara    : P_{n+1} = (x - rho y q^n) P_n - (1 - rho^2 q^{n-1}) [n]_q P_{n-1}
    ultra_r      : R_{n+1} = (1 - beta q^n) x R_n - (1 - beta^2 q^{n-1}) [n]_q R_{n-1}
    ultra_v      : R_n / (beta|q)_n                       (monic version)
    ultra_c      : R_n(2x/sqrt(1-q) | beta, q) / ([n]_q! (1-q)^{n/2})
    bpoly        : B_{n+1} = -x q^n B_n + q^{n-1} [n]_q B_{n-1}
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeError, TruncationError
from .qcore import (DEFAULT_POLICY, TruncationPolicy, q_bracket, q_factorial,
                    q_poch, support)

__all__ = [
    "PolyFamily", "eval_poly", "eval_sequence",
    "orthonormal_R", "orthonormal_r_sequence", "orthonormal_h_sequence",
    "char_fn_H", "b_poly",
]

_TAGS = frozenset({
    "chebyshev_t", "chebyshev_u", "hermite", "qhermite", "big_qhermite",
    "aschihara", "ultra_r", "ultra_v", "ultra_c", "bpoly",
})


@dataclass(frozen=True)
class PolyFamily:
    """One recurrence-defined family plus its parameters.

    ``a`` is the big-q-Hermite shift, ``(y, rho)`` the Al-Salam--Chihara
    conditioning pair, ``beta`` the ultraspherical parameter.  All three are
    confined to the open interval (-1, 1); ``y`` must lie in S(q).
    """

    tag: str
    a: float | None = None
    y: float | None = None
    rho: float | None = None
    beta: float | None = None

    def __post_init__(self) -> None:
        if self.tag not in _TAGS:
            raise DomainError(f"unknown polynomial family {self.tag!r}")

    def validate(self, q: float) -> None:
        if not -1.0 < q <= 1.0:
            raise DomainError(f"q must lie in (-1, 1], got {q}")
        if self.tag == "big_qhermite":
            if self.a is None or not -1.0 < self.a < 1.0:
                raise DomainError("big_qhermite needs a in (-1, 1)")
        elif self.tag == "aschihara":
            if self.rho is None or not -1.0 < self.rho < 1.0:
                raise DomainError("aschihara needs rho in (-1, 1)")
            lo, hi = support(q)
            if self.y is None or not lo <= self.y <= hi:
                raise DomainError("aschihara needs y in S(q)")
        elif self.tag in ("ultra_r", "ultra_v", "ultra_c"):
            if self.beta is None or not -1.0 < self.beta < 1.0:
                raise DomainError(f"{self.tag} needs beta in (-1, 1)")
            if self.tag == "ultra_c" and q == 1.0:
                raise RegimeError("ultra_c rescaling degenerates at q = 1")


def _raw_sequence(fam: PolyFamily, n_max: int, x, q: float) -> np.ndarray:
    """Forward recurrence; returns array of shape (n_max+1,) + shape(x)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max == 0:
        return out
    tag = fam.tag
    if tag == "chebyshev_t":
        out[1] = x
    elif tag == "chebyshev_u":
        out[1] = 2.0 * x
    elif tag == "big_qhermite":
        out[1] = x - fam.a
    elif tag == "aschihara":
        out[1] = x - fam.rho * fam.y
    elif tag in ("ultra_r", "ultra_v", "ultra_c"):
        out[1] = (1.0 - fam.beta) * x
    elif tag == "bpoly":
        out[1] = -x
    else:  # hermite, qhermite
        out[1] = x
    for n in range(1, n_max):
        if tag in ("chebyshev_t", "chebyshev_u"):
            out[n + 1] = 2.0 * x * out[n] - out[n - 1]
        elif tag == "hermite":
            out[n + 1] = x * out[n] - n * out[n - 1]
        elif tag == "qhermite":
            out[n + 1] = x * out[n] - q_bracket(n, q) * out[n - 1]
        elif tag == "big_qhermite":
            out[n + 1] = (x - fam.a * q**n) * out[n] - q_bracket(n, q) * out[n - 1]
        elif tag == "aschihara":
            out[n + 1] = ((x - fam.rho * fam.y * q**n) * out[n]
                          - (1.0 - fam.rho**2 * q**(n - 1)) * q_bracket(n, q) * out[n - 1])
        elif tag == "bpoly":
            out[n + 1] = -x * q**n * out[n] + q**(n - 1) * q_bracket(n, q) * out[n - 1]
        else:  # ultra_r and its rescalings
            b = fam.beta
            out[n + 1] = ((1.0 - b * q**n) * x * out[n]
                          - (1.0 - b * b * q**(n - 1)) * q_bracket(n, q) * out[n - 1])
    return out


def eval_sequence(fam: PolyFamily, n_max: int, x, q: float) -> np.ndarray:
    """Values p_0(x), ..., p_{n_max}(x) in one forward pass."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    fam.validate(q)
    if fam.tag == "ultra_c":
        xs = 2.0 * np.asarray(x, dtype=float) / math.sqrt(1.0 - q)
        raw = _raw_sequence(PolyFamily("ultra_r", beta=fam.beta), n_max, xs, q)
        for n in range(n_max + 1):
            raw[n] /= q_factorial(n, q) * (1.0 - q) ** (n / 2.0)
        return raw
    seq = _raw_sequence(fam, n_max, x, q)
    if fam.tag == "ultra_v":
        for n in range(n_max + 1):
            pn = q_poch(fam.beta, q, n)
            if pn == 0.0:
                raise DomainError(f"(beta|q)_{n} vanishes; ultra_v undefined")
            seq[n] /= pn
    return seq


def eval_poly(fam: PolyFamily, n: int, x, q: float):
    """p_n(x) for the requested family (element n of :func:`eval_sequence`)."""
    seq = eval_sequence(fam, n, x, q)
    val = seq[n]
    return float(val) if val.ndim == 0 else val


def _rhat_norm(n: int, beta: float, q: float) -> float:
    # ||R_n||^2 under f_R: [n]_q! (1-beta) (beta^2)_n / (1 - beta q^n)
    return q_factorial(n, q) * (1.0 - beta) * float(q_poch(beta * beta, q, n)) / (1.0 - beta * q**n)


def orthonormal_R(n: int, x, r1: float, r2: float, q: float):
    """The orthonormal ultraspherical polynomial at beta = r1 r2.

    R_n(x|r1 r2, q) * sqrt(1 - r1 r2 q^n) / sqrt([n]_q! (r1^2 r2^2)_n (1 - r1 r2)).
    """
    if abs(r1 * r2) >= 1.0:
        raise DomainError("orthonormal_R needs |r1 r2| < 1")
    beta = r1 * r2
    rn = eval_poly(PolyFamily("ultra_r", beta=beta), n, x, q)
    return rn / math.sqrt(_rhat_norm(n, beta, q))


def orthonormal_r_sequence(n_max: int, x, beta: float, q: float) -> np.ndarray:
    """R_n / ||R_n|| for n = 0..n_max (normalized after a single raw pass)."""
    if abs(beta) >= 1.0:
        raise DomainError("orthonormal_r_sequence needs |beta| < 1")
    seq = _raw_sequence(PolyFamily("ultra_r", beta=beta), n_max, x, q)
    norm = 1.0  # running product for [n]_q! (beta^2)_n
    for n in range(n_max + 1):
        if n > 0:
            norm *= q_bracket(n, q) * (1.0 - beta * beta * q**(n - 1))
        seq[n] /= math.sqrt(norm * (1.0 - beta) / (1.0 - beta * q**n))
    return seq


def orthonormal_h_sequence(n_max: int, x, q: float) -> np.ndarray:
    """q-Hermite H_n / sqrt([n]_q!) for n = 0..n_max."""
    seq = _raw_sequence(PolyFamily("qhermite"), n_max, x, q)
    norm = 1.0
    for n in range(1, n_max + 1):
        norm *= q_bracket(n, q)
        seq[n] /= math.sqrt(norm)
    return seq


def char_fn_H(x, t: float, q: float, trunc: TruncationPolicy = DEFAULT_POLICY):
    """Generating function of the q-Hermite family, product form:

        sum_n t^n H_n(x|q)/[n]_q!  =  1 / prod_k (1 - (1-q) x t q^k + (1-q) t^2 q^{2k})

    valid for |t| sqrt(1-q) < 1 and x in S(q).
    """
    if q == 1.0 or abs(q) > trunc.q_limit:
        raise RegimeError("char_fn_H needs |q| <= policy q_limit < 1")
    if abs(t) * math.sqrt(1.0 - q) >= 1.0:
        raise RegimeError("char_fn_H needs |t|*sqrt(1-q) < 1")
    lo, hi = support(q)
    x = np.asarray(x, dtype=float)
    if np.any((x < lo) | (x > hi)):
        raise RegimeError("char_fn_H needs x in S(q)")
    amp = (1.0 - q) * (float(np.max(np.abs(x))) if x.size else 0.0) * abs(t) + (1.0 - q) * t * t
    prod = np.ones_like(x)
    qk = 1.0
    for k in range(trunc.max_terms):
        if amp * abs(qk) / (1.0 - abs(q)) <= trunc.term_tol:
            inv = 1.0 / prod
            return float(inv) if inv.ndim == 0 else inv
        prod = prod * (1.0 - (1.0 - q) * x * t * qk + (1.0 - q) * t * t * qk * qk)
        qk *= q
    raise TruncationError("char_fn_H did not converge within the term budget")


def b_poly(n: int, x, q: float):
    """The auxiliary family from the Al-Salam--Chihara connection formulas."""
    return eval_poly(PolyFamily("bpoly"), n, x, q)
