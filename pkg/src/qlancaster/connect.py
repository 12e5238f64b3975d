"""Connection and linearization coefficients between the polynomial families,
plus the closed-form cross moments against the f_N and f_R weights.

Every operation returns a :class:`CoeffTable` whose ``entries`` vector is
indexed by the target polynomial degree; ``reconstruct`` re-evaluates the
expansion pointwise so tables can be validated against the recurrences they
came from.  The finite sums are evaluated exactly as printed; out-of-range
q-binomials are zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .polyfam import PolyFamily, eval_sequence
from .qcore import q_binomial, q_bracket, q_factorial, q_poch

__all__ = [
    "CoeffTable", "cnac_coeffs", "r_to_h", "h_to_r", "p_to_h", "h_to_p",
    "linearize", "cross_moment",
]


@dataclass(frozen=True)
class CoeffTable:
    """Expansion of one polynomial (or product) over a target family.

    ``entries[d]`` multiplies the degree-d target polynomial; degrees that do
    not occur carry 0.
    """

    kind: str
    n: int
    m: int | None
    q: float
    params: dict
    target: PolyFamily
    entries: np.ndarray

    def reconstruct(self, x):
        """Evaluate sum_d entries[d] * target_d(x)."""
        seq = eval_sequence(self.target, len(self.entries) - 1, x, self.q)
        return np.tensordot(self.entries, seq, axes=(0, 0))


def _bracket_ratio(n: int, k: int, q: float) -> float:
    """[n]_q! / ([k]_q! [n-2k]_q!) for 0 <= k <= n//2 (always finite)."""
    out = q_binomial(n, k, q)
    for i in range(n - 2 * k + 1, n - k + 1):
        out *= q_bracket(i, q)
    return out


def cnac_coeffs(n: int, beta: float, gamma: float, q: float) -> CoeffTable:
    """Expansion of C_n(.|gamma,q) over {C_{n-2k}(.|beta,q)}:

        c_k = beta^k (gamma/beta)_k (gamma)_{n-k} (1 - beta q^{n-2k})
              / ((q)_k (beta q)_{n-k} (1 - beta)).

    The beta = 0 limit is served by :func:`r_to_h`, not here.
    """
    if beta == 0.0:
        raise DomainError("cnac_coeffs needs beta != 0; use r_to_h for the limit")
    if not (-1.0 < beta < 1.0 and -1.0 < gamma < 1.0):
        raise DomainError("cnac_coeffs needs |beta|, |gamma| < 1")
    entries = np.zeros(n + 1)
    for k in range(n // 2 + 1):
        c = (beta**k * float(q_poch(gamma / beta, q, k)) * float(q_poch(gamma, q, n - k))
             * (1.0 - beta * q ** (n - 2 * k))
             / (float(q_poch(q, q, k)) * float(q_poch(beta * q, q, n - k)) * (1.0 - beta)))
        entries[n - 2 * k] = c
    return CoeffTable("CtoC", n, None, q, {"beta": beta, "gamma": gamma},
                      PolyFamily("ultra_c", beta=beta), entries)


def r_to_h(n: int, r: float, q: float) -> CoeffTable:
    """R_n(.|r,q) over the q-Hermite family; the beta -> 0 limit of the
    connection formula, with beta^k (gamma/beta)_k -> (-gamma)^k q^C(k,2)."""
    entries = np.zeros(n + 1)
    for k in range(n // 2 + 1):
        entries[n - 2 * k] = (_bracket_ratio(n, k, q) * q ** math.comb(k, 2)
                              * (-r) ** k * float(q_poch(r, q, n - k)))
    return CoeffTable("RtoH", n, None, q, {"r": r}, PolyFamily("qhermite"), entries)


def h_to_r(n: int, r: float, q: float) -> CoeffTable:
    """H_n(.|q) over {R_{n-2k}(.|r,q)}."""
    entries = np.zeros(n + 1)
    for k in range(n // 2 + 1):
        entries[n - 2 * k] = (_bracket_ratio(n, k, q) * (1.0 - r * q ** (n - 2 * k)) * r**k
                              / ((1.0 - r) * float(q_poch(r * q, q, n - k))))
    return CoeffTable("HtoR", n, None, q, {"r": r}, PolyFamily("ultra_r", beta=r), entries)


def p_to_h(n: int, y: float, rho: float, q: float) -> CoeffTable:
    """Al-Salam--Chihara P_n(.|y,rho,q) over the q-Hermite family:

        P_n = sum_j [n j]_q rho^{n-j} B_{n-j}(y|q) H_j.
    """
    from .polyfam import b_poly

    entries = np.zeros(n + 1)
    for j in range(n + 1):
        entries[j] = q_binomial(n, j, q) * rho ** (n - j) * b_poly(n - j, y, q)
    return CoeffTable("PtoH", n, None, q, {"y": y, "rho": rho},
                      PolyFamily("qhermite"), entries)


def h_to_p(n: int, y: float, rho: float, q: float) -> CoeffTable:
    """H_n(.|q) over {P_j(.|y,rho,q)} with coefficients [n j]_q rho^{n-j} H_{n-j}(y|q)."""
    H = eval_sequence(PolyFamily("qhermite"), n, np.float64(y), q)
    entries = np.zeros(n + 1)
    for j in range(n + 1):
        entries[j] = q_binomial(n, j, q) * rho ** (n - j) * float(H[n - j])
    return CoeffTable("HtoP", n, None, q, {"y": y, "rho": rho},
                      PolyFamily("aschihara", y=y, rho=rho), entries)


def linearize(kind: str, n: int, m: int, r: float, q: float) -> CoeffTable:
    """Linearization of a product into a single family.

    Kinds: RRtoR (R_n R_m over R), HRtoH (H_m R_n over H), HRtoR (H_m R_n
    over R), HHtoH (H_n H_m over H; the classical q-Hermite rule).
    """
    if kind == "HHtoH":
        entries = np.zeros(n + m + 1)
        for k in range(min(n, m) + 1):
            entries[n + m - 2 * k] = (q_binomial(n, k, q) * q_binomial(m, k, q)
                                      * q_factorial(k, q))
        return CoeffTable(kind, n, m, q, {}, PolyFamily("qhermite"), entries)

    if not -1.0 < r < 1.0:
        raise DomainError("linearize needs r in (-1, 1)")
    entries = np.zeros(n + m + 1)
    if kind == "RRtoR":
        for k in range(min(n, m) + 1):
            entries[n + m - 2 * k] = (
                q_binomial(m, k, q) * q_binomial(n, k, q) * q_factorial(k, q)
                * float(q_poch(r, q, m - k)) * float(q_poch(r, q, n - k))
                * float(q_poch(r, q, k)) * float(q_poch(r * r, q, n + m - k))
                * (1.0 - r * q ** (n + m - 2 * k))
                / ((1.0 - r) * float(q_poch(r * q, q, n + m - k))
                   * float(q_poch(r * r, q, n + m - 2 * k))))
        target = PolyFamily("ultra_r", beta=r)
    elif kind == "HRtoH":
        for s in range((n + m) // 2 + 1):
            inner = 0.0
            for k in range(s + 1):
                binom = q_binomial(m, s - k, q) * q_binomial(n - s, k, q)
                if binom == 0.0:
                    continue
                inner += (binom * (-r) ** k * q ** math.comb(k, 2)
                          * float(q_poch(r, q, n - k)))
            entries[n + m - 2 * s] = q_binomial(n, s, q) * q_factorial(s, q) * inner
        target = PolyFamily("qhermite")
    elif kind == "HRtoR":
        for u in range((n + m) // 2 + 1):
            mid = 0.0
            for s in range(u + 1):
                inner = 0.0
                for k in range(s + 1):
                    binom = (q_binomial(s, k, q)
                             * q_binomial(n + m - 2 * s, m + k - s, q))
                    if binom == 0.0:
                        continue
                    inner += (binom * q ** math.comb(k, 2) * (-r) ** k
                              * float(q_poch(r, q, n - k)))
                mid += (q_binomial(u, s, q) * r ** (u - s) * inner
                        / float(q_poch(r * q, q, n + m - u - s)))
            entries[n + m - 2 * u] = (
                q_factorial(n, q) * q_factorial(m, q)
                * (1.0 - r * q ** (n + m - 2 * u))
                / (q_factorial(u, q) * q_factorial(n + m - 2 * u, q) * (1.0 - r))
                * mid)
        target = PolyFamily("ultra_r", beta=r)
    else:
        raise DomainError(f"unknown linearization kind {kind!r}")
    return CoeffTable(kind, n, m, q, {"r": r}, target, entries)


def cross_moment(kind: str, n: int, m: int, beta: float, q: float) -> float:
    """Closed-form mixed moments of H_n(.|q) R_m(.|beta,q).

    HR_fN: against the f_N weight,
        0 if n > m or n+m odd, else
        q^C((m-n)/2, 2) [m]_q! (-beta)^{(m-n)/2} (beta)_{(m+n)/2} / [(m-n)/2]_q!.

    HR_fR: against the f_R weight,
        0 if m > n or |n-m| odd, else
        beta^{(n-m)/2} (beta^2)_m [n]_q! / ([(n-m)/2]_q! (beta q)_{(n+m)/2}).
    """
    if not -1.0 < beta < 1.0:
        raise DomainError("cross_moment needs beta in (-1, 1)")
    if kind == "HR_fN":
        if n > m or (n + m) % 2 == 1:
            return 0.0
        k = (m - n) // 2
        return (q ** math.comb(k, 2) * q_factorial(m, q) * (-beta) ** k
                / q_factorial(k, q) * float(q_poch(beta, q, (m + n) // 2)))
    if kind == "HR_fR":
        if m > n or (n - m) % 2 == 1:
            return 0.0
        k = (n - m) // 2
        return (beta**k * float(q_poch(beta * beta, q, m)) * q_factorial(n, q)
                / (q_factorial(k, q) * float(q_poch(beta * q, q, (n + m) // 2))))
    raise DomainError(f"unknown cross moment kind {kind!r}")
