"""Bivariate kernel machinery: coefficient polynomials, truncated sums, closed forms.

The central object is the two-parameter ultraspherical kernel

    K(x, y) = sum_n  phi_n(r1, r2, q) Rhat_n(x | r1 r2, q) Rhat_n(y | r1 r2, q)

whose closed form is (1 - r1 r2) f_CN(y|x,r1,q) f_CN(x|y,r2,q) divided by the
f_R marginals.  The catalog ids cover the classical specializations
(Poisson-Mehler, the three Chebyshev kernels at q = 0) and the two
non-symmetric kernels (Al-Salam-Chihara pair, big q-Hermite pair), plus the
single-variable family behind the auxiliary expansion identities.

Coefficient functions:

    w_poly(n, m, ...)    symmetric degree-2n polynomial in (r1, r2)
    phi_n                w_n(0,...) / (r1^2 r2^2)_n, the kernel coefficients
    gamma_nu(n, u, ...)  the rearrangement sums; equal to phi_{n-2u}
    d_n                  the mixed Hermite/ultraspherical expansion functions
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .densities import f_cn, f_cn_classical, f_n, f_n_classical, f_r, f_r_classical
from .errors import DivisionError, DomainError
from .polyfam import (PolyFamily, char_fn_H, eval_sequence,
                      orthonormal_h_sequence, orthonormal_r_sequence)
from .qcore import (DEFAULT_POLICY, TruncationPolicy, q_binomial, q_bracket,
                    q_factorial, q_poch, weight)

__all__ = [
    "w_poly", "phi_n", "phi_sequence", "gamma_nu", "d_n",
    "KernelSpec", "kernel_sum", "kernel_closed", "le_coefficient_sequence",
    "aux3_exp11", "aux3_exp12", "aux3_exp13",
]


# ---------------------------------------------------------------------------
# coefficient functions

def w_poly(n: int, m: int, r1: float, r2: float, q: float) -> float:
    """The symmetric coefficient polynomial

        w_n(m, r1, r2, q) = sum_s [n s]_q r1^s (q^m r2^2)_s r2^(n-s) (q^m r1^2)_(n-s).
    """
    if n < 0 or m < 0:
        raise DomainError("w_poly needs n, m >= 0")
    qm = q**m
    tot = 0.0
    for s in range(n + 1):
        tot += (q_binomial(n, s, q) * r1**s * float(q_poch(qm * r2 * r2, q, s))
                * r2 ** (n - s) * float(q_poch(qm * r1 * r1, q, n - s)))
    return tot


def phi_n(n: int, r1: float, r2: float, q: float) -> float:
    """Kernel coefficient phi_n = w_n(0, r1, r2, q) / (r1^2 r2^2)_n; |phi_n| <= 1."""
    if abs(r1 * r2) >= 1.0:
        raise DomainError("phi_n needs |r1 r2| < 1")
    return w_poly(n, 0, r1, r2, q) / float(q_poch(r1 * r1 * r2 * r2, q, n))


def q_binomial_table(n_max: int, q: float) -> np.ndarray:
    """Gaussian binomials [n k]_q for n, k <= n_max via the Pascal recurrence.

    Stays bounded for |q| < 1 (unlike ratios of bracket factorials) and
    degenerates to the ordinary Pascal triangle at q = 1.
    """
    tab = np.zeros((n_max + 1, n_max + 1))
    tab[:, 0] = 1.0
    for n in range(1, n_max + 1):
        qk = q
        for k in range(1, n + 1):
            tab[n, k] = tab[n - 1, k - 1] + qk * tab[n - 1, k]
            qk *= q
    return tab


def phi_sequence(n_max: int, r1: float, r2: float, q: float) -> np.ndarray:
    """phi_0 .. phi_{n_max} in one pass (shared Pochhammer/binomial tables)."""
    if abs(r1 * r2) >= 1.0:
        raise DomainError("phi_sequence needs |r1 r2| < 1")
    p1 = np.empty(n_max + 1)  # (r1^2)_s
    p2 = np.empty(n_max + 1)  # (r2^2)_s
    pb = np.empty(n_max + 1)  # (r1^2 r2^2)_s
    p1[0] = p2[0] = pb[0] = 1.0
    b2 = (r1 * r2) ** 2
    for s in range(1, n_max + 1):
        p1[s] = p1[s - 1] * (1.0 - r1 * r1 * q ** (s - 1))
        p2[s] = p2[s - 1] * (1.0 - r2 * r2 * q ** (s - 1))
        pb[s] = pb[s - 1] * (1.0 - b2 * q ** (s - 1))
    binom = q_binomial_table(n_max, q)
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        tot = 0.0
        for s in range(n + 1):
            tot += binom[n, s] * r1**s * p2[s] * r2 ** (n - s) * p1[n - s]
        out[n] = tot / pb[n]
    return out


def gamma_nu(n: int, u: int, r1: float, r2: float, q: float) -> float:
    """The rearranged coefficient sum

        gamma_{n,u} = sum_{m<=u} [u m]_q (r2^2)_m (r1 r2 q^(n-u-m+1))_m (r1^2)_m
                       (r1 r2)_m w_{n-2m}(m, r1, r2, q)  /  (r1^2 r2^2)_n,

    equal to phi_{n-2u} for 0 <= u <= floor(n/2).
    """
    if not 0 <= u <= n // 2:
        raise IndexError(f"gamma_nu needs 0 <= u <= floor(n/2), got u={u}, n={n}")
    b = r1 * r2
    tot = 0.0
    for m in range(u + 1):
        tot += (q_binomial(u, m, q)
                * float(q_poch(r2 * r2, q, m))
                * float(q_poch(b * q ** (n - u - m + 1), q, m))
                * float(q_poch(r1 * r1, q, m))
                * float(q_poch(b, q, m))
                * w_poly(n - 2 * m, m, r1, r2, q))
    return tot / float(q_poch(b * b, q, n))


def d_n(n: int, y, r1: float, r2: float, q: float, form: str = "direct"):
    """The mixed expansion functions D_n(y | r1, r2, q).

    ``form="direct"`` evaluates the defining sum over q-Hermite times
    ultraspherical factors; ``form="expanded"`` evaluates the pure
    ultraspherical rearrangement through gamma_{n,u}.  The two agree.
    """
    if abs(r1) >= 1.0 or abs(r2) >= 1.0:
        raise DomainError("d_n needs |r1|, |r2| < 1")
    b = r1 * r2
    y = np.asarray(y, dtype=float)
    if form == "direct":
        H = eval_sequence(PolyFamily("qhermite"), n, y, q)
        R = eval_sequence(PolyFamily("ultra_r", beta=b), n, y, q)
        tot = np.zeros_like(y)
        for j in range(n + 1):
            tot = tot + (q_binomial(n, j, q) * r1 ** (n - j) * r2**j
                         * float(q_poch(r1 * r1, q, j)) * H[n - j] * R[j]
                         / float(q_poch(b * b, q, j)))
        return tot if tot.ndim else float(tot)
    if form == "expanded":
        R = eval_sequence(PolyFamily("ultra_r", beta=b), n, y, q)
        tot = np.zeros_like(y)
        for u in range(n // 2 + 1):
            c = (q_factorial(n, q) * (1.0 - b * q ** (n - 2 * u)) * b**u
                 / (q_factorial(u, q) * q_factorial(n - 2 * u, q)
                    * float(q_poch(b, q, n - u + 1))))
            tot = tot + c * R[n - 2 * u] * gamma_nu(n, u, r1, r2, q)
        return tot if tot.ndim else float(tot)
    raise DomainError(f"unknown d_n form {form!r}")


# ---------------------------------------------------------------------------
# kernel specifications

_KERNEL_IDS = frozenset({
    "main", "poisson_mehler", "cheb_uu", "cheb_tt", "cheb_ut",
    "asc_nonsym", "bigqh_nonsym", "aux3_family",
})


@dataclass(frozen=True)
class KernelSpec:
    """One kernel from the catalog.

    Parameter slots by id:
        main           r1, r2
        poisson_mehler rho
        cheb_uu/tt/ut  rho   (q must be 0; the pair lives on [-2, 2]^2)
        asc_nonsym     rho1, rho2, y_cond  (args of the pair are (x, z))
        bigqh_nonsym   a, b with |a| < |b|
        aux3_family    r, m  (single-variable; the second argument is ignored)
    """

    id: str
    q: float
    r1: float | None = None
    r2: float | None = None
    rho: float | None = None
    rho1: float | None = None
    rho2: float | None = None
    y_cond: float | None = None
    a: float | None = None
    b: float | None = None
    r: float | None = None
    m: int | None = None
    n_terms: int = 200
    trunc: TruncationPolicy = field(default_factory=TruncationPolicy)

    def __post_init__(self) -> None:
        if self.id not in _KERNEL_IDS:
            raise DomainError(f"unknown kernel id {self.id!r}")
        if self.id == "main":
            if self.r1 is None or self.r2 is None or max(abs(self.r1), abs(self.r2)) >= 1:
                raise DomainError("main kernel needs |r1|, |r2| < 1")
        elif self.id == "poisson_mehler":
            if self.rho is None or not -1.0 < self.rho < 1.0:
                raise DomainError("poisson_mehler needs rho in (-1, 1)")
        elif self.id.startswith("cheb_"):
            if self.rho is None or not -1.0 < self.rho < 1.0:
                raise DomainError(f"{self.id} needs rho in (-1, 1)")
            if self.q != 0.0:
                raise DomainError(f"{self.id} lives at q = 0")
        elif self.id == "asc_nonsym":
            if None in (self.rho1, self.rho2, self.y_cond):
                raise DomainError("asc_nonsym needs rho1, rho2, y_cond")
            if max(abs(self.rho1), abs(self.rho2)) >= 1.0:
                raise DomainError("asc_nonsym needs |rho1|, |rho2| < 1")
        elif self.id == "bigqh_nonsym":
            if self.a is None or self.b is None or not abs(self.a) < abs(self.b) < 1.0:
                raise DomainError("bigqh_nonsym needs |a| < |b| < 1")
        elif self.id == "aux3_family":
            if self.r is None or not -1.0 < self.r < 1.0 or self.m is None or self.m < 0:
                raise DomainError("aux3_family needs r in (-1, 1) and m >= 0")


def _tail_estimate(terms: np.ndarray, ratio: float) -> float:
    """Geometric tail from the largest of the last three term magnitudes."""
    last = float(np.max(np.abs(terms[-3:])))
    ratio = min(max(ratio, 0.0), 0.999)
    return last * ratio / (1.0 - ratio)


def kernel_sum(spec: KernelSpec, x, y):
    """Partial kernel sum to ``spec.n_terms`` terms plus a geometric tail estimate.

    Returns ``(value, tail_estimate)``; the value has the shape of the
    broadcast spatial arguments.
    """
    N = spec.n_terms
    q = spec.q
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast_shapes(x.shape, y.shape)
    terms = np.zeros((N + 1,) + shape)

    if spec.id == "main":
        r1, r2 = spec.r1, spec.r2
        beta = r1 * r2
        phi = phi_sequence(N, r1, r2, q)
        if q == 1.0:
            s = math.sqrt((1.0 - beta) / (1.0 + beta))
            Rx = _orthonormal_hermite_classical(N, s * x)
            Ry = _orthonormal_hermite_classical(N, s * y)
        else:
            Rx = orthonormal_r_sequence(N, x, beta, q)
            Ry = orthonormal_r_sequence(N, y, beta, q)
        for n in range(N + 1):
            terms[n] = phi[n] * Rx[n] * Ry[n]
        ratio = max(abs(r1), abs(r2))
    elif spec.id == "poisson_mehler":
        rho = spec.rho
        if q == 1.0:
            Hx = _orthonormal_hermite_classical(N, x)
            Hy = _orthonormal_hermite_classical(N, y)
        else:
            Hx = orthonormal_h_sequence(N, x, q)
            Hy = orthonormal_h_sequence(N, y, q)
        for n in range(N + 1):
            terms[n] = rho**n * Hx[n] * Hy[n]
        ratio = abs(rho)
    elif spec.id in ("cheb_uu", "cheb_tt", "cheb_ut"):
        rho = spec.rho
        fx = "chebyshev_u" if spec.id in ("cheb_uu", "cheb_ut") else "chebyshev_t"
        fy = "chebyshev_u" if spec.id == "cheb_uu" else "chebyshev_t"
        Px = eval_sequence(PolyFamily(fx), N, x / 2.0, 0.0)
        Py = eval_sequence(PolyFamily(fy), N, y / 2.0, 0.0)
        for n in range(N + 1):
            terms[n] = rho**n * Px[n] * Py[n]
        ratio = abs(rho)
    elif spec.id == "asc_nonsym":
        rho1, rho2, yc = spec.rho1, spec.rho2, spec.y_cond
        Pz = eval_sequence(PolyFamily("aschihara", y=yc, rho=rho1 * rho2), N, y, q)
        Px = eval_sequence(PolyFamily("aschihara", y=yc, rho=rho1), N, x, q)
        fact = 1.0
        poch = 1.0
        rr = (rho1 * rho2) ** 2
        for n in range(N + 1):
            if n > 0:
                fact *= q_bracket(n, q)
                poch *= 1.0 - rr * q ** (n - 1)
            terms[n] = rho2**n / (fact * poch) * Pz[n] * Px[n]
        ratio = abs(rho2)
    elif spec.id == "bigqh_nonsym":
        a, b = spec.a, spec.b
        Hx = eval_sequence(PolyFamily("big_qhermite", a=a), N, x, q)
        Hy = eval_sequence(PolyFamily("big_qhermite", a=b), N, y, q)
        fact = 1.0
        for n in range(N + 1):
            if n > 0:
                fact *= q_bracket(n, q)
            terms[n] = (a / b) ** n / fact * Hx[n] * Hy[n]
        ratio = abs(a / b)
    elif spec.id == "aux3_family":
        val = aux3_exp11(x, spec.m, spec.r, q, n_terms=N, trunc=spec.trunc)
        return val, 0.0 if np.ndim(val) == 0 else np.float64(0.0)
    else:  # pragma: no cover
        raise DomainError(spec.id)

    value = terms.sum(axis=0)
    mags = np.abs(terms).reshape(N + 1, -1).max(axis=1)
    tail = _tail_estimate(mags, ratio)
    if value.ndim == 0:
        return float(value), tail
    return value, tail


def _orthonormal_hermite_classical(n_max: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x
    for n in range(1, n_max):
        out[n + 1] = (x * out[n] - math.sqrt(n) * out[n - 1]) / math.sqrt(n + 1)
    return out


def kernel_closed(spec: KernelSpec, x, y, normalized: bool = True):
    """Closed form of the kernel at (x, y).

    For ``main`` the default is the normalized form (the one the sum
    converges to); ``normalized=False`` returns the plain product
    (1-r1r2) f_CN(y|x,r1) f_CN(x|y,r2) without dividing by the marginals.
    Raises ``DivisionError`` when a marginal underflows at the support edge.
    """
    q = spec.q
    tr = spec.trunc
    if spec.id == "main":
        r1, r2 = spec.r1, spec.r2
        beta = r1 * r2
        if q == 1.0:
            num = (1.0 - beta) * f_cn_classical(y, x, r1) * f_cn_classical(x, y, r2)
            if not normalized:
                return num
            den = f_r_classical(x, beta) * f_r_classical(y, beta)
        else:
            num = (1.0 - beta) * f_cn(y, x, r1, q, tr) * f_cn(x, y, r2, q, tr)
            if not normalized:
                return num
            den = f_r(x, beta, q, tr) * f_r(y, beta, q, tr)
        return _safe_ratio(num, den)
    if spec.id == "poisson_mehler":
        rho = spec.rho
        if q == 1.0:
            return _safe_ratio(f_cn_classical(x, y, rho), f_n_classical(x))
        return _safe_ratio(f_cn(x, y, rho, q, tr), f_n(x, q, tr))
    if spec.id in ("cheb_uu", "cheb_tt", "cheb_ut"):
        rho = spec.rho
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        den = weight("w", x / 2.0, y / 2.0, rho)
        r2_ = rho * rho
        if spec.id == "cheb_uu":
            out = (1.0 - r2_) / den
        elif spec.id == "cheb_tt":
            out = (4.0 * (1.0 - r2_) - rho * (3.0 + r2_) * x * y
                   + 2.0 * r2_ * (x * x + y * y)) / (4.0 * den)
        else:  # cheb_ut: first slot carries U, second carries T
            out = (2.0 * (1.0 - r2_) + r2_ * y * y - rho * x * y) / (2.0 * den)
        return out if np.ndim(out) else float(out)
    if spec.id == "asc_nonsym":
        z = y
        num = f_cn(z, x, spec.rho2, q, tr)
        den = f_cn(z, spec.y_cond, spec.rho1 * spec.rho2, q, tr)
        return _safe_ratio(num, den)
    if spec.id == "bigqh_nonsym":
        num = f_cn(x, y, spec.a / spec.b, q, tr)
        den = f_n(x, q, tr) * char_fn_H(x, spec.a, q, tr)
        return _safe_ratio(num, den)
    if spec.id == "aux3_family":
        return aux3_exp12(x, spec.m, spec.r, q, trunc=spec.trunc)
    raise DomainError(spec.id)  # pragma: no cover


def _safe_ratio(num, den):
    den_arr = np.asarray(den, dtype=float)
    if np.any(den_arr == 0.0) or not np.all(np.isfinite(den_arr)):
        raise DivisionError("marginal density underflowed; move away from the support edge")
    out = np.asarray(num) / den_arr
    return out if out.ndim else float(out)


def le_coefficient_sequence(spec: KernelSpec, n_max: int) -> np.ndarray:
    """The expansion coefficients {phi_n} (main) or {rho^n} (poisson_mehler)."""
    if spec.id == "main":
        return phi_sequence(n_max, spec.r1, spec.r2, spec.q)
    if spec.id == "poisson_mehler":
        return spec.rho ** np.arange(n_max + 1)
    raise DomainError("coefficient sequences exist for main and poisson_mehler only")


# ---------------------------------------------------------------------------
# the single-variable auxiliary expansion family

def aux3_exp11(x, m: int, r: float, q: float, n_terms: int = 120,
               trunc: TruncationPolicy = DEFAULT_POLICY):
    """(1-r) f_N(x|q) sum_j H_j(x|q) H_{j+m}(x|q) r^j / [j]_q!."""
    x = np.asarray(x, dtype=float)
    H = eval_sequence(PolyFamily("qhermite"), n_terms + m, x, q)
    tot = np.zeros_like(x)
    fact = 1.0
    for j in range(n_terms + 1):
        if j > 0:
            fact *= q_bracket(j, q)
        tot = tot + H[j] * H[j + m] * (r**j / fact)
    out = (1.0 - r) * f_n(x, q, trunc) * tot
    return out if out.ndim else float(out)


def aux3_exp12(x, m: int, r: float, q: float, trunc: TruncationPolicy = DEFAULT_POLICY):
    """f_R(x|r,q) sum_{k<=m} [m k]_q (-r)^k q^C(k,2) H_{m-k}(x|q) R_k(x|r,q) / (r^2)_k."""
    x = np.asarray(x, dtype=float)
    H = eval_sequence(PolyFamily("qhermite"), m, x, q)
    R = eval_sequence(PolyFamily("ultra_r", beta=r), m, x, q)
    tot = np.zeros_like(x)
    for k in range(m + 1):
        tot = tot + (q_binomial(m, k, q) * (-r) ** k * q ** math.comb(k, 2)
                     * H[m - k] * R[k] / float(q_poch(r * r, q, k)))
    out = f_r(x, r, q, trunc) * tot
    return out if out.ndim else float(out)


def aux3_exp13(x, m: int, r: float, q: float, n_terms: int = 120,
               trunc: TruncationPolicy = DEFAULT_POLICY):
    """(1-r) f_N(x|q) sum_s r^s H_{2s+m}(x|q) / ([s]_q! (r)_{m+s+1})."""
    x = np.asarray(x, dtype=float)
    H = eval_sequence(PolyFamily("qhermite"), 2 * n_terms + m, x, q)
    tot = np.zeros_like(x)
    fact = 1.0
    poch = float(q_poch(r, q, m + 1))
    for s in range(n_terms + 1):
        if s > 0:
            fact *= q_bracket(s, q)
            poch *= 1.0 - r * q ** (m + s)
        tot = tot + H[2 * s + m] * (r**s / (fact * poch))
    out = (1.0 - r) * f_n(x, q, trunc) * tot
    return out if out.ndim else float(out)
