"""Adaptive quadrature over S(q) and the numerical verification suites.

``integrate`` is an adaptive-bisection Gauss-Legendre rule with a per-panel
error estimate.  Integrals over a full support interval whose density
vanishes like a square root at the ends go through the substitution
x = mid + half*sin(theta), which turns the edge behaviour smooth.

Every suite emits a :class:`CheckReport`; ``pass`` is exactly
``max_abs_residual <= tolerance``.  The tolerance ladder is: exact (0) >
quadrature identity (1e-8) > truncated-series identity (1e-6) > Monte
Carlo (3 sigma).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .densities import (f_bn, f_cn, f_cn_classical, f_n, f_n_classical, f_r,
                        f_t, f_u)
from .errors import AdaptError, DomainError
from .kernels import KernelSpec, aux3_exp11, aux3_exp12, aux3_exp13, phi_sequence
from .polyfam import PolyFamily, eval_sequence, orthonormal_r_sequence
from .qcore import (DEFAULT_POLICY, TruncationPolicy, q_bracket, q_factorial,
                    q_poch, support)

__all__ = [
    "CheckReport", "integrate", "gauss_grid",
    "orthogonality_suite", "chapman_kolmogorov_check", "marginal_check",
    "le_grid_check", "positivity_scan", "density_forms_check", "aux3_check",
    "catalog_check", "exp1_check", "dei_check", "fnfr_check",
]


@dataclass
class CheckReport:
    """Outcome of one numerical verification."""

    check_id: str
    params: dict
    max_abs_residual: float
    tolerance: float
    grid: str = ""
    passed: bool = False
    runtime: float = 0.0
    detail: dict = field(default_factory=dict)

    def finalize(self, t0: float) -> "CheckReport":
        self.passed = bool(self.max_abs_residual <= self.tolerance)
        self.runtime = time.perf_counter() - t0
        return self

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "params": self.params,
            "max_abs_residual": self.max_abs_residual,
            "tolerance": self.tolerance,
            "grid": self.grid,
            "pass": self.passed,
            "runtime_s": round(self.runtime, 6),
            **({"detail": self.detail} if self.detail else {}),
        }


# ---------------------------------------------------------------------------
# quadrature

_GL_ORDER = 15
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


def _gl_panel(f, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    return half * float(np.sum(_GL_WEIGHTS * f(0.5 * (a + b) + half * _GL_NODES)))


def integrate(f, a: float, b: float, abs_tol: float = 1e-10,
              max_panels: int = 4000, sqrt_endpoints: bool = False):
    """Adaptive integral of ``f`` over [a, b] with certified absolute error.

    Returns ``(value, err_est)`` with ``err_est <= abs_tol``; raises
    ``AdaptError`` when the panel budget runs out first.  ``f`` must accept
    numpy arrays.  With ``sqrt_endpoints`` the integrand is rewritten through
    x = mid + half*sin(theta) so square-root vanishing at both ends is smooth.
    """
    if sqrt_endpoints:
        mid, half = 0.5 * (a + b), 0.5 * (b - a)

        def g(theta):
            return f(mid + half * np.sin(theta)) * half * np.cos(theta)

        return integrate(g, -math.pi / 2.0, math.pi / 2.0, abs_tol, max_panels)

    total_len = b - a
    stack = [(a, b, _gl_panel(f, a, b))]
    value, err, used = 0.0, 0.0, 1
    while stack:
        lo, hi, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _gl_panel(f, lo, mid)
        right = _gl_panel(f, mid, hi)
        est = abs(whole - (left + right))
        used += 2
        if est <= abs_tol * max(1e-12, (hi - lo)) / total_len or (hi - lo) < 1e-13 * total_len:
            value += left + right
            err += est
        else:
            if used >= max_panels:
                raise AdaptError(
                    f"integrate used {used} panels without reaching abs_tol={abs_tol}"
                )
            stack.append((lo, mid, left))
            stack.append((mid, hi, right))
    return value, err


def gauss_grid(a: float, b: float, panels: int = 40, order: int = 20,
               sqrt_endpoints: bool = False):
    """Composite Gauss-Legendre nodes/weights on [a, b] (optionally sin-substituted).

    The fixed grid is what the vectorized Gram/marginal checks run on; error
    control there is by comparing two refinement levels.
    """
    t, w = np.polynomial.legendre.leggauss(order)
    if sqrt_endpoints:
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        edges = np.linspace(-math.pi / 2.0, math.pi / 2.0, panels + 1)
        th = np.concatenate([0.5 * (e0 + e1) + 0.5 * (e1 - e0) * t
                             for e0, e1 in zip(edges[:-1], edges[1:])])
        wt = np.concatenate([0.5 * (e1 - e0) * w for e0, e1 in zip(edges[:-1], edges[1:])])
        return mid + half * np.sin(th), wt * half * np.cos(th)
    edges = np.linspace(a, b, panels + 1)
    x = np.concatenate([0.5 * (e0 + e1) + 0.5 * (e1 - e0) * t
                        for e0, e1 in zip(edges[:-1], edges[1:])])
    wt = np.concatenate([0.5 * (e1 - e0) * w for e0, e1 in zip(edges[:-1], edges[1:])])
    return x, wt


# ---------------------------------------------------------------------------
# orthogonality

def _pair_setup(tag: str, q: float, trunc: TruncationPolicy, **params):
    """Family, weight function, closed norm, and integration interval for one pair."""
    if tag == "hermite":
        fam = PolyFamily("hermite")
        dens = lambda x: f_n_classical(x)
        norm = lambda n: math.factorial(n)
        interval, sqrt_ep = (-14.0, 14.0), False
    elif tag == "qhermite":
        fam = PolyFamily("qhermite")
        dens = lambda x: f_n(x, q, trunc)
        norm = lambda n: q_factorial(n, q)
        interval, sqrt_ep = support(q), True
    elif tag == "ultra_r":
        beta = params["beta"]
        fam = PolyFamily("ultra_r", beta=beta)
        dens = lambda x: f_r(x, beta, q, trunc)
        norm = lambda n: (q_factorial(n, q) * (1.0 - beta)
                          * float(q_poch(beta * beta, q, n)) / (1.0 - beta * q**n))
        interval, sqrt_ep = support(q), True
    elif tag == "aschihara":
        y, rho = params["y"], params["rho"]
        fam = PolyFamily("aschihara", y=y, rho=rho)
        dens = lambda x: f_cn(x, y, rho, q, trunc)
        norm = lambda n: q_factorial(n, q) * float(q_poch(rho * rho, q, n))
        interval, sqrt_ep = support(q), True
    elif tag == "big_qhermite":
        a = params["a"]
        fam = PolyFamily("big_qhermite", a=a)
        dens = lambda x: f_bn(x, a, q, trunc)
        norm = lambda n: q_factorial(n, q)
        interval, sqrt_ep = support(q), True
    elif tag == "chebyshev_t":
        fam = PolyFamily("chebyshev_t")
        dens = f_t
        norm = lambda n: 1.0 if n == 0 else 0.5
        interval, sqrt_ep = (-1.0, 1.0), True
    elif tag == "chebyshev_u":
        fam = PolyFamily("chebyshev_u")
        dens = f_u
        norm = lambda n: 1.0
        interval, sqrt_ep = (-1.0, 1.0), True
    else:
        raise DomainError(f"no orthogonality pair registered for {tag!r}")
    return fam, dens, norm, interval, sqrt_ep


def _gram(fam, dens, interval, sqrt_ep, n_max, q, panels):
    x, w = gauss_grid(*interval, panels=panels, order=20, sqrt_endpoints=sqrt_ep)
    V = eval_sequence(fam, n_max, x, q)
    return np.einsum("i,ni,mi->nm", w * dens(x), V, V)


def orthogonality_suite(tag: str, n_max: int = 8, q: float = 0.0, tol: float = 1e-8,
                        trunc: TruncationPolicy = DEFAULT_POLICY, **params) -> CheckReport:
    """Gram matrix of one family against its weight, compared to the closed norms.

    The residual is max |G_nm - delta_nm h_n| over n, m <= n_max; the error
    estimate is the drift between two grid refinements.
    """
    t0 = time.perf_counter()
    if n_max > 10:
        raise DomainError("orthogonality_suite is calibrated for n_max <= 10")
    fam, dens, norm, interval, sqrt_ep = _pair_setup(tag, q, trunc, **params)
    g1 = _gram(fam, dens, interval, sqrt_ep, n_max, q, panels=48)
    g2 = _gram(fam, dens, interval, sqrt_ep, n_max, q, panels=96)
    target = np.diag([norm(n) for n in range(n_max + 1)])
    resid = float(np.max(np.abs(g2 - target)))
    rep = CheckReport(
        check_id=f"orthogonality/{tag}",
        params={"q": q, "n_max": n_max, **params},
        max_abs_residual=resid,
        tolerance=tol,
        grid="composite GL 96x20 (theta-substituted)",
        detail={"refinement_drift": float(np.max(np.abs(g2 - g1)))},
    )
    return rep.finalize(t0)


# ---------------------------------------------------------------------------
# kernel-side checks

def chapman_kolmogorov_check(x: float, z: float, rho1: float, rho2: float, q: float,
                             tol: float = 1e-6,
                             trunc: TruncationPolicy = DEFAULT_POLICY) -> CheckReport:
    """integral over y of f_CN(z|y,rho1) f_CN(y|x,rho2) against f_CN at rho1*rho2.

    Both argument orders of the target are evaluated; the semigroup order
    (density in z conditioned at x) is the one that holds and is asserted.
    """
    t0 = time.perf_counter()
    lo, hi = support(q)
    val, _ = integrate(lambda y: f_cn(z, y, rho1, q, trunc) * f_cn(y, x, rho2, q, trunc),
                       lo, hi, abs_tol=1e-9, sqrt_endpoints=True)
    res_zx = abs(val - f_cn(z, x, rho1 * rho2, q, trunc))
    res_xz = abs(val - f_cn(x, z, rho1 * rho2, q, trunc))
    rep = CheckReport(
        check_id="chapman_kolmogorov",
        params={"x": x, "z": z, "rho1": rho1, "rho2": rho2, "q": q},
        max_abs_residual=res_zx,
        tolerance=tol,
        grid="adaptive GL15, abs_tol=1e-9",
        detail={"residual_z_given_x": res_zx, "residual_x_given_z": res_xz,
                "resolved_order": "z_given_x"},
    )
    return rep.finalize(t0)


def marginal_check(y: float, r1: float, r2: float, q: float, tol: float = 1e-6,
                   trunc: TruncationPolicy = DEFAULT_POLICY) -> CheckReport:
    """integral over x of (1-r1r2) f_CN(y|x,r1) f_CN(x|y,r2) equals f_R(y|r1r2,q)."""
    t0 = time.perf_counter()
    lo, hi = support(q)
    beta = r1 * r2
    val, _ = integrate(
        lambda x: (1.0 - beta) * f_cn(y, x, r1, q, trunc) * f_cn(x, y, r2, q, trunc),
        lo, hi, abs_tol=1e-9, sqrt_endpoints=True)
    resid = abs(val - f_r(y, beta, q, trunc))
    rep = CheckReport(
        check_id="marginal",
        params={"y": y, "r1": r1, "r2": r2, "q": q},
        max_abs_residual=resid, tolerance=tol,
        grid="adaptive GL15, abs_tol=1e-9",
    )
    return rep.finalize(t0)


def _kernel_grid_terms(r1: float, r2: float, q: float, xs: np.ndarray, ys: np.ndarray,
                       n_terms: int):
    beta = r1 * r2
    phi = phi_sequence(n_terms, r1, r2, q)
    Rx = orthonormal_r_sequence(n_terms, xs, beta, q)
    Ry = orthonormal_r_sequence(n_terms, ys, beta, q)
    return np.einsum("n,ni,nj->ij", phi, Rx, Ry)


def le_grid_check(r1: float, r2: float, q: float, grid_n: int = 21,
                  n_terms: int = 200, tol: float = 1e-6,
                  trunc: TruncationPolicy = DEFAULT_POLICY) -> CheckReport:
    """Pointwise kernel identity on a grid of S(q)^2:

        |sum_n ... * f_R(x) f_R(y)  -  (1-r1r2) f_CN(y|x,r1) f_CN(x|y,r2)| <= tol.
    """
    t0 = time.perf_counter()
    lo, hi = support(q)
    xs = np.linspace(lo, hi, grid_n)
    beta = r1 * r2
    K = _kernel_grid_terms(r1, r2, q, xs, xs, n_terms)
    marg = f_r(xs, beta, q, trunc)
    lhs = K * np.outer(marg, marg)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    rhs = (1.0 - beta) * f_cn(Y, X, r1, q, trunc) * f_cn(X, Y, r2, q, trunc)
    resid = float(np.max(np.abs(lhs - rhs)))
    rep = CheckReport(
        check_id="le_grid",
        params={"r1": r1, "r2": r2, "q": q},
        max_abs_residual=resid, tolerance=tol,
        grid=f"{grid_n}x{grid_n} on S(q)^2, N={n_terms}",
    )
    return rep.finalize(t0)


def positivity_scan(r1: float, r2: float, q: float, grid_n: int = 101,
                    n_terms: int = 200, tol: float = 1e-7) -> CheckReport:
    """Grid minimum of the truncated kernel sum; residual is max(0, -min)."""
    t0 = time.perf_counter()
    lo, hi = support(q)
    xs = np.linspace(lo, hi, grid_n)
    K = _kernel_grid_terms(r1, r2, q, xs, xs, n_terms)
    kmin = float(np.min(K))
    rep = CheckReport(
        check_id="positivity",
        params={"r1": r1, "r2": r2, "q": q},
        max_abs_residual=max(0.0, -kmin),
        tolerance=tol,
        grid=f"{grid_n}x{grid_n} on S(q)^2, N={n_terms}",
        detail={"grid_min": kmin},
    )
    return rep.finalize(t0)


def density_forms_check(beta: float, q: float, grid_n: int = 20, n_terms: int = 200,
                        tol: float = 1e-7,
                        trunc: TruncationPolicy = DEFAULT_POLICY) -> CheckReport:
    """Agreement of the equivalent f_R forms: the f_CN product form, the
    explicit infinite product, and the two q-Hermite series."""
    t0 = time.perf_counter()
    lo, hi = support(q)
    xs = np.linspace(lo + 1e-3, hi - 1e-3, grid_n)
    base = f_r(xs, beta, q, trunc)

    # explicit product: f_N (b^2)_inf / ((b)_inf (bq)_inf prod_j ((1+b q^j)^2 - (1-q) b q^j x^2))
    from .densities import _poch_inf_scaled, _general_prod_scaled, _f_n_scaled, _unscale, _renorm
    c1m, c1e = _poch_inf_scaled(beta * beta, q, trunc)
    c2m, c2e = _poch_inf_scaled(beta, q, trunc)
    c3m, c3e = _poch_inf_scaled(beta * q, q, trunc)
    state = [beta]

    def factor(k):
        a = state[0]
        state[0] *= q
        return 1.0 / ((1.0 + a) ** 2 - (1.0 - q) * a * xs * xs)

    amp = 7.0 * abs(beta) / (1.0 - abs(beta)) ** 2
    pm, pe = _general_prod_scaled(factor, amp, q, trunc, xs.shape)
    nm, ne = _f_n_scaled(xs, q, trunc)
    form2 = _unscale(nm * c1m / (c2m * c3m) * pm, ne + c1e - c2e - c3e + pe)

    # series forms
    H = eval_sequence(PolyFamily("qhermite"), 2 * n_terms, xs, q)
    fnq = f_n(xs, q, trunc)
    s1 = np.zeros_like(xs)
    s2 = np.zeros_like(xs)
    fact = 1.0
    poch = 1.0 - beta
    for n in range(n_terms + 1):
        if n > 0:
            fact *= q_bracket(n, q)
            poch *= 1.0 - beta * q**n
        s1 = s1 + beta**n * H[n] ** 2 / fact
        s2 = s2 + beta**n * H[2 * n] / (fact * poch)
    form3 = (1.0 - beta) * fnq * s1
    form4 = (1.0 - beta) * fnq * s2
    resid = float(max(np.max(np.abs(base - form2)), np.max(np.abs(base - form3)),
                      np.max(np.abs(base - form4))))
    rep = CheckReport(
        check_id="density_forms",
        params={"beta": beta, "q": q},
        max_abs_residual=resid, tolerance=tol,
        grid=f"{grid_n} points, N={n_terms}",
    )
    return rep.finalize(t0)


def aux3_check(m: int, r: float, q: float, grid_n: int = 11, tol: float = 1e-7,
               trunc: TruncationPolicy = DEFAULT_POLICY) -> CheckReport:
    """Pairwise agreement of the three auxiliary expansion forms."""
    t0 = time.perf_counter()
    lo, hi = support(q)
    xs = np.linspace(lo, hi, grid_n)
    e11 = aux3_exp11(xs, m, r, q, trunc=trunc)
    e12 = aux3_exp12(xs, m, r, q, trunc=trunc)
    e13 = aux3_exp13(xs, m, r, q, trunc=trunc)
    resid = float(max(np.max(np.abs(e11 - e12)), np.max(np.abs(e12 - e13))))
    rep = CheckReport(
        check_id="aux3",
        params={"m": m, "r": r, "q": q},
        max_abs_residual=resid, tolerance=tol,
        grid=f"{grid_n} points on S(q)",
    )
    return rep.finalize(t0)


def catalog_check(spec: KernelSpec, points, tol: float) -> CheckReport:
    """Series form against closed form for one catalog kernel at given point pairs."""
    t0 = time.perf_counter()
    resid = 0.0
    for (x, y) in points:
        s, _ = kernels.kernel_sum(spec, x, y)
        c = kernels.kernel_closed(spec, x, y)
        resid = max(resid, float(np.max(np.abs(np.asarray(s) - np.asarray(c)))))
    rep = CheckReport(
        check_id=f"catalog/{spec.id}",
        params={k: v for k, v in spec.__dict__.items()
                if k in ("id", "q", "r1", "r2", "rho", "rho1", "rho2", "y_cond", "a", "b", "r", "m")
                and v is not None},
        max_abs_residual=resid, tolerance=tol,
        grid=f"{len(points)} sample pairs",
    )
    return rep.finalize(t0)


def exp1_check(r1: float, r2: float, q: float, grid_n: int = 7, n_terms: int = 120,
               tol: float = 1e-6, trunc: TruncationPolicy = DEFAULT_POLICY) -> CheckReport:
    """The mixed expansion: f_N(x) f_R(y) sum_n H_n(x) D_n(y)/[n]_q! equals the closed form."""
    t0 = time.perf_counter()
    lo, hi = support(q)
    xs = np.linspace(lo * 0.9, hi * 0.9, grid_n)
    beta = r1 * r2
    H = eval_sequence(PolyFamily("qhermite"), n_terms, xs, q)
    D = np.stack([np.asarray(kernels.d_n(n, xs, r1, r2, q, form="direct"))
                  for n in range(n_terms + 1)])
    fact = np.ones(n_terms + 1)
    for n in range(1, n_terms + 1):
        fact[n] = fact[n - 1] * q_bracket(n, q)
    S = np.einsum("ni,nj,n->ij", H, D, 1.0 / fact)
    lhs = np.outer(f_n(xs, q, trunc), f_r(xs, beta, q, trunc)) * S
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    rhs = (1.0 - beta) * f_cn(Y, X, r1, q, trunc) * f_cn(X, Y, r2, q, trunc)
    resid = float(np.max(np.abs(lhs - rhs)))
    rep = CheckReport(
        check_id="exp1",
        params={"r1": r1, "r2": r2, "q": q},
        max_abs_residual=resid, tolerance=tol,
        grid=f"{grid_n}x{grid_n}, N={n_terms}",
    )
    return rep.finalize(t0)


def _fnfr_coeff(n: int, gamma: float, q: float) -> float:
    return ((-gamma) ** n * q ** math.comb(n, 2) * float(q_poch(gamma, q, n))
            * (1.0 - gamma * q ** (2 * n))
            / (q_factorial(n, q) * (1.0 - gamma) * float(q_poch(gamma * gamma, q, 2 * n))))


def dei_check(gamma: float, q: float, n_max: int = 200, tol: float = 1e-12) -> CheckReport:
    """Square-summability witness for the density-ratio expansion coefficients.

    Residual is the last increment of the partial sums of d_n^2 (Cauchy
    modulus at n_max); the detail carries an observed geometric decay rate.
    """
    t0 = time.perf_counter()
    d = np.array([_fnfr_coeff(n, gamma, q) for n in range(n_max + 1)])
    sq = d * d
    last_increment = float(sq[-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        nz = np.nonzero(np.abs(d) > 0)[0]
        rate = float(np.abs(d[nz[-1]] / d[nz[-2]])) if len(nz) >= 2 else 0.0
    rep = CheckReport(
        check_id="dei_l2",
        params={"gamma": gamma, "q": q, "n_max": n_max},
        max_abs_residual=last_increment, tolerance=tol,
        detail={"observed_ratio": rate, "sum_d2": float(sq.sum())},
    )
    return rep.finalize(t0)


def fnfr_check(gamma: float, q: float, grid_n: int = 9, n_terms: int = 120,
               tol: float = 1e-6, trunc: TruncationPolicy = DEFAULT_POLICY) -> CheckReport:
    """Partial sums of the f_N/f_R expansion converge to f_N on a grid."""
    t0 = time.perf_counter()
    lo, hi = support(q)
    xs = np.linspace(lo * 0.95, hi * 0.95, grid_n)
    R = eval_sequence(PolyFamily("ultra_r", beta=gamma), 2 * n_terms, xs, q)
    acc = np.zeros_like(xs)
    for n in range(n_terms + 1):
        acc = acc + _fnfr_coeff(n, gamma, q) * R[2 * n]
    lhs = f_r(xs, gamma, q, trunc) * acc
    resid = float(np.max(np.abs(lhs - f_n(xs, q, trunc))))
    rep = CheckReport(
        check_id="fnfr",
        params={"gamma": gamma, "q": q},
        max_abs_residual=resid, tolerance=tol,
        grid=f"{grid_n} points, N={n_terms}",
    )
    return rep.finalize(t0)
