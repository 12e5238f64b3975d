"""Orthogonality densities on S(q) and their classical q = 1 limits.

All densities accept scalar or array spatial arguments and return 0 outside
their support (so quadrature and rejection probes can wander past the edge).
Infinite products run under a :class:`~qlancaster.qcore.TruncationPolicy`
tail bound exactly like the q-Pochhammer primitives.

Close to q = 1 the individual factors leave the double range even though the
densities themselves are O(1): ln (q|q)_inf ~ -pi^2/(6(1-q)).  The product
loops therefore carry a (mantissa, base-2 exponent) pair and only the final
assembled density is exponentiated.

Catalog (beta, rho in (-1,1), |q| below the policy limit):

    f_T, f_U            arcsine / semicircle on [-1, 1]
    f_h(x|q)            base density on [-1, 1]
    f_N(x|q)            rescaled to S(q); standard normal at q = 1
    f_bN(x|a,q)         big-q-Hermite weight  f_N * char_fn_H(x, a)
    f_CN(x|y,rho,q)     conditional q-normal  f_N (rho^2)_inf / W(x,y|rho,q)
    f_C, f_R            q-ultraspherical weight on [-1,1] resp. S(q)
    f_3D                the three-dimensional product density
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, RegimeError, TruncationError
from .qcore import DEFAULT_POLICY, TruncationPolicy, support, weight

__all__ = [
    "f_t", "f_u", "f_h", "f_n", "f_n_classical", "f_bn",
    "w_hat", "W_product", "f_cn", "f_cn_classical", "f_c", "f_r", "f_r_classical",
    "f_3d", "density",
]


# ---------------------------------------------------------------------------
# scaled-product plumbing: values are (mantissa, e) meaning mantissa * 2**e

def _renorm(m, e: int):
    mx = float(np.max(np.abs(m)))
    if mx == 0.0 or 1e-100 < mx < 1e100:
        return m, e
    k = int(math.floor(math.log2(mx)))
    return m * 2.0 ** (-k), e + k


def _unscale(m, e: int):
    out = np.asarray(m) * 2.0**e
    return out if out.ndim else float(out)


def _check_q(q: float, trunc: TruncationPolicy) -> None:
    if not -1.0 < q < 1.0:
        raise RegimeError(f"numeric densities need |q| < 1, got q={q}")
    if abs(q) > trunc.q_limit:
        raise RegimeError(
            f"|q|={abs(q)} exceeds the policy limit {trunc.q_limit}; raise it explicitly"
        )


def _poch_inf_scaled(a: float, q: float, trunc: TruncationPolicy):
    out, e = 1.0, 0
    aq = a
    for k in range(trunc.max_terms):
        if abs(a) * abs(q) ** k / (1.0 - abs(q)) <= trunc.term_tol:
            return out, e
        out *= 1.0 - aq
        aq *= q
        if k % 64 == 63:
            out, e = _renorm(out, e)
    raise TruncationError(f"(a|q)_inf with a={a}, q={q} did not converge in {trunc.max_terms} factors")


def _general_prod_scaled(factor, amp: float, q: float, trunc: TruncationPolicy, shape):
    """prod_k factor(k-th base) with |factor - 1| <= amp*|q|^k, scaled output."""
    out, e = np.ones(shape), 0
    for k in range(trunc.max_terms):
        if amp * abs(q) ** k / (1.0 - abs(q)) <= trunc.term_tol:
            return out, e
        out = out * factor(k)
        if k % 64 == 63:
            out, e = _renorm(out, e)
    raise TruncationError("infinite product did not converge within the term budget")


# ---------------------------------------------------------------------------
# elementary densities

def f_t(x):
    """Arcsine density 1/(pi sqrt(1-x^2)) on (-1, 1)."""
    x = np.asarray(x, dtype=float)
    inner = np.clip(1.0 - x * x, 1e-300, None)
    out = np.where(np.abs(x) < 1.0, 1.0 / (np.pi * np.sqrt(inner)), 0.0)
    return out if out.ndim else float(out)


def f_u(x):
    """Semicircle density (2/pi) sqrt(1-x^2) on [-1, 1]."""
    x = np.asarray(x, dtype=float)
    out = np.where(np.abs(x) <= 1.0, 2.0 / np.pi * np.sqrt(np.clip(1.0 - x * x, 0.0, None)), 0.0)
    return out if out.ndim else float(out)


def f_n_classical(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)
    return out if out.ndim else float(out)


def _f_h_scaled(x: np.ndarray, q: float, trunc: TruncationPolicy):
    # x already inside [-1,1]; |l(x|a)-1| = |2a + a^2 - 4x^2 a| <= 7|a|
    cm, ce = _poch_inf_scaled(q, q, trunc)
    qpow = [q]  # closure state: current q^k, k starting at 1

    def factor(k):
        a = qpow[0]
        qpow[0] *= q
        return weight("l", x, a=a)

    pm, pe = _general_prod_scaled(factor, 7.0 * abs(q), q, trunc, x.shape)
    m = 2.0 / np.pi * np.sqrt(np.clip(1.0 - x * x, 0.0, None)) * cm * pm
    return _renorm(m, ce + pe)


def f_h(x, q: float, trunc: TruncationPolicy = DEFAULT_POLICY):
    """Base q-Hermite density on [-1, 1]:

        f_h(x|q) = (2/pi) (q|q)_inf sqrt(1-x^2) prod_{k>=1} l(x|q^k).
    """
    _check_q(q, trunc)
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= 1.0
    xin = np.where(inside, x, 0.0)
    m, e = _f_h_scaled(xin, q, trunc)
    out = np.where(inside, _unscale(m, e), 0.0)
    return out if out.ndim else float(out)


def _f_n_scaled(x: np.ndarray, q: float, trunc: TruncationPolicy):
    s = math.sqrt(1.0 - q)
    m, e = _f_h_scaled(x * (s / 2.0), q, trunc)
    return m * (s / 2.0), e


def f_n(x, q: float, trunc: TruncationPolicy = DEFAULT_POLICY):
    """q-normal density on S(q); the standard normal at q = 1."""
    if q == 1.0:
        return f_n_classical(x)
    _check_q(q, trunc)
    lo, hi = support(q)
    x = np.asarray(x, dtype=float)
    inside = (x >= lo) & (x <= hi)
    xin = np.where(inside, x, 0.0)
    m, e = _f_n_scaled(xin, q, trunc)
    out = np.where(inside, _unscale(m, e), 0.0)
    return out if out.ndim else float(out)


def f_bn(x, a: float, q: float, trunc: TruncationPolicy = DEFAULT_POLICY):
    """Big-q-Hermite orthogonality density f_N(x|q) * char_fn_H(x, a, q)."""
    from .polyfam import char_fn_H

    if not -1.0 < a < 1.0:
        raise DomainError("f_bn needs a in (-1, 1)")
    _check_q(q, trunc)
    lo, hi = support(q)
    x = np.asarray(x, dtype=float)
    inside = (x >= lo) & (x <= hi)
    xin = np.where(inside, x, 0.0)
    m, e = _f_n_scaled(xin, q, trunc)
    out = np.where(inside, _unscale(m, e) * char_fn_H(xin, a, q, trunc), 0.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# the W product and the conditional q-normal family

def w_hat(x, y, rho: float, q: float):
    """One factor of the W product, w(x sqrt(1-q)/2, y sqrt(1-q)/2 | rho):

        (1-rho^2)^2 - (1-q) rho x y (1+rho^2) + rho^2 (1-q)(x^2+y^2).
    """
    r2 = rho * rho
    return ((1.0 - r2) ** 2
            - (1.0 - q) * rho * (x * y) * (1.0 + r2)
            + r2 * (1.0 - q) * (x * x + y * y))


def _w_prod_scaled(x, y, rho: float, q: float, trunc: TruncationPolicy):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm = float(np.max(np.abs(x))) if x.size else 0.0
    ym = float(np.max(np.abs(y))) if y.size else 0.0
    amp = abs(rho) * (3.0 + (1.0 - q) * (2.0 * xm * ym + xm * xm + ym * ym))
    state = [rho]

    def factor(k):
        a = state[0]
        state[0] *= q
        return w_hat(x, y, a, q)

    shape = np.broadcast_shapes(x.shape, y.shape)
    return _general_prod_scaled(factor, amp, q, trunc, shape)


def W_product(x, y, rho: float, q: float, trunc: TruncationPolicy = DEFAULT_POLICY):
    """W(x,y|rho,q) = prod_k w_hat(x, y | rho q^k, q) with a certified tail.

    The k-th factor is 1 + O(rho q^k), so the log-tail is geometric.  Very
    close to q = 1 the value itself may leave the double range; the densities
    below combine it with the other factors before exponentiating.
    """
    _check_q(q, trunc)
    if not -1.0 < rho < 1.0:
        raise DomainError("W_product needs rho in (-1, 1)")
    return _unscale(*_w_prod_scaled(x, y, rho, q, trunc))


def f_cn_classical(x, y, rho: float):
    """The q -> 1 limit of f_CN: the N(rho*y, 1-rho^2) density at x."""
    if not -1.0 < rho < 1.0:
        raise DomainError("f_cn_classical needs rho in (-1, 1)")
    x = np.asarray(x, dtype=float)
    v = 1.0 - rho * rho
    out = np.exp(-((x - rho * np.asarray(y)) ** 2) / (2.0 * v)) / math.sqrt(2.0 * math.pi * v)
    return out if out.ndim else float(out)


def f_cn(x, y, rho: float, q: float, trunc: TruncationPolicy = DEFAULT_POLICY):
    """Conditional q-normal density in x, conditioned at y:

        f_CN(x|y,rho,q) = f_N(x|q) (rho^2|q)_inf / W(x,y|rho,q).
    """
    if q == 1.0:
        return f_cn_classical(x, y, rho)
    if not -1.0 < rho < 1.0:
        raise DomainError("f_cn needs rho in (-1, 1)")
    _check_q(q, trunc)
    lo, hi = support(q)
    x = np.asarray(x, dtype=float)
    inside = (x >= lo) & (x <= hi)
    xin = np.where(inside, x, 0.0)
    nm, ne = _f_n_scaled(xin, q, trunc)
    pm, pe = _poch_inf_scaled(rho * rho, q, trunc)
    wm, we = _w_prod_scaled(xin, y, rho, q, trunc)
    out = np.where(inside, _unscale(nm * pm / wm, ne + pe - we), 0.0)
    return out if out.ndim else float(out)


def f_c(x, beta: float, q: float, trunc: TruncationPolicy = DEFAULT_POLICY):
    """q-ultraspherical weight on [-1, 1]:

        f_C(x|beta,q) = (beta^2)_inf / ((beta)_inf (beta q)_inf)
                        * f_h(x|q) / prod_j l(x | beta q^j).
    """
    _check_q(q, trunc)
    if not -1.0 < beta < 1.0:
        raise DomainError("f_c needs beta in (-1, 1)")
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= 1.0
    xin = np.where(inside, x, 0.0)
    c1m, c1e = _poch_inf_scaled(beta * beta, q, trunc)
    c2m, c2e = _poch_inf_scaled(beta, q, trunc)
    c3m, c3e = _poch_inf_scaled(beta * q, q, trunc)
    hm, he = _f_h_scaled(xin, q, trunc)
    state = [beta]

    def factor(k):
        a = state[0]
        state[0] *= q
        return 1.0 / weight("l", xin, a=a)

    # 1/l(x|a) = 1 + O(a): |1/l - 1| <= 7|a|/min(l) and min l = (1-|a|)^2
    amp = 7.0 * abs(beta) / (1.0 - abs(beta)) ** 2
    lm, le = _general_prod_scaled(factor, amp, q, trunc, xin.shape)
    out = np.where(inside, _unscale(c1m / (c2m * c3m) * hm * lm, c1e - c2e - c3e + he + le), 0.0)
    return out if out.ndim else float(out)


def f_r_classical(x, beta: float):
    """q = 1 weight of the rescaled ultraspherical family: N(0, (1+beta)/(1-beta))."""
    var = (1.0 + beta) / (1.0 - beta)
    x = np.asarray(x, dtype=float)
    out = np.exp(-x * x / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
    return out if out.ndim else float(out)


def f_r(x, beta: float, q: float, trunc: TruncationPolicy = DEFAULT_POLICY):
    """Rescaled q-ultraspherical density on S(q), computed as (1-beta) f_CN(x|x,beta,q)."""
    if not -1.0 < beta < 1.0:
        raise DomainError("f_r needs beta in (-1, 1)")
    if q == 1.0:
        return f_r_classical(x, beta)
    return (1.0 - beta) * f_cn(x, x, beta, q, trunc)


def f_3d(x, y, z, rho12: float, rho13: float, rho23: float, q: float,
         trunc: TruncationPolicy = DEFAULT_POLICY):
    """Three-dimensional density (1-r) f_CN(x|y) f_CN(y|z) f_CN(z|x), r = rho12 rho23 rho13."""
    r = rho12 * rho23 * rho13
    return ((1.0 - r)
            * f_cn(x, y, rho12, q, trunc)
            * f_cn(y, z, rho23, q, trunc)
            * f_cn(z, x, rho13, q, trunc))


_DENSITIES = {
    "f_t": lambda point, params, q, trunc: f_t(point),
    "f_u": lambda point, params, q, trunc: f_u(point),
    "f_h": lambda point, params, q, trunc: f_h(point, q, trunc),
    "f_n": lambda point, params, q, trunc: f_n(point, q, trunc),
    "f_n_classical": lambda point, params, q, trunc: f_n_classical(point),
    "f_bn": lambda point, params, q, trunc: f_bn(point, params["a"], q, trunc),
    "f_cn": lambda point, params, q, trunc: f_cn(point, params["y"], params["rho"], q, trunc),
    "f_c": lambda point, params, q, trunc: f_c(point, params["beta"], q, trunc),
    "f_r": lambda point, params, q, trunc: f_r(point, params["beta"], q, trunc),
}


def density(kind: str, point, q: float, trunc: TruncationPolicy = DEFAULT_POLICY, **params):
    """Evaluate a density by name; ``f_3d`` takes ``point=(x, y, z)``.

    Parameters are keyword-only: ``a`` (f_bn), ``y``/``rho`` (f_cn),
    ``beta`` (f_r, f_c), ``rho12``/``rho13``/``rho23`` (f_3d).
    """
    if kind == "f_3d":
        x, y, z = point
        return f_3d(x, y, z, params["rho12"], params["rho13"], params["rho23"], q, trunc)
    try:
        fn = _DENSITIES[kind]
    except KeyError:
        raise DomainError(f"unknown density kind {kind!r}") from None
    return fn(point, params, q, trunc)
