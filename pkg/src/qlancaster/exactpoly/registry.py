"""The exact identity registry.

Every entry rewrites one of the summation identities as a polynomial residual
(LHS - RHS over a common denominator that is cleared analytically), then
checks that the residual is the literal zero polynomial for all indices
within bounds.  A nonzero residual raises :class:`VerificationFailure`
carrying the offending polynomial; nothing is ever compared approximately.

Variable conventions: ``t`` is the series variable of the Euler forms,
``a``/``b`` stand for the generic Pochhammer bases (for the coefficient
identities ``a`` = r1^2, ``b`` = r2^2; for the connection/linearization
identities ``a`` is the coupling parameter), and ``r1``/``r2``/``x`` carry
the kernel coefficient identities.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DomainError, VerificationFailure
from .mpoly import MPoly, RationalFn, prod_all
from .qsymbols import (binom2, bracket_prod, poch_sym, qbinom_poly, qfact_sym,
                       qhermite_sym, qpow, ultra_r_sym)

__all__ = ["IdentityRecord", "IDENTITY_IDS", "verify_identity", "verify_all", "w_sym"]

_ONE = MPoly.const(1)
_T = MPoly.var("t")
_A = MPoly.var("a")
_B = MPoly.var("b")
_R1 = MPoly.var("r1")
_R2 = MPoly.var("r2")


def _neg1(k: int) -> int:
    return -1 if k % 2 else 1


def w_sym(n: int, m: int, r1: MPoly = _R1, r2: MPoly = _R2) -> MPoly:
    """w_n(m, r1, r2, q) as an exact polynomial."""
    out = MPoly.zero()
    for s in range(n + 1):
        out = out + (qbinom_poly(n, s) * r1**s * poch_sym(qpow(m) * r2 * r2, s)
                     * r2 ** (n - s) * poch_sym(qpow(m) * r1 * r1, n - s))
    return out


_ULTRA_AT_CACHE: dict = {}


def _ultra_r_at(n: int, base: MPoly) -> MPoly:
    key = (n, base)
    if key not in _ULTRA_AT_CACHE:
        _ULTRA_AT_CACHE[key] = ultra_r_sym(n).substitute("beta", base)
    return _ULTRA_AT_CACHE[key]


# ---------------------------------------------------------------------------
# builders: yield (index_tuple, residual)

def _gen_finite_bint(n_max: int):
    # 1/(t)_{n+1} = sum_j [n+j, n]_q t^j, checked through order t^K exactly
    K = n_max
    for n in range(n_max + 1):
        series = MPoly.zero()
        for j in range(K + 1):
            series = series + qbinom_poly(n + j, n) * _T**j
        prod = poch_sym(_T, n + 1) * series - _ONE
        yield (n,), prod.truncate("t", K)


def _gen_finite_naw(n_max: int):
    # (t)_n = sum_j [n, j]_q q^C(j,2) (-t)^j
    for n in range(n_max + 1):
        rhs = MPoly.zero()
        for j in range(n + 1):
            rhs = rhs + _neg1(j) * qbinom_poly(n, j) * qpow(binom2(j)) * _T**j
        yield (n,), poch_sym(_T, n) - rhs


def _gen_aux2(n_max: int):
    # sum_j [n, j]_q (-b)^j q^C(j,2) (a)_j (a b q^j)_{n-j} = (b)_n
    for n in range(n_max + 1):
        lhs = MPoly.zero()
        for j in range(n + 1):
            lhs = lhs + (_neg1(j) * qbinom_poly(n, j) * _B**j * qpow(binom2(j))
                         * poch_sym(_A, j) * poch_sym(_A * _B * qpow(j), n - j))
        yield (n,), lhs - poch_sym(_B, n)


def _gen_pom1(n_max: int):
    # sum_j [m, j]_q (-1)^{m-j} q^C(m-j,2) (a q^j)_m / (1 - a q^j) = {1/(1-a), 0}
    # For m >= 1 each summand is the polynomial (a q^{j+1})_{m-1}; both the
    # statement form and the reindexed proof form are checked.
    for m in range(n_max + 1):
        if m == 0:
            lhs = RationalFn(_ONE, _ONE - _A)
            diff = lhs - RationalFn(_ONE, _ONE - _A)
            yield (m, "statement"), diff.num
            continue
        stmt = MPoly.zero()
        proof = MPoly.zero()
        for j in range(m + 1):
            stmt = stmt + (_neg1(m - j) * qbinom_poly(m, j) * qpow(binom2(m - j))
                           * poch_sym(_A * qpow(j + 1), m - 1))
            proof = proof + (_neg1(j) * qbinom_poly(m, j) * qpow(binom2(j))
                             * poch_sym(_A * qpow(m - j + 1), m - 1))
        yield (m, "statement"), stmt
        yield (m, "proof"), proof


def _gen_skrt(n_max: int):
    # sum_k [m,k]_q (-b)^k q^C(k,2) (a)_{t+m+k} (a b q^{t+m+k})_{m-k} = (b)_m (a)_{t+m}
    for m in range(n_max + 1):
        for t in range(n_max + 1):
            lhs = MPoly.zero()
            for k in range(m + 1):
                lhs = lhs + (_neg1(k) * qbinom_poly(m, k) * _B**k * qpow(binom2(k))
                             * poch_sym(_A, t + m + k)
                             * poch_sym(_A * _B * qpow(t + m + k), m - k))
            yield (m, t), lhs - poch_sym(_B, m) * poch_sym(_A, t + m)


def _gen_spec1(n_max: int):
    # sum_s [n,s] r1^{n-s} r2^s (r1^2)_s (r1 r2)_s (r1^2 r2^2 q^s)_{n-s} = w_n(0,...)
    b = _R1 * _R2
    b2 = b * b
    for n in range(n_max + 1):
        lhs = MPoly.zero()
        for s in range(n + 1):
            lhs = lhs + (qbinom_poly(n, s) * _R1 ** (n - s) * _R2**s
                         * poch_sym(_R1 * _R1, s) * poch_sym(b, s)
                         * poch_sym(b2 * qpow(s), n - s))
        yield (n,), lhs - w_sym(n, 0)


def _gen_wm_shift(n_max: int):
    # alternative summation form for all m; direct q^{m/2} rescaling for even m
    b = _R1 * _R2
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            alt = MPoly.zero()
            for s in range(n + 1):
                alt = alt + (qbinom_poly(n, s) * _R1 ** (n - s) * _R2**s
                             * poch_sym(qpow(m) * b, s) * poch_sym(qpow(m) * b, n - s))
            yield (n, m, "alt"), w_sym(n, m) - alt
            if m % 2 == 0:
                shifted = w_sym(n, 0).substitute("r1", _R1 * qpow(m // 2)) \
                                     .substitute("r2", _R2 * qpow(m // 2))
                yield (n, m, "shift"), qpow(n * m // 2) * w_sym(n, m) - shifted


def _corollary_lhs(n: int, u: int) -> MPoly:
    b = _R1 * _R2
    out = MPoly.zero()
    for m in range(u + 1):
        out = out + (qbinom_poly(u, m) * poch_sym(_R2 * _R2, m)
                     * poch_sym(b * qpow(n - u - m + 1), m)
                     * poch_sym(_R1 * _R1, m) * poch_sym(b, m)
                     * w_sym(n - 2 * m, m))
    return out


def _gen_corollary_i(n_max: int):
    # sum_m ... w_{n-2m}(m, ...) = (r1^2 r2^2 q^{n-2u})_{2u} w_{n-2u}(0, ...)
    b2 = (_R1 * _R2) * (_R1 * _R2)
    for n in range(n_max + 1):
        for u in range(n // 2 + 1):
            rhs = poch_sym(b2 * qpow(n - 2 * u), 2 * u) * w_sym(n - 2 * u, 0)
            yield (n, u), _corollary_lhs(n, u) - rhs


def _gen_gamma_phi(n_max: int):
    # gamma_{n,u} = phi_{n-2u}, cross-multiplied:
    # LHS_sum (r1^2 r2^2)_{n-2u} = w_{n-2u}(0) (r1^2 r2^2)_n
    b2 = (_R1 * _R2) * (_R1 * _R2)
    for n in range(n_max + 1):
        for u in range(n // 2 + 1):
            lhs = _corollary_lhs(n, u) * poch_sym(b2, n - 2 * u)
            rhs = w_sym(n - 2 * u, 0) * poch_sym(b2, n)
            yield (n, u), lhs - rhs


def _gen_dn_equiv(n_max: int):
    # direct and rearranged forms of D_n, cleared by (r1^2 r2^2)_n (r1 r2)_{n+1}
    b = _R1 * _R2
    b2 = b * b
    for n in range(n_max + 1):
        direct = MPoly.zero()
        for j in range(n + 1):
            direct = direct + (qbinom_poly(n, j) * _R1 ** (n - j) * _R2**j
                               * poch_sym(_R1 * _R1, j)
                               * qhermite_sym(n - j) * _ultra_r_at(j, b)
                               * poch_sym(b2 * qpow(j), n - j)
                               * poch_sym(b, n + 1))
        expanded = MPoly.zero()
        for u in range(n // 2 + 1):
            coef = (qbinom_poly(n, u) * bracket_prod(n - 2 * u + 1, n - u)
                    * (_ONE - b * qpow(n - 2 * u)) * b**u
                    * poch_sym(b * qpow(n - u + 1), u))
            expanded = expanded + coef * _ultra_r_at(n - 2 * u, b) * _corollary_lhs(n, u)
        yield (n,), direct - expanded


def _rnah_coeff(n: int, k: int) -> MPoly:
    # R_n(x|a,q) = sum_k  [n]!/([k]![n-2k]!) q^C(k,2) (-a)^k (a)_{n-k} H_{n-2k}
    return (qbinom_poly(n, k) * bracket_prod(n - 2 * k + 1, n - k)
            * qpow(binom2(k)) * _neg1(k) * _A**k * poch_sym(_A, n - k))


def _gen_conn_roundtrip(n_max: int):
    for n in range(n_max + 1):
        rnah = MPoly.zero()
        for k in range(n // 2 + 1):
            rnah = rnah + _rnah_coeff(n, k) * qhermite_sym(n - 2 * k)
        yield (n, "r_to_h"), _ultra_r_at(n, _A) - rnah

        # H_n (1-a)(aq)_n = sum_k [n]!/([k]![n-2k]!) (1-aq^{n-2k}) a^k (aq^{n-k+1})_k R_{n-2k}
        hnar = MPoly.zero()
        for k in range(n // 2 + 1):
            hnar = hnar + (qbinom_poly(n, k) * bracket_prod(n - 2 * k + 1, n - k)
                           * (_ONE - _A * qpow(n - 2 * k)) * _A**k
                           * poch_sym(_A * qpow(n - k + 1), k)
                           * _ultra_r_at(n - 2 * k, _A))
        lhs = qhermite_sym(n) * (_ONE - _A) * poch_sym(_A * qpow(1), n)
        yield (n, "h_to_r"), lhs - hnar

        # composition: coefficient of R_{n-2j} equals delta_{j0}
        target = (_ONE - _A) * poch_sym(_A * qpow(1), n)
        for j in range(n // 2 + 1):
            comp = MPoly.zero()
            for k in range(j + 1):
                N = n - 2 * k
                i = j - k
                comp = comp + (_rnah_coeff(n, k)
                               * qbinom_poly(N, i) * bracket_prod(N - 2 * i + 1, N - i)
                               * (_ONE - _A * qpow(n - 2 * j)) * _A**i
                               * poch_sym(_A * qpow(n - k - j + 1), k + j))
            want = target if j == 0 else MPoly.zero()
            yield (n, f"roundtrip_j{j}"), comp - want


def _gen_lin_rr(n_max: int):
    # R_n R_m (1-a)(aq)_{n+m}(a^2)_{n+m} = sum_k ... R_{n+m-2k}, all cleared.
    # Both sides are symmetric in (n, m), so only n <= m is checked.
    a2 = _A * _A
    for n in range(n_max + 1):
        for m in range(n, n_max + 1):
            lhs = prod_all([_ultra_r_at(n, _A), _ultra_r_at(m, _A), _ONE - _A,
                            poch_sym(_A * qpow(1), n + m), poch_sym(a2, n + m)])
            rhs = MPoly.zero()
            for k in range(min(n, m) + 1):
                rhs = rhs + prod_all([
                    qbinom_poly(m, k), qbinom_poly(n, k), qfact_sym(k),
                    poch_sym(_A, m - k), poch_sym(_A, n - k), poch_sym(_A, k),
                    poch_sym(a2, n + m - k),
                    _ONE - _A * qpow(n + m - 2 * k),
                    poch_sym(_A * qpow(n + m - k + 1), k),
                    poch_sym(a2 * qpow(n + m - 2 * k), 2 * k),
                    _ultra_r_at(n + m - 2 * k, _A)])
            yield (n, m), lhs - rhs


def _gen_lin_hr_h(n_max: int):
    # H_m R_n = sum_s [n,s][s]! H_{n+m-2s} sum_k [m,s-k][n-s,k] (-a)^k q^C(k,2) (a)_{n-k}
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            lhs = qhermite_sym(m) * _ultra_r_at(n, _A)
            rhs = MPoly.zero()
            for s in range((n + m) // 2 + 1):
                inner = MPoly.zero()
                for k in range(s + 1):
                    binom = qbinom_poly(m, s - k) * qbinom_poly(n - s, k)
                    if binom.is_zero():  # out-of-range binomials kill the term
                        continue
                    inner = inner + (binom * _neg1(k) * _A**k * qpow(binom2(k))
                                     * poch_sym(_A, n - k))
                rhs = rhs + qbinom_poly(n, s) * qfact_sym(s) * qhermite_sym(n + m - 2 * s) * inner
            yield (n, m), lhs - rhs


def _gen_lin_hr_r(n_max: int):
    # [n+m, n]_q H_m R_n (1-a)(aq)_{n+m} = sum_u ... R_{n+m-2u}, all cleared
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            lhs = (qbinom_poly(n + m, n) * qhermite_sym(m) * _ultra_r_at(n, _A)
                   * (_ONE - _A) * poch_sym(_A * qpow(1), n + m))
            rhs = MPoly.zero()
            for u in range((n + m) // 2 + 1):
                mid = MPoly.zero()
                for s in range(u + 1):
                    inner = MPoly.zero()
                    for k in range(s + 1):
                        binom = qbinom_poly(s, k) * qbinom_poly(n + m - 2 * s, m + k - s)
                        if binom.is_zero():  # out-of-range binomials kill the term
                            continue
                        inner = inner + prod_all([binom, qpow(binom2(k)),
                                                  MPoly.const(_neg1(k)), _A**k,
                                                  poch_sym(_A, n - k)])
                    mid = mid + prod_all([qbinom_poly(u, s), _A ** (u - s),
                                          poch_sym(_A * qpow(n + m - u - s + 1), u + s),
                                          inner])
                rhs = rhs + prod_all([
                    qbinom_poly(n + m, u), bracket_prod(n + m - 2 * u + 1, n + m - u),
                    _ONE - _A * qpow(n + m - 2 * u),
                    _ultra_r_at(n + m - 2 * u, _A), mid])
            yield (n, m), lhs - rhs


_BUILDERS = {
    "finite_binT": _gen_finite_bint,
    "finite_naw": _gen_finite_naw,
    "aux2": _gen_aux2,
    "pom1": _gen_pom1,
    "skrt": _gen_skrt,
    "spec1": _gen_spec1,
    "wm_shift": _gen_wm_shift,
    "corollary_i": _gen_corollary_i,
    "gamma_phi": _gen_gamma_phi,
    "dn_equiv": _gen_dn_equiv,
    "conn_roundtrip": _gen_conn_roundtrip,
    "lin_rr": _gen_lin_rr,
    "lin_hr_h": _gen_lin_hr_h,
    "lin_hr_r": _gen_lin_hr_r,
}

IDENTITY_IDS = tuple(_BUILDERS)


@dataclass
class IdentityRecord:
    """Outcome of one registry verification."""

    id: str
    bounds: dict
    status: str = "verified"
    checked: int = 0
    residual: MPoly = field(default_factory=MPoly.zero)
    failed_at: tuple | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "bounds": self.bounds,
            "status": self.status,
            "instances": self.checked,
            "residual": "0" if self.residual.is_zero() else repr(self.residual),
            **({"failed_at": list(map(str, self.failed_at))} if self.failed_at else {}),
        }


def verify_identity(identity_id: str, n_max: int = 6,
                    raise_on_failure: bool = True) -> IdentityRecord:
    """Check one registry identity for every index instance within bounds.

    The record's residual is the zero polynomial on success; on failure it is
    the first nonzero residual and (by default) ``VerificationFailure`` is
    raised so a regression can never be silently recorded.
    """
    try:
        gen = _BUILDERS[identity_id]
    except KeyError:
        raise DomainError(f"unknown identity {identity_id!r}; "
                          f"registry has {sorted(IDENTITY_IDS)}") from None
    rec = IdentityRecord(id=identity_id, bounds={"n_max": n_max})
    for idx, residual in gen(n_max):
        rec.checked += 1
        if not residual.is_zero():
            rec.status = "failed"
            rec.residual = residual
            rec.failed_at = idx
            if raise_on_failure:
                raise VerificationFailure(f"{identity_id}@{idx}", residual)
            return rec
    return rec


def verify_all(n_max: int = 6, raise_on_failure: bool = True) -> list[IdentityRecord]:
    """Run the whole registry; one record per identity, in registry order."""
    return [verify_identity(i, n_max, raise_on_failure) for i in IDENTITY_IDS]
