"""Exact arithmetic: sparse rational-coefficient polynomials and the identity registry."""
from .mpoly import VARS, MPoly, RationalFn
from .qsymbols import (FAMILY_SIZE_GUARD, binom2, bracket_prod, cheb_u_half_sym,
                       poch_sym, qbinom_poly, qbinom_rf, qbracket_sym,
                       qfact_sym, qhermite_sym, qpow, sym_family, ultra_r_sym)
from .registry import (IDENTITY_IDS, IdentityRecord, verify_all,
                       verify_identity, w_sym)

__all__ = [
    "VARS", "MPoly", "RationalFn",
    "FAMILY_SIZE_GUARD", "binom2", "bracket_prod", "cheb_u_half_sym",
    "poch_sym", "qbinom_poly", "qbinom_rf", "qbracket_sym", "qfact_sym",
    "qhermite_sym", "qpow", "sym_family", "ultra_r_sym",
    "IDENTITY_IDS", "IdentityRecord", "verify_all", "verify_identity", "w_sym",
]
