"""Exact p-adic arithmetic for splitting functions of level l and the
Stickelberger congruence for p-adic Gauss sums."""
from .artin_hasse import (
    NewtonPolygon,
    PiSystem,
    TruncSeries,
    ah_series,
    build_pi_system,
    e_coeffs,
    e_rational,
    newton_polygon,
    pi_compat_check,
    pi_compat_weak,
    pi_root,
)
from .cyclotomic import CycloCtx, CycloElem, congruent_mod_pi, cyclo_ctx, cyclo_mul, pi_valuation, snap_root_of_unity
from .errors import *  # noqa: F401,F403
from .gauss import (
    DigitData,
    GaussSumReport,
    digit_lemma_oracle,
    digit_stats,
    gauss_sum,
    gauss_via_coefficients,
    stickelberger_check,
    sweep,
)
from .padic import BigRational, PadicInt, reduce_rational, unit_inverse, val_p
from .splitting import (
    CharacterTable,
    SplittingContext,
    ThetaSeries,
    additivity_audit,
    big_theta_eval,
    canonical_zeta,
    psi_lm,
    splitting_context,
    theta_eval,
    theta_series,
)
from .unramified import FqCtx, FqElem, UnramElem, build_field, frobenius, teich_powers, teichmuller, trace
from .witt import (
    IntPoly,
    WittVector,
    addition_polys,
    s_polys,
    witt_add,
    witt_addition_table,
    witt_frobenius,
    witt_from_int,
    witt_to_int,
    witt_trace,
)

__version__ = "0.1.0"
