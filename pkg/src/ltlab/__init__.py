"""Frobenius-trace tables for elliptic curves over Q, the refined
prime-counting prediction, and its consistency checks."""

from .curve import (
    RationalCurve,
    ReducedCurve,
    classify_cm,
    discriminant,
    j_invariant,
    load_curve_config,
    make_curve,
    parse_curve_config,
    reduce_curve,
)
from .trace import TraceRecord, hasse_check, trace, trace_bsgs, trace_naive
from .sieve_table import TraceTable, build_table, load_table, save_table, sieve_primes
from .galois import (
    CMOrder,
    GaloisImage,
    cm_unit_group,
    delta_aq,
    empirical_main_factor,
    full_matrix_group,
    lambda_gamma,
    main_factor,
    project,
    serre_image,
    serre_level,
)
from .constants import (
    ConstantProfile,
    ConstantValue,
    constant,
    euler_local,
    f_of,
    g_of,
    profile_for_curve,
    profile_from_image,
    profile_from_table,
    verify_C_inverse,
)
from .density import (
    CM_MODEL,
    NONCM_MODEL,
    DensityModel,
    li,
    main_term,
    main_term_bound_check,
    model_for_curve,
    phi_integral,
)
from .analysis import (
    AveragingResult,
    ErrorReport,
    HistogramReport,
    average_constants,
    chebotarev_count,
    chebotarev_report,
    error_report,
    pi_r,
    residue_counts,
    sato_tate_report,
)

__version__ = "0.1.0"
