"""Tail-comparison bounds for norms of sums of uniform-on-sphere random
vectors, with exact oracles and seeded Monte Carlo verification."""

__version__ = "0.1.0"

from .bounds import (
    BoundConstant,
    BoundResult,
    TailQuery,
    constant_table,
    corollary_bound,
    g_lower,
    get_constant,
    q_lower,
    scale,
    theorem_bound,
)
from .gaussian_chi import (
    chi_expectation,
    chi_moment,
    chi_pdf,
    chi_tail,
    chi_tail_inverse,
    chi_tail_log,
    phi_cdf,
    phi_tail,
)
from .moment_compare import (
    ComparisonVerdict,
    HypothesisResult,
    MajorizationPair,
    TestFunction,
    bc_comparison_check,
    cosh_profile,
    from_table,
    gaussian_comparison_check,
    is_bisubharmonic_numeric,
    is_class_c,
    kwapien_check,
    lemma2_hypothesis_check,
    parse_test_function,
    power,
    schur_majorizes,
    softplus_squared,
)
from .report import (
    CoefficientPattern,
    SweepSpec,
    UGrid,
    VerificationRecord,
    run_sweep,
)
from .sampling import (
    CapacityError,
    McEstimate,
    RngStream,
    clopper_pearson,
    exact_rademacher_tail,
    fourth_moment_exact,
    gaussian_fourth_moment,
    mc_tail,
    mc_tail_multi,
    sample_sphere,
    sample_sum_norms,
    second_moment_exact,
)

__all__ = [
    "BoundConstant",
    "BoundResult",
    "CapacityError",
    "CoefficientPattern",
    "ComparisonVerdict",
    "HypothesisResult",
    "MajorizationPair",
    "McEstimate",
    "RngStream",
    "SweepSpec",
    "TailQuery",
    "TestFunction",
    "UGrid",
    "VerificationRecord",
    "bc_comparison_check",
    "chi_expectation",
    "chi_moment",
    "chi_pdf",
    "chi_tail",
    "chi_tail_inverse",
    "chi_tail_log",
    "clopper_pearson",
    "constant_table",
    "corollary_bound",
    "cosh_profile",
    "exact_rademacher_tail",
    "fourth_moment_exact",
    "from_table",
    "g_lower",
    "gaussian_comparison_check",
    "gaussian_fourth_moment",
    "get_constant",
    "is_bisubharmonic_numeric",
    "is_class_c",
    "kwapien_check",
    "lemma2_hypothesis_check",
    "mc_tail",
    "mc_tail_multi",
    "parse_test_function",
    "phi_cdf",
    "phi_tail",
    "power",
    "q_lower",
    "run_sweep",
    "sample_sphere",
    "sample_sum_norms",
    "scale",
    "schur_majorizes",
    "second_moment_exact",
    "softplus_squared",
    "theorem_bound",
]
