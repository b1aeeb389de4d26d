"""Hard-to-round case search for elementary functions at configurable
floating-point precision: exact fixed-point arithmetic, rigorous enclosures,
Taylor-shift polynomial generation, a three-phase filtering pipeline over
continued-fraction lower-bound searches, a brute-force oracle, and a lockstep
warp-divergence simulator."""

from .divergence import (
    BranchWeights,
    DivergenceReport,
    WarpStats,
    WarpTrace,
    branch_serialization_estimate,
    linear_problem_batch,
    mdm,
    nmdm,
    simulate_warps,
)
from .evalf import UndecidedError, decide_hr, enclose, value_exponent
from .fixedpoint import DivisionMode, MPInt, MPOverflowError, UFrac
from .fpmodel import (
    BinadeDomains,
    Domain,
    ErrorBudget,
    FpFormat,
    HrCaseRecord,
    dist_p,
    is_hr_case,
    mantissa_exponent,
)
from .lowerbound import (
    SEARCHES,
    Algorithm,
    SearchOutcome,
    SearchProblem,
    Verdict,
    lefevre_lb,
    lefevre_swap_lb,
    regular_lb,
    regular_unrolled_lb,
)
from .oracle import brute_min, cf_quotients_ref, exhaustive_hr_search, ziv_refine
from .pipeline import (
    PhaseConfig,
    PhaseStats,
    PipelineConfig,
    run_pipeline,
    select_algorithm,
)
from .polygen import (
    BinomialPoly,
    PolyGenConfig,
    forward_difference,
    hierarchical_split,
    newton_interpolate,
    straightforward_shift,
    tabulated_shift_step,
    taylor_approx,
)

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "BinadeDomains",
    "BinomialPoly",
    "BranchWeights",
    "DivergenceReport",
    "DivisionMode",
    "Domain",
    "ErrorBudget",
    "FpFormat",
    "HrCaseRecord",
    "MPInt",
    "MPOverflowError",
    "PhaseConfig",
    "PhaseStats",
    "PipelineConfig",
    "PolyGenConfig",
    "SEARCHES",
    "SearchOutcome",
    "SearchProblem",
    "UFrac",
    "UndecidedError",
    "Verdict",
    "WarpStats",
    "WarpTrace",
    "branch_serialization_estimate",
    "brute_min",
    "cf_quotients_ref",
    "decide_hr",
    "dist_p",
    "enclose",
    "exhaustive_hr_search",
    "forward_difference",
    "hierarchical_split",
    "is_hr_case",
    "lefevre_lb",
    "lefevre_swap_lb",
    "linear_problem_batch",
    "mantissa_exponent",
    "mdm",
    "newton_interpolate",
    "nmdm",
    "regular_lb",
    "regular_unrolled_lb",
    "run_pipeline",
    "select_algorithm",
    "simulate_warps",
    "straightforward_shift",
    "tabulated_shift_step",
    "taylor_approx",
    "value_exponent",
    "ziv_refine",
]
