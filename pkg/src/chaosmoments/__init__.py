"""Moment bounds and Monte Carlo checks for vector-valued quadratic chaoses."""

from .bounds import (
    HILBERT,
    KINDS,
    LOWER,
    TWO_SIDED,
    UPPER_GENERAL,
    UPPER_SUBGAUSSIAN,
    BoundReport,
    assemble_bound,
    subgaussian_gamma,
)
from .distributions import (
    EXP_POWER,
    GAUSSIAN,
    WEIBULL,
    InvalidShapeError,
    TailDistribution,
    make_distribution,
)
from .dual_norms import (
    ConfigurationError,
    DualBall,
    NormResult,
    ball,
    ball_membership,
    norm_Xp,
    norm_Xp_dual,
    norm_XYp,
)
from .estimates import McConfig, McEstimate
from .functionals import (
    CoefficientTensor,
    alpha_A,
    alpha_inf_A,
    mc_beta,
    mc_expected_sup,
    phi_A,
    s_A_surrogate,
)
from .harness import (
    ComparisonRow,
    ExperimentConfig,
    generate_ensemble,
    parse_config,
    render_report,
    run_experiment,
    write_report,
)
from .montecarlo import (
    estimate_E_norm_fixed_x,
    estimate_moment_decoupled,
    estimate_moment_undecoupled,
    gk_moment,
)

__version__ = "0.1.0"

__all__ = [
    "HILBERT",
    "KINDS",
    "LOWER",
    "TWO_SIDED",
    "UPPER_GENERAL",
    "UPPER_SUBGAUSSIAN",
    "BoundReport",
    "ComparisonRow",
    "ConfigurationError",
    "CoefficientTensor",
    "DualBall",
    "EXP_POWER",
    "ExperimentConfig",
    "GAUSSIAN",
    "InvalidShapeError",
    "McConfig",
    "McEstimate",
    "NormResult",
    "TailDistribution",
    "WEIBULL",
    "alpha_A",
    "alpha_inf_A",
    "assemble_bound",
    "ball",
    "ball_membership",
    "estimate_E_norm_fixed_x",
    "estimate_moment_decoupled",
    "estimate_moment_undecoupled",
    "generate_ensemble",
    "gk_moment",
    "make_distribution",
    "mc_beta",
    "mc_expected_sup",
    "norm_XYp",
    "norm_Xp",
    "norm_Xp_dual",
    "parse_config",
    "phi_A",
    "render_report",
    "run_experiment",
    "s_A_surrogate",
    "subgaussian_gamma",
    "write_report",
]
