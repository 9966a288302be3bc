"""Dimension of projected and convolved self-similar measures.

Exact affine IFS arithmetic, separation diagnostics, symbolic measures,
coarse graining, L^q spectra, closed-form dimension predictions and Monte
Carlo dimension estimators.
"""

from .coarse import CoarseGraining, blocked_measure, coarse_bernoulli, good_words
from .errors import (
    BudgetError,
    ConfigError,
    CrossCheckError,
    DomainError,
    FracdimError,
    GuardError,
    InvalidWordError,
    NumberModeError,
)
from .estimators import (
    DiagonalAffineIFS,
    DimensionEstimate,
    PlanarIFS,
    SampleSet,
    coarse_entropy_dimension,
    convolution_samples,
    correlation_dimension,
    diagonal_affine_samples,
    dyadic_scales,
    lebesgue_samples,
    local_dimension_stats,
    planar_projection_samples,
    push_samples,
)
from .formulas import (
    DimensionReport,
    convolution_dimension,
    lq_lower_bound,
    lyapunov_dimension_diagonal,
    multiplicative_dependence,
    orthogonal_projection_dimension,
    projection_dimension,
    similarity_dimension,
)
from .ifs import (
    IFS1D,
    AffineMap1D,
    Interval,
    attractor_bound,
    block_ifs,
    cantor_ifs,
    code_point,
    compose,
    level_maps,
    word_map,
)
from .lq import alpha_min, lq_dimension, lq_dimension_homogeneous, solve_tau, tau_lower_bound_check
from .measures import (
    Bernoulli,
    Markov,
    cylinder_mass,
    entropy,
    lyapunov,
    measure_stats,
    sample_word,
    sample_words,
    stationary_distribution,
)
from .separation import affine_distance, joint_separation_report, min_level_gap, separation_report

__version__ = "0.1.0"
