"""Decay-time densities of single and entangled unstable two-level systems.

Neutral kaons are the worked case: single-particle quantum beats and joint
decay-time densities of entangled K0 pairs under four prescriptions
(standard-new, hybrid, time-operator, standard-old), computed exactly in
the CP-violation parameter epsilon.
"""

from .biexp import BiExpSum
from .discrimination import (
    DiscriminationReport,
    chi_square_binned,
    discriminate,
    kl_divergence,
    required_sample_size,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DecayTimesError,
    EnvelopeDegenerate,
    NegativeDensity,
    NormalizationError,
    SupportMismatch,
    TooFewEvents,
    UnsupportedCombination,
)
from .joint import (
    GridSpec,
    JointDensity,
    approach_comparison,
    joint_density,
    joint_survival,
)
from .model import (
    ALL_APPROACHES,
    ALL_CHANNELS,
    ApproachKind,
    Channel,
    EntangledStateSpec,
    KaonParams,
    mixing_matrix,
    survival_amplitudes,
)
from .numerics import finite_diff_gradient_sum, finite_diff_mixed, quad_semiinf_1d, quad_semiinf_2d
from .sampling import EventBatch, sample_events
from .single import SuperpositionSpec, beat_polar, density_single, survival_single

__version__ = "0.1.0"

__all__ = [
    "ALL_APPROACHES",
    "ALL_CHANNELS",
    "ApproachKind",
    "BiExpSum",
    "Channel",
    "ConfigError",
    "ConvergenceError",
    "DecayTimesError",
    "DiscriminationReport",
    "EntangledStateSpec",
    "EnvelopeDegenerate",
    "EventBatch",
    "GridSpec",
    "JointDensity",
    "KaonParams",
    "NegativeDensity",
    "NormalizationError",
    "SuperpositionSpec",
    "SupportMismatch",
    "TooFewEvents",
    "UnsupportedCombination",
    "approach_comparison",
    "beat_polar",
    "chi_square_binned",
    "density_single",
    "discriminate",
    "finite_diff_gradient_sum",
    "finite_diff_mixed",
    "joint_density",
    "joint_survival",
    "kl_divergence",
    "mixing_matrix",
    "quad_semiinf_1d",
    "quad_semiinf_2d",
    "required_sample_size",
    "sample_events",
    "survival_amplitudes",
    "survival_single",
]
