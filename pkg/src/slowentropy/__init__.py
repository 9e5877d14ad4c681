"""Finite-scale slow-entropy invariants for zero-entropy dynamical systems."""

__version__ = "0.1.0"

from .estimation import (
    AmorphicComplexityEstimator,
    GrowthEstimate,
    PowerEntropyEstimator,
    PowerLawFit,
    ScaleFamily,
    amorphic_estimate,
    entropy_estimate,
    exponential_rate,
    fit_power_law,
    scale_entropy,
)
from .metrics import (
    FrequencyEstimate,
    bowen_distance,
    hamming_distance,
    mismatch_count,
    pair_statistics,
    separation_frequency_estimate,
    word_distance,
)
from .separation import (
    CandidateSet,
    GreedyPacking,
    SeparationResult,
    asymptotic_separation_number,
    bowen_separation_number,
    counterexample_witness_set,
    exact_max_separated,
    greedy_separated,
    hamming_separation_number,
    sep_to_bowen_witness,
    subword_separation_number,
)
from .systems import (
    CircleRotation,
    DomainError,
    KindMismatchError,
    ShiftSystem,
    SkewProduct,
    Sturmian,
    TorusSkew,
    alpha,
    base_distance,
    beta,
    make_system,
    orbit,
    step,
    sturmian_symbol,
    tau,
)
from .toeplitz import (
    DepthExceededError,
    RegularToeplitz,
    ToeplitzSpec,
    derive_periods,
    irregularity_certificate,
    level_of,
    periodic_density,
    regular_symbol_at,
    symbol_at,
    verify_periodic_structure,
    window,
)

__all__ = [
    "__version__",
    "AmorphicComplexityEstimator",
    "GrowthEstimate",
    "PowerEntropyEstimator",
    "PowerLawFit",
    "ScaleFamily",
    "amorphic_estimate",
    "entropy_estimate",
    "exponential_rate",
    "fit_power_law",
    "scale_entropy",
    "FrequencyEstimate",
    "bowen_distance",
    "hamming_distance",
    "mismatch_count",
    "pair_statistics",
    "separation_frequency_estimate",
    "word_distance",
    "CandidateSet",
    "GreedyPacking",
    "SeparationResult",
    "asymptotic_separation_number",
    "bowen_separation_number",
    "counterexample_witness_set",
    "exact_max_separated",
    "greedy_separated",
    "hamming_separation_number",
    "sep_to_bowen_witness",
    "subword_separation_number",
    "CircleRotation",
    "DomainError",
    "KindMismatchError",
    "ShiftSystem",
    "SkewProduct",
    "Sturmian",
    "TorusSkew",
    "alpha",
    "base_distance",
    "beta",
    "make_system",
    "orbit",
    "step",
    "sturmian_symbol",
    "tau",
    "DepthExceededError",
    "RegularToeplitz",
    "ToeplitzSpec",
    "derive_periods",
    "irregularity_certificate",
    "level_of",
    "periodic_density",
    "regular_symbol_at",
    "symbol_at",
    "verify_periodic_structure",
    "window",
]
