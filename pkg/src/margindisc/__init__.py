"""Optimal discrimination of paired program/data qubit states with error margins.

Closed-form success probabilities for telling two unknown qubit states
apart by pattern matching against program copies, under a weak (average
error) or strong (conditional error) margin, plus the numerical oracles
that verify every formula independently.
"""

from .allocator import (
    MarginAllocation,
    SaturationLadder,
    allocate_weak,
    build_ladder,
    strong_condition_residual,
    strong_curve,
    strong_global,
    weak_curve,
    weak_success_global,
)
from .known_pair import (
    DegenerateOverlapError,
    OutcomeTriple,
    PovmAngles,
    critical_margin,
    outcome_probabilities,
    strong_phi,
    strong_success,
    strong_to_weak_margin,
    weak_phi,
    weak_success,
    weak_to_strong_margin,
)
from .machine import (
    JordanSpectrum,
    PortConfig,
    global_critical_margin,
    jordan_spectrum,
    minimum_error_baseline,
    overlaps,
    unambiguous_baseline,
    weights,
)
from .oracle import (
    DenseOperator,
    EmptyFeasibleSetError,
    GramDecomposition,
    InfeasibleMarginError,
    MonteCarloResult,
    OverlapBinningError,
    SizeLimitError,
    SymmetricProjector,
    build_sigma,
    concave_allocate,
    jordan_overlaps_numeric,
    monte_carlo_check,
    povm_scan,
    symmetric_projector,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # known pair
    "DegenerateOverlapError",
    "OutcomeTriple",
    "PovmAngles",
    "critical_margin",
    "weak_success",
    "strong_success",
    "weak_phi",
    "strong_phi",
    "outcome_probabilities",
    "weak_to_strong_margin",
    "strong_to_weak_margin",
    # machine
    "PortConfig",
    "JordanSpectrum",
    "jordan_spectrum",
    "overlaps",
    "weights",
    "unambiguous_baseline",
    "minimum_error_baseline",
    "global_critical_margin",
    # allocator
    "SaturationLadder",
    "MarginAllocation",
    "build_ladder",
    "allocate_weak",
    "weak_success_global",
    "strong_global",
    "strong_condition_residual",
    "weak_curve",
    "strong_curve",
    # oracle
    "DenseOperator",
    "SymmetricProjector",
    "GramDecomposition",
    "MonteCarloResult",
    "SizeLimitError",
    "EmptyFeasibleSetError",
    "OverlapBinningError",
    "InfeasibleMarginError",
    "symmetric_projector",
    "build_sigma",
    "jordan_overlaps_numeric",
    "concave_allocate",
    "povm_scan",
    "monte_carlo_check",
]
