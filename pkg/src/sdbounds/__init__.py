"""Standard-deviation, skew-information and incompatibility bounds for superposition states."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundsReport,
    IncompatBoundsReport,
    SuperpositionSpec,
    Variant,
    assemble,
    coherence_bounds,
    expansion_identity,
    incompatibility_bounds,
    norm_squared,
    theorem1_bounds,
)
from .stats import (  # noqa: E402
    MomentSet,
    expectation,
    incompatibility,
    moments,
    pure_state_coherence,
    skew_information,
    transition_moment,
)

__all__ = [
    "BoundsReport",
    "IncompatBoundsReport",
    "MomentSet",
    "SuperpositionSpec",
    "Variant",
    "assemble",
    "coherence_bounds",
    "expansion_identity",
    "expectation",
    "incompatibility",
    "incompatibility_bounds",
    "moments",
    "norm_squared",
    "pure_state_coherence",
    "skew_information",
    "theorem1_bounds",
    "transition_moment",
]
