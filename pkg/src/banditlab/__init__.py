"""Multi-armed bandits with per-arm mean-bound side information.

Provides the domain types (instances, bounds), the concentration machinery,
six arm-selection policies, confounded-log knowledge transfer, a deterministic
simulation engine, and closed-form regret-bound evaluation. The ``banditlab``
console script exposes the same functionality on the command line.
"""

__version__ = "0.1.0"

from .core import (
    Arm,
    BanditInstance,
    BoundedWithFailure,
    Distribution,
    MeanBounds,
    PruneResult,
    Support,
    ValidationReport,
    load_instance,
    prune,
    save_instance,
    validate_instance,
)

__all__ = [
    "Arm",
    "BanditInstance",
    "BoundedWithFailure",
    "Distribution",
    "MeanBounds",
    "PruneResult",
    "Support",
    "ValidationReport",
    "load_instance",
    "prune",
    "save_instance",
    "validate_instance",
    "__version__",
]
