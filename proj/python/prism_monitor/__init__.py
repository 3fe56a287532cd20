"""Safe-stoppability monitor: simulation-driven training and runtime scoring."""

from ._core import (
    EnvParams,
    Monitor,
    PrismConfig,
    PrismResult,
    StrideConfig,
    TrainHyper,
    decide,
    estimate_vstop,
    is_safe,
    is_terminal,
    label_trigger,
    run_prism,
)

__all__ = [
    "EnvParams",
    "Monitor",
    "PrismConfig",
    "PrismResult",
    "StrideConfig",
    "TrainHyper",
    "decide",
    "estimate_vstop",
    "is_safe",
    "is_terminal",
    "label_trigger",
    "run_prism",
]
