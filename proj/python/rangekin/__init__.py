"""Range-based kinematic state estimation (position, velocity, acceleration)."""

from ._core import (
    RangekinError,
    estimate,
    estimate_acceleration,
    estimate_position,
    estimate_velocity,
    range,
    range_accel,
    range_rate,
    reference_layout,
    sweep,
    synthesize,
    verify,
)

__all__ = [
    "RangekinError",
    "estimate",
    "estimate_acceleration",
    "estimate_position",
    "estimate_velocity",
    "range",
    "range_accel",
    "range_rate",
    "reference_layout",
    "sweep",
    "synthesize",
    "verify",
]
__version__ = "0.1.0"
