"""Random time shift: one offset, drawn once, applied to every timestamp."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..errors import PolicyError, RunError

EPOCH32_LIMIT = 1 << 32


@dataclass(frozen=True)
class ShiftState:
    delta: int
    lower: int
    upper: int

    def __post_init__(self):
        if not self.lower <= self.delta <= self.upper:
            raise ValueError("shift delta outside its bounds")


def choose_shift(lower: int, upper: int, rng: random.Random | None = None) -> ShiftState:
    """Equal bounds pin the shift exactly, which keeps runs consistent."""
    if lower > upper:
        raise PolicyError(f"shift lower bound {lower} exceeds upper bound {upper}")
    rng = rng or random.SystemRandom()
    return ShiftState(rng.randint(lower, upper), lower, upper)


def shift_time(state: ShiftState, ts: int, limit: int | None = EPOCH32_LIMIT) -> int:
    """Shift one timestamp; refuse to wrap instead of silently overflowing."""
    out = ts + state.delta
    if out < 0 or (limit is not None and out >= limit):
        raise RunError(f"shifted timestamp {out} outside representable range")
    return out


def adjust_secondary_timestamp(delta: int, secondary: int) -> int:
    """Move a paired timestamp by the primary's change so their gap is kept."""
    out = secondary + delta
    if out < 0:
        raise RunError(f"adjusted secondary timestamp {out} is negative")
    return out
