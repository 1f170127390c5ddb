"""Table-driven random permutation over a fixed-width value space."""

from __future__ import annotations

import random

from ..errors import ConfigurationError, RunError
from ..record import FieldKind, FieldValue

# after this many consecutive rejections fall back to enumerating free values
_MAX_REJECTIONS = 64


class PermutationTable:
    """Injective map built lazily, one fresh random value per new input.

    ``forward`` maps original to anonymized values; ``used`` holds every
    anonymized value handed out, so drawing a candidate is a set lookup
    rather than a scan of ``forward``.
    """

    def __init__(self, kind: FieldKind, rng: random.Random | None = None):
        width = kind.bit_width
        if width is None or kind is FieldKind.TIMESTAMP:
            raise ConfigurationError(f"random permutation not defined for {kind.value}")
        self.kind = kind
        self.space = 1 << width
        self.rng = rng or random.SystemRandom()
        self.forward: dict[int, int] = {}
        self.used: set[int] = set()

    def _key(self, value: FieldValue) -> int:
        if value.kind is not self.kind:
            raise ConfigurationError(
                f"{value.kind.value} value given to a {self.kind.value} permutation")
        if self.kind is FieldKind.MAC:
            return int.from_bytes(value.value, "big")
        return value.value

    def _wrap(self, n: int) -> FieldValue:
        if self.kind is FieldKind.MAC:
            return FieldValue(self.kind, n.to_bytes(6, "big"))
        return FieldValue(self.kind, n)

    def _draw(self) -> int:
        if len(self.used) >= self.space:
            raise RunError(f"{self.kind.value} permutation space exhausted")
        getrandbits, used = self.rng.getrandbits, self.used
        bits = self.space.bit_length() - 1
        for _ in range(_MAX_REJECTIONS):
            cand = getrandbits(bits)
            if cand not in used:
                return cand
        # only reachable for small, nearly full spaces
        free = [v for v in range(self.space) if v not in used]
        return self.rng.choice(free)

    def permute(self, value: FieldValue) -> FieldValue:
        key = self._key(value)
        out = self.forward.get(key)
        if out is None:
            out = self._draw()
            self.forward[key] = out
            self.used.add(out)
        return self._wrap(out)

    def prefill(self, pairs) -> None:
        """Pin mappings before any random draw, e.g. ``(x, x)`` to fix ``x``."""
        staged: dict[int, int] = {}
        staged_used: set[int] = set()
        for src, dst in pairs:
            a, b = self._key(src), self._key(dst)
            existing = self.forward.get(a, staged.get(a))
            if existing is not None:
                if existing != b:
                    raise ConfigurationError(f"conflicting fixed mapping for {src}")
                continue
            if b in self.used or b in staged_used:
                raise ConfigurationError(f"fixed target {dst} already assigned")
            staged[a] = b
            staged_used.add(b)
        self.forward.update(staged)
        self.used.update(staged_used)

    def __len__(self) -> int:
        return len(self.forward)


def permute_random(state: PermutationTable, value: FieldValue) -> FieldValue:
    return state.permute(value)


def prefill_fixed(state: PermutationTable, pairs) -> None:
    state.prefill(pairs)
