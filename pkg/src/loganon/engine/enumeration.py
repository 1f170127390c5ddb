"""Windowed timestamp enumeration.

Records are buffered in a bounded min-heap and released oldest first once
the buffer overflows, so a log that is only locally out of order comes
out sorted.  Released timestamps are replaced by synthetic ones: the first
gets the start value, every later one that differs from its predecessor
gets one second more, equal ones share a value.
"""

from __future__ import annotations

import heapq
import itertools
import random

from ..errors import PolicyError
from ..record import FieldKind, FieldValue, Record
from .timeshift import adjust_secondary_timestamp

DEFAULT_CAPACITY = 1000
START_RANGE = 1 << 30


class EnumWindow:
    def __init__(self, capacity: int = DEFAULT_CAPACITY, start: int | None = None,
                 field: str | None = None, secondary: str | None = None,
                 rng: random.Random | None = None):
        if capacity < 1:
            raise PolicyError("enumeration window capacity must be >= 1")
        if start is None:
            start = (rng or random.SystemRandom()).randrange(START_RANGE)
        self.capacity = capacity
        self.start = start
        self.field = field
        self.secondary = secondary
        self.next_output = start
        self.buffer: list = []
        self._seq = itertools.count()
        self._last_pushed = -1
        self.last_original: int | None = None
        self.last_synthetic: int | None = None

    def __len__(self) -> int:
        return len(self.buffer)

    def assign(self, original: int) -> int:
        """Synthetic value for the next released original timestamp."""
        if self.last_original is None:
            syn = self.start
        elif original == self.last_original:
            syn = self.last_synthetic
        else:
            syn = self.last_synthetic + 1
        self.last_original, self.last_synthetic = original, syn
        self.next_output = syn + 1
        return syn

    def _key(self, record) -> tuple[int, bool]:
        if isinstance(record, Record):
            fv = record.get(self.field) if self.field else None
            if fv is None:
                # unparsed lines ride along at the position they were read
                return self._last_pushed, False
            return fv.value, True
        return record, True

    def push(self, record) -> list:
        ts, stamped = self._key(record)
        if stamped:
            self._last_pushed = ts
        heapq.heappush(self.buffer, (ts, next(self._seq), stamped, record))
        out = []
        while len(self.buffer) > self.capacity:
            out.append(self._release())
        return out

    def flush(self) -> list:
        out = []
        while self.buffer:
            out.append(self._release())
        return out

    def _release(self):
        ts, _, stamped, record = heapq.heappop(self.buffer)
        if not stamped:
            return record
        syn = self.assign(ts)
        if not isinstance(record, Record):
            return syn
        updates = {self.field: FieldValue(FieldKind.TIMESTAMP, syn)}
        if self.secondary and self.secondary in record:
            sec = record[self.secondary].value
            updates[self.secondary] = FieldValue(
                FieldKind.TIMESTAMP, adjust_secondary_timestamp(syn - ts, sec))
        return record.replace(updates)


def enum_push(window: EnumWindow, record) -> list:
    return window.push(record)


def enum_flush(window: EnumWindow) -> list:
    return window.flush()
