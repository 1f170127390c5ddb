"""Stateless anonymization primitives.

All functions here are pure: same input, same output, safe to call from
anywhere.  Stateful primitives live in their own modules.
"""

from __future__ import annotations

import calendar
import hashlib
import hmac
import time
from dataclasses import dataclass

from ..errors import PolicyError
from ..record import FieldKind, FieldValue, canonical_blackmarker_value

HASH_ALGORITHM = "sha256"


def black_marker(value: FieldValue, role: str) -> FieldValue:
    """Replace any value with the canonical constant for its field role."""
    return canonical_blackmarker_value(value.kind, role)


def truncate_binary(value: FieldValue, keep_bits: int) -> FieldValue:
    """Keep the ``keep_bits`` most significant bits, zero the rest."""
    width = value.kind.bit_width
    if width is None:
        raise PolicyError(f"cannot bit-truncate a {value.kind.value} value")
    if not 0 <= keep_bits <= width:
        raise PolicyError(f"keep_bits={keep_bits} outside 0..{width} for {value.kind.value}")
    drop = width - keep_bits
    if value.kind is FieldKind.MAC:
        n = int.from_bytes(value.value, "big")
        n = (n >> drop) << drop
        return FieldValue(value.kind, n.to_bytes(6, "big"))
    return FieldValue(value.kind, (value.value >> drop) << drop)


def truncate_string(value: str, *, index: int | None = None, delimiter: str | None = None) -> str:
    """Cut a string at a character index or before the first ``delimiter``.

    A delimiter that does not occur leaves the string unchanged.
    """
    if (index is None) == (delimiter is None):
        raise PolicyError("string truncation needs exactly one of index or delimiter")
    if delimiter is not None:
        if not delimiter:
            raise PolicyError("delimiter must be nonempty")
        pos = value.find(delimiter)
        return value if pos < 0 else value[:pos]
    if index < 0:
        raise PolicyError("truncation index must be >= 0")
    return value[:index]


def canonical_bytes(value: FieldValue) -> bytes:
    """Byte encoding fed to hash functions: big-endian at the kind's width."""
    kind = value.kind
    if kind is FieldKind.TEXT:
        return value.value.encode("utf-8", "surrogateescape")
    if kind in (FieldKind.BYTES, FieldKind.MAC):
        return value.value
    return value.value.to_bytes(kind.bit_width // 8, "big")


def _digest_to(digest: bytes, out_kind: FieldKind) -> FieldValue:
    if out_kind is FieldKind.TEXT:
        return FieldValue(out_kind, digest.hex())
    if out_kind is FieldKind.BYTES:
        return FieldValue(out_kind, digest)
    if out_kind is FieldKind.MAC:
        return FieldValue(out_kind, digest[:6])
    nbytes = out_kind.bit_width // 8
    return FieldValue(out_kind, int.from_bytes(digest[:nbytes], "big"))


def hash_value(value: FieldValue, out_kind: FieldKind | None = None) -> FieldValue:
    """SHA-256 of the canonical encoding.

    Text output is the lowercase hex digest; binary output is the leading
    digest bytes cut to the output width.
    """
    digest = hashlib.sha256(canonical_bytes(value)).digest()
    return _digest_to(digest, out_kind or value.kind)


def hmac_value(value: FieldValue, secret: bytes, out_kind: FieldKind | None = None) -> FieldValue:
    if not secret:
        raise PolicyError("HMAC secret must be nonempty")
    digest = hmac.new(secret, canonical_bytes(value), hashlib.sha256).digest()
    return _digest_to(digest, out_kind or value.kind)


PRIVILEGED_PORT = 0
EPHEMERAL_PORT = 65535


def bilateral_classify_port(port: int) -> int:
    return PRIVILEGED_PORT if port < 1024 else EPHEMERAL_PORT


@dataclass(frozen=True)
class TimeUnitMask:
    year: bool = False
    month: bool = False
    day: bool = False
    hour: bool = False
    minute: bool = False
    second: bool = False

    UNITS = ("year", "month", "day", "hour", "minute", "second")

    @classmethod
    def parse(cls, spec: str) -> "TimeUnitMask":
        """From a comma separated unit list, e.g. ``"hour,minute,second"``."""
        names = [s.strip().lower() for s in spec.split(",") if s.strip()]
        bad = [n for n in names if n not in cls.UNITS]
        if bad:
            raise PolicyError(f"unknown time units: {bad}")
        if not names:
            raise PolicyError("at least one time unit must be selected")
        return cls(**{n: True for n in names})

    def any(self) -> bool:
        return any(getattr(self, u) for u in self.UNITS)


def annihilate_time_units(ts: int, mask: TimeUnitMask) -> int:
    """Reset the selected calendar units of a UTC epoch timestamp.

    Hour, minute and second go to 0, month and day to 1, year to 1970, so
    annihilating everything gives epoch 0.  A day that does not exist in
    the resulting month is clamped to the month's last day.
    """
    t = time.gmtime(ts)
    year = 1970 if mask.year else t.tm_year
    month = 1 if mask.month else t.tm_mon
    day = 1 if mask.day else t.tm_mday
    day = min(day, calendar.monthrange(year, month)[1])
    hour = 0 if mask.hour else t.tm_hour
    minute = 0 if mask.minute else t.tm_min
    second = 0 if mask.second else t.tm_sec
    return calendar.timegm((year, month, day, hour, minute, second, 0, 0, 0))


def anonymize_hostname(host: str, scope: str = "host", host_const: str = "host",
                       net_const: str = "network.net") -> str:
    """Black-marker a hostname.

    ``scope="host"`` replaces only the part left of the first period;
    ``scope="full"`` replaces the whole name, keeping only whether it was
    fully qualified.
    """
    head, dot, _ = host.partition(".")
    if scope == "host":
        return host_const + host[len(head):]
    if scope == "full":
        return f"{host_const}.{net_const}" if dot else host_const
    raise PolicyError(f"hostname scope must be 'host' or 'full', got {scope!r}")
