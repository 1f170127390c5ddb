"""Records and canonical field values shared by the engine, policies and modules.

A record is an ordered list of ``(name, FieldValue)`` pairs.  Every value
carries its :class:`FieldKind` so schemas can type-check policies without
knowing anything about the log format the value came from.
"""

from __future__ import annotations

import enum
import ipaddress
from dataclasses import dataclass
from typing import Any, Iterable, Iterator

from .errors import ConfigurationError


class FieldKind(str, enum.Enum):
    IPV4 = "ipv4"
    MAC = "mac"
    TIMESTAMP = "timestamp"
    PORT = "port"
    UINT8 = "uint8"
    UINT16 = "uint16"
    UINT32 = "uint32"
    TEXT = "text"
    BYTES = "bytes"
    FLAG = "flag"

    @property
    def bit_width(self) -> int | None:
        """Width of fixed-size binary kinds, ``None`` for variable-length ones."""
        return _WIDTHS.get(self)

    @property
    def is_binary(self) -> bool:
        return self in _WIDTHS


_WIDTHS = {
    FieldKind.IPV4: 32,
    FieldKind.MAC: 48,
    FieldKind.TIMESTAMP: 64,
    FieldKind.PORT: 16,
    FieldKind.UINT8: 8,
    FieldKind.UINT16: 16,
    FieldKind.UINT32: 32,
    FieldKind.FLAG: 8,
}


@dataclass(frozen=True, slots=True)
class FieldValue:
    """A typed canonical value.

    Integers hold IPv4 addresses, timestamps (epoch seconds), ports and the
    fixed-width integer kinds.  MAC addresses are 6-byte ``bytes``.
    """

    kind: FieldKind
    value: Any

    def __post_init__(self):
        kind, value = self.kind, self.value
        if kind is FieldKind.TEXT:
            if not isinstance(value, str):
                raise TypeError(f"text value must be str, got {type(value).__name__}")
        elif kind is FieldKind.BYTES:
            if not isinstance(value, bytes):
                raise TypeError("bytes value must be bytes")
        elif kind is FieldKind.MAC:
            if not isinstance(value, bytes) or len(value) != 6:
                raise ValueError(f"MAC must be exactly 6 bytes, got {value!r}")
        else:
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"{kind.value} value must be int, got {value!r}")
            if not 0 <= value < (1 << _WIDTHS[kind]):
                raise ValueError(f"{value} out of range for {kind.value}")

    @property
    def truthy(self) -> bool:
        """Flag semantics: any nonzero byte counts as set."""
        return bool(self.value)

    def __str__(self) -> str:
        return render(self)


def ipv4(value: int | str) -> FieldValue:
    if isinstance(value, str):
        value = int(ipaddress.IPv4Address(value))
    return FieldValue(FieldKind.IPV4, value)


def mac(value: bytes | str) -> FieldValue:
    if isinstance(value, str):
        value = bytes.fromhex(value.replace(":", "").replace("-", ""))
    return FieldValue(FieldKind.MAC, value)


def timestamp(value: int) -> FieldValue:
    return FieldValue(FieldKind.TIMESTAMP, value)


def port(value: int) -> FieldValue:
    return FieldValue(FieldKind.PORT, value)


def text(value: str) -> FieldValue:
    return FieldValue(FieldKind.TEXT, value)


def flag(value: int | bool) -> FieldValue:
    return FieldValue(FieldKind.FLAG, int(value))


def format_ipv4(value: int) -> str:
    return f"{value >> 24}.{(value >> 16) & 0xFF}.{(value >> 8) & 0xFF}.{value & 0xFF}"


def format_mac(value: bytes) -> str:
    return ":".join(f"{b:02x}" for b in value)


def render(fv: FieldValue) -> str:
    """Default textual rendering of a canonical value."""
    if fv.kind is FieldKind.IPV4:
        return format_ipv4(fv.value)
    if fv.kind is FieldKind.MAC:
        return format_mac(fv.value)
    if fv.kind is FieldKind.BYTES:
        return fv.value.hex()
    return str(fv.value)


def coerce(kind: FieldKind, raw: str) -> FieldValue:
    """Parse the default textual rendering back into a canonical value."""
    if kind is FieldKind.IPV4:
        return ipv4(raw)
    if kind is FieldKind.MAC:
        return mac(raw)
    if kind is FieldKind.TEXT:
        return text(raw)
    if kind is FieldKind.BYTES:
        return FieldValue(kind, bytes.fromhex(raw))
    return FieldValue(kind, int(raw, 0))


class Record:
    """Ordered ``(name, FieldValue)`` pairs plus whatever a module needs to
    rebuild the original layout.

    ``raw_remainder`` holds text that was not parsed into fields; a record
    with no fields and a remainder is passed through verbatim.  ``layout``
    is opaque to everything but the module that produced the record, and
    ``eol`` is the line terminator as read.
    """

    __slots__ = ("_fields", "_index", "raw_remainder", "layout", "eol")

    def __init__(self, fields: Iterable[tuple[str, FieldValue]] = (),
                 raw_remainder: str | None = None, layout: Any = None, eol: str = ""):
        self._fields = tuple(fields)
        self._index = {name: i for i, (name, _) in enumerate(self._fields)}
        if len(self._index) != len(self._fields):
            names = [n for n, _ in self._fields]
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ConfigurationError(f"duplicate field names in record: {dupes}")
        self.raw_remainder = raw_remainder
        self.layout = layout
        self.eol = eol

    @property
    def fields(self) -> tuple[tuple[str, FieldValue], ...]:
        return self._fields

    def names(self) -> list[str]:
        return [n for n, _ in self._fields]

    def __getitem__(self, name: str) -> FieldValue:
        return self._fields[self._index[name]][1]

    def get(self, name: str, default: FieldValue | None = None) -> FieldValue | None:
        i = self._index.get(name)
        return default if i is None else self._fields[i][1]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[tuple[str, FieldValue]]:
        return iter(self._fields)

    def __len__(self) -> int:
        return len(self._fields)

    def replace(self, updates: dict[str, FieldValue]) -> "Record":
        """Return a copy with some values substituted, order unchanged."""
        if not updates:
            return self
        unknown = updates.keys() - self._index.keys()
        if unknown:
            raise KeyError(f"fields not in record: {sorted(unknown)}")
        new = [(n, updates.get(n, v)) for n, v in self._fields]
        return Record(new, self.raw_remainder, self.layout, self.eol)

    @property
    def is_raw(self) -> bool:
        return not self._fields and self.raw_remainder is not None

    def __eq__(self, other):
        if not isinstance(other, Record):
            return NotImplemented
        return self._fields == other._fields and self.raw_remainder == other.raw_remainder

    def __hash__(self):
        return hash((self._fields, self.raw_remainder))

    def __repr__(self):
        inner = ", ".join(f"{n}={render(v)}" for n, v in self._fields)
        if self.raw_remainder is not None:
            inner += f", raw={self.raw_remainder!r}"
        return f"Record({inner})"


# Replacement constants keyed by (kind, role).  Same-typed fields can carry
# different constants (protocol -> 255, ICMP type -> 0), hence the role.
BLACKMARKER_CONSTANTS: dict[tuple[FieldKind, str], Any] = {
    (FieldKind.IPV4, "ip"): 0,
    (FieldKind.MAC, "mac"): bytes(6),
    (FieldKind.PORT, "port"): 0,
    (FieldKind.UINT8, "protocol"): 255,
    (FieldKind.UINT16, "ip_id"): 0,
    (FieldKind.UINT8, "tos"): 255,
    (FieldKind.UINT8, "ttl"): 255,
    (FieldKind.FLAG, "df"): 0,
    (FieldKind.UINT16, "tcp_window"): 0,
    (FieldKind.UINT32, "tcp_seq"): 0,
    (FieldKind.UINT8, "icmp_type"): 0,
    (FieldKind.UINT8, "icmp_code"): 0,
    (FieldKind.TEXT, "ip_options"): "",
    (FieldKind.TEXT, "tcp_options"): "",
    # generic per-kind roles, used by modules that have no finer notion
    (FieldKind.UINT8, "uint8"): 0,
    (FieldKind.UINT16, "uint16"): 0,
    (FieldKind.UINT32, "uint32"): 0,
    (FieldKind.FLAG, "flag"): 0,
    (FieldKind.TEXT, "text"): "",
    (FieldKind.BYTES, "bytes"): b"",
}

ROLE_ALIASES: dict[str, str] = {
    "src_ip": "ip", "dst_ip": "ip", "saddr": "ip", "daddr": "ip",
    "spt": "port", "dpt": "port", "src_port": "port", "dst_port": "port",
    "mac_src": "mac", "mac_dst": "mac",
    "proto": "protocol", "id": "ip_id", "window": "tcp_window", "seq": "tcp_seq",
}

DEFAULT_ROLES: dict[FieldKind, str] = {
    FieldKind.IPV4: "ip",
    FieldKind.MAC: "mac",
    FieldKind.PORT: "port",
    FieldKind.UINT8: "uint8",
    FieldKind.UINT16: "uint16",
    FieldKind.UINT32: "uint32",
    FieldKind.FLAG: "flag",
    FieldKind.TEXT: "text",
    FieldKind.BYTES: "bytes",
}


def resolve_role(role: str) -> str:
    return ROLE_ALIASES.get(role, role)


def has_blackmarker_constant(kind: FieldKind, role: str) -> bool:
    return (kind, resolve_role(role)) in BLACKMARKER_CONSTANTS


def canonical_blackmarker_value(kind: FieldKind, field_role: str) -> FieldValue:
    try:
        const = BLACKMARKER_CONSTANTS[(kind, resolve_role(field_role))]
    except KeyError:
        raise ConfigurationError(
            f"no black-marker constant for {kind.value} field with role {field_role!r}"
        ) from None
    return FieldValue(kind, const)
