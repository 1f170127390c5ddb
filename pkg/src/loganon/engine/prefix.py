"""Prefix-preserving IPv4 pseudonymization keyed by a passphrase."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .. import kernels
from ..errors import PolicyError
from ..record import FieldKind, FieldValue


@dataclass(frozen=True)
class PpKey:
    key_bytes: bytes

    def __post_init__(self):
        if len(self.key_bytes) != 32:
            raise ValueError("prefix-preserving key must be 32 bytes")

    @property
    def cipher_key(self) -> bytes:
        return self.key_bytes[:16]

    @property
    def padding(self) -> bytes:
        return self.key_bytes[16:]


def derive_pp_key(passphrase: str) -> PpKey:
    """SHA-256 of the UTF-8 passphrase; equal passphrases give equal keys."""
    if not passphrase:
        raise PolicyError("passphrase must be nonempty")
    return PpKey(hashlib.sha256(passphrase.encode("utf-8")).digest())


def common_prefix_len(a: int, b: int, width: int = 32) -> int:
    diff = a ^ b
    return width if diff == 0 else width - diff.bit_length()


class PrefixPreservingAnonymizer:
    """Caches results; addresses repeat heavily in real logs."""

    def __init__(self, key: PpKey, cache_size: int = 1 << 20):
        self.key = key
        self._cipher = kernels.PrefixCipher(key.key_bytes)
        self._cache: dict[int, int] = {}
        self._cache_size = cache_size

    def anonymize_int(self, ip: int) -> int:
        out = self._cache.get(ip)
        if out is None:
            out = self._cipher.anonymize(ip)
            if len(self._cache) >= self._cache_size:
                self._cache.clear()
            self._cache[ip] = out
        return out

    def __call__(self, value: FieldValue) -> FieldValue:
        if value.kind is not FieldKind.IPV4:
            raise TypeError("prefix-preserving anonymization needs an IPv4 value")
        return FieldValue(FieldKind.IPV4, self.anonymize_int(value.value))


def pp_anonymize_ip(key: PpKey, ip: FieldValue | int) -> FieldValue | int:
    """One-off helper; build a :class:`PrefixPreservingAnonymizer` for bulk use."""
    cipher = kernels.PrefixCipher(key.key_bytes)
    if isinstance(ip, FieldValue):
        return FieldValue(FieldKind.IPV4, cipher.anonymize(ip.value))
    return cipher.anonymize(ip)
