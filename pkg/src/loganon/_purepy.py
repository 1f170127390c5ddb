"""Pure-Python kernels, used when the compiled extension is unavailable.

Block encryption is delegated to ``cryptography``; only the bit-walking
loop runs in the interpreter.
"""

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

IMPLEMENTATION = "python"


def aes128_encrypt_block(key: bytes, block: bytes) -> bytes:
    if len(key) != 16 or len(block) != 16:
        raise ValueError("key and block must both be 16 bytes")
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()  # noqa: S305
    return enc.update(block) + enc.finalize()


class PrefixCipher:
    """Prefix-preserving IPv4 permutation keyed by 32 bytes."""

    def __init__(self, key: bytes):
        if len(key) != 32:
            raise ValueError("key must be 32 bytes")
        self._enc = Cipher(algorithms.AES(key[:16]), modes.ECB()).encryptor()  # noqa: S305
        pad = self._enc.update(key[16:])
        self._pad_head = int.from_bytes(pad[:4], "big")
        self._pad_tail = pad[4:]
        self._masks = [0] + [(0xFFFFFFFF << (32 - i)) & 0xFFFFFFFF for i in range(1, 32)]

    def anonymize(self, ip: int) -> int:
        if not 0 <= ip <= 0xFFFFFFFF:
            raise ValueError(f"{ip} is not a 32-bit address")
        update, head, tail = self._enc.update, self._pad_head, self._pad_tail
        otp = 0
        for m in self._masks:
            block = ((ip & m) | (head & ~m & 0xFFFFFFFF)).to_bytes(4, "big") + tail
            otp = (otp << 1) | (update(block)[0] >> 7)
        return ip ^ otp

    def anonymize_many(self, ips):
        return [self.anonymize(ip) for ip in ips]
