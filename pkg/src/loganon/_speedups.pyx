# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: AES-128 block encryption and the prefix-preserving
IPv4 pseudonymizer built on it.

Mirrors the interface of ``loganon._purepy``.
"""

from libc.stdint cimport uint8_t, uint32_t

cdef uint8_t SBOX[256]
cdef uint32_t TE0[256]
cdef uint32_t TE1[256]
cdef uint32_t TE2[256]
cdef uint32_t TE3[256]
cdef uint32_t RCON[10]


cdef inline uint8_t _rotl8(uint8_t x, int s):
    return <uint8_t>((x << s) | (x >> (8 - s)))


cdef inline uint8_t _xtime(uint8_t x):
    return <uint8_t>((x << 1) ^ (0x1B if x & 0x80 else 0))


cdef inline uint32_t _ror32(uint32_t x, int s):
    return (x >> s) | (x << (32 - s))


cdef void _init_tables():
    cdef uint8_t p = 1, q = 1, x
    cdef int i
    # walk GF(2^8) by generator 3; q tracks the multiplicative inverse of p
    while True:
        p = p ^ _xtime(p)
        q ^= <uint8_t>(q << 1)
        q ^= <uint8_t>(q << 2)
        q ^= <uint8_t>(q << 4)
        if q & 0x80:
            q ^= 0x09
        x = q ^ _rotl8(q, 1) ^ _rotl8(q, 2) ^ _rotl8(q, 3) ^ _rotl8(q, 4)
        SBOX[p] = x ^ 0x63
        if p == 1:
            break
    SBOX[0] = 0x63
    cdef uint32_t s, s2, s3, w
    for i in range(256):
        s = SBOX[i]
        s2 = _xtime(<uint8_t>s)
        s3 = s2 ^ s
        w = (s2 << 24) | (s << 16) | (s << 8) | s3
        TE0[i] = w
        TE1[i] = _ror32(w, 8)
        TE2[i] = _ror32(w, 16)
        TE3[i] = _ror32(w, 24)
    cdef uint8_t r = 1
    for i in range(10):
        RCON[i] = (<uint32_t>r) << 24
        r = _xtime(r)


_init_tables()


cdef inline uint32_t _load_be(const uint8_t* b):
    return ((<uint32_t>b[0]) << 24) | ((<uint32_t>b[1]) << 16) | ((<uint32_t>b[2]) << 8) | b[3]


cdef inline void _store_be(uint8_t* b, uint32_t w):
    b[0] = w >> 24
    b[1] = (w >> 16) & 0xFF
    b[2] = (w >> 8) & 0xFF
    b[3] = w & 0xFF


cdef inline uint32_t _sub_word(uint32_t w):
    return ((<uint32_t>SBOX[w >> 24]) << 24) | ((<uint32_t>SBOX[(w >> 16) & 0xFF]) << 16) \
        | ((<uint32_t>SBOX[(w >> 8) & 0xFF]) << 8) | SBOX[w & 0xFF]


cdef void _expand_key(const uint8_t* key, uint32_t* rk):
    cdef int i
    cdef uint32_t t
    for i in range(4):
        rk[i] = _load_be(key + 4 * i)
    for i in range(4, 44):
        t = rk[i - 1]
        if i % 4 == 0:
            t = _sub_word((t << 8) | (t >> 24)) ^ RCON[i // 4 - 1]
        rk[i] = rk[i - 4] ^ t


cdef inline void _encrypt_words(const uint32_t* rk, uint32_t* s) nogil:
    cdef uint32_t s0 = s[0] ^ rk[0], s1 = s[1] ^ rk[1], s2 = s[2] ^ rk[2], s3 = s[3] ^ rk[3]
    cdef uint32_t t0, t1, t2, t3
    cdef int r
    for r in range(1, 10):
        t0 = TE0[s0 >> 24] ^ TE1[(s1 >> 16) & 0xFF] ^ TE2[(s2 >> 8) & 0xFF] ^ TE3[s3 & 0xFF] ^ rk[4 * r]
        t1 = TE0[s1 >> 24] ^ TE1[(s2 >> 16) & 0xFF] ^ TE2[(s3 >> 8) & 0xFF] ^ TE3[s0 & 0xFF] ^ rk[4 * r + 1]
        t2 = TE0[s2 >> 24] ^ TE1[(s3 >> 16) & 0xFF] ^ TE2[(s0 >> 8) & 0xFF] ^ TE3[s1 & 0xFF] ^ rk[4 * r + 2]
        t3 = TE0[s3 >> 24] ^ TE1[(s0 >> 16) & 0xFF] ^ TE2[(s1 >> 8) & 0xFF] ^ TE3[s2 & 0xFF] ^ rk[4 * r + 3]
        s0, s1, s2, s3 = t0, t1, t2, t3
    s[0] = (((<uint32_t>SBOX[s0 >> 24]) << 24) | ((<uint32_t>SBOX[(s1 >> 16) & 0xFF]) << 16)
            | ((<uint32_t>SBOX[(s2 >> 8) & 0xFF]) << 8) | SBOX[s3 & 0xFF]) ^ rk[40]
    s[1] = (((<uint32_t>SBOX[s1 >> 24]) << 24) | ((<uint32_t>SBOX[(s2 >> 16) & 0xFF]) << 16)
            | ((<uint32_t>SBOX[(s3 >> 8) & 0xFF]) << 8) | SBOX[s0 & 0xFF]) ^ rk[41]
    s[2] = (((<uint32_t>SBOX[s2 >> 24]) << 24) | ((<uint32_t>SBOX[(s3 >> 16) & 0xFF]) << 16)
            | ((<uint32_t>SBOX[(s0 >> 8) & 0xFF]) << 8) | SBOX[s1 & 0xFF]) ^ rk[42]
    s[3] = (((<uint32_t>SBOX[s3 >> 24]) << 24) | ((<uint32_t>SBOX[(s0 >> 16) & 0xFF]) << 16)
            | ((<uint32_t>SBOX[(s1 >> 8) & 0xFF]) << 8) | SBOX[s2 & 0xFF]) ^ rk[43]


def aes128_encrypt_block(bytes key, bytes block):
    """Encrypt one 16-byte block under a 16-byte key (ECB, single block)."""
    if len(key) != 16 or len(block) != 16:
        raise ValueError("key and block must both be 16 bytes")
    cdef uint32_t rk[44]
    cdef uint32_t s[4]
    cdef uint8_t out[16]
    cdef const uint8_t* kb = key
    cdef const uint8_t* bb = block
    cdef int i
    _expand_key(kb, rk)
    for i in range(4):
        s[i] = _load_be(bb + 4 * i)
    _encrypt_words(rk, s)
    for i in range(4):
        _store_be(out + 4 * i, s[i])
    return bytes(out[:16])


cdef class PrefixCipher:
    """Prefix-preserving IPv4 permutation keyed by 32 bytes.

    The first 16 key bytes key the block cipher; the second 16 are
    encrypted once to form the padding block.  Output bit ``i`` is input
    bit ``i`` XOR the top bit of the cipher applied to the first ``i``
    input bits followed by padding.
    """

    cdef uint32_t rk[44]
    cdef uint32_t pad[4]
    cdef uint32_t masks[33]

    def __cinit__(self, bytes key):
        if len(key) != 32:
            raise ValueError("key must be 32 bytes")
        cdef const uint8_t* kb = key
        cdef int i
        cdef uint32_t full = 0xFFFFFFFF
        _expand_key(kb, self.rk)
        for i in range(4):
            self.pad[i] = _load_be(kb + 16 + 4 * i)
        _encrypt_words(self.rk, self.pad)
        self.masks[0] = 0
        for i in range(1, 32):
            self.masks[i] = full << (32 - i)
        self.masks[32] = full

    cdef uint32_t _anon(self, uint32_t ip) nogil:
        cdef uint32_t otp = 0, m
        cdef uint32_t s[4]
        cdef int pos
        for pos in range(32):
            m = self.masks[pos]
            s[0] = (ip & m) | (self.pad[0] & ~m)
            s[1] = self.pad[1]
            s[2] = self.pad[2]
            s[3] = self.pad[3]
            _encrypt_words(self.rk, s)
            otp = (otp << 1) | (s[0] >> 31)
        return ip ^ otp

    def anonymize(self, ip):
        if not 0 <= ip <= 0xFFFFFFFF:
            raise ValueError(f"{ip} is not a 32-bit address")
        return self._anon(<uint32_t>ip)

    def anonymize_many(self, ips):
        cdef list out = []
        for ip in ips:
            out.append(self.anonymize(ip))
        return out


IMPLEMENTATION = "cython"
