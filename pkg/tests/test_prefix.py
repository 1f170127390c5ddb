import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loganon.engine import (PrefixPreservingAnonymizer, common_prefix_len, derive_pp_key,
                            pp_anonymize_ip)
from loganon.errors import PolicyError
from loganon.record import ipv4

addr = st.integers(0, 2**32 - 1)


def prefix_oracle(a: int, b: int) -> int:
    """Shared leading bits, counted on the bit strings."""
    sa, sb = format(a, "032b"), format(b, "032b")
    n = 0
    while n < 32 and sa[n] == sb[n]:
        n += 1
    return n


@given(addr, addr)
def test_common_prefix_len_matches_string_oracle(a, b):
    assert common_prefix_len(a, b) == prefix_oracle(a, b)


@pytest.fixture(scope="module")
def anon():
    return PrefixPreservingAnonymizer(derive_pp_key("correct horse"))


@settings(max_examples=300)
@given(addr, addr)
def test_prefix_preserved(anon, a, b):
    fa, fb = anon.anonymize_int(a), anon.anonymize_int(b)
    assert prefix_oracle(fa, fb) == prefix_oracle(a, b)


def test_each_exact_prefix_length(anon):
    rng = random.Random(3)
    for n in range(33):
        a = rng.getrandbits(32)
        b = a if n == 32 else a ^ (1 << (31 - n)) ^ (rng.getrandbits(31 - n) if n < 31 else 0)
        assert prefix_oracle(a, b) == n
        assert prefix_oracle(anon.anonymize_int(a), anon.anonymize_int(b)) == n


def test_key_derivation_is_deterministic():
    k1, k2 = derive_pp_key("x"), derive_pp_key("x")
    assert k1 == k2 and k1 != derive_pp_key("y")
    assert len(k1.cipher_key) == 16 and len(k1.padding) == 16
    with pytest.raises(PolicyError):
        derive_pp_key("")


def test_helper_and_class_agree(anon):
    ip = ipv4("141.142.96.167")
    assert pp_anonymize_ip(anon.key, ip) == anon(ip)
    assert pp_anonymize_ip(anon.key, ip.value) == anon(ip).value


def test_cache_is_transparent():
    key = derive_pp_key("k")
    small = PrefixPreservingAnonymizer(key, cache_size=4)
    big = PrefixPreservingAnonymizer(key)
    ips = [random.Random(1).getrandbits(32) for _ in range(50)] * 2
    assert [small.anonymize_int(i) for i in ips] == [big.anonymize_int(i) for i in ips]
