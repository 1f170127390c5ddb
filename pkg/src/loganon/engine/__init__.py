"""Anonymization primitives."""

from .enumeration import EnumWindow, enum_flush, enum_push
from .permutation import PermutationTable, permute_random, prefill_fixed
from .prefix import (PpKey, PrefixPreservingAnonymizer, common_prefix_len, derive_pp_key,
                     pp_anonymize_ip)
from .primitives import (TimeUnitMask, annihilate_time_units, anonymize_hostname,
                         bilateral_classify_port, black_marker, hash_value, hmac_value,
                         truncate_binary, truncate_string)
from .timeshift import ShiftState, adjust_secondary_timestamp, choose_shift, shift_time

__all__ = [
    "EnumWindow", "enum_flush", "enum_push",
    "PermutationTable", "permute_random", "prefill_fixed",
    "PpKey", "PrefixPreservingAnonymizer", "common_prefix_len", "derive_pp_key",
    "pp_anonymize_ip",
    "TimeUnitMask", "annihilate_time_units", "anonymize_hostname", "bilateral_classify_port",
    "black_marker", "hash_value", "hmac_value", "truncate_binary", "truncate_string",
    "ShiftState", "adjust_secondary_timestamp", "choose_shift", "shift_time",
]
