"""Selects the compiled kernels when available, else the pure-Python ones.

Set ``LOGANON_PURE=1`` to force the fallback.
"""

import os

from . import _purepy as pure

native = None
if not os.environ.get("LOGANON_PURE"):
    try:
        from . import _speedups as native
    except ImportError:
        native = None

_impl = native if native is not None else pure

PrefixCipher = _impl.PrefixCipher
aes128_encrypt_block = _impl.aes128_encrypt_block
IMPLEMENTATION = _impl.IMPLEMENTATION

__all__ = ["PrefixCipher", "aes128_encrypt_block", "IMPLEMENTATION", "native", "pure"]
