"""Bitset counting kernels.

Two interchangeable engines compute itemset support over a transaction
database held as per-item transaction bitmaps: a compiled Cython engine
(`_speedups`) and a pure-Python engine (`pybitset`). The compiled one is
preferred at import time; set RULEBOOST_KERNEL=python to force the
fallback. Both produce identical counts, byte for byte downstream.
"""

import os

from . import pybitset

try:
    from . import _speedups
except ImportError:
    _speedups = None

_ENGINES = {"python": pybitset.BitsetEngine}
if _speedups is not None:
    _ENGINES["cython"] = _speedups.BitsetEngine


def available_kernels():
    return sorted(_ENGINES)


def default_kernel():
    forced = os.environ.get("RULEBOOST_KERNEL")
    if forced:
        if forced not in _ENGINES:
            raise RuntimeError(
                f"RULEBOOST_KERNEL={forced!r} is not available; "
                f"choose from {available_kernels()}"
            )
        return forced
    return "cython" if "cython" in _ENGINES else "python"


def get_engine_class(name=None):
    name = name or default_kernel()
    try:
        return _ENGINES[name]
    except KeyError:
        raise RuntimeError(
            f"unknown kernel {name!r}; choose from {available_kernels()}"
        ) from None
