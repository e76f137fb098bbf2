"""Kernel backend selection.

The compiled Cython kernels are preferred when built; the pure NumPy
twins in ``_pykernels`` are the fallback. Set ``VITALNODES_KERNELS`` to
``compiled`` or ``python`` to force a backend (forcing ``compiled`` when
the extension is missing is an error rather than a silent downgrade).

Both backends satisfy one contract: identical signatures, identical
random streams, bit-identical results for integer-valued outputs, and
agreement to floating-point reassociation elsewhere.
"""

from __future__ import annotations

import os

_forced = os.environ.get("VITALNODES_KERNELS")

if _forced == "python":
    from . import _pykernels as _impl
elif _forced == "compiled":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError as exc:
        raise RuntimeError(
            "VITALNODES_KERNELS=compiled, but the extension is not built; "
            "reinstall with a C compiler available") from exc
elif _forced not in (None, ""):
    raise RuntimeError(
        f"VITALNODES_KERNELS must be 'compiled' or 'python', got {_forced!r}")
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND

bfs_sigma = _impl.bfs_sigma
betweenness_counts = _impl.betweenness_counts
distance_stats = _impl.distance_stats
sir_single = _impl.sir_single
sir_final_mean = _impl.sir_final_mean
sir_curve = _impl.sir_curve
sgns_train = _impl.sgns_train

__all__ = [
    "BACKEND",
    "bfs_sigma",
    "betweenness_counts",
    "distance_stats",
    "sir_single",
    "sir_final_mean",
    "sir_curve",
    "sgns_train",
]
