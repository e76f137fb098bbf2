"""Counter-based pseudo-random numbers shared by every stochastic routine.

All randomness in this package flows through a splitmix64 generator: draw
``i`` of a stream seeded with ``s`` is ``mix64(s + (i + 1) * GAMMA)``. The
compiled kernels implement the identical arithmetic in C, so the compiled
and pure-Python backends consume bit-identical uniform deviates, and any
(node, run) substream can be derived without touching the others.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15  # Weyl increment of the in-stream counter
DERIVE_GAMMA = 0xD1B54A32D192ED03  # distinct increment for substream derivation
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(base: int, *indices: int) -> int:
    """Fold substream indices into a base seed.

    Distinct index tuples give independent-looking substreams; the same
    tuple always gives the same seed.
    """
    state = base & _MASK
    for ix in indices:
        state = mix64((state + ((ix + 1) * DERIVE_GAMMA)) & _MASK)
    return state


def _mix64_block(states: np.ndarray) -> np.ndarray:
    z = states.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return z


class Stream:
    """Sequential uniform stream over a splitmix64 counter.

    ``doubles(k)`` vectorizes the next ``k`` draws; ``double()`` takes one.
    Both advance the same counter, so consumers may mix scalar and block
    draws and still match a C loop drawing one deviate at a time.
    """

    __slots__ = ("seed", "_count")

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self._count = 0

    def doubles(self, k: int) -> np.ndarray:
        counters = np.arange(self._count + 1, self._count + k + 1, dtype=np.uint64)
        self._count += k
        states = counters * np.uint64(GAMMA) + np.uint64(self.seed)
        bits = _mix64_block(states)
        return (bits >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def double(self) -> float:
        self._count += 1
        bits = mix64((self.seed + self._count * GAMMA) & _MASK)
        return (bits >> 11) * _INV_2_53

    def shuffle(self, arr: np.ndarray) -> None:
        """In-place Fisher-Yates shuffle driven by this stream."""
        n = len(arr)
        if n < 2:
            return
        u = self.doubles(n - 1)
        for i in range(n - 1, 0, -1):
            j = int(u[n - 1 - i] * (i + 1))
            arr[i], arr[j] = arr[j], arr[i]

    def weighted_index(self, cumweights: np.ndarray) -> int:
        """Draw an index with probability proportional to weight.

        ``cumweights`` is the inclusive cumulative sum; the total must be
        positive.
        """
        total = float(cumweights[-1])
        u = self.double() * total
        return int(np.searchsorted(cumweights, u, side="right"))
