"""Counter-based pseudo-randomness.

Every random quantity in the package is a pure function of a 64-bit key, so
results never depend on evaluation order, thread schedule, or numpy's global
state.  The mixer is the SplitMix64 finalizer, which is a bijection on 64-bit
integers with good avalanche behaviour.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# fixed tag that decouples the edge-ranking stream from the sampling stream
ABLATION_TAG = 0xA5A5A5A5A5A5A5A5

_INV_2_53 = float(2.0**-53)


def splitmix64(x: np.ndarray | int) -> np.ndarray | np.uint64:
    """SplitMix64 finalizer.  Accepts a scalar or a uint64 array."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
    if np.ndim(z) == 0:
        return np.uint64(z)
    return z


def hash_ints(*parts: int) -> int:
    """Fold integers into one 64-bit key (order sensitive)."""
    acc = np.uint64(0)
    with np.errstate(over="ignore"):
        for p in parts:
            acc = splitmix64(acc + np.uint64(int(p) & 0xFFFFFFFFFFFFFFFF))
    return int(acc)


def pair_uniforms(seed: int, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
    """Uniform [0,1) draws keyed by unordered node pairs.

    ``ii`` and ``jj`` are integer arrays of node indices.  The draw for (i, j)
    equals the draw for (j, i) and does not depend on the matrix size, so
    subsampled graphs share edges with larger ones built from the same seed.
    """
    lo = np.minimum(ii, jj).astype(np.uint64)
    hi = np.maximum(ii, jj).astype(np.uint64)
    packed = (lo << np.uint64(32)) | hi
    with np.errstate(over="ignore"):
        z = splitmix64(packed + splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))
    return ((z >> np.uint64(11)).astype(np.float64)) * _INV_2_53


def trial_seed(base_seed: int, grid_index: int, trial_index: int) -> int:
    """Per-trial seed for parameter sweeps, independent of execution order."""
    return hash_ints(base_seed, grid_index, trial_index)
