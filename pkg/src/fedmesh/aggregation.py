"""Model aggregation: unweighted FedAvg plus robust alternatives.

All functions take plain float64 arrays (or ParamVector values) of one
shared length and are pure, so any node thread can call them freely.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeMismatch, TooFewVectors

AGGREGATOR_NAMES = ("fedavg", "krum", "trimmed_mean", "median")


def _stack(vectors) -> np.ndarray:
    if not vectors:
        raise TooFewVectors("no vectors to aggregate")
    arrays = [np.asarray(v, dtype=np.float64) for v in vectors]
    length = arrays[0].shape[0]
    for a in arrays:
        if a.shape != (length,):
            raise ShapeMismatch(
                f"vector of length {a.shape} does not match {length}"
            )
    return np.stack(arrays)


def fedavg(own, received) -> np.ndarray:
    """Element-wise mean over the node's own vector plus all received ones."""
    stacked = _stack([own] + list(received))
    return stacked.mean(axis=0)


def krum(vectors, f: int) -> np.ndarray:
    """Pick the vector closest to its n - f - 2 nearest peers.

    The score of candidate i is the sum of squared Euclidean distances to
    its n - f - 2 nearest other vectors; the minimal score wins and exact
    ties break toward the lowest index. Requires n >= 2f + 3.
    """
    stacked = _stack(vectors)
    n = stacked.shape[0]
    if f < 0:
        raise TooFewVectors(f"byzantine count must be >= 0, got {f}")
    if n < 2 * f + 3:
        raise TooFewVectors(f"krum needs n >= 2f + 3 = {2 * f + 3}, got {n}")
    closest = n - f - 2
    diffs = stacked[:, None, :] - stacked[None, :, :]
    sq = (diffs * diffs).sum(axis=2)
    scores = np.empty(n)
    for i in range(n):
        others = np.delete(sq[i], i)
        others.sort()
        scores[i] = others[:closest].sum()
    winner = int(np.argmin(scores))  # argmin takes the first minimum
    return stacked[winner].copy()


def trimmed_mean(vectors, k_trim: int) -> np.ndarray:
    """Coordinate-wise mean after dropping the k largest and k smallest."""
    stacked = _stack(vectors)
    n = stacked.shape[0]
    if k_trim < 0:
        raise TooFewVectors(f"trim count must be >= 0, got {k_trim}")
    if n <= 2 * k_trim:
        raise TooFewVectors(
            f"trimmed mean needs more than 2 * {k_trim} vectors, got {n}"
        )
    ordered = np.sort(stacked, axis=0)
    kept = ordered[k_trim:n - k_trim] if k_trim else ordered
    return kept.mean(axis=0)


def median(vectors) -> np.ndarray:
    """Coordinate-wise median; even counts average the two middle values."""
    stacked = _stack(vectors)
    return np.median(stacked, axis=0)


def aggregate(name: str, own, received, f: int = 0, k_trim: int = 0) -> np.ndarray:
    """Dispatch by configured algorithm name.

    Robust aggregators treat the node's own parameters as one more
    candidate; the candidate order is own first, then the received list.
    """
    if name == "fedavg":
        return fedavg(own, received)
    candidates = [own] + list(received)
    if name == "krum":
        return krum(candidates, f)
    if name == "trimmed_mean":
        return trimmed_mean(candidates, k_trim)
    if name == "median":
        return median(candidates)
    raise ValueError(f"unknown aggregation algorithm: {name!r}")
