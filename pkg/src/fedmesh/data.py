"""Desk-scale synthetic datasets, train/test splitting, and client partitioning.

Two generators cover the simulator's needs: Gaussian blob classification
data and a normal-vs-anomaly set for the reconstruction-error scenario.
Partitioners hand out disjoint training indices per participant, either
IID (random permutation chopped evenly) or non-IID via classic label
sharding.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InvalidFraction, InvalidSize


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus integer class labels in [0, c)."""

    features: np.ndarray  # m x d, float64
    labels: np.ndarray    # m, int64
    c: int
    d: int

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=np.float64))
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int64))
        if self.features.shape[0] != self.labels.shape[0]:
            raise InvalidSize("features and labels disagree on row count")
        if self.labels.size and int(self.labels.max()) >= self.c:
            raise InvalidSize("label outside [0, c)")

    def __len__(self) -> int:
        return int(self.features.shape[0])

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.c, self.d)


@dataclass(frozen=True)
class Partition:
    """k disjoint, exhaustive, non-empty index lists into a training set."""

    shards: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.shards)


def _blob_centers(c: int, d: int, spread: float) -> np.ndarray:
    # Deterministic centers with pairwise separation >> spread so that
    # small-spread blobs stay linearly separable.
    sep = max(1.0, 8.0 * spread)
    centers = np.zeros((c, d))
    if d == 1:
        centers[:, 0] = np.arange(c) * sep
    else:
        radius = sep / (2.0 * np.sin(np.pi / c)) if c > 1 else 0.0
        angles = 2.0 * np.pi * np.arange(c) / c
        centers[:, 0] = radius * np.cos(angles)
        centers[:, 1] = radius * np.sin(angles)
    return centers


def synthetic_blobs(m: int, c: int, d: int, spread: float, seed: int) -> Dataset:
    """m points from c Gaussian clusters with balanced classes (sizes +/-1)."""
    if c < 2 or m < c or d < 1:
        raise InvalidSize(f"need m >= c >= 2 and d >= 1, got m={m} c={c} d={d}")
    if spread <= 0:
        raise InvalidSize(f"spread must be positive, got {spread}")
    rng = np.random.default_rng(seed)
    counts = [m // c + (1 if k < m % c else 0) for k in range(c)]
    centers = _blob_centers(c, d, spread)
    feats = []
    labels = []
    for k, count in enumerate(counts):
        feats.append(centers[k] + spread * rng.standard_normal((count, d)))
        labels.append(np.full(count, k, dtype=np.int64))
    features = np.vstack(feats)
    label_vec = np.concatenate(labels)
    order = rng.permutation(m)
    return Dataset(features[order], label_vec[order], c, d)


def synthetic_anomaly(m_normal: int, m_anomalous: int, d: int, seed: int) -> Dataset:
    """Tight normal cluster (label 0) plus far-offset anomalies (label 1)."""
    if m_normal < 20 or m_anomalous < 1 or d < 1:
        raise InvalidSize(
            f"need m_normal >= 20, m_anomalous >= 1, d >= 1, "
            f"got {m_normal}/{m_anomalous}/{d}"
        )
    rng = np.random.default_rng(seed)
    normal = 0.3 * rng.standard_normal((m_normal, d))
    shift = np.full(d, 4.0)
    anomalous = shift + 0.6 * rng.standard_normal((m_anomalous, d))
    features = np.vstack([normal, anomalous])
    labels = np.concatenate([
        np.zeros(m_normal, dtype=np.int64),
        np.ones(m_anomalous, dtype=np.int64),
    ])
    order = rng.permutation(m_normal + m_anomalous)
    return Dataset(features[order], labels[order], 2, d)


def split(dataset: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Shuffled disjoint train/test split; test size is floor(m * fraction)."""
    m = len(dataset)
    if not 0.0 < test_fraction < 1.0:
        raise InvalidFraction(f"test fraction must be in (0, 1), got {test_fraction}")
    test_count = int(m * test_fraction)
    if test_count == 0 or test_count == m:
        raise InvalidFraction(
            f"fraction {test_fraction} leaves an empty side for {m} rows"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(m)
    test_idx, train_idx = order[:test_count], order[test_count:]
    return dataset.take(train_idx), dataset.take(test_idx)


def partition_iid(train_size: int, k: int, seed: int) -> Partition:
    """Random permutation chopped into k shards whose sizes differ by <= 1.

    Remainder samples go to the lowest-indexed shards.
    """
    if k < 1 or train_size < k:
        raise InvalidSize(f"need train_size >= k >= 1, got {train_size}/{k}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(train_size)
    base, rem = divmod(train_size, k)
    shards = []
    pos = 0
    for i in range(k):
        size = base + (1 if i < rem else 0)
        shards.append(tuple(int(x) for x in order[pos:pos + size]))
        pos += size
    return Partition(tuple(shards))


def partition_noniid(labels, k: int, shards_per_client: int, seed: int) -> Partition:
    """Classic label sharding.

    Indices are sorted by label, cut into k * s contiguous shards, and each
    client receives s shards chosen by a seeded permutation. Skew strength
    falls out of s: small s means few distinct labels per client.
    """
    labels = np.asarray(labels)
    train_size = labels.shape[0]
    s = shards_per_client
    if k < 1 or s < 1 or k * s > train_size:
        raise InvalidSize(
            f"cannot cut {train_size} samples into {k} x {s} shards"
        )
    rng = np.random.default_rng(seed)
    by_label = np.argsort(labels, kind="stable")
    total = k * s
    base, rem = divmod(train_size, total)
    cuts = []
    pos = 0
    for i in range(total):
        size = base + (1 if i < rem else 0)
        cuts.append(by_label[pos:pos + size])
        pos += size
    assignment = rng.permutation(total)
    shards = []
    for client in range(k):
        mine = assignment[client * s:(client + 1) * s]
        merged = np.concatenate([cuts[j] for j in mine])
        shards.append(tuple(int(x) for x in np.sort(merged)))
    return Partition(tuple(shards))


def to_csv(dataset: Dataset) -> str:
    """CSV with header f0..f{d-1},label for offline oracle checks."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow([f"f{i}" for i in range(dataset.d)] + ["label"])
    for row, label in zip(dataset.features, dataset.labels):
        writer.writerow([format(v, ".17g") for v in row] + [int(label)])
    return buf.getvalue()


def from_csv(text: str, c: int | None = None) -> Dataset:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    d = len(header) - 1
    feats, labels = [], []
    for row in reader:
        if not row:
            continue
        feats.append([float(v) for v in row[:d]])
        labels.append(int(row[d]))
    label_vec = np.array(labels, dtype=np.int64)
    classes = c if c is not None else (int(label_vec.max()) + 1 if labels else 0)
    return Dataset(np.array(feats), label_vec, classes, d)
