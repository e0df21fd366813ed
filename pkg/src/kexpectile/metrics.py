"""Clustering validity indices and image fidelity measures."""

from collections import Counter
from dataclasses import dataclass
import math

import numpy as np
from scipy.spatial.distance import cdist

from ._validation import check_data, check_membership
from .exceptions import DegeneratePartitionError, ShapeError


@dataclass(frozen=True)
class ContingencyTable:
    """Cross-tabulation of two partitions.

    ``counts[u, v]`` is the number of items with predicted label ``u`` and
    true label ``v``; rows and columns follow the sorted distinct labels
    ``row_labels`` and ``col_labels``.
    """

    counts: np.ndarray
    row_labels: np.ndarray
    col_labels: np.ndarray

    @property
    def row_sums(self):
        return self.counts.sum(axis=1)

    @property
    def col_sums(self):
        return self.counts.sum(axis=0)

    @property
    def total(self):
        return int(self.counts.sum())


def _labels(x, name):
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be a 1-D label sequence")
    return arr


def contingency(pred, truth):
    pred = _labels(pred, "pred")
    truth = _labels(truth, "truth")
    if pred.shape != truth.shape:
        raise ShapeError(f"partitions differ in length: {pred.shape[0]} vs {truth.shape[0]}")
    if pred.size == 0:
        raise ValueError("partitions must be non-empty")
    rows, r_idx = np.unique(pred, return_inverse=True)
    cols, c_idx = np.unique(truth, return_inverse=True)
    counts = np.zeros((rows.size, cols.size), dtype=np.int64)
    np.add.at(counts, (r_idx, c_idx), 1)
    return ContingencyTable(counts, rows, cols)


def _pairs(x):
    x = np.asarray(x, dtype=np.int64)
    return int(np.sum(x * (x - 1) // 2))


# below this length plain dict counting beats building a numpy contingency table
_SMALL = 256


def _pair_sums(pred, truth):
    """Same-cluster pair counts: (both, pred only marginal, truth only marginal)."""
    if pred.size <= _SMALL:
        p, t = pred.tolist(), truth.tolist()
        count = lambda c: sum(v * (v - 1) // 2 for v in c.values())
        return count(Counter(zip(p, t))), count(Counter(p)), count(Counter(t))
    table = contingency(pred, truth)
    return _pairs(table.counts), _pairs(table.row_sums), _pairs(table.col_sums)


def adjusted_rand_index(pred, truth):
    """Adjusted Rand Index between two partitions.

    Label values are arbitrary; only the grouping matters. When the
    chance-corrected denominator vanishes (both partitions trivial and
    identical) the partitions agree completely and 1.0 is returned.
    """
    pred = _labels(pred, "pred")
    truth = _labels(truth, "truth")
    if pred.shape != truth.shape:
        raise ShapeError(f"partitions differ in length: {pred.shape[0]} vs {truth.shape[0]}")
    n = pred.size
    if n < 2:
        raise ValueError("ARI needs at least two items")
    index, sum_a, sum_b = _pair_sums(pred, truth)
    return float(_ari_from_sums(index, sum_a, sum_b, n))


def _ari_from_sums(index, sum_a, sum_b, n):
    # scaled by 2 * total_pairs the ratio is integral, so the only rounding is
    # the final division (exact for Python ints, and for int64 below 2**53)
    total_pairs = n * (n - 1) // 2
    num = 2 * index * total_pairs - 2 * sum_a * sum_b
    den = (sum_a + sum_b) * total_pairs - 2 * sum_a * sum_b
    if np.ndim(num) == 0:
        return 1.0 if den == 0 else num / den
    out = np.ones(np.shape(num))
    nz = den != 0
    out[nz] = num[nz] / den[nz]
    return out


def _factorize_rows(labelings):
    codes = np.empty(labelings.shape, dtype=np.int64)
    sizes = []
    for r, row in enumerate(labelings):
        _, codes[r], counts = np.unique(row, return_inverse=True, return_counts=True)
        sizes.append(counts)
    return codes, sizes


def ari_matrix(labelings, others=None, block=256):
    """Adjusted Rand Index between every pair of rows.

    Parameters
    ----------
    labelings : array-like of shape (m, n)
        One partition of the same ``n`` items per row.
    others : array-like of shape (r, n), optional
        Second set of partitions; defaults to ``labelings``.
    block : int
        Rows of ``labelings`` handled per matrix product (memory bound).

    Returns
    -------
    ndarray of shape (m, r)
        ``out[i, j] == adjusted_rand_index(labelings[i], others[j])``, bit for bit.
    """
    a = np.asarray(labelings)
    b = a if others is None else np.asarray(others)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError("labelings must be 2-D (one partition per row)")
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"partitions differ in length: {a.shape[1]} vs {b.shape[1]}")
    n = a.shape[1]
    if n < 2:
        raise ValueError("ARI needs at least two items")
    codes_a, sizes_a = _factorize_rows(a)
    codes_b, sizes_b = (codes_a, sizes_a) if others is None else _factorize_rows(b)
    pairs = lambda sizes: np.array([_pairs(s) for s in sizes], dtype=np.int64)
    sum_a, sum_b = pairs(sizes_a), pairs(sizes_b)
    ka = max(len(s) for s in sizes_a)
    kb = max(len(s) for s in sizes_b)
    onehot_b = np.zeros((n, b.shape[0] * kb))
    onehot_b[np.arange(n)[:, None], np.arange(b.shape[0]) * kb + codes_b.T] = 1.0
    index = np.empty((a.shape[0], b.shape[0]), dtype=np.int64)
    for start in range(0, a.shape[0], block):
        stop = min(start + block, a.shape[0])
        onehot_a = np.zeros((n, (stop - start) * ka))
        onehot_a[np.arange(n)[:, None], np.arange(stop - start) * ka + codes_a[start:stop].T] = 1.0
        # float products of 0/1 entries are exact integers well past any realistic n
        counts = np.rint(onehot_a.T @ onehot_b).astype(np.int64)
        counts = counts.reshape(stop - start, ka, b.shape[0], kb)
        index[start:stop] = (counts * (counts - 1) // 2).sum(axis=(1, 3))
    total_pairs = n * (n - 1) // 2
    if 4 * total_pairs * total_pairs >= 2**53:
        index, sum_a, sum_b = index.astype(object), sum_a.astype(object), sum_b.astype(object)
    return _ari_from_sums(index, sum_a[:, None], sum_b[None, :], n).astype(float)


def _clusters(data, membership):
    data = check_data(data)
    labels = check_membership(membership, data.shape[0])
    ids, labels = np.unique(labels, return_inverse=True)
    if ids.size < 2:
        raise ValueError("index needs at least two clusters")
    return data, labels, ids.size


def silhouette(data, membership, chunk_size=2048):
    """Mean silhouette width with Euclidean distances.

    Points in singleton clusters score 0, as do points whose intra- and
    nearest-cluster mean distances are both zero.
    """
    data, labels, k = _clusters(data, membership)
    n = data.shape[0]
    sizes = np.bincount(labels, minlength=k).astype(float)
    scores = np.empty(n)
    for start in range(0, n, chunk_size):
        stop = min(start + chunk_size, n)
        dist = cdist(data[start:stop], data)
        sums = np.zeros((stop - start, k))
        for c in range(k):
            sums[:, c] = dist[:, labels == c].sum(axis=1)
        own = labels[start:stop]
        rows = np.arange(stop - start)
        own_size = sizes[own]
        with np.errstate(invalid="ignore", divide="ignore"):
            a = sums[rows, own] / (own_size - 1)
            means = sums / sizes
        means[rows, own] = np.inf
        b = means.min(axis=1)
        denom = np.maximum(a, b)
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.where(denom > 0, (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
        s[own_size == 1] = 0.0
        scores[start:stop] = s
    return float(scores.mean())


def davies_bouldin(data, membership):
    """Davies-Bouldin index (lower is better).

    Raises
    ------
    DegeneratePartitionError
        If two clusters share the same mean.
    """
    data, labels, k = _clusters(data, membership)
    means = np.stack([data[labels == c].mean(axis=0) for c in range(k)])
    spread = np.array([
        np.mean(np.linalg.norm(data[labels == c] - means[c], axis=1)) for c in range(k)
    ])
    sep = cdist(means, means)
    off = ~np.eye(k, dtype=bool)
    if np.any(sep[off] == 0):
        raise DegeneratePartitionError("two clusters have coincident means")
    ratio = (spread[:, None] + spread[None, :]) / np.where(off, sep, 1.0)
    ratio[~off] = -np.inf
    return float(np.mean(ratio.max(axis=1)))


def _as_pixels(image):
    return np.asarray(getattr(image, "pixels", image), dtype=float)


def mse_image(original, approx):
    """Mean squared pixel error, per channel then averaged over channels."""
    a = _as_pixels(original)
    b = _as_pixels(approx)
    if a.shape != b.shape:
        raise ShapeError(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.ndim == 2:
        return float(np.mean((a - b) ** 2))
    per_channel = np.mean((a - b) ** 2, axis=(0, 1))
    return float(per_channel.mean())


def psnr(mse, max_value=255.0):
    """Peak signal-to-noise ratio in dB; ``math.inf`` for a perfect match."""
    if mse < 0 or max_value <= 0:
        raise ValueError("mse must be non-negative and max_value positive")
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(max_value**2 / mse)
