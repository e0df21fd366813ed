"""Partitioning engines: K-means baseline, fixed-tau and adaptive-tau K-expectile clustering.

All engines are deterministic functions of the data, the parameters and an
integer seed. Cluster ids run from 0 to K-1.
"""

from dataclasses import dataclass, field
import logging
import re

import numpy as np

from ._validation import check_data, check_membership, check_n_clusters, check_seed, check_tau
from .exceptions import ShapeError
from .expectile import LAWS_MAX_ITER, LAWS_TOL, TAU_FLOOR, TAU_RULES, laws_columns, tau_for_centers

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 300


# --------------------------------------------------------------------------
# tau shapes


@dataclass(frozen=True)
class TauSpec:
    """Shape of a user-supplied asymmetry level.

    ``kind`` is one of ``"scalar"``, ``"dimension"`` (one level per column,
    shared by all clusters), ``"cluster"`` (one level per cluster, shared by
    all columns) or ``"full"`` (a K x p matrix).
    """

    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in ("scalar", "dimension", "cluster", "full"):
            raise ValueError(f"unknown tau kind {self.kind!r}")
        values = np.array(self.values, dtype=float)
        expected_ndim = {"scalar": 0, "dimension": 1, "cluster": 1, "full": 2}[self.kind]
        if values.ndim != expected_ndim:
            raise ShapeError(f"{self.kind} tau needs a {expected_ndim}-D value, got ndim={values.ndim}")
        if values.size == 0:
            raise ShapeError("tau spec is empty")
        check_tau(values)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def scalar(cls, tau):
        return cls("scalar", tau)

    @classmethod
    def per_dimension(cls, taus):
        return cls("dimension", taus)

    @classmethod
    def per_cluster(cls, taus):
        return cls("cluster", taus)

    @classmethod
    def full(cls, matrix):
        return cls("full", matrix)

    @classmethod
    def parse(cls, text, loader=None):
        """Parse the command-line grammar.

        ``s:0.3`` scalar, ``d:0.1,0.8,0.9`` per dimension, ``c:0.2,0.7`` per
        cluster, ``m:@path.csv`` a K x p matrix read with ``loader``
        (defaults to :func:`kexpectile.io.read_csv_matrix`).
        """
        match = re.fullmatch(r"\s*([sdcm])\s*:\s*(.+?)\s*", text)
        if not match:
            raise ValueError(f"cannot parse tau spec {text!r}; expected s:, d:, c: or m:@file")
        tag, body = match.groups()
        if tag == "m":
            if not body.startswith("@"):
                raise ValueError("matrix tau spec must be written m:@path")
            if loader is None:
                from .io import read_csv_matrix as loader
            return cls.full(loader(body[1:]))
        try:
            numbers = [float(tok) for tok in body.split(",")]
        except ValueError:
            raise ValueError(f"non-numeric entry in tau spec {text!r}") from None
        if tag == "s":
            if len(numbers) != 1:
                raise ValueError("scalar tau spec takes exactly one value")
            return cls.scalar(numbers[0])
        return cls.per_dimension(numbers) if tag == "d" else cls.per_cluster(numbers)


def resolve_tau(spec, k, p):
    """Broadcast a :class:`TauSpec` (or a plain float) to a K x p matrix."""
    if not isinstance(spec, TauSpec):
        spec = TauSpec.scalar(spec)
    v = spec.values
    if spec.kind == "scalar":
        return np.full((k, p), float(v))
    if spec.kind == "dimension":
        if v.shape[0] != p:
            raise ShapeError(f"per-dimension tau has length {v.shape[0]}, data has {p} columns")
        return np.tile(v, (k, 1))
    if spec.kind == "cluster":
        if v.shape[0] != k:
            raise ShapeError(f"per-cluster tau has length {v.shape[0]}, expected {k} clusters")
        return np.repeat(v[:, None], p, axis=1)
    if v.shape != (k, p):
        raise ShapeError(f"tau matrix has shape {v.shape}, expected {(k, p)}")
    return v.copy()


# --------------------------------------------------------------------------
# results


@dataclass
class ClusterResult:
    """Output of a clustering engine.

    ``step_log`` is only filled when the engine runs with
    ``record_steps=True``; each entry is ``(iteration, stage, before, after)``
    where ``stage`` is ``"assign"`` or ``"centroids"`` and the two numbers
    are the objective immediately before and after that step.
    """

    membership: np.ndarray
    centroids: np.ndarray
    tau: np.ndarray
    objective_trace: list
    iterations: int
    converged: bool
    seed: int
    step_log: list = field(default_factory=list)

    @property
    def objective(self):
        return self.objective_trace[-1] if self.objective_trace else float("nan")


# --------------------------------------------------------------------------
# building blocks


def _distances(data, centroids, tau):
    diff = data[:, None, :] - centroids[None, :, :]
    weight = np.where(diff < 0, 1.0 - tau[None, :, :], tau[None, :, :])
    return np.einsum("ikj,ikj->ik", weight, diff * diff)


def _check_state(data, centroids, tau):
    centroids = np.asarray(centroids, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if centroids.ndim != 2 or centroids.shape[1] != data.shape[1]:
        raise ShapeError(f"centroids must be K x {data.shape[1]}, got {centroids.shape}")
    if tau.shape != centroids.shape:
        raise ShapeError(f"tau must have shape {centroids.shape}, got {tau.shape}")
    if not np.all(np.isfinite(centroids)):
        raise ValueError("centroids contain NaN or infinite values")
    return centroids, tau


def tau_distances(data, centroids, tau):
    """n x K matrix of tau-distances from every point to every centroid."""
    data = check_data(data)
    centroids, tau = _check_state(data, centroids, tau)
    return _distances(data, centroids, tau)


def assign(data, centroids, tau):
    """Membership minimizing the tau-distance; ties go to the lowest cluster id."""
    data = check_data(data)
    centroids, tau = _check_state(data, centroids, tau)
    return np.argmin(_distances(data, centroids, tau), axis=1)


def _objective(data, labels, centroids, tau):
    diff = data - centroids[labels]
    t = tau[labels]
    weight = np.where(diff < 0, 1.0 - t, t)
    return float(np.sum(weight * diff * diff))


def objective(data, membership, centroids, tau):
    """Sum of within-cluster tau-variances (the K-expectile loss)."""
    data = check_data(data)
    centroids, tau = _check_state(data, centroids, tau)
    labels = check_membership(membership, data.shape[0], centroids.shape[0])
    return _objective(data, labels, centroids, tau)


def within_ss(data, membership, centroids):
    """K-means loss: total squared Euclidean distance to the assigned centroid."""
    data = check_data(data)
    centroids = np.asarray(centroids, dtype=float)
    labels = check_membership(membership, data.shape[0], centroids.shape[0])
    diff = data - centroids[labels]
    return float(np.sum(diff * diff))


def update_centroids(data, membership, tau, laws_tol=LAWS_TOL, laws_max_iter=LAWS_MAX_ITER):
    """Per-cluster, per-column expectiles at the given tau matrix.

    Raises ``ValueError`` if any cluster is empty.
    """
    data = check_data(data)
    tau = np.asarray(tau, dtype=float)
    if tau.ndim != 2 or tau.shape[1] != data.shape[1]:
        raise ShapeError(f"tau must be K x {data.shape[1]}, got {tau.shape}")
    labels = check_membership(membership, data.shape[0], tau.shape[0])
    return _update_centroids(data, labels, tau, laws_tol, laws_max_iter)


def _update_centroids(data, labels, tau, laws_tol, laws_max_iter):
    k = tau.shape[0]
    centroids = np.empty_like(tau)
    for c in range(k):
        members = data[labels == c]
        if members.shape[0] == 0:
            raise ValueError(f"cluster {c} is empty; repair memberships before updating centroids")
        mu, _, converged = laws_columns(members, tau[c], laws_tol, laws_max_iter)
        if not converged:
            logger.warning("expectile iteration for cluster %d hit the iteration limit", c)
        centroids[c] = mu
    return centroids


def update_tau(data, membership, centroids, floor=TAU_FLOOR, rule="median"):
    """Per-cluster, per-column tau from the cluster members and their centroid.

    ``rule`` selects the update (see :func:`kexpectile.expectile.tau_for_centers`);
    values are clamped to ``[floor, 1 - floor]``.
    """
    data = check_data(data)
    centroids = np.asarray(centroids, dtype=float)
    if centroids.ndim != 2 or centroids.shape[1] != data.shape[1]:
        raise ShapeError(f"centroids must be K x {data.shape[1]}, got {centroids.shape}")
    labels = check_membership(membership, data.shape[0], centroids.shape[0])
    return _update_tau(data, labels, centroids, floor, rule)


def _update_tau(data, labels, centroids, floor, rule):
    tau = np.empty_like(centroids)
    for c in range(centroids.shape[0]):
        members = data[labels == c]
        if members.shape[0] == 0:
            raise ValueError(f"cluster {c} is empty; repair memberships before updating tau")
        tau[c] = tau_for_centers(members, centroids[c], floor=floor, rule=rule)
    return tau


def repair_empty_clusters(data, membership, centroids, tau=None):
    """Refill empty clusters by farthest-point re-seeding.

    For each empty cluster, in increasing id order, the point with the
    largest tau-distance to its own centroid (among clusters holding more
    than one point; lowest index on ties) is moved into the empty cluster
    and becomes its centroid. ``tau`` defaults to 0.5 everywhere.

    Returns new ``(membership, centroids)``; the inputs are not modified.
    """
    data = check_data(data)
    centroids = np.array(centroids, dtype=float)
    if tau is None:
        tau = np.full(centroids.shape, 0.5)
    centroids, tau = _check_state(data, centroids, tau)
    centroids = centroids.copy()
    labels = check_membership(membership, data.shape[0], centroids.shape[0]).copy()
    k = centroids.shape[0]
    if k > data.shape[0]:
        raise ValueError("cannot fill more clusters than there are points")
    counts = np.bincount(labels, minlength=k)
    for c in np.flatnonzero(counts == 0):
        diff = data - centroids[labels]
        t = tau[labels]
        dist = np.sum(np.where(diff < 0, 1.0 - t, t) * diff * diff, axis=1)
        dist[counts[labels] <= 1] = -np.inf
        i = int(np.argmax(dist))
        counts[labels[i]] -= 1
        labels[i] = c
        counts[c] = 1
        centroids[c] = data[i]
    return labels, centroids


# --------------------------------------------------------------------------
# K-means


def kmeans_plusplus(data, k, rng):
    """D^2-weighted seeding: returns the row indices of the initial centers."""
    n = data.shape[0]
    chosen = [int(rng.integers(n))]
    closest = np.sum((data - data[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            idx = int(rng.integers(n))
        chosen.append(idx)
        closest = np.minimum(closest, np.sum((data - data[idx]) ** 2, axis=1))
    return np.array(chosen)


def kmeans(data, k, seed=0, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL, init=None):
    """Lloyd's algorithm from k-means++ seeding.

    Stops when no centroid coordinate moves by more than ``tol``. The
    objective trace holds the within-cluster sum of squares after each
    iteration; ``result.tau`` is 0.5 everywhere.
    """
    data = check_data(data)
    k = check_n_clusters(k, data.shape[0])
    seed = check_seed(seed)
    half = np.full((k, data.shape[1]), 0.5)
    if init is None:
        rng = np.random.default_rng(seed)
        centroids = data[kmeans_plusplus(data, k, rng)].copy()
    else:
        centroids, _ = _check_state(data, init, half)
        centroids = centroids.copy()
        if centroids.shape[0] != k:
            raise ShapeError(f"init has {centroids.shape[0]} centroids, expected {k}")
    trace = []
    converged = False
    iterations = 0
    labels = None
    while iterations < max_iter:
        labels = np.argmin(_distances(data, centroids, half), axis=1)
        labels, centroids = repair_empty_clusters(data, labels, centroids, half)
        new = np.empty_like(centroids)
        for c in range(k):
            new[c] = data[labels == c].mean(axis=0)
        iterations += 1
        shift = float(np.max(np.abs(new - centroids)))
        centroids = new
        trace.append(within_ss(data, labels, centroids))
        if shift <= tol:
            converged = True
            break
    if not converged:
        logger.warning("k-means did not converge within %d iterations", max_iter)
    return ClusterResult(labels, centroids, half, trace, iterations, converged, seed)


def init_centroids(data, k, seed=0):
    """Starting centroids for K-expectile clustering: the K-means solution."""
    return kmeans(data, k, seed=seed).centroids


# --------------------------------------------------------------------------
# K-expectile


def _expectile_loop(data, k, tau, adaptive, seed, max_iter, tol, laws_tol, laws_max_iter,
                    init, tau_floor, tau_rule, record_steps):
    if init is None:
        centroids = init_centroids(data, k, seed)
    else:
        centroids, _ = _check_state(data, init, np.empty((k, data.shape[1])))
        centroids = centroids.copy()
    if centroids.shape[0] != k:
        raise ShapeError(f"init has {centroids.shape[0]} centroids, expected {k}")
    trace, steps = [], []
    labels = None
    converged = False
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        new_labels = np.argmin(_distances(data, centroids, tau), axis=1)
        if record_steps and labels is not None:
            steps.append((iterations, "assign",
                          _objective(data, labels, centroids, tau),
                          _objective(data, new_labels, centroids, tau)))
        labels, centroids = repair_empty_clusters(data, new_labels, centroids, tau)
        new_centroids = _update_centroids(data, labels, tau, laws_tol, laws_max_iter)
        if record_steps:
            steps.append((iterations, "centroids",
                          _objective(data, labels, centroids, tau),
                          _objective(data, labels, new_centroids, tau)))
        shift = float(np.max(np.abs(new_centroids - centroids)))
        if adaptive:
            new_tau = _update_tau(data, labels, new_centroids, tau_floor, tau_rule)
            shift = max(shift, float(np.max(np.abs(new_tau - tau))))
            tau = new_tau
        centroids = new_centroids
        trace.append(_objective(data, labels, centroids, tau))
        if shift <= tol:
            converged = True
            break
    if not converged:
        logger.warning("K-expectile clustering did not converge within %d iterations", max_iter)
    return ClusterResult(labels, centroids, tau, trace, iterations, converged, seed, steps)


def fixed_tau_cluster(data, k, spec, seed=0, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL,
                      laws_tol=LAWS_TOL, laws_max_iter=LAWS_MAX_ITER, init=None,
                      record_steps=False):
    """K-expectile clustering with a constant, user-supplied tau.

    Starts from the K-means centroids (or ``init``) and alternates
    tau-distance assignment with per-cluster expectile updates until no
    centroid coordinate moves by more than ``tol``.

    Parameters
    ----------
    data : array-like of shape (n, p)
    k : int
    spec : TauSpec or float
        Broadcast to K x p by :func:`resolve_tau`.
    seed : int
        Seed of the K-means initialization.
    init : array-like of shape (k, p), optional
        Explicit starting centroids; skips the K-means initialization.
    record_steps : bool
        Fill ``ClusterResult.step_log`` with per-step objective values.
    """
    data = check_data(data)
    k = check_n_clusters(k, data.shape[0])
    seed = check_seed(seed)
    tau = resolve_tau(spec, k, data.shape[1])
    return _expectile_loop(data, k, tau, False, seed, max_iter, tol, laws_tol, laws_max_iter,
                           init, TAU_FLOOR, None, record_steps)


def adaptive_tau_cluster(data, k, seed=0, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL,
                         laws_tol=LAWS_TOL, laws_max_iter=LAWS_MAX_ITER, init=None,
                         tau_floor=TAU_FLOOR, tau_update="median", record_steps=False):
    """K-expectile clustering that learns a K x p tau matrix.

    Starts at the K-means centroids with tau = 0.5 everywhere. Each
    iteration assigns points with the current (centroids, tau), updates the
    centroids as expectiles at the current tau, then recomputes tau from the
    new membership and centroids with the ``tau_update`` rule (see
    :func:`kexpectile.expectile.tau_for_centers`). With the default
    ``"median"`` rule a stable membership makes each centroid the exact
    expectile of its cluster column at the returned tau.

    The loop stops once neither a centroid coordinate nor a tau entry moves
    by more than ``tol``, or after ``max_iter`` iterations. The tau step
    does not necessarily lower the objective, so the trace is not monotone.
    """
    data = check_data(data)
    k = check_n_clusters(k, data.shape[0])
    seed = check_seed(seed)
    if not 0 <= tau_floor < 0.5:
        raise ValueError("tau_floor must lie in [0, 0.5)")
    if tau_update not in TAU_RULES:
        raise ValueError(f"unknown tau update rule {tau_update!r}; choose from {', '.join(TAU_RULES)}")
    tau = np.full((k, data.shape[1]), 0.5)
    return _expectile_loop(data, k, tau, True, seed, max_iter, tol, laws_tol, laws_max_iter,
                           init, tau_floor, tau_update, record_steps)
