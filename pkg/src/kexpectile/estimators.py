"""scikit-learn compatible estimators around the clustering engines."""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import clustering
from .expectile import LAWS_MAX_ITER, LAWS_TOL, TAU_FLOOR


class _CentroidClusterer(ClusterMixin, TransformerMixin, BaseEstimator):
    """Shared predict/transform/score for fitted centroid models."""

    def _store(self, result):
        self.labels_ = result.membership
        self.cluster_centers_ = result.centroids
        self.tau_ = result.tau
        self.objective_trace_ = list(result.objective_trace)
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.result_ = result
        self.n_features_in_ = result.centroids.shape[1]
        return self

    def _check_X(self, X):
        check_is_fitted(self, "cluster_centers_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but {type(self).__name__} is expecting "
                f"{self.n_features_in_} features as input."
            )
        return X

    def predict(self, X):
        """Nearest centroid under the fitted tau-distance."""
        X = self._check_X(X)
        return clustering.assign(X, self.cluster_centers_, self.tau_)

    def transform(self, X):
        """Tau-distance from every sample to every centroid, shape (n, K)."""
        X = self._check_X(X)
        return clustering.tau_distances(X, self.cluster_centers_, self.tau_)

    def score(self, X, y=None):
        """Negative loss of ``X`` under the fitted model (higher is better)."""
        X = self._check_X(X)
        labels = clustering.assign(X, self.cluster_centers_, self.tau_)
        return -clustering.objective(X, labels, self.cluster_centers_, self.tau_)


class KMeansClustering(_CentroidClusterer):
    """Lloyd K-means with k-means++ seeding.

    ``score`` and ``transform`` report half squared Euclidean distances,
    the tau = 0.5 special case of the tau-distance.
    """

    def __init__(self, n_clusters=3, max_iter=clustering.DEFAULT_MAX_ITER,
                 tol=clustering.DEFAULT_TOL, random_state=0):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        result = clustering.kmeans(X, self.n_clusters, seed=self.random_state,
                                   max_iter=self.max_iter, tol=self.tol)
        self.inertia_ = result.objective
        return self._store(result)


class KExpectileClustering(_CentroidClusterer):
    """K-expectile clustering.

    Parameters
    ----------
    n_clusters : int
    tau : "adaptive", float, TauSpec or array-like
        ``"adaptive"`` learns a K x p matrix. A float is used everywhere, a
        1-D array is read as one level per feature, a 2-D array as the full
        K x p matrix. Use :meth:`TauSpec.per_cluster` for per-cluster levels.
    max_iter, tol : int, float
        Outer loop limits; ``tol`` bounds the largest centroid coordinate move.
    laws_tol, laws_max_iter : float, int
        Limits of the inner expectile iteration.
    tau_floor : float
        Learned levels are clamped to ``[tau_floor, 1 - tau_floor]``.
    tau_update : {"median", "ratio", "consistent", "paper-literal"}
        Rule used by the adaptive tau step; see
        :func:`kexpectile.expectile.tau_for_centers`.
    random_state : int
        Seed of the K-means initialization.

    Attributes
    ----------
    labels_, cluster_centers_, tau_, objective_trace_, n_iter_, converged_
    """

    def __init__(self, n_clusters=3, tau="adaptive", max_iter=clustering.DEFAULT_MAX_ITER,
                 tol=clustering.DEFAULT_TOL, laws_tol=LAWS_TOL, laws_max_iter=LAWS_MAX_ITER,
                 tau_floor=TAU_FLOOR, tau_update="median", random_state=0):
        self.n_clusters = n_clusters
        self.tau = tau
        self.max_iter = max_iter
        self.tol = tol
        self.laws_tol = laws_tol
        self.laws_max_iter = laws_max_iter
        self.tau_floor = tau_floor
        self.tau_update = tau_update
        self.random_state = random_state

    def _tau_spec(self):
        tau = self.tau
        if isinstance(tau, clustering.TauSpec):
            return tau
        arr = np.asarray(tau, dtype=float)
        if arr.ndim == 0:
            return clustering.TauSpec.scalar(float(arr))
        if arr.ndim == 1:
            return clustering.TauSpec.per_dimension(arr)
        return clustering.TauSpec.full(arr)

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        options = dict(seed=self.random_state, max_iter=self.max_iter, tol=self.tol,
                       laws_tol=self.laws_tol, laws_max_iter=self.laws_max_iter)
        if isinstance(self.tau, str):
            if self.tau != "adaptive":
                raise ValueError(f"tau must be 'adaptive' or numeric, got {self.tau!r}")
            result = clustering.adaptive_tau_cluster(X, self.n_clusters, tau_floor=self.tau_floor,
                                                     tau_update=self.tau_update, **options)
        else:
            result = clustering.fixed_tau_cluster(X, self.n_clusters, self._tau_spec(), **options)
        return self._store(result)
