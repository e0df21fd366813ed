"""K-expectile clustering: expectile-centered partitional clustering with fixed or learned asymmetry."""

from .clustering import (
    ClusterResult,
    TauSpec,
    adaptive_tau_cluster,
    assign,
    fixed_tau_cluster,
    init_centroids,
    kmeans,
    objective,
    repair_empty_clusters,
    resolve_tau,
    update_centroids,
    update_tau,
)
from .estimators import KExpectileClustering, KMeansClustering
from .expectile import (
    ExpectileEstimate,
    foc_residual,
    laws_expectile,
    rho_tau,
    solve_tau_for_center,
    tau_distance,
)
from .metrics import adjusted_rand_index, ari_matrix, davies_bouldin, mse_image, psnr, silhouette

__version__ = "0.1.0"

__all__ = [
    "ClusterResult",
    "ExpectileEstimate",
    "KExpectileClustering",
    "KMeansClustering",
    "TauSpec",
    "adaptive_tau_cluster",
    "adjusted_rand_index",
    "ari_matrix",
    "assign",
    "davies_bouldin",
    "fixed_tau_cluster",
    "foc_residual",
    "init_centroids",
    "kmeans",
    "laws_expectile",
    "mse_image",
    "objective",
    "psnr",
    "repair_empty_clusters",
    "resolve_tau",
    "rho_tau",
    "silhouette",
    "solve_tau_for_center",
    "tau_distance",
    "update_centroids",
    "update_tau",
]
