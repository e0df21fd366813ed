"""Repeated simulate-cluster-score runs against ground truth."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .clustering import adaptive_tau_cluster, kmeans
from .metrics import adjusted_rand_index
from .simgen import SampleSpec, generate

ALGORITHMS = ("kexpectile", "kmeans")
REPORT_COLUMNS = ("family", "n", "p", "k", "algorithm", "mean_ari_x100", "std_ari_x100", "reps", "seed")


@dataclass(frozen=True)
class BenchmarkRow:
    family: str
    n: int
    p: int
    k: int
    algorithm: str
    mean_ari_x100: float
    std_ari_x100: float
    reps: int
    seed: int


def run_algorithm(name, data, k, seed):
    """Cluster labels from one of :data:`ALGORITHMS`; ``kexpectile`` is the adaptive-tau variant."""
    if name == "kexpectile":
        return adaptive_tau_cluster(data, k, seed=seed).membership
    if name == "kmeans":
        return kmeans(data, k, seed=seed).membership
    raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


def _one_rep(args):
    family, n, p, k, seed, algorithms = args
    ds = generate(SampleSpec(family, n, p, k, seed))
    return [adjusted_rand_index(run_algorithm(a, ds.data, k, seed), ds.labels) for a in algorithms]


def repetition_scores(family, n, p, k, reps, algorithms=ALGORITHMS, seed=0, jobs=1):
    """ARI array of shape (reps, len(algorithms)); repetition ``r`` uses seed ``seed + r``."""
    algorithms = tuple(algorithms)
    for name in algorithms:
        if name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    SampleSpec(family, n, p, k, seed)  # validate before spawning work
    tasks = [(family, n, p, k, seed + r, algorithms) for r in range(reps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(_one_rep, tasks))
    else:
        scores = [_one_rep(t) for t in tasks]
    return np.array(scores, dtype=float).reshape(reps, len(algorithms))


def run_benchmark(family, n, p, k, reps, algorithms=ALGORITHMS, seed=0, jobs=1):
    scores = 100.0 * repetition_scores(family, n, p, k, reps, algorithms, seed, jobs)
    return [
        BenchmarkRow(family, n, p, k, name, float(scores[:, i].mean()), float(scores[:, i].std()),
                     reps, seed)
        for i, name in enumerate(algorithms)
    ]


def format_report(rows):
    lines = ["# repetition r uses seed = seed + r (r = 0 .. reps-1)", ",".join(REPORT_COLUMNS)]
    for row in rows:
        lines.append(
            f"{row.family},{row.n},{row.p},{row.k},{row.algorithm},"
            f"{row.mean_ari_x100:.4f},{row.std_ari_x100:.4f},{row.reps},{row.seed}"
        )
    return "\n".join(lines) + "\n"
