"""Seeded generators for the synthetic benchmark families.

Every generator is a pure function of its :class:`SampleSpec`. Rows are
grouped by cluster (cluster 0 first) and cluster sizes differ by at most
one. Integer parameters are drawn from inclusive ranges.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._validation import check_seed, check_tau
from .exceptions import ShapeError

FAMILIES = ("gaussian", "asymnormal", "beta", "skewt", "f")
_FIXED_K = {"beta": 3, "skewt": 3, "f": 3}

SKEWT_DF = (10.0, 10.0, 10.0)
SKEWT_NC = (3.0, -1.5, 2.5)
SKEWT_LOC = ((0.0, 2.0), (1.0, 0.0), (0.5, 1.0))
SKEWT_SCALE = 0.5


@dataclass(frozen=True)
class SampleSpec:
    family: str
    n: int
    p: int
    k: int
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        for name in ("n", "p", "k"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.k > self.n:
            raise ValueError(f"k ({self.k}) exceeds n ({self.n})")
        fixed = _FIXED_K.get(self.family)
        if fixed is not None and self.k != fixed:
            raise ValueError(f"family {self.family!r} requires k={fixed}, got {self.k}")
        if self.family == "skewt" and self.p % 2:
            raise ValueError(f"family 'skewt' needs an even dimension, got p={self.p}")
        check_seed(self.seed)


@dataclass(frozen=True)
class LabeledDataset:
    data: np.ndarray
    labels: np.ndarray
    spec: SampleSpec


def cluster_sizes(n, k):
    """Equal split of ``n`` into ``k`` parts; the first ``n % k`` get one extra."""
    base, extra = divmod(n, k)
    return [base + (1 if c < extra else 0) for c in range(k)]


def _labels(sizes):
    return np.repeat(np.arange(len(sizes)), sizes)


def _expect(spec, family):
    if spec.family != family:
        raise ValueError(f"spec family is {spec.family!r}, expected {family!r}")


def gen_gaussian(spec):
    """Unit-variance Gaussian clusters with means ``mu_1 + 2(k-1)``."""
    _expect(spec, "gaussian")
    rng = np.random.default_rng(spec.seed)
    sizes = cluster_sizes(spec.n, spec.k)
    mu1 = rng.integers(1, 10, size=spec.p, endpoint=True).astype(float)
    blocks = [rng.standard_normal((size, spec.p)) + mu1 + 2.0 * c for c, size in enumerate(sizes)]
    return LabeledDataset(np.vstack(blocks), _labels(sizes), spec)


def asym_normal_transform(z, tau, e_tau):
    """Map standard-normal-shaped draws onto an asymmetric normal with tau-expectile ``e_tau``."""
    check_tau(tau)
    z = np.asarray(z, dtype=float)
    st, s1 = np.sqrt(tau), np.sqrt(1.0 - tau)
    lower = 2.0 * st / ((s1 + st) * s1)
    upper = 2.0 * s1 / ((s1 + st) * st)
    out = np.where(z < 0, lower, upper) * z + e_tau
    return float(out) if out.ndim == 0 else out


def gen_asym_normal(spec, tau=None):
    """Asymmetric normal clusters.

    Per cluster and column: tau ~ U[0.1, 0.9], Z ~ N(0, 25); cluster 0's
    locations are U(0, 10) and cluster ``c`` is shifted by ``7 (-1)^j c``
    in (1-based) column ``j``. ``tau`` overrides the random levels
    (scalar or K x p) and is meant for testing.
    """
    _expect(spec, "asymnormal")
    rng = np.random.default_rng(spec.seed)
    sizes = cluster_sizes(spec.n, spec.k)
    taus = rng.uniform(0.1, 0.9, size=(spec.k, spec.p))
    if tau is not None:
        taus = np.broadcast_to(np.asarray(tau, dtype=float), taus.shape)
    e1 = rng.uniform(0.0, 10.0, size=spec.p)
    signs = (-1.0) ** np.arange(1, spec.p + 1)
    blocks = []
    for c, size in enumerate(sizes):
        z = rng.normal(0.0, 5.0, size=(size, spec.p))
        blocks.append(asym_normal_transform(z, taus[c], e1 + 7.0 * signs * c))
    return LabeledDataset(np.vstack(blocks), _labels(sizes), spec)


def gen_beta(spec):
    """Beta clusters: odd clusters Beta(a_j, b_j), even clusters Beta(b_j, a_j).

    Clusters are counted from 1, so with k=3 the first and third share
    the same parameters.
    """
    _expect(spec, "beta")
    rng = np.random.default_rng(spec.seed)
    sizes = cluster_sizes(spec.n, spec.k)
    a = rng.integers(1, 10, size=spec.p, endpoint=True).astype(float)
    b = rng.integers(10, 20, size=spec.p, endpoint=True).astype(float)
    blocks = []
    for c, size in enumerate(sizes):
        first, second = (a, b) if c % 2 == 0 else (b, a)
        blocks.append(rng.beta(first, second, size=(size, spec.p)))
    return LabeledDataset(np.vstack(blocks), _labels(sizes), spec)


def noncentral_t(rng, df, nc, size):
    """Noncentral t draws as ``(Z + nc) / sqrt(chi2_df / df)``."""
    z = rng.standard_normal(size)
    chi2 = rng.chisquare(df, size)
    return (z + nc) / np.sqrt(chi2 / df)


def noncentral_t_mean(df, nc):
    return nc * math.sqrt(df / 2.0) * math.exp(math.lgamma((df - 1) / 2.0) - math.lgamma(df / 2.0))


def gen_skewed_t(spec, df=SKEWT_DF, nc=SKEWT_NC):
    """Skewed t clusters built from repeated two-column blocks.

    Each block of cluster ``c`` is ``0.5 * T + loc`` with ``T`` noncentral t
    (``df[c]``, ``nc[c]``) and ``loc`` the base location of ``c`` jittered
    by U(-0.5, 0.5) per coordinate; every block uses fresh draws.
    """
    _expect(spec, "skewt")
    rng = np.random.default_rng(spec.seed)
    sizes = cluster_sizes(spec.n, spec.k)
    blocks = []
    for c, size in enumerate(sizes):
        cols = []
        for _ in range(spec.p // 2):
            loc = np.asarray(SKEWT_LOC[c]) + rng.uniform(-0.5, 0.5, size=2)
            cols.append(SKEWT_SCALE * noncentral_t(rng, df[c], nc[c], (size, 2)) + loc)
        blocks.append(np.hstack(cols))
    return LabeledDataset(np.vstack(blocks), _labels(sizes), spec)


def f_variates(rng, d1, d2, size):
    """F(d1, d2) draws as ``(chi2_d1 / d1) / (chi2_d2 / d2)``; d1, d2 broadcast over columns."""
    return (rng.chisquare(d1, size) / d1) / (rng.chisquare(d2, size) / d2)


# (low_a, high_a, low_b, high_b) and the (odd-column, even-column) degrees of freedom
_F_CLUSTERS = (
    ((51, 60, 21, 30), lambda a, b: ((a, a), (b, b)), 1.0),
    ((5, 15, 25, 35), lambda a, b: ((b, b), (a, a)), 0.0),
    ((15, 25, 60, 70), lambda a, b: ((a, b), (b, a)), 0.0),
)


def f_parameters(rng, p):
    """Per-cluster (d1, d2, shift) column arrays for the F family."""
    odd = np.arange(p) % 2 == 0  # 1-based odd columns
    params = []
    for (la, ha, lb, hb), pick, shift in _F_CLUSTERS:
        a = rng.integers(la, ha, size=p, endpoint=True).astype(float)
        b = rng.integers(lb, hb, size=p, endpoint=True).astype(float)
        (o1, o2), (e1, e2) = pick(a, b)
        params.append((np.where(odd, o1, e1), np.where(odd, o2, e2), shift))
    return params


def gen_f(spec):
    """F-distributed clusters; the first cluster is shifted by +1."""
    _expect(spec, "f")
    rng = np.random.default_rng(spec.seed)
    sizes = cluster_sizes(spec.n, spec.k)
    params = f_parameters(rng, spec.p)
    blocks = [f_variates(rng, d1, d2, (size, spec.p)) + shift
              for size, (d1, d2, shift) in zip(sizes, params)]
    return LabeledDataset(np.vstack(blocks), _labels(sizes), spec)


_GENERATORS = {
    "gaussian": gen_gaussian,
    "asymnormal": gen_asym_normal,
    "beta": gen_beta,
    "skewt": gen_skewed_t,
    "f": gen_f,
}


def generate(spec):
    """Dispatch on ``spec.family``."""
    if not isinstance(spec, SampleSpec):
        raise ShapeError("generate expects a SampleSpec")
    return _GENERATORS[spec.family](spec)
