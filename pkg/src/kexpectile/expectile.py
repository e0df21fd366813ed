"""Univariate and column-wise expectiles.

The asymmetric squared loss puts weight ``tau`` on residuals above the
center and ``1 - tau`` on residuals below it, so the 0.5-expectile is the
mean and larger ``tau`` pulls the center into the upper tail.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_series, check_tau
from .exceptions import OneSidedClusterError, ShapeError

TAU_FLOOR = 0.01
LAWS_TOL = 1e-8
LAWS_MAX_ITER = 1000

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class ExpectileEstimate:
    """Result of :func:`laws_expectile`.

    Attributes
    ----------
    mu : float
        Estimated expectile.
    iterations : int
        Number of weighted-mean updates performed.
    foc_residual : float
        Normalized first-order-condition residual at ``mu``.
    converged : bool
        Whether the update step fell below the tolerance before ``max_iter``.
    """

    mu: float
    iterations: int
    foc_residual: float
    converged: bool


def rho_tau(u, tau):
    """Asymmetric quadratic loss ``tau*(u)+^2 + (1-tau)*(-u)+^2``.

    Works elementwise on arrays.
    """
    check_tau(tau)
    u = np.asarray(u, dtype=float)
    out = np.where(u > 0, tau, 1.0 - tau) * u * u
    return float(out) if out.ndim == 0 else out


def tau_distance(x, theta, tau):
    """Asymmetrically weighted squared distance between ``x`` and ``theta``.

    Coordinate ``j`` contributes ``(tau_j + (1 - 2 tau_j) 1[x_j < theta_j]) (x_j - theta_j)^2``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    tau = np.atleast_1d(check_tau(tau))
    if not (x.shape == theta.shape == tau.shape) or x.ndim != 1:
        raise ShapeError(
            f"x, theta and tau must be 1-D of equal length, got {x.shape}, {theta.shape}, {tau.shape}"
        )
    diff = x - theta
    weight = np.where(x < theta, 1.0 - tau, tau)
    return float(np.sum(weight * diff * diff))


def _foc_parts(values, mu):
    diff = values - mu
    above = np.sum(np.where(diff > 0, diff, 0.0), axis=0)
    below = np.sum(np.where(diff < 0, -diff, 0.0), axis=0)
    return above, below


def _normalized_foc(values, tau, mu):
    above, below = _foc_parts(values, mu)
    return np.abs(tau * above - (1.0 - tau) * below) / np.maximum(above + below, _TINY)


def foc_residual(series, tau, mu):
    """Scale-free residual of the expectile first-order condition at ``mu``.

    Returns ``|tau*S+ - (1-tau)*S-| / (S+ + S-)`` where ``S+`` and ``S-`` are the
    summed distances of the values above and below ``mu``; zero when all
    values equal ``mu``.
    """
    values = check_series(series)
    check_tau(tau)
    return float(_normalized_foc(values, float(tau), float(mu)))


def laws_columns(values, tau, tol=LAWS_TOL, max_iter=LAWS_MAX_ITER):
    """Column-wise expectiles of ``values`` by iterated asymmetric weighting.

    Each column ``j`` starts at its mean; every pass reweights the points
    (``tau_j`` above the current center, ``1 - tau_j`` at or below it) and
    replaces the center by the weighted mean. Columns are independent, so
    solving them together gives the same result as one at a time. The
    result is clipped to the column range, which rounding in the weighted
    mean can otherwise leave by an ulp on (near) constant columns.

    Parameters
    ----------
    values : ndarray of shape (m, p)
    tau : ndarray of shape (p,)
    tol : float
        Stop once every column moves by at most ``tol`` in one pass.
    max_iter : int

    Returns
    -------
    mu : ndarray of shape (p,)
    iterations : int
    converged : bool
    """
    values = np.asarray(values, dtype=float)
    tau = np.asarray(tau, dtype=float)
    mu = values.mean(axis=0)
    iterations = 0
    converged = False
    while iterations < max_iter:
        weights = np.where(values > mu, tau, 1.0 - tau)
        new_mu = (weights * values).sum(axis=0) / weights.sum(axis=0)
        iterations += 1
        step = np.max(np.abs(new_mu - mu))
        mu = new_mu
        if step <= tol:
            converged = True
            break
    mu = np.clip(mu, values.min(axis=0), values.max(axis=0))
    return mu, iterations, converged


def laws_expectile(series, tau, tol=LAWS_TOL, max_iter=LAWS_MAX_ITER):
    """Empirical ``tau``-expectile of a 1-D sample.

    Non-convergence within ``max_iter`` is reported through
    ``ExpectileEstimate.converged`` rather than raised.

    Examples
    --------
    >>> laws_expectile([0.0, 1.0], 0.25).mu
    0.25
    """
    values = check_series(series)
    tau = float(check_tau(tau))
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be a positive integer")
    mu, iterations, converged = laws_columns(values[:, None], np.array([tau]), tol, max_iter)
    mu = float(mu[0])
    return ExpectileEstimate(
        mu=mu,
        iterations=iterations,
        foc_residual=float(_normalized_foc(values, tau, mu)),
        converged=converged,
    )


def solve_tau_for_center(series, theta, floor=TAU_FLOOR):
    """Asymmetry level at which ``theta`` is the exact expectile of ``series``.

    Solves ``tau * S+ = (1 - tau) * S-`` for ``tau``, i.e.
    ``tau = gamma / (1 + gamma)`` with ``gamma = S- / S+``, then clamps the
    result to ``[floor, 1 - floor]``. Pass ``floor=0`` for the raw value.

    Raises
    ------
    OneSidedClusterError
        If no value lies strictly below or strictly above ``theta``.
    """
    values = check_series(series)
    theta = float(theta)
    above, below = _foc_parts(values, theta)
    if below == 0.0:
        raise OneSidedClusterError(f"no value lies strictly below center {theta}", side="above")
    if above == 0.0:
        raise OneSidedClusterError(f"no value lies strictly above center {theta}", side="below")
    gamma = below / above
    tau = gamma / (1.0 + gamma)
    return float(np.clip(tau, floor, 1.0 - floor))


TAU_RULES = ("median", "ratio", "consistent", "paper-literal")


def _consistent_tau(values, theta):
    above, below = _foc_parts(values, theta)
    total = above + below
    return np.where(total > 0, below / np.where(total > 0, total, 1.0), 0.5)


def tau_for_centers(values, theta, floor=TAU_FLOOR, rule="median"):
    """Column-wise asymmetry levels for a cluster, clamped to ``[floor, 1 - floor]``.

    Rules
    -----
    ``"consistent"``
        The level at which ``theta`` is the exact expectile (vectorized
        :func:`solve_tau_for_center`). Fed back into an expectile update
        this reproduces ``theta``, so it never moves a clustering off its
        starting point.
    ``"ratio"``
        ``gamma`` is the ratio of the mean shortfall below ``theta`` to the
        mean excess above it: ``(n_above * S-) / (n_below * S+)``. Each
        application moves the expectile toward the column median.
    ``"median"``
        The fixed point of repeated ``"ratio"`` steps: the level at which
        the column median is the exact expectile. ``theta`` is ignored.
    ``"paper-literal"``
        ``(n_above * sum(theta - x)) / (n_below * sum(x - theta))`` with both
        sums over the points at or below ``theta``. Degenerate (the two sums
        cancel), kept only for comparison.

    Degenerate columns: all values above the center give ``floor``, all
    below give ``1 - floor``, all equal give 0.5.
    """
    values = np.asarray(values, dtype=float)
    theta = np.asarray(theta, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        if rule == "consistent":
            tau = _consistent_tau(values, theta)
        elif rule == "median":
            tau = _consistent_tau(values, np.median(values, axis=0))
        elif rule == "ratio":
            above, below = _foc_parts(values, theta)
            n_above = np.sum(values > theta, axis=0)
            n_below = np.sum(values < theta, axis=0)
            num = n_above * below
            den = n_below * above
            tau = np.where(num + den > 0, num / np.where(num + den > 0, num + den, 1.0), 0.5)
        elif rule == "paper-literal":
            in_plus = values <= theta
            n_plus = in_plus.sum(axis=0).astype(float)
            n_minus = values.shape[0] - n_plus
            num = n_minus * np.sum(np.where(in_plus, theta - values, 0.0), axis=0)
            den = n_plus * np.sum(np.where(in_plus, values - theta, 0.0), axis=0)
            gamma = num / den
            tau = gamma / (1.0 + gamma)
            tau = np.where(np.isfinite(tau), tau, 0.5)
        else:
            raise ValueError(f"unknown tau update rule {rule!r}; choose from {', '.join(TAU_RULES)}")
    return np.clip(tau, floor, 1.0 - floor)
