"""Discrete estimators of the spectral measure.

All three estimators put mass on the observed angles ``w_1..w_k``:

* empirical: uniform weights ``1/k``;
* maximum Euclidean likelihood: the closest weight vector (in squared
  distance) to uniform that satisfies ``sum p_i = 1`` and ``sum w_i p_i = 1/2``,
  available in closed form and possibly with negative entries;
* maximum empirical likelihood: ``p_i = 1 / (k (1 + lam (w_i - 1/2)))`` with
  the multiplier ``lam`` found numerically.

Variances use the ``1/k`` divisor throughout.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateSampleError, InfeasibleError, InputError
from .margins import AngleSample

__all__ = [
    "EstimatorKind",
    "SpectralEstimate",
    "ElSolution",
    "empirical_weights",
    "euclidean_weights",
    "el_weights",
    "el_estimate",
    "qp_oracle",
    "spectral_cdf",
    "phi_transform",
    "mean_constraint_residual",
    "negative_weight_fraction",
    "estimate",
]


class EstimatorKind(str, enum.Enum):
    EMPIRICAL = "Empirical"
    EUCLIDEAN = "Euclidean"
    EMPIRICAL_LIKELIHOOD = "EmpiricalLikelihood"

    @classmethod
    def parse(cls, name) -> "EstimatorKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "").replace("-", "")
        aliases = {
            "empirical": cls.EMPIRICAL,
            "dot": cls.EMPIRICAL,
            "euclidean": cls.EUCLIDEAN,
            "hat": cls.EUCLIDEAN,
            "el": cls.EMPIRICAL_LIKELIHOOD,
            "empiricallikelihood": cls.EMPIRICAL_LIKELIHOOD,
            "ddot": cls.EMPIRICAL_LIKELIHOOD,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InputError(f"unknown estimator {name!r}") from None


@dataclass(frozen=True)
class SpectralEstimate:
    """Point masses ``weights`` placed at ``support`` (original sample order)."""

    support: np.ndarray
    weights: np.ndarray
    kind: EstimatorKind

    @property
    def k(self) -> int:
        return self.support.size

    def cdf(self, w):
        return spectral_cdf(self, w)


@dataclass(frozen=True)
class ElSolution:
    weights: np.ndarray
    lam: float
    iterations: int
    residual: float


def _angles(angles) -> np.ndarray:
    if isinstance(angles, AngleSample):
        return angles.w
    w = np.asarray(angles, dtype=float)
    if w.ndim != 1:
        raise InputError("angles must be a one-dimensional array")
    return w


def _check_constrained(w: np.ndarray) -> None:
    if w.size < 2:
        raise DegenerateSampleError(f"constrained estimators need k >= 2, got k = {w.size}")
    if np.ptp(w) == 0.0:
        raise DegenerateSampleError("zero variance: all angles are equal")


def empirical_weights(angles) -> SpectralEstimate:
    w = _angles(angles)
    if w.size == 0:
        raise DegenerateSampleError("empty angle sample")
    return SpectralEstimate(w, np.full(w.size, 1.0 / w.size), EstimatorKind.EMPIRICAL)


def euclidean_weights(angles) -> SpectralEstimate:
    """Closed-form maximum Euclidean likelihood weights.

    ``p_i = (1/k) * (1 - (wbar - 1/2) * (w_i - wbar) / S2)`` where ``wbar`` and
    ``S2`` are the sample mean and (1/k) variance. Negative weights are kept.
    """
    w = _angles(angles)
    _check_constrained(w)
    k = w.size
    wbar = w.mean()
    dev = w - wbar
    s2 = np.dot(dev, dev) / k
    if s2 == 0.0:
        raise DegenerateSampleError("zero variance: all angles are equal")
    p = (1.0 - (wbar - 0.5) / s2 * dev) / k
    return SpectralEstimate(w, p, EstimatorKind.EUCLIDEAN)


def qp_oracle(angles) -> np.ndarray:
    """Solve the Euclidean-likelihood quadratic program through its Lagrangian.

    Stationarity of ``-1/2 sum (k p_i - 1)^2 + mu1 (sum p_i - 1) +
    mu2 (sum w_i p_i - 1/2)`` gives ``p_i = 1/k + (mu1 + mu2 w_i) / k^2``;
    substituting into the two constraints leaves a 2x2 linear system in
    ``(mu1, mu2)`` which is solved numerically.
    """
    w = _angles(angles)
    if w.size < 2:
        raise DegenerateSampleError("qp_oracle needs k >= 2")
    k = float(w.size)
    sw = w.sum()
    a = np.array([[k, sw], [sw, np.dot(w, w)]])
    b = np.array([0.0, k * k * (0.5 - sw / k)])
    if np.linalg.cond(a) > 1e14:
        raise DegenerateSampleError("singular constraint system (zero variance)")
    mu1, mu2 = np.linalg.solve(a, b)
    return 1.0 / k + (mu1 + mu2 * w) / (k * k)


def _el_score(lam: float, d: np.ndarray) -> tuple[float, float]:
    den = 1.0 + lam * d
    q = d / den
    return q.mean(), -np.mean(q * q)


def el_weights(angles, tol: float = 1e-12, max_iter: int = 200) -> ElSolution:
    """Maximum empirical likelihood weights under the mean-1/2 constraint.

    The multiplier solves ``mean((w_i - 1/2) / (1 + lam (w_i - 1/2))) = 0``.
    That function decreases strictly on the interval where all denominators
    are positive and runs from +inf to -inf across it, so the root is unique.
    It is located by Newton steps kept inside a shrinking bracket, falling
    back to bisection whenever a step leaves the bracket.

    Raises
    ------
    InfeasibleError
        If 1/2 is not strictly between the smallest and largest angle.
    ConvergenceError
        If ``|residual| <= tol`` is not reached within ``max_iter`` steps.
    """
    w = _angles(angles)
    _check_constrained(w)
    d = w - 0.5
    if not (d.min() < 0.0 < d.max()):
        raise InfeasibleError(
            "infeasible: 1/2 lies outside the open hull of the angles, "
            "the mean constraint cannot be met with positive weights"
        )
    lo = -1.0 / d.max()
    hi = -1.0 / d.min()
    lam = 0.0
    f, df = _el_score(lam, d)
    it = 0
    while abs(f) > tol:
        if it >= max_iter:
            raise ConvergenceError(
                f"empirical likelihood multiplier did not converge in {max_iter} "
                f"iterations (residual {f:.3e})"
            )
        it += 1
        if f > 0.0:
            lo = lam
        else:
            hi = lam
        step = lam - f / df
        if lo < step < hi:
            lam = step
        else:
            lam = 0.5 * (lo + hi)
        if lam in (lo, hi):
            # bracket exhausted at floating-point resolution
            f, df = _el_score(lam, d)
            break
        f, df = _el_score(lam, d)
    if abs(f) > tol:
        raise ConvergenceError(
            f"empirical likelihood multiplier stalled at residual {f:.3e} > tol {tol:.1e}"
        )
    p = 1.0 / (w.size * (1.0 + lam * d))
    # exact at the root; removes the O(lam * residual) drift in the total mass
    p /= p.sum()
    return ElSolution(weights=p, lam=float(lam), iterations=it, residual=float(f))


def el_estimate(angles, tol: float = 1e-12, max_iter: int = 200) -> SpectralEstimate:
    w = _angles(angles)
    sol = el_weights(w, tol=tol, max_iter=max_iter)
    return SpectralEstimate(w, sol.weights, EstimatorKind.EMPIRICAL_LIKELIHOOD)


def estimate(angles, kind) -> SpectralEstimate:
    kind = EstimatorKind.parse(kind)
    if kind is EstimatorKind.EMPIRICAL:
        return empirical_weights(angles)
    if kind is EstimatorKind.EUCLIDEAN:
        return euclidean_weights(angles)
    return el_estimate(angles)


def _step_sum(support: np.ndarray, values: np.ndarray, w):
    """``sum_i values_i * 1{support_i <= w}`` for scalar or array ``w``."""
    order = np.argsort(support, kind="stable")
    s = support[order]
    csum = np.concatenate(([0.0], np.cumsum(values[order])))
    idx = np.searchsorted(s, w, side="right")
    out = csum[idx]
    return float(out) if np.ndim(out) == 0 else out


def spectral_cdf(est: SpectralEstimate, w):
    """Right-continuous step CDF ``sum_i p_i 1{w_i <= w}``."""
    return _step_sum(est.support, est.weights, np.asarray(w, dtype=float))


def phi_transform(est: SpectralEstimate, w):
    """Mean-correcting map applied to the distribution of ``est``.

    ``F(w) - (mu - 1/2) / sigma^2 * int_[0,w] (v - mu) dF(v)`` with ``mu`` and
    ``sigma^2`` the mean and variance of ``F``. Applied to the empirical
    estimate it reproduces the Euclidean estimate.
    """
    s, p = est.support, est.weights
    mu = np.dot(p, s)
    var = np.dot(p, (s - mu) ** 2)
    if var <= 0.0:
        raise DegenerateSampleError("zero variance: transform undefined")
    w = np.asarray(w, dtype=float)
    f = _step_sum(s, p, w)
    partial = _step_sum(s, p * (s - mu), w)
    return f - (mu - 0.5) / var * partial


def mean_constraint_residual(est: SpectralEstimate) -> float:
    return float(np.dot(est.support, est.weights) - 0.5)


def negative_weight_fraction(est: SpectralEstimate) -> float:
    return float(np.count_nonzero(est.weights < 0.0)) / est.k
