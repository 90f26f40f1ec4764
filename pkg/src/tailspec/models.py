"""Logistic and asymmetric logistic bivariate extreme value models.

The spectral measure is parameterized by the pseudo-angle ``w = x/(x+y)``
so that the exponent function is ``V(x, y) = 2 int max(w/x, (1-w)/y) dH(w)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .margins import BivariateSample

__all__ = [
    "LogisticModel",
    "AsyLogisticModel",
    "logistic_cdf",
    "logistic_spectral_density",
    "logistic_spectral_cdf",
    "logistic_sample",
    "positive_stable",
    "asym_logistic_spectral_density",
    "asym_logistic_atoms",
]


@dataclass(frozen=True)
class LogisticModel:
    """``G(x, y) = exp(-(x^{-1/alpha} + y^{-1/alpha})^alpha)``, 0 < alpha <= 1."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise InputError(f"logistic alpha must be in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class AsyLogisticModel:
    """Asymmetric logistic model.

    Exponent function::

        V(x, y) = (1 - psi2)/x + (1 - psi1)/y + ((psi2/x)^{1/alpha} + (psi1/y)^{1/alpha})^alpha

    so ``psi1`` controls the atom at ``w = 0`` (mass ``(1 - psi1)/2``) and
    ``psi2`` the atom at ``w = 1`` (mass ``(1 - psi2)/2``).
    """

    alpha: float
    psi1: float
    psi2: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"asymmetric logistic alpha must be in (0, 1), got {self.alpha}")
        for name in ("psi1", "psi2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InputError(f"{name} must be in [0, 1], got {v}")


def logistic_cdf(m: LogisticModel, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise InputError("logistic_cdf needs strictly positive coordinates")
    r = 1.0 / m.alpha
    # log-sum-exp keeps x^{-1/alpha} finite for small alpha
    v = np.exp(m.alpha * np.logaddexp(-r * np.log(x), -r * np.log(y)))
    out = np.exp(-v)
    return float(out) if out.ndim == 0 else out


def _log_logistic_density(alpha: float, w):
    r = 1.0 / alpha
    lw, l1w = np.log(w), np.log1p(-w)
    return (
        np.log(0.5 * (r - 1.0))
        + (-1.0 - r) * (lw + l1w)
        + (alpha - 2.0) * np.logaddexp(-r * lw, -r * l1w)
    )


def logistic_spectral_density(m: LogisticModel, w):
    if m.alpha >= 1.0:
        raise InputError("alpha = 1 has no spectral density (two boundary atoms of mass 1/2)")
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0.0) or np.any(w >= 1.0):
        raise InputError("spectral density is defined on the open interval (0, 1)")
    out = np.exp(_log_logistic_density(m.alpha, w))
    return float(out) if out.ndim == 0 else out


def logistic_spectral_cdf(m: LogisticModel, w):
    """Closed-form spectral CDF.

    ``H(w) = (1 - ((1-w)^{r-1} - w^{r-1}) ((1-w)^r + w^r)^{alpha-1}) / 2``
    with ``r = 1/alpha``, for ``0 < w < 1``; ``H(0) = 0`` and ``H(1) = 1``.
    At ``alpha = 1`` the measure is two atoms of mass 1/2 at 0 and 1.
    """
    w = np.clip(np.asarray(w, dtype=float), 0.0, 1.0)
    if m.alpha >= 1.0:
        out = np.where(w >= 1.0, 1.0, 0.5)
        return float(out) if out.ndim == 0 else out
    r = 1.0 / m.alpha
    inner = np.clip(w, 1e-300, 1.0 - 1e-16)
    lw, l1w = np.log(inner), np.log1p(-inner)
    ls = np.logaddexp(r * lw, r * l1w)
    # ((1-w)^{r-1} - w^{r-1}) * S^{alpha-1}, computed in logs term by term
    t1 = np.exp((r - 1.0) * l1w + (m.alpha - 1.0) * ls)
    t2 = np.exp((r - 1.0) * lw + (m.alpha - 1.0) * ls)
    out = 0.5 * (1.0 - (t1 - t2))
    out = np.where(w <= 0.0, 0.0, np.where(w >= 1.0, 1.0, out))
    return float(out) if out.ndim == 0 else out


def positive_stable(alpha: float, size, rng: np.random.Generator) -> np.ndarray:
    """Log of a positive stable variable with Laplace transform ``exp(-s^alpha)``.

    Kanter's representation with ``U ~ Uniform(0, pi)`` and ``E ~ Exp(1)``.
    """
    u = rng.uniform(0.0, np.pi, size=size)
    e = rng.standard_exponential(size=size)
    if alpha >= 1.0:
        return np.zeros(size)
    return (
        (1.0 - alpha) / alpha * (np.log(np.sin((1.0 - alpha) * u)) - np.log(e))
        + np.log(np.sin(alpha * u))
        - np.log(np.sin(u)) / alpha
    )


def logistic_sample(m: LogisticModel, n: int, seed=None) -> BivariateSample:
    """Draw ``n`` pairs from the logistic model with unit-Fréchet margins.

    ``X_j = (S / E_j)^alpha`` with ``S`` positive stable and ``E_1, E_2``
    independent unit exponentials, so that
    ``P(X <= x, Y <= y) = E exp(-S (x^{-1/alpha} + y^{-1/alpha}))``.
    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if n < 1:
        raise InputError(f"sample size must be positive, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    log_s = positive_stable(m.alpha, n, rng)
    log_e = np.log(rng.standard_exponential(size=(2, n)))
    z = np.exp(m.alpha * (log_s[None, :] - log_e))
    return BivariateSample(z[0], z[1])


def asym_logistic_atoms(m: AsyLogisticModel) -> tuple[float, float]:
    """Point masses at ``w = 0`` and ``w = 1``."""
    if m.psi1 == 0.0 or m.psi2 == 0.0:
        # the logistic part collapses onto the boundary: exact independence
        return 0.5, 0.5
    return 0.5 * (1.0 - m.psi1), 0.5 * (1.0 - m.psi2)


def asym_logistic_spectral_density(m: AsyLogisticModel, w):
    """Density of the absolutely continuous part on (0, 1).

    The logistic component is the symmetric logistic density ``h_alpha``
    after the change of angle ``w -> psi1 w / D`` with
    ``D = psi1 w + psi2 (1 - w)``, giving ``(psi1 psi2)^2 / D^3 * h_alpha(psi1 w / D)``.
    """
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0.0) or np.any(w >= 1.0):
        raise InputError("spectral density is defined on the open interval (0, 1)")
    p1, p2 = m.psi1, m.psi2
    if p1 == 0.0 or p2 == 0.0:
        out = np.zeros_like(w)
    else:
        d = p1 * w + p2 * (1.0 - w)
        out = (p1 * p2) ** 2 / d**3 * np.exp(_log_logistic_density(m.alpha, p1 * w / d))
    return float(out) if out.ndim == 0 else out
