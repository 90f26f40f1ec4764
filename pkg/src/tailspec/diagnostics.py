"""Sub-asymptotic dependence coefficients and integrated squared error.

``chi`` and ``chibar`` use (n+1)-normalized ranks as margins and replace
every probability by an empirical proportion, including the marginal ones,
so perfectly dependent data give exactly 1 for both coefficients.
"""
from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from .errors import InputError, NumericalError
from .estimators import negative_weight_fraction
from .margins import BivariateSample

__all__ = [
    "chi",
    "chibar",
    "chi_curve",
    "chibar_curve",
    "bootstrap_band",
    "ise",
    "negative_weight_fraction",
]


def _uniform_margins(sample: BivariateSample) -> tuple[np.ndarray, np.ndarray]:
    n = len(sample)
    if n < 2:
        raise InputError(f"sample too short: n = {n}")
    return rankdata(sample.x) / (n + 1.0), rankdata(sample.y) / (n + 1.0)


def _chi_from_margins(u, v, grid):
    below_u = u[None, :] < grid[:, None]
    joint = np.mean(below_u & (v[None, :] < grid[:, None]), axis=1)
    marg = np.mean(below_u, axis=1)
    ok = (joint > 0.0) & (joint < 1.0) & (marg > 0.0) & (marg < 1.0)
    out = np.full(grid.size, np.nan)
    out[ok] = 2.0 - np.log(joint[ok]) / np.log(marg[ok])
    return out


def _chibar_from_margins(u, v, grid):
    above_u = u[None, :] > grid[:, None]
    joint = np.mean(above_u & (v[None, :] > grid[:, None]), axis=1)
    marg = np.mean(above_u, axis=1)
    ok = (joint > 0.0) & (joint < 1.0) & (marg > 0.0) & (marg < 1.0)
    out = np.full(grid.size, np.nan)
    out[ok] = 2.0 * np.log(marg[ok]) / np.log(joint[ok]) - 1.0
    return out


_CURVES = {"chi": _chi_from_margins, "chibar": _chibar_from_margins}


def _grid(u) -> np.ndarray:
    g = np.atleast_1d(np.asarray(u, dtype=float))
    if g.size == 0:
        raise InputError("empty u grid")
    if np.any(g <= 0.0) or np.any(g >= 1.0):
        raise InputError("u values must lie in (0, 1)")
    return g


def chi_curve(sample: BivariateSample, u_grid) -> np.ndarray:
    """chi(u) over a grid; NaN where an empirical proportion is 0 or 1."""
    return _chi_from_margins(*_uniform_margins(sample), _grid(u_grid))


def chibar_curve(sample: BivariateSample, u_grid) -> np.ndarray:
    return _chibar_from_margins(*_uniform_margins(sample), _grid(u_grid))


def chi(sample: BivariateSample, u: float) -> float:
    """``2 - log P(U < u, V < u) / log P(U < u)`` with empirical proportions."""
    val = chi_curve(sample, [u])[0]
    if np.isnan(val):
        raise NumericalError(
            f"chi({u}) undefined: empirical joint proportion is 0 or 1 for n = {len(sample)}"
        )
    return float(val)


def chibar(sample: BivariateSample, u: float) -> float:
    """``2 log P(U > u) / log P(U > u, V > u) - 1`` with empirical proportions."""
    val = chibar_curve(sample, [u])[0]
    if np.isnan(val):
        raise NumericalError(
            f"chibar({u}) undefined: no joint survivors above {u} for n = {len(sample)}"
        )
    return float(val)


def bootstrap_band(
    sample: BivariateSample,
    statistic: str,
    u_grid,
    level: float = 0.95,
    B: int = 1000,
    seed=None,
    max_missing: float = 0.10,
) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise percentile intervals from resampling pairs with replacement.

    Margins are re-ranked inside every resample. A grid point where the
    statistic is undefined in more than ``max_missing`` of the resamples is
    returned as NaN in both bounds.
    """
    if statistic not in _CURVES:
        raise InputError(f"statistic must be 'chi' or 'chibar', got {statistic!r}")
    if B < 100:
        raise InputError(f"need at least 100 bootstrap resamples, got {B}")
    if not 0.0 < level < 1.0:
        raise InputError(f"level must be in (0, 1), got {level}")
    grid = _grid(u_grid)
    fn = _CURVES[statistic]
    n = len(sample)
    rng = np.random.default_rng(seed)
    draws = np.empty((B, grid.size))
    for b in range(B):
        idx = rng.integers(0, n, size=n)
        u = rankdata(sample.x[idx]) / (n + 1.0)
        v = rankdata(sample.y[idx]) / (n + 1.0)
        draws[b] = fn(u, v, grid)
    missing = np.isnan(draws).mean(axis=0)
    alpha = 0.5 * (1.0 - level)
    lo = np.full(grid.size, np.nan)
    hi = np.full(grid.size, np.nan)
    ok = missing <= max_missing
    if ok.any():
        q = np.nanquantile(draws[:, ok], [alpha, 1.0 - alpha], axis=0)
        lo[ok], hi[ok] = q[0], q[1]
    return lo, hi


def ise(estimate_cdf, true_cdf, grid_size: int = 2048) -> float:
    """Composite midpoint rule for ``int_0^1 (estimate - true)^2``."""
    if grid_size < 2:
        raise InputError("grid_size must be at least 2")
    mid = (np.arange(grid_size) + 0.5) / grid_size
    diff = np.asarray(estimate_cdf(mid), dtype=float) - np.asarray(true_cdf(mid), dtype=float)
    return float(np.mean(diff * diff))
