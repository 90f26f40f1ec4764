"""Margin standardization, pseudo-polar coordinates and threshold selection.

Raw pairs ``(x, y)`` are mapped to the unit-Pareto scale, either through
(n+1)-normalized ranks or through known marginal CDFs, and then split into a
pseudo-angle ``w = x*/(x* + y*)`` and a pseudo-radius ``r = x* + y*``. The
angles of the pairs whose radius exceeds a high empirical quantile form the
sample from which the spectral measure is estimated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateSampleError, InputError

__all__ = [
    "BivariateSample",
    "PseudoPolar",
    "AngleSample",
    "rank_transform",
    "known_margin_transform",
    "frechet_cdf",
    "pseudo_polar",
    "empirical_quantile",
    "select_exceedances",
    "angles_from_sample",
]


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class BivariateSample:
    """Paired observations ``(x_i, y_i)`` of equal length without NaN."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _as_vector(self.x, "x")
        y = _as_vector(self.y, "y")
        if x.shape != y.shape:
            raise InputError(f"x and y differ in length ({x.size} vs {y.size})")
        if np.isnan(x).any() or np.isnan(y).any():
            raise InputError("sample contains NaN")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.size

    def take(self, index) -> "BivariateSample":
        return BivariateSample(self.x[index], self.y[index])


@dataclass(frozen=True)
class PseudoPolar:
    angles: np.ndarray
    radii: np.ndarray

    def __len__(self) -> int:
        return self.angles.size


@dataclass(frozen=True)
class AngleSample:
    """Exceedance angles together with the threshold that produced them.

    The angles keep the original row order of the source sample. At least two
    angles, all in (0, 1), with nonzero spread are required.
    """

    w: np.ndarray
    threshold: float = float("nan")
    source_size: int = 0

    def __post_init__(self):
        w = _as_vector(self.w, "w")
        if w.size < 2:
            raise DegenerateSampleError(f"need at least 2 angles, got {w.size}")
        if np.any(w <= 0.0) or np.any(w >= 1.0):
            raise InputError("angles must lie strictly inside (0, 1)")
        if np.ptp(w) == 0.0:
            raise DegenerateSampleError("zero variance: all angles are equal")
        object.__setattr__(self, "w", w)
        if self.source_size == 0:
            object.__setattr__(self, "source_size", w.size)
        if self.source_size < w.size:
            raise InputError("source_size smaller than the number of angles")

    @property
    def k(self) -> int:
        return self.w.size

    def __len__(self) -> int:
        return self.w.size


def rank_transform(sample: BivariateSample) -> tuple[np.ndarray, np.ndarray]:
    """Map both columns to pseudo-Pareto values ``1 / (1 - rank / (n + 1))``.

    Ties receive average ranks, so tied observations share a value. The
    outputs lie in ``(1, n + 1)`` and depend on the data only through ranks.

    Raises
    ------
    InputError
        If ``n < 2``.
    DegenerateSampleError
        If a column is constant.
    """
    n = len(sample)
    if n < 2:
        raise InputError(f"sample too short: n = {n}, need n >= 2")
    out = []
    for name, col in (("x", sample.x), ("y", sample.y)):
        if np.ptp(col) == 0.0:
            raise DegenerateSampleError(f"column {name} is constant; ranks are degenerate")
        r = rankdata(col, method="average")
        out.append((n + 1.0) / (n + 1.0 - r))
    return out[0], out[1]


def known_margin_transform(
    sample: BivariateSample,
    cdf_x: Callable[[np.ndarray], np.ndarray],
    cdf_y: Callable[[np.ndarray], np.ndarray],
) -> tuple[np.ndarray, np.ndarray]:
    """Apply ``1 / (1 - F(.))`` with user supplied marginal CDFs."""
    out = []
    for name, col, cdf in (("x", sample.x, cdf_x), ("y", sample.y, cdf_y)):
        u = np.asarray(cdf(col), dtype=float)
        if np.any(u <= 0.0) or np.any(u >= 1.0) or np.isnan(u).any():
            raise InputError(f"CDF for {name} returned a value outside (0, 1)")
        out.append(1.0 / (1.0 - u))
    return out[0], out[1]


def frechet_cdf(z):
    """Unit Fréchet CDF ``exp(-1/z)``."""
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        return np.exp(-1.0 / z)


def pseudo_polar(xstar, ystar) -> PseudoPolar:
    xstar = _as_vector(xstar, "xstar")
    ystar = _as_vector(ystar, "ystar")
    if xstar.shape != ystar.shape:
        raise InputError("xstar and ystar differ in length")
    if np.any(xstar <= 0.0) or np.any(ystar <= 0.0):
        raise InputError("pseudo-polar coordinates need strictly positive inputs")
    radii = xstar + ystar
    return PseudoPolar(angles=xstar / radii, radii=radii)


def empirical_quantile(values, level: float) -> float:
    """Order-statistic quantile: the ``floor(level * n)``-th smallest value.

    With distinct values exactly ``ceil((1 - level) * n)`` of them lie strictly
    above the result. When ``level * n < 1`` no order statistic qualifies and
    0.0 is returned, which sits below every (positive) radius. A relative
    slack of 1e-12 keeps products such as ``0.8 * 10`` from rounding down.
    """
    v = np.sort(_as_vector(values, "values"))
    idx = math.floor(level * v.size * (1.0 + 1e-12))
    idx = min(idx, v.size)
    if idx < 1:
        return 0.0
    return float(v[idx - 1])


def select_exceedances(pp: PseudoPolar, quantile_level: float) -> AngleSample:
    """Keep the angles whose radius is strictly above the radius quantile.

    Raises
    ------
    InputError
        If ``quantile_level`` is not inside (0, 1).
    DegenerateSampleError
        If fewer than two exceedances remain or all their angles coincide.
    """
    if not 0.0 < quantile_level < 1.0:
        raise InputError(f"quantile level must be in (0, 1), got {quantile_level}")
    t = empirical_quantile(pp.radii, quantile_level)
    keep = pp.radii > t
    k = int(keep.sum())
    if k < 2:
        raise DegenerateSampleError(
            f"only {k} exceedance(s) above the {quantile_level} radius quantile"
        )
    return AngleSample(w=pp.angles[keep], threshold=t, source_size=len(pp))


def angles_from_sample(
    sample: BivariateSample, quantile_level: float, margins: str = "rank"
) -> AngleSample:
    """Rank (or unit-Fréchet) standardization followed by threshold selection."""
    if margins == "rank":
        xs, ys = rank_transform(sample)
    elif margins == "known":
        xs, ys = known_margin_transform(sample, frechet_cdf, frechet_cdf)
    else:
        raise InputError(f"unknown margin mode {margins!r}; use 'rank' or 'known'")
    return select_exceedances(pseudo_polar(xs, ys), quantile_level)
