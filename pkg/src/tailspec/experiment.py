"""Monte Carlo comparison of the spectral estimators under the logistic model.

Every replication draws a logistic sample, standardizes the margins (by
default with the true unit-Fréchet CDF, optionally by ranks), and for
each threshold level computes the requested estimators, their integrated
squared error against the true spectral CDF and their share of negative
weights.

Replication ``r`` uses the random stream
``np.random.SeedSequence(seed, spawn_key=(r,))``, the same stream that
``SeedSequence(seed).spawn(...)`` would hand out as child ``r``. Per
replication results are reduced in replication order, so the report does
not depend on the number of worker processes.
"""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .diagnostics import ise
from .errors import InputError, NumericalError
from .estimators import EstimatorKind, estimate, negative_weight_fraction
from .margins import angles_from_sample
from .models import LogisticModel, logistic_sample, logistic_spectral_cdf

__all__ = [
    "ExperimentConfig",
    "MiseRow",
    "MiseReport",
    "run_experiment",
    "replication_rng",
    "resolve_workers",
    "REPORT_COLUMNS",
]

REPORT_COLUMNS = ("estimator", "level", "mise", "neg_frac", "mean_k", "cells_skipped")
ISE_GRID = 2048
ALL_ESTIMATORS = (
    EstimatorKind.EMPIRICAL,
    EstimatorKind.EUCLIDEAN,
    EstimatorKind.EMPIRICAL_LIKELIHOOD,
)


@dataclass(frozen=True)
class ExperimentConfig:
    replications: int
    sample_size: int
    alpha: float
    threshold_levels: tuple
    estimators: tuple = ALL_ESTIMATORS
    seed: int = 0
    margin_mode: str = "known"
    workers: int = 1

    def __post_init__(self):
        if int(self.replications) < 1:
            raise InputError("replications must be >= 1")
        if int(self.sample_size) < 2:
            raise InputError("sample_size must be >= 2")
        LogisticModel(self.alpha)
        levels = tuple(float(v) for v in self.threshold_levels)
        if not levels:
            raise InputError("threshold_levels is empty")
        if any(not 0.0 < v < 1.0 for v in levels):
            raise InputError("threshold levels must lie in (0, 1)")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise InputError("threshold levels must be strictly increasing")
        kinds = tuple(EstimatorKind.parse(e) for e in self.estimators)
        if not kinds:
            raise InputError("no estimators requested")
        if self.margin_mode not in ("rank", "known"):
            raise InputError(f"margin_mode must be 'rank' or 'known', got {self.margin_mode!r}")
        if int(self.workers) < 1:
            raise InputError("workers must be >= 1")
        object.__setattr__(self, "threshold_levels", levels)
        object.__setattr__(self, "estimators", kinds)
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "sample_size", int(self.sample_size))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "workers", int(self.workers))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        levels = data.get("threshold_levels")
        if isinstance(levels, dict):
            # {"start": .75, "stop": .995, "step": .005}, stop inclusive
            start, stop, step = (float(levels[k]) for k in ("start", "stop", "step"))
            count = int(round((stop - start) / step)) + 1
            data["threshold_levels"] = [round(start + i * step, 12) for i in range(count)]
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        missing = {"replications", "sample_size", "alpha", "threshold_levels"} - set(data)
        if missing:
            raise InputError(f"missing config keys: {sorted(missing)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise InputError(f"malformed config: {exc}") from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["threshold_levels"] = list(self.threshold_levels)
        d["estimators"] = [k.value for k in self.estimators]
        return d


@dataclass
class MiseRow:
    estimator: EstimatorKind
    level: float
    mise: float
    neg_frac: float
    mean_k: float
    cells_skipped: int
    cells_used: int = field(default=0, compare=False)


@dataclass
class MiseReport:
    rows: list

    def get(self, estimator, level: float) -> MiseRow:
        kind = EstimatorKind.parse(estimator)
        for row in self.rows:
            if row.estimator is kind and np.isclose(row.level, level):
                return row
        raise KeyError((kind, level))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for r in self.rows:
            writer.writerow(
                [r.estimator.value, repr(r.level), repr(r.mise), repr(r.neg_frac),
                 repr(r.mean_k), r.cells_skipped]
            )
        return buf.getvalue()


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep,)))


def resolve_workers(requested: int) -> int:
    """Cap ``requested`` by the ``TAILSPEC_THREADS`` environment variable."""
    cap = os.environ.get("TAILSPEC_THREADS")
    if cap:
        try:
            requested = min(requested, max(1, int(cap)))
        except ValueError:
            raise InputError(f"TAILSPEC_THREADS must be an integer, got {cap!r}") from None
    return max(1, requested)


def _replicate(cfg: ExperimentConfig, rep: int):
    """Per (level, estimator) results of one replication: (ise, neg_frac, k) or None."""
    model = LogisticModel(cfg.alpha)
    sample = logistic_sample(model, cfg.sample_size, replication_rng(cfg.seed, rep))
    truth = lambda w: logistic_spectral_cdf(model, w)  # noqa: E731
    out = []
    for level in cfg.threshold_levels:
        try:
            angles = angles_from_sample(sample, level, cfg.margin_mode)
        except NumericalError:
            out.append([None] * len(cfg.estimators))
            continue
        cell = []
        for kind in cfg.estimators:
            try:
                est = estimate(angles, kind)
            except NumericalError:
                cell.append(None)
                continue
            cell.append((ise(est.cdf, truth, ISE_GRID), negative_weight_fraction(est), est.k))
        out.append(cell)
    return out


def _replicate_star(args):
    return _replicate(*args)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> MiseReport:
    """Mean ISE, mean negative-weight share and mean k per (estimator, level).

    A cell whose replication failed (fewer than two exceedances, degenerate
    angles, infeasible empirical likelihood) is skipped and counted. When more
    than half the replications of a cell are skipped its statistics are NaN.
    """
    n_workers = resolve_workers(cfg.workers if workers is None else workers)
    jobs = [(cfg, r) for r in range(cfg.replications)]
    if n_workers == 1 or cfg.replications == 1:
        results = map(_replicate_star, jobs)
        return _reduce(cfg, results)
    chunk = max(1, cfg.replications // (4 * n_workers))
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return _reduce(cfg, pool.map(_replicate_star, jobs, chunksize=chunk))


def _reduce(cfg: ExperimentConfig, results) -> MiseReport:
    n_lv, n_est = len(cfg.threshold_levels), len(cfg.estimators)
    sums = np.zeros((n_lv, n_est, 3))
    used = np.zeros((n_lv, n_est), dtype=int)
    for rep_result in results:
        for i, cell in enumerate(rep_result):
            for j, val in enumerate(cell):
                if val is not None:
                    sums[i, j] += val
                    used[i, j] += 1
    rows = []
    for j, kind in enumerate(cfg.estimators):
        for i, level in enumerate(cfg.threshold_levels):
            skipped = cfg.replications - used[i, j]
            if used[i, j] == 0 or skipped > 0.5 * cfg.replications:
                stats = (float("nan"),) * 3
            else:
                stats = tuple(float(v) for v in sums[i, j] / used[i, j])
            rows.append(MiseRow(kind, level, *stats, cells_skipped=int(skipped),
                                cells_used=int(used[i, j])))
    return MiseReport(rows)
