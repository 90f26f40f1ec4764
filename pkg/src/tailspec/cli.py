"""Command line interface.

Exit codes: 0 success, 2 input error (bad flags, files, columns, config),
3 numerical failure (degenerate or infeasible data, solver failure).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import estimators as est_mod
from . import smoothing
from .diagnostics import bootstrap_band, chi_curve, chibar_curve
from .errors import InputError, NumericalError
from .estimators import EstimatorKind
from .experiment import ExperimentConfig, run_experiment
from .io import CurveTable, dumps_json, ingest_csv, write_outputs
from .margins import pseudo_polar, rank_transform, select_exceedances
from .models import AsyLogisticModel, asym_logistic_atoms, asym_logistic_spectral_density

log = logging.getLogger("tailspec")

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3

_COLUMN = {
    EstimatorKind.EMPIRICAL: "H_dot",
    EstimatorKind.EUCLIDEAN: "H_hat",
    EstimatorKind.EMPIRICAL_LIKELIHOOD: "H_ddot",
}
_SMOOTH_PREFERENCE = (
    EstimatorKind.EUCLIDEAN,
    EstimatorKind.EMPIRICAL_LIKELIHOOD,
    EstimatorKind.EMPIRICAL,
)


def _estimator_list(text: str) -> list:
    kinds = []
    for part in text.split(","):
        if part.strip():
            kind = EstimatorKind.parse(part)
            if kind not in kinds:
                kinds.append(kind)
    if not kinds:
        raise InputError("no estimator given")
    return kinds


def _nu_arg(text: str):
    if text == "auto":
        return text
    try:
        nu = float(text)
    except ValueError:
        raise InputError(f"--nu must be 'auto' or a positive number, got {text!r}") from None
    if not nu > 0.0:
        raise InputError("--nu must be positive")
    return nu


def cmd_fit(args) -> dict:
    kinds = _estimator_list(args.estimator)
    if args.grid < 2:
        raise InputError("--grid must be at least 2")
    nu_arg = _nu_arg(args.nu) if args.smooth else None
    sample, ingest = ingest_csv(args.input, args.x, args.y, args.na_policy)
    pp = pseudo_polar(*rank_transform(sample))
    angles = select_exceedances(pp, args.level)

    fits = {}
    summary = {
        "n": ingest["n"],
        "rows_dropped": ingest["rows_dropped"],
        "level": args.level,
        "k": angles.k,
        "threshold": angles.threshold,
        "estimators": {},
    }
    for kind in kinds:
        if kind is EstimatorKind.EMPIRICAL_LIKELIHOOD:
            sol = est_mod.el_weights(angles)
            fit = est_mod.SpectralEstimate(angles.w, sol.weights, kind)
            extra = {"lambda": sol.lam, "iterations": sol.iterations}
        else:
            fit = est_mod.estimate(angles, kind)
            extra = {}
        fits[kind] = fit
        summary["estimators"][kind.value] = {
            "weights_min": float(fit.weights.min()),
            "neg_weight_count": int(np.count_nonzero(fit.weights < 0.0)),
            "all_weights_positive": bool(np.all(fit.weights > 0.0)),
            "constraint_residuals": {
                "sum": float(fit.weights.sum() - 1.0),
                "mean": est_mod.mean_constraint_residual(fit),
            },
            **extra,
        }
    first = summary["estimators"][kinds[0].value]
    summary.update(
        weights_min=first["weights_min"],
        neg_weight_count=first["neg_weight_count"],
        all_weights_positive=first["all_weights_positive"],
        constraint_residuals={k: v["constraint_residuals"] for k, v in summary["estimators"].items()},
        nu=None,
    )

    grid = np.linspace(0.0, 1.0, args.grid)
    curves = {"w": grid}
    for kind in kinds:
        curves[_COLUMN[kind]] = est_mod.spectral_cdf(fits[kind], grid)
    files = {}

    if args.smooth:
        source = next(k for k in _SMOOTH_PREFERENCE if k in fits)
        if nu_arg == "auto":
            nu = smoothing.cv_concentration(fits[source])
        else:
            nu = nu_arg
        sm = smoothing.smooth(fits[source], nu)
        curves["H_smooth"] = smoothing.smooth_cdf(sm, grid)
        curves["A_tilde"] = smoothing.pickands(sm, grid)
        interior = (np.arange(args.grid) + 0.5) / args.grid
        dens = {"w": interior, "h_smooth": smoothing.smooth_density(sm, interior)}
        if args.asylog:
            model = AsyLogisticModel(*args.asylog)
            dens["h_asylog"] = asym_logistic_spectral_density(model, interior)
            summary["asylog_atoms"] = list(asym_logistic_atoms(model))
        files["density.csv"] = CurveTable("density", dens).to_csv()
        summary.update(nu=nu, smooth_source=source.value,
                       density_min=smoothing.density_floor(sm))

    files["curves.csv"] = CurveTable("curves", curves).to_csv()
    weights = ["index,w," + ",".join("p_" + _COLUMN[k][2:] for k in kinds)]
    for i, w in enumerate(angles.w):
        weights.append(",".join([str(i), repr(float(w))] +
                                [repr(float(fits[k].weights[i])) for k in kinds]))
    files["weights.csv"] = "\n".join(weights) + "\n"
    files["summary.json"] = dumps_json(summary)
    write_outputs(args.out, files)
    return summary


def cmd_simulate(args):
    path = Path(args.config)
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise InputError("config must be a JSON object")
    if args.workers is not None:
        raw["workers"] = args.workers
    cfg = ExperimentConfig.from_dict(raw)
    report = run_experiment(cfg)
    resolved = dumps_json(cfg.to_dict())
    write_outputs(args.out, {"mise.csv": report.to_csv(), "config.resolved.json": resolved})
    sys.stdout.write(resolved)
    return report


def cmd_diagnose(args) -> CurveTable:
    if args.u_num < 1:
        raise InputError("empty u grid (--u-num must be >= 1)")
    if not 0.0 < args.u_min <= args.u_max < 1.0:
        raise InputError("u grid must satisfy 0 < u-min <= u-max < 1")
    grid = np.linspace(args.u_min, args.u_max, args.u_num)
    if np.any(np.diff(grid) <= 0.0):
        raise InputError("u grid is not strictly increasing")
    sample, _ = ingest_csv(args.input, args.x, args.y, args.na_policy)
    cols = {"u": grid}
    for name, fn in (("chi", chi_curve), ("chibar", chibar_curve)):
        cols[name] = fn(sample, grid)
        lo, hi = bootstrap_band(sample, name, grid, level=args.conf, B=args.B, seed=args.seed)
        cols[name + "_lo"], cols[name + "_hi"] = lo, hi
    table = CurveTable("diagnostics", cols)
    write_outputs(args.out, {"diagnostics.csv": table.to_csv()})
    return table


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailspec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p):
        p.add_argument("--input", required=True, help="CSV file with a header row")
        p.add_argument("--x", required=True, help="first column name")
        p.add_argument("--y", required=True, help="second column name")
        p.add_argument("--na-policy", choices=("drop", "strict"), default="drop")
        p.add_argument("--out", required=True, help="output directory")

    fit = sub.add_parser("fit", help="estimate the spectral measure of a bivariate series")
    data_args(fit)
    fit.add_argument("--level", type=float, default=0.98, help="radius quantile level")
    fit.add_argument("--estimator", default="euclidean,el,empirical",
                     help="comma list of empirical, euclidean, el")
    fit.add_argument("--smooth", action="store_true", help="add Beta-kernel smoothed curves")
    fit.add_argument("--nu", default="auto", help="concentration, or 'auto' for cross-validation")
    fit.add_argument("--grid", type=int, default=512, help="number of evaluation points")
    fit.add_argument("--asylog", type=float, nargs=3, metavar=("ALPHA", "PSI1", "PSI2"),
                     help="overlay an asymmetric logistic density (with --smooth)")
    fit.set_defaults(func=cmd_fit)

    sim = sub.add_parser("simulate", help="run the Monte Carlo MISE experiment")
    sim.add_argument("--config", required=True, help="JSON experiment configuration")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--workers", type=int, default=None,
                     help="worker processes (capped by TAILSPEC_THREADS)")
    sim.set_defaults(func=cmd_simulate)

    diag = sub.add_parser("diagnose", help="chi and chibar curves with bootstrap bands")
    data_args(diag)
    diag.add_argument("--u-min", type=float, default=0.5)
    diag.add_argument("--u-max", type=float, default=0.99)
    diag.add_argument("--u-num", type=int, default=50)
    diag.add_argument("--B", type=int, default=1000, help="bootstrap resamples")
    diag.add_argument("--conf", type=float, default=0.95, help="pointwise confidence level")
    diag.add_argument("--seed", type=int, default=0)
    diag.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except InputError as exc:
        print(f"tailspec: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"tailspec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
