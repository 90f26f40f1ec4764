"""CSV ingestion and curve-table output.

Files are written to a temporary sibling and renamed into place, so a failed
command never leaves a half-written file behind.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import InputError
from .margins import BivariateSample

__all__ = ["CurveTable", "ingest_csv", "write_sample_csv", "atomic_write_text", "write_outputs"]


@dataclass
class CurveTable:
    """Named columns of equal length; the first column is the grid."""

    name: str
    columns: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = {k: np.asarray(v, dtype=float) for k, v in self.columns.items()}
        lengths = {v.size for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns of {self.name} differ in length: {sorted(lengths)}")
        if self.columns:
            grid = next(iter(self.columns.values()))
            if np.any(np.diff(grid) <= 0.0):
                raise ValueError(f"grid column of {self.name} is not strictly increasing")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        names = list(self.columns)
        writer.writerow(names)
        for row in zip(*(self.columns[n] for n in names)):
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_outputs(out_dir, files: dict) -> list:
    """Write ``{filename: text}`` atomically; everything is rendered beforehand."""
    out_dir = Path(out_dir)
    written = []
    for name, text in files.items():
        atomic_write_text(out_dir / name, text)
        written.append(out_dir / name)
    return written


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def ingest_csv(path, col_x: str, col_y: str, na_policy: str = "drop") -> tuple[BivariateSample, dict]:
    """Read two numeric columns from a headed, comma-separated UTF-8 file.

    Returns the sample and a small report ``{"rows_read", "rows_dropped", "n"}``.
    With ``na_policy="drop"`` rows missing either value are removed; with
    ``"strict"`` any missing value is an error.
    """
    if na_policy not in ("drop", "strict"):
        raise InputError(f"na_policy must be 'drop' or 'strict', got {na_policy!r}")
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input file not found: {path}")
    try:
        df = pd.read_csv(path, sep=",", encoding="utf-8", decimal=".", float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot parse {path}: {exc}") from None
    for col in (col_x, col_y):
        if col not in df.columns:
            raise InputError(f"column {col!r} not in {path} (have {list(df.columns)})")
    sub = df[[col_x, col_y]].apply(pd.to_numeric, errors="coerce")
    bad = sub.isna().any(axis=1)
    if bad.any() and na_policy == "strict":
        raise InputError(f"{int(bad.sum())} row(s) with missing or non-numeric values in {path}")
    sub = sub[~bad]
    if sub.empty:
        raise InputError(f"no usable rows in {path}")
    sample = BivariateSample(sub[col_x].to_numpy(float), sub[col_y].to_numpy(float))
    report = {"rows_read": int(len(df)), "rows_dropped": int(bad.sum()), "n": len(sample)}
    return sample, report


def write_sample_csv(path, sample: BivariateSample, col_x: str = "x", col_y: str = "y") -> None:
    table = [[col_x, col_y]] + [[repr(float(a)), repr(float(b))] for a, b in zip(sample.x, sample.y)]
    atomic_write_text(path, "".join(",".join(r) + "\n" for r in table))
