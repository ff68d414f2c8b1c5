"""Power-law classification-error curve err(S) = a * S**-b.

This is the curve behind the participation game's reward pool: the pool
pays alpha * (1 - err(S)) for total contributed data S.  Fitting is plain
least squares on (ln S, ln err) — a power law is a line in log space — so
the fit is closed-form, deterministic, and exact on exact data.  The
reported goodness of fit is R^2 in log space.

The shipped default constants (a=13.2, b=0.7) describe a small-CNN MNIST
error curve; refit for anything else.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateFitError, UsageError


@dataclass(frozen=True)
class ErrorCurve:
    a: float
    b: float
    fit_r2: float | None = None  # present only on fitted curves

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise UsageError("power-law coefficients must be >= 0")


DEFAULT_CURVE = ErrorCurve(a=13.2, b=0.7)


def predict_error(size: float, curve: ErrorCurve = DEFAULT_CURVE) -> float:
    if size <= 0:
        raise UsageError(f"size must be > 0, got {size}")
    return curve.a * size ** (-curve.b)


def fit_power_law(points: Sequence[tuple[float, float]]) -> ErrorCurve:
    """Least-squares fit of a * S**-b through (size, error) samples.

    Sizes and errors must be strictly positive (the fit lives in log
    space), and at least two distinct sizes are needed to pin down a slope.
    """
    if len(points) < 2:
        raise UsageError("need at least two points to fit a curve")
    sizes = np.array([p[0] for p in points], dtype=float)
    errs = np.array([p[1] for p in points], dtype=float)
    if (sizes <= 0).any() or (errs <= 0).any():
        raise UsageError("sizes and errors must all be > 0")
    if np.unique(sizes).size < 2:
        raise DegenerateFitError("all samples share one size; slope is unidentifiable")

    ln_s = np.log(sizes)
    ln_e = np.log(errs)
    slope, intercept = np.polyfit(ln_s, ln_e, 1)
    fitted = slope * ln_s + intercept
    ss_res = float(np.sum((ln_e - fitted) ** 2))
    ss_tot = float(np.sum((ln_e - ln_e.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 and ss_res <= 1e-30 else 1.0 - ss_res / max(ss_tot, 1e-300)
    # error growing with size gives b < 0, which ErrorCurve itself rejects
    return ErrorCurve(a=math.exp(float(intercept)), b=-float(slope),
                      fit_r2=max(min(r2, 1.0), 0.0))


def load_points_csv(path: str | Path) -> list[tuple[float, float]]:
    """Read (size, error) samples from a two-column CSV.

    A header row is detected by its non-numeric first field and skipped.
    """
    points = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise UsageError(f"cannot read points file {path}: {exc}")
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < 2 or any(cell.strip() for cell in row[2:]):
                raise UsageError(f"{path}:{lineno}: expected two columns, got {len(row)}")
            try:
                size, err = float(row[0]), float(row[1])
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise UsageError(f"{path}:{lineno}: non-numeric sample {row[:2]!r}")
            points.append((size, err))
    if not points:
        raise UsageError(f"{path}: no samples found")
    return points
