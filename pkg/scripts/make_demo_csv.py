#!/usr/bin/env python3
"""Regenerate data/error_curve_demo.csv from the package's default curve.

The file is a noiseless sample of the default power-law error curve, stored
at full float precision so `fedpart fit-error` recovers (a, b) exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from fedpart.error_model import DEFAULT_CURVE, predict_error

TARGET = Path(__file__).resolve().parent.parent / "data" / "error_curve_demo.csv"


def main() -> None:
    sizes = np.round(np.logspace(1, 5, 25)).astype(int)
    lines = ["size,error"]
    for s in sizes:
        lines.append(f"{s},{predict_error(float(s), DEFAULT_CURVE)!r}")
    TARGET.parent.mkdir(parents=True, exist_ok=True)
    TARGET.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {TARGET} ({len(sizes)} points, a={DEFAULT_CURVE.a}, b={DEFAULT_CURVE.b})")


if __name__ == "__main__":
    main()
