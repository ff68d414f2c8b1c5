#!/usr/bin/env python3
"""Sweep every mechanism parameter over its default grid and write CSVs.

One CSV per axis (theta, a_d, b_d, a_e, b_e, sigma, rho, s0, r0), each row
carrying the negotiated report s*, reward r*, both maximized utilities, the
acceptance flag, and the truthful-report check for that parameter point.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from fedpart.harness.config import ExperimentConfig
from fedpart.harness.sweeps import MECH_AXES, render_csv, sweep

REPO = Path(__file__).resolve().parent.parent


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=REPO / "out",
                    help="output directory (default: ./out)")
    ap.add_argument("--axes", nargs="*", default=list(MECH_AXES),
                    help="subset of axes to sweep (default: all)")
    args = ap.parse_args()

    cfg = ExperimentConfig()
    args.out.mkdir(parents=True, exist_ok=True)
    for axis in args.axes:
        header, rows = sweep(cfg, axis=axis)
        target = args.out / f"mechanism_{axis}.csv"
        target.write_text(render_csv(header, rows), encoding="utf-8")
        print(f"wrote {target} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
