#!/usr/bin/env python3
"""Sweep device 0's data size in both 8-device scenarios and write CSVs.

Produces the participation-threshold tables: in the small-peer scenario the
first device flips to participate at s1=100; with large peers the flip moves
to s1=600 and the peers keep the pool alive below it.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from fedpart.harness.config import load_config
from fedpart.harness.sweeps import render_csv, sweep

REPO = Path(__file__).resolve().parent.parent
SCENARIOS = {
    "small_peers": REPO / "configs" / "threshold_small_peers.json",
    "large_peers": REPO / "configs" / "threshold_large_peers.json",
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=REPO / "out",
                    help="output directory (default: ./out)")
    ap.add_argument("--values", type=float, nargs="*",
                    default=[50, 100, 200, 400, 600, 800, 1000])
    ap.add_argument("--timing", action="store_true",
                    help="keep wall-clock columns (breaks byte reproducibility)")
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    for name, cfg_path in SCENARIOS.items():
        cfg = load_config(cfg_path)
        header, rows = sweep(cfg, axis="s1", values=args.values)
        text = render_csv(header, rows, timing=args.timing)
        target = args.out / f"threshold_{name}.csv"
        target.write_text(text, encoding="utf-8")
        print(f"wrote {target} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
