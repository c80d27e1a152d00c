#!/usr/bin/env python3
"""Emit the data grids behind the three monogamy-score figures and,
optionally, render quick-look plots.

Usage:
    python scripts/reproduce_figures.py --outdir results/figures [--plot]

Figure 1: GHZ(3) + white noise, negativity and log-negativity, r = 1 and 2.
Figure 2: same for W(3); log-negativity starts non-monogamous at r = 1.
Figure 3: W(3) at p = 0, log-negativity score against the exponent; the
zero crossing sits near r = 1.06.
"""

import argparse
import csv
import os
import sys

from monolab import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="figures", help="output directory")
    parser.add_argument("--plot", action="store_true", help="also write PNGs (needs matplotlib)")
    args = parser.parse_args()

    os.makedirs(args.outdir, exist_ok=True)
    paths = {}
    for fid in (1, 2, 3):
        out = os.path.join(args.outdir, f"figure{fid}.csv")
        code = cli.main(["figure", str(fid), "--out", out])
        if code != 0:
            print(f"figure {fid} failed with exit code {code}", file=sys.stderr)
            return code
        paths[fid] = out
        print(f"wrote {out} (+ sidecar .meta.json)")

    if args.plot:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not available; skipping plots", file=sys.stderr)
            return 0
        for fid in (1, 2):
            with open(paths[fid], newline="") as f:
                rows = list(csv.DictReader(f))
            fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharex=True)
            for ax, r in zip(axes, ("1", "2")):
                for measure, marker in (("negativity", "*"), ("lognegativity", "+")):
                    pts = [
                        (float(row["p"]), float(row["delta"]))
                        for row in rows
                        if row["measure"] == measure and float(row["r"]) == float(r)
                    ]
                    ax.plot(*zip(*pts), marker, label=measure, markersize=4)
                ax.axhline(0.0, color="gray", lw=0.5)
                ax.set_xlabel("p")
                ax.set_title(f"r = {r}")
            axes[0].set_ylabel("monogamy score")
            axes[0].legend(fontsize=8)
            png = os.path.join(args.outdir, f"figure{fid}.png")
            fig.tight_layout()
            fig.savefig(png, dpi=150)
            print(f"wrote {png}")
        with open(paths[3], newline="") as f:
            rows = list(csv.DictReader(f))
        fig, ax = plt.subplots(figsize=(5, 3.5))
        pts = [(float(row["r"]), float(row["delta"])) for row in rows]
        ax.plot(*zip(*pts), "-")
        ax.axhline(0.0, color="gray", lw=0.5)
        ax.set_xlabel("r")
        ax.set_ylabel("monogamy score")
        png = os.path.join(args.outdir, "figure3.png")
        fig.tight_layout()
        fig.savefig(png, dpi=150)
        print(f"wrote {png}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
