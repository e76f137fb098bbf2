#!/usr/bin/env python3
"""Plot the curve CSVs a run directory emits.

The toolkit itself only writes plain data series; this stub turns one
dataset directory (runs/<run>/datasets/<name>/) into three PNGs: LCC and
efficiency against the removal ratio, and spreading ability against time.

Usage: python scripts/plot_curves.py runs/<run>/datasets/<name> [out_dir]
"""

import csv
import sys
from pathlib import Path


def read_xy(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    xs = [float(r[0]) for r in rows[1:]]
    ys = [float(r[1]) for r in rows[1:]]
    return xs, ys


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 1
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ds_dir = Path(sys.argv[1])
    out_dir = Path(sys.argv[2]) if len(sys.argv) > 2 else ds_dir
    panels = (("lcc", "removal ratio r", "LCC"),
              ("efficiency", "removal ratio r", "efficiency"),
              ("spread", "time t", "F(t)"))
    for prefix, xlabel, ylabel in panels:
        files = sorted(ds_dir.glob(f"{prefix}_*.csv"))
        if not files:
            continue
        fig, ax = plt.subplots(figsize=(7, 5))
        for path in files:
            method = path.stem[len(prefix) + 1:]
            xs, ys = read_xy(path)
            ax.plot(xs, ys, label=method, linewidth=1.2)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend(fontsize=8, ncol=2)
        fig.tight_layout()
        target = out_dir / f"{prefix}.png"
        fig.savefig(target, dpi=150)
        print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
