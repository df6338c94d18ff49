"""
Companion plotting script for the CSV the CLI writes. Not part of the CLI.

    python main.py thresholds --n 6 --x-grid 1.1 1.5 2 3 4 -o thresholds.csv
    python plot_csv.py thresholds.csv thresholds.png

    python main.py scan-eof --n 6 --x-grid 1.5 2 3 --d-grid 0 0.5 1 2 3 -o eof.csv
    python plot_csv.py eof.csv eof.png

A thresholds file gives one curve s_k(x) per separation k; a scan-eof file
gives E_F against d, one panel per x and one curve per separation.
"""

import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_rows(path: Path) -> list[dict[str, str]]:
    with path.open(newline="", encoding="utf-8") as stream:
        lines = [line for line in stream if not line.startswith("#")]
    return list(csv.DictReader(lines))


def plot_thresholds(rows: list[dict[str, str]], ax) -> None:
    curves: dict[int, list[tuple[float, float]]] = defaultdict(list)
    for row in rows:
        if row["s_k"]:
            curves[int(row["k"])].append((float(row["x"]), float(row["s_k"])))
    for k, points in sorted(curves.items()):
        xs, ss = zip(*sorted(points), strict=True)
        ax.plot(xs, ss, marker="o", label=f"$s_{k}$")
    ax.set_xlabel("$x$")
    ax.set_ylabel("$s$")
    ax.legend(frameon=False)


def plot_eof(rows: list[dict[str, str]], fig) -> None:
    panels: dict[float, dict[int, list[tuple[float, float]]]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        panels[float(row["x"])][int(row["k"])].append((float(row["d"]), float(row["eof"])))
    axes = fig.subplots(1, len(panels), sharey=True, squeeze=False)[0]
    for ax, (x, curves) in zip(axes, sorted(panels.items()), strict=True):
        for k, points in sorted(curves.items()):
            ds, eofs = zip(*sorted(points), strict=True)
            ax.plot(ds, eofs, label=f"k = {k}")
        ax.set_title(f"x = {x:g}")
        ax.set_xlabel("$d = s - s_{min}$")
    axes[0].set_ylabel("$E_F$ (ebits)")
    axes[0].legend(frameon=False)


def main(argv: list[str]) -> int:
    if len(argv) != 2:
        print(__doc__)
        return 2
    source, target = Path(argv[0]), Path(argv[1])
    rows = read_rows(source)
    if not rows:
        print(f"No data rows in {source}.")
        return 2

    fig = plt.figure(figsize=(7, 3.5))
    if "s_k" in rows[0]:
        plot_thresholds(rows, fig.add_subplot())
    elif "eof" in rows[0] and "d" in rows[0]:
        plot_eof(rows, fig)
    else:
        print(f"{source} is neither a thresholds nor a scan-eof table.")
        return 2
    fig.tight_layout()
    fig.savefig(target, dpi=150)
    print(f"Wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
