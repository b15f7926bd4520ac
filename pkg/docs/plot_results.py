"""Plot the CSV outputs of `busyburst simulate` and `busyburst paths`.

Convenience script, not part of the library: point it at an output
directory and it renders the tail comparison and any path overlays found
there. Requires matplotlib.

    python3 docs/plot_results.py out_dir [--save figure.png]
"""

from __future__ import annotations

import argparse
import csv
import math
from collections import defaultdict
from pathlib import Path

import matplotlib.pyplot as plt


def _read_paths(path: Path) -> dict[str, tuple[list[float], list[float]]]:
    curves: dict[str, tuple[list[float], list[float]]] = defaultdict(lambda: ([], []))
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            label = row.get("label") or row.get("which")
            t = row.get("t") or row.get("i")
            curves[label][0].append(float(t))
            curves[label][1].append(float(row["value"]))
    return curves


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", help="directory written by a busyburst command")
    parser.add_argument("--save", default=None, help="write the figure here instead of showing it")
    args = parser.parse_args()
    out = Path(args.out_dir)

    panels = []
    if (out / "tail.csv").exists():
        panels.append("tail")
    for name in ("extremes.csv", "paths.csv"):
        if (out / name).exists():
            panels.append(name)

    fig, axes = plt.subplots(1, max(len(panels), 1), figsize=(6 * max(len(panels), 1), 4.5))
    if len(panels) <= 1:
        axes = [axes]

    for ax, panel in zip(axes, panels):
        if panel == "tail":
            with open(out / "tail.csv", newline="", encoding="utf-8") as fh:
                rows = [row for row in csv.DictReader(fh) if row["log_p_emp"]]
            sq = [math.sqrt(float(row["b"])) for row in rows]
            ax.plot(sq, [float(row["log_p_emp"]) for row in rows], "o", ms=3, label="empirical")
            ax.plot(sq, [float(row["log_p_pred"]) for row in rows], "-", label="-K sqrt(b)")
            if rows and rows[0]["log_p_pred_shifted"]:
                shifted = [float(row["log_p_pred_shifted"]) for row in rows]
                ax.plot(sq, shifted, "--", label="-K sqrt(b) + kappa")
            ax.set_xlabel("sqrt(b)")
            ax.set_ylabel("log P(B >= b)")
            ax.legend()
        else:
            for label, (t, v) in sorted(_read_paths(out / panel).items()):
                style = "-" if label.endswith("pred") or label.startswith("psi") else "."
                ax.plot(t, v, style, ms=2, label=label)
            ax.set_xlabel("step")
            ax.set_ylabel("level")
            ax.legend()

    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
