#!/usr/bin/env python3
"""Plot witness-amplitude curves from a sweep or trace CSV.

The CSV comes from `qee sweep-tau` or `qee trace`: a `# key = value` preamble
followed by one row per grid point. This renders |delta| against the swept
axis (tau for sweeps, t for traces), one curve per temperature.

Usage:
    plot_witness.py sweep_tau.csv [-o witness.png] [--log]
"""

import argparse
import csv
import sys
from collections import defaultdict


def read_rows(path):
    """Returns (preamble dict, list of row dicts with float fields)."""
    preamble = {}
    rows = []
    with open(path, newline="") as fh:
        header = None
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line.lstrip("# ").partition(" = ")
                preamble[key] = value
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(dict(zip(header, next(csv.reader([line])))))
    if header is None or not rows:
        sys.exit(f"error: {path} has no data rows")
    return preamble, rows


def main():
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("csv_path", help="sweep or trace CSV produced by qee")
    parser.add_argument("-o", "--out", default="witness.png", help="output image path")
    parser.add_argument("--log", action="store_true", help="logarithmic witness axis")
    args = parser.parse_args()

    preamble, rows = read_rows(args.csv_path)
    command = preamble.get("command", "sweep-tau")
    if command == "sweep-tau":
        x_field, x_label = "tau_ps", "waiting time tau (ps)"
        curve_field, curve_label = "temperature_K", "T = {:g} K"
    else:  # trace and spin-demo scan the readout time, one curve per tau
        x_field, x_label = "t_ps", "readout time t (ps)"
        curve_field, curve_label = ("temperature_K", "T = {:g} K") if command == "trace" \
            else ("tau_ps", "tau = {:g} ps")

    curves = defaultdict(list)
    for row in rows:
        curves[float(row[curve_field])].append(
            (float(row[x_field]), float(row["abs_delta"])))

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        sys.exit("error: matplotlib is required (pip install matplotlib)")

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for key in sorted(curves):
        points = sorted(curves[key])
        ax.plot([p[0] for p in points], [p[1] for p in points],
                label=curve_label.format(key))
    ax.set_xlabel(x_label)
    ax.set_ylabel(r"witness amplitude $|\Delta\rho^{01}|$")
    if args.log:
        ax.set_yscale("log")
    title = {"sweep-tau": "entanglement witness vs waiting time",
             "trace": "entanglement witness vs readout time",
             "spin-demo": "entanglement witness, seeded spin bath"}.get(command, command)
    ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out} ({len(rows)} rows, {len(curves)} curves)")


if __name__ == "__main__":
    main()
