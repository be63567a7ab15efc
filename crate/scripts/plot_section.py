#!/usr/bin/env python3
"""Plot cross-section CSVs produced by `doa section` (and optionally overlay
trajectories from `doa simulate`).

Example:
    doa initial-roa --system two_machine --depth 80 --out tm.doa.json
    for k in 0 30 60 80; do
        doa section tm.doa.json --depth $k --axes 0 1 \
            --range -1 1 -0.5 0.5 --res 201 201 --out tm_k$k.csv
    done
    doa simulate --system two_machine --x0 "1,-0.2" --steps 400 --out traj.csv
    python3 scripts/plot_section.py tm_k*.csv --traj traj.csv --out regions.png
"""
import argparse

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def load_section(path):
    frame = pd.read_csv(path)
    ni = frame["i"].max() + 1
    nj = frame["j"].max() + 1
    member = frame["member"].to_numpy().reshape(ni, nj)
    xs = frame["x_i"].to_numpy().reshape(ni, nj)
    ys = frame["x_j"].to_numpy().reshape(ni, nj)
    return xs, ys, member


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("sections", nargs="+", help="section CSV files (shallow to deep)")
    parser.add_argument("--traj", action="append", default=[], help="trajectory CSV to overlay")
    parser.add_argument("--out", default="sections.png")
    args = parser.parse_args()

    fig, ax = plt.subplots(figsize=(7, 5))
    colors = plt.cm.Blues(np.linspace(0.35, 0.9, len(args.sections)))
    for path, color in zip(args.sections, colors[::-1]):
        xs, ys, member = load_section(path)
        ax.contourf(xs, ys, member, levels=[0.5, 1.5], colors=[color], alpha=0.7)
        ax.contour(xs, ys, member, levels=[0.5], colors=[color], linewidths=0.8)

    for path in args.traj:
        frame = pd.read_csv(path)
        state_cols = [c for c in frame.columns if c.startswith("x")][:2]
        ax.plot(frame[state_cols[0]], frame[state_cols[1]], lw=1.2)
        ax.plot(frame[state_cols[0]].iloc[0], frame[state_cols[1]].iloc[0], "o", ms=4)

    ax.set_xlabel("first section axis")
    ax.set_ylabel("second section axis")
    ax.set_title("certified regions (darker = deeper)")
    fig.tight_layout()
    fig.savefig(args.out, dpi=160)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
