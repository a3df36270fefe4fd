#!/usr/bin/env python3
"""Sweep the circle, tail and Rouche bounds over ordered (q2, q3, q4) cells in [3, 4).

Writes one CSV row per cell; the exit status is 1 if any cell fails.
"""
import argparse
import csv
import sys
from fractions import Fraction

from lpcert.certify import rouche_margin, s4_circle_min, tail_bound_r5


def cells(steps: int):
    vals = [3 + Fraction(i, steps) for i in range(steps)]
    for i, q2 in enumerate(vals):
        for j in range(i, steps):
            for q4 in vals[j:]:
                yield q2, vals[j], q4


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20, help="grid points per axis")
    ap.add_argument("--circle-mesh", type=int, default=256)
    ap.add_argument("--tail-mesh", type=int, default=128)
    ap.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = ap.parse_args()

    w = csv.writer(args.out, lineterminator="\n")
    w.writerow(["q2", "q3", "q4", "circle_bound", "circle_min", "circle_exact",
                "tail_bound", "tail_max", "margin"])
    bad = total = 0
    for q2, q3, q4 in cells(args.steps):
        c = s4_circle_min(q2, q3, q4, mesh=args.circle_mesh)
        t = tail_bound_r5(q2, q3, q4, mesh=args.tail_mesh)
        m = rouche_margin(q2, q3, q4)
        total += 1
        bad += not (c.holds and t.holds and m > 0)
        w.writerow([q2, q3, q4, f"{float(c.bound):.12g}", f"{c.sampled_min:.12g}", c.exact,
                    f"{float(t.bound):.12g}", f"{t.sampled_max:.12g}", f"{float(m):.12g}"])
    print(f"{total} cells, {bad} failing", file=sys.stderr)
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
