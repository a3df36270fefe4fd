#!/usr/bin/env python3
"""Print the section constants c_n, the q_inf bracket and the first spectrum points.

    python3 scripts/reproduce_constants.py --n-max 12 --tol 1e-12 --csv-dir out/
"""
import argparse
import time
from fractions import Fraction
from pathlib import Path

from lpcert.theta import cn_table_csv, compute_cn_sweep, estimate_qinf, spectrum, spectrum_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--tol", default="1e-12")
    ap.add_argument("--k-max", type=int, default=3)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--csv-dir", type=Path, help="also write cn.csv and spectrum.csv here")
    args = ap.parse_args()
    tol = Fraction(args.tol)

    t = time.perf_counter()
    consts = compute_cn_sweep(range(2, args.n_max + 1), tol, jobs=args.jobs)
    for c in consts:
        print(f"c_{c.n:<3d} [{float(c.c_n.lo):.15f}, {float(c.c_n.hi):.15f}]")
    q = estimate_qinf(max(args.n_max, 5), tol, args.jobs)
    print(f"q_inf in [{float(q.bracket.lo):.15f}, {float(q.bracket.hi):.15f}]  (c_{q.odd.n} .. c_{q.even.n})")
    pts = spectrum(args.k_max, tol)
    for p in pts:
        print(f"a~_{p.k} = {float(p.a_tilde.mid):.15f}   a~^2 = {float(p.a2.mid):.15f}   certified {p.certified}")
    print(f"{time.perf_counter() - t:.1f}s")

    if args.csv_dir:
        args.csv_dir.mkdir(parents=True, exist_ok=True)
        (args.csv_dir / "cn.csv").write_text(cn_table_csv(consts), encoding="utf-8")
        (args.csv_dir / "spectrum.csv").write_text(spectrum_csv(pts), encoding="utf-8")


if __name__ == "__main__":
    main()
