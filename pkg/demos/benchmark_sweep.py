"""Headline experiment: sweep the middle channel of the six-node chain and
compare all four protocols on usage, rate, and delay.

The full ten-seed sweep takes about a minute; pass a seed count as the first
argument to trade accuracy for speed.

    python demos/benchmark_sweep.py [seeds] [out_dir]
"""

import os
import sys

from acnc import benchmark_config, iter_sweep, summarize
from acnc.cli import plot_csv, write_csv

EPS2 = (0.2, 0.3, 0.4, 0.5, 0.6)


def main():
    seeds = range(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
    out = sys.argv[2] if len(sys.argv) > 2 else "out/benchmark"
    os.makedirs(out, exist_ok=True)
    base = benchmark_config(0.2, 0)
    values = [(0.1, 0.4, e2, 0.3, 0.1) for e2 in EPS2]
    rows = []
    acc = {}
    for (protocol, value, seed), led in iter_sweep(
            base, "erasure_rates", values, seeds):
        row = summarize(led)
        row["eps2"] = value[2]
        rows.append(row)
        acc.setdefault((value[2], protocol), []).append(row)

    print("six-node chain, erasure rates (0.1, 0.4, x, 0.3, 0.1), "
          f"{len(list(seeds))} seeds, 5000 slots")
    print(f"{'eps2':>5} {'protocol':>8} {'U':>6} {'U2':>6} {'goodput':>8} "
          f"{'rate':>7} {'D_mean':>7} {'D_max':>6}")
    for e2 in EPS2:
        for protocol in ("bs", "netfec", "mpmh", "srarq"):
            group = acc[(e2, protocol)]
            m = {k: sum(r[k] for r in group) / len(group)
                 for k in ("U", "U2", "eta", "R_del", "D_mean", "D_max")}
            print(f"{e2:>5} {protocol:>8} {m['U']:>6.3f} {m['U2']:>6.3f} "
                  f"{m['eta']:>8.3f} {m['R_del']:>7.3f} "
                  f"{m['D_mean']:>7.0f} {m['D_max']:>6.0f}")
        print()
    print("reading guide: bs trades ~15-40% of channel usage for the same")
    print("delivery rate as the never-idle variants and a higher goodput;")
    print("node 2's usage saturates once the middle channel becomes the")
    print("global bottleneck (eps2 > 0.4); srarq tracks the worst channel's")
    print("capacity.")

    csv_path = os.path.join(out, "sweep.csv")
    write_csv(rows, csv_path, base.hops)
    plot_csv(csv_path, out)
    print(f"\nCSV and charts written to {out}/")


if __name__ == "__main__":
    main()
