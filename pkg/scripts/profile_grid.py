#!/usr/bin/env python3
"""Sweep the exact (t, r_M) success-probability grid over the built-in instances.

Writes one CSV row per grid cell, plus a per-instance summary of the grid
average against the recorded 1/log2(T) scaling.
"""
import argparse
import csv
import math
import sys

from walksearch import electric
from walksearch.graph_core import build_chain, chain_to_graph
from walksearch.instances import suite_instances
from walksearch.search import SearchConfig, success_probability_profile


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="profile_grid.csv")
    parser.add_argument("--horizon-factor", type=float, default=4.0,
                        help="T as a multiple of the gadget commute quantity")
    parser.add_argument("--max-T", type=int, default=512)
    args = parser.parse_args()

    rows = []
    for prob in suite_instances():
        marked = sorted(prob.marked)
        g = chain_to_graph(prob.chain)
        C = electric.commute_quantity(g, prob.sigma, marked)
        mod = electric.build_modified_graph(g, prob.sigma, marked, C)
        chain = build_chain(mod.graph)
        c_prime = electric.commute_quantity(mod.graph, mod.sigma_prime, mod.marked_prime)
        T = min(args.max_T, 2 * math.ceil(args.horizon_factor * c_prime / 2))
        cfg = SearchConfig(T=T)
        prof = success_probability_profile(chain, mod.start_support, sorted(mod.marked_prime), cfg)
        for (t, r_M), value in sorted(prof.values.items()):
            rows.append([prob.name, T, t, r_M, repr(value)])
        print(f"{prob.name:16s} T={T:5d} grid_avg={prof.average:.6f} "
              f"avg*log2(T)={prof.average * math.log2(T):.4f}")

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["instance", "T", "t", "r_M", "value"])
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
