"""Show the fitted r-polynomials behind a constant-term computation and their held-out checks.

    python scripts/polynomiality_report.py --g 2 --A 1,-1
"""

import argparse

from drx.graphs import render_graph
from drx.graphsum import DRRequest, compute_P_constant
from drx.target import TargetModel
from drx.weightings import WeightIntegrand, sum_over_weightings_enum


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--g", type=int, default=2)
    p.add_argument("--A", default="1,-1")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--r-min", type=int, default=None)
    args = p.parse_args()

    A = tuple(int(x) for x in args.A.split(","))
    req = DRRequest(args.g, A, (), TargetModel.point(), args.g if args.degree is None else args.degree)
    diag = []
    compute_P_constant(req, r_min=args.r_min, diagnostics=diag)
    for entry in diag:
        G = entry["graph"]
        F = WeightIntegrand.edge_products(G.num_edges, entry["powers"])
        held = [(r, sum_over_weightings_enum(G, A, req.target, F, r)) for r in entry["held_out"]]
        ok = all(entry["polynomial"](r) == v for r, v in held)
        print(render_graph(G).replace("\n", " "))
        print(f"  powers {entry['powers']}  nodes {entry['nodes'][0]}..{entry['nodes'][-1]}  "
              f"{entry['polynomial']}  held-out {'ok' if ok else 'MISMATCH'}")


if __name__ == "__main__":
    main()
