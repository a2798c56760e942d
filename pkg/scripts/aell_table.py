"""Compare the A_ell graph sum with the closed series form over a grid and print a table.

    python scripts/aell_table.py --ells 1 2 --max-genus 3 --degrees 1 2 --max-n 4
"""

import argparse
import itertools
import time

from drx.aell import AellData, positive_roots, reduced_dr_invariant_closed, reduced_dr_invariant_graphsum
from drx.exact import format_rational


def balanced(n, bound):
    for head in itertools.product(range(-bound, bound + 1), repeat=n - 1):
        last = -sum(head)
        if abs(last) <= bound:
            yield head + (last,)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--ells", type=int, nargs="+", default=[1, 2])
    p.add_argument("--max-genus", type=int, default=3)
    p.add_argument("--degrees", type=int, nargs="+", default=[1, 2])
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--bound", type=int, default=3, help="entries of A range over -bound..bound")
    p.add_argument("--show", type=int, default=3, help="sample values printed per row")
    args = p.parse_args()

    print(f"{'ell':>3} {'g':>2} {'d':>2} {'cases':>7} {'mismatch':>8}  sample values")
    start = time.perf_counter()
    for ell in args.ells:
        for g, d in itertools.product(range(args.max_genus + 1), args.degrees):
            cases = bad = 0
            samples = []
            for alpha in positive_roots(ell):
                data = AellData(ell, alpha)
                for n in range(1, args.max_n + 1):
                    for A in balanced(n, args.bound):
                        for idx in itertools.product(range(ell), repeat=n):
                            omegas = [data.simple_root_dual(i) for i in idx]
                            lhs = reduced_dr_invariant_graphsum(data, g, d, A, omegas)
                            rhs = reduced_dr_invariant_closed(data, g, d, A, omegas)
                            cases += 1
                            bad += lhs != rhs
                            if lhs and len(samples) < args.show:
                                samples.append(f"A={A}:{format_rational(lhs)}")
            print(f"{ell:>3} {g:>2} {d:>2} {cases:>7} {bad:>8}  {' '.join(samples)}")
    print(f"total time {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
