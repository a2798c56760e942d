"""Print genus-one DR classes for A = (a, -a) and check that psi coefficients scale as a^2.

    python scripts/genus_one_dr.py --max-a 4
"""

import argparse
from fractions import Fraction

from drx.graphs import StableGraph
from drx.oracle import naive_P_constant
from drx.graphsum import compute_DR
from drx.strata import Decoration, render_class
from drx.target import TargetModel
from drx.weightings import default_r_min


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-a", type=int, default=4)
    p.add_argument("--oracle", action="store_true", help="also compare with the naive path")
    args = p.parse_args()

    point = TargetModel.point()
    smooth = StableGraph.smooth(1, 2)
    psi1 = Decoration(((1, 0), (0, 0)), (), (), ((),))
    for a in range(1, args.max_a + 1):
        A = (a, -a)
        dr = compute_DR(1, A, (), point)
        print(f"DR_1{A}:")
        print(render_class(dr))
        coeff = dr.coefficient(smooth, psi1)
        print(f"  psi_1 coefficient {coeff}, a^2/2 = {Fraction(a * a, 2)}, match={coeff == Fraction(a * a, 2)}")
        if args.oracle:
            naive = naive_P_constant(1, A, (), point, 1, r0=default_r_min(A, point, ()))
            print(f"  naive path agrees: {naive == dr}")


if __name__ == "__main__":
    main()
