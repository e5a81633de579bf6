"""Residue of the sphere GJMS zeta function at s = 1 versus the mode cutoff L_max."""

import argparse

from gjmslab.catalog import builtin
from gjmslab.curvature import curvature_at
from gjmslab.spectral import compare_residue


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default="2:1,4:2,6:1,6:3,4:1", help="comma-separated n:k pairs")
    ap.add_argument("--lmax", default="200,500,1000,2000")
    args = ap.parse_args()
    cutoffs = [int(x) for x in args.lmax.split(",")]
    print(f"{'n':>2} {'k':>2} {'L_max':>6} {'2k Res':>22} {'int gamma':>22} {'abs err':>10} {'doubling':>10}")
    for item in args.configs.split(","):
        n, k = (int(x) for x in item.split(":"))
        bundle = None
        if n - 2 * k == 4:
            e = builtin("round_sphere_stereographic", n, points=1)
            bundle = curvature_at(e.field, e.safe_points[0], 2)
        for L in cutoffs:
            c = compare_residue(n, k, l_max=L, bundle=bundle)
            print(f"{n:>2} {k:>2} {L:>6} {c.spectral_side:>22.15g} {c.geometric_side:>22.15g} "
                  f"{c.abs_error:>10.2e} {c.residue.error_estimate:>10.2e}")


if __name__ == "__main__":
    main()
