"""Both gamma formula paths on Schwarzschild-Tangherlini metrics, point by point."""

import argparse
from fractions import Fraction

from gjmslab.catalog import builtin
from gjmslab.curvature import curvature_at
from gjmslab.green import gamma_gjms, gamma_power_laplacian


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", default="5,6,7,8")
    ap.add_argument("--points", type=int, default=3)
    ap.add_argument("--r0", type=float, default=1.0)
    args = ap.parse_args()
    print(f"{'n':>2} {'k':>4} {'pt':>3} {'gamma_gjms':>24} {'gamma_Delta^k':>24} {'diff/pref':>9}")
    for n in (int(x) for x in args.dims.split(",")):
        e = builtin("schwarzschild_tangherlini", n, {"r0": args.r0}, points=args.points)
        ks = [Fraction(n, 2) - j for j in range(4) if Fraction(n, 2) - j > 0]
        for i, p in enumerate(e.safe_points):
            b = curvature_at(e.field, p, 6 if n - 2 * min(ks) == 6 else 4)
            for k in ks:
                rf = n - 2 * k == 6
                gc = gamma_gjms(k, b)
                gh = gamma_power_laplacian(k, b, ricci_flat_mode=rf)
                d = abs(gc.value - gh.value) / gc.coefficient  # zero targets occur at weight 2
                print(f"{n:>2} {str(k):>4} {i:>3} {gc.value:>24.16e} {gh.value:>24.16e} {d:>9.1e}")


if __name__ == "__main__":
    main()
