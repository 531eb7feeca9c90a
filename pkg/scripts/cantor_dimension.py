"""Box-counting dimension of constant-ratio Cantor sets against log 2 / log(1/r)."""
import argparse
import math

from fractalkit.cantor import CantorSpec, cantor_sample
from fractalkit.measure import box_counts, dimension_fit


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratios", default="0.1,0.2,0.25,1/3,0.4,0.45")
    ap.add_argument("--depth", type=int, default=12)
    args = ap.parse_args()
    print("ratio,depth,slope,expected,r_squared")
    for text in args.ratios.split(","):
        num, _, den = text.partition("/")
        r = float(num) / float(den) if den else float(num)
        pts = cantor_sample(CantorSpec.constant(r), args.depth)
        scales = [r ** j for j in range(1, args.depth + 1)]
        fit = dimension_fit(scales, box_counts(pts, scales))
        print(f"{r:.6f},{args.depth},{fit.slope:.6f},{math.log(2) / math.log(1 / r):.6f},{fit.r_squared:.6f}")


if __name__ == "__main__":
    main()
