"""Covering-number dimension of a Cantor sample under d and under d^a."""
import argparse

from fractalkit.cantor import CantorSpec, cantor_sample
from fractalkit.measure import covering_counts, dimension_fit
from fractalkit.metric import FiniteMetricSpace, with_snowflake


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=10)
    ap.add_argument("--exponents", default="0.3,0.5,0.8,1.0")
    args = ap.parse_args()
    sp = FiniteMetricSpace.euclidean(cantor_sample(CantorSpec.constant(1 / 3), args.depth))
    scales = [3.0 ** -j for j in range(1, args.depth - 1)]
    base = dimension_fit(scales, covering_counts(sp, sp.all(), scales)).slope
    print("a,slope,base_over_a")
    for a in map(float, args.exponents.split(",")):
        sf = with_snowflake(sp, a)
        sa = [s ** a for s in scales]
        slope = dimension_fit(sa, covering_counts(sf, sf.all(), sa)).slope
        print(f"{a},{slope:.6f},{base / a:.6f}")


if __name__ == "__main__":
    main()
