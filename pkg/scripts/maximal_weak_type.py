"""How close random monotone functions come to the weak-type maximal bound."""
import argparse

import numpy as np

from fractalkit.realline import MonotoneFn, maximal_superlevel


def random_mu(rng, k):
    xs = np.sort(rng.uniform(-5, 5, k))
    nodes, y = [], 0.0
    for x in xs:
        y += rng.exponential() * (rng.random() < 0.5)
        jump = rng.exponential() * (rng.random() < 0.5)
        nodes.append((x, y, y + jump))
        y += jump
    if nodes[-1][2] == nodes[0][1]:
        x, lo, hi = nodes[-1]
        nodes[-1] = (x, lo, hi + 1.0)
    return MonotoneFn.from_nodes(nodes)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print("t,mean_ratio,max_ratio")
    for t in (0.25, 0.5, 1.0, 2.0, 4.0):
        ratios = []
        for _ in range(args.trials):
            s = maximal_superlevel(random_mu(rng, int(rng.integers(1, 8))), t)
            ratios.append(s.length / s.bound)
        print(f"{t},{np.mean(ratios):.4f},{np.max(ratios):.4f}")


if __name__ == "__main__":
    main()
