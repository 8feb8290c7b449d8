"""Verify random exact solution families for several generators and weights.

Typed families should pass only at alpha = 1/2; dependent families at every alpha.
"""
import argparse
import math

import numpy as np

from cauchymean import families as fam
from cauchymean import residual as res
from cauchymean.funcmodel import Interval, SamplePlan
from cauchymean.qam import MeanWeights, QuasiArithmeticMean, builtin_generator

WINDOWS = {
    "identity": Interval(-1, 1),
    "ln": Interval(math.exp(-1), math.e),
    "power:2": Interval(0.1, 1),
    "power:-1": Interval(1, 10),
}
FREE = ("sin(3*x) + x^2", "exp(x) - x", "cosh(x)", "sqrt(2 + x)")


def random_spec(case, rng):
    if case == fam.DEPENDENT:
        c = rng.uniform(-3, 3, 3)
        c[0] = c[0] if abs(c[0]) > 0.1 else 1.0
        return fam.FamilySpec(case, dependence=tuple(c), free=FREE[rng.integers(len(FREE))])
    mu = None if case == fam.QUADRATIC else rng.uniform(0.3, 3)
    return fam.FamilySpec(case, tuple(rng.uniform(-3, 3, 3)), tuple(rng.uniform(-3, 3, 3)), mu=mu)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--specs", type=int, default=10)
    ap.add_argument("--samples", type=int, default=61)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.5, 0.3, 0.75])
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'case':<14}{'generator':<10}{'alpha':>7}{'pass':>7}{'worst':>12}")
    for case in fam.CASES:
        specs = [random_spec(case, rng) for _ in range(args.specs)]
        for name, window in WINDOWS.items():
            gen = builtin_generator(name)
            pairs = [fam.build_pair(s, gen) for s in specs]
            for alpha in args.alphas:
                q = QuasiArithmeticMean(gen, MeanWeights(alpha))
                reps = [res.verify_grid(p.phi, p.psi, q, SamplePlan(window, args.samples, seed=args.seed), 1e-9)
                        for p in pairs]
                ok = sum(r.passed for r in reps)
                worst = max(r.max_scaled for r in reps)
                print(f"{case:<14}{name:<10}{alpha:>7.3g}{ok:>4}/{len(reps):<2}{worst:>12.2e}")


if __name__ == "__main__":
    main()
