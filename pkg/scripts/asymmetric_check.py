"""Asymmetric weights on the semi-infinite domain (0, inf) with the ln generator.

For each alpha, dependent constructions should pass verification and classify
as Dependent, while typed constructions should fail with a witness pair.
"""
import argparse

import numpy as np

from cauchymean import classify as cl
from cauchymean import families as fam
from cauchymean import residual as res
from cauchymean.funcmodel import Interval, SamplePlan, finite_window
from cauchymean.qam import MeanWeights, QuasiArithmeticMean, builtin_generator

FREE = ("sin(3*x) + x^2", "exp(x) - x", "cosh(x)", "sqrt(2 + x)", "1/(2 + x^2)")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.1, 0.3, 0.45, 0.49, 0.5, 0.51, 0.7, 0.9])
    ap.add_argument("--span", type=float, default=20.0)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    gen = builtin_generator("ln")
    window = finite_window(gen.E, args.span)
    plan = SamplePlan(window, 41, seed=args.seed)
    rng = np.random.default_rng(args.seed)
    dep = [fam.FamilySpec(fam.DEPENDENT, dependence=(1.0, -rng.uniform(0.5, 3), rng.uniform(-1, 1)), free=f)
           for f in FREE]
    typed = [fam.FamilySpec(c, tuple(rng.uniform(-2, 2, 3)), tuple(rng.uniform(-2, 2, 3)),
                            mu=None if c == fam.QUADRATIC else 0.7) for c in fam.TYPED_CASES]
    print(f"generator ln, domain {gen.E}, scanned window {window}")
    print(f"{'alpha':>6}{'dep pass':>10}{'dep class':>11}  typed max scaled residual (Q, E, T)")
    for alpha in args.alphas:
        q = QuasiArithmeticMean(gen, MeanWeights(alpha))
        dep_ok = dep_cls = 0
        for s in dep:
            p = fam.build_pair(s, gen)
            dep_ok += res.verify_grid(p.phi, p.psi, q, plan, 1e-9).passed
            dep_cls += cl.classify_original(p.phi, p.psi, gen, window).case == fam.DEPENDENT
        worst = []
        for s in typed:
            p = fam.build_pair(s, gen)
            worst.append(res.verify_grid(p.phi, p.psi, q, plan, 1e-9).max_scaled)
        print(f"{alpha:>6.2f}{dep_ok:>7}/{len(dep)}{dep_cls:>8}/{len(dep)}  " + "  ".join(f"{w:.2e}" for w in worst))


if __name__ == "__main__":
    main()
