"""Round-trip random typed families through the classifier and report errors."""
import argparse
import time

import numpy as np

from cauchymean import classify as cl
from cauchymean import families as fam
from cauchymean.funcmodel import Interval
from cauchymean.qam import builtin_generator

WINDOWS = {
    "identity": Interval(-1, 1),
    "ln": Interval(0.5, 2),
    "power:2": Interval(0.5, 1.5),
    "power:-1": Interval(0.5, 2),
}


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--specs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=5)
    ap.add_argument("--grid", type=int, default=1024)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    opts = cl.ClassifyOptions(grid_n=args.grid)
    t0 = time.perf_counter()
    print(f"{'case':<14}{'generator':<10}{'correct':>9}{'max mu err':>12}{'max coeff err':>15}")
    for case in fam.TYPED_CASES:
        specs = []
        while len(specs) < args.specs:
            a, b = rng.uniform(-3, 3, 3), rng.uniform(-3, 3, 3)
            if abs(a[1] * b[2] - a[2] * b[1]) >= 0.1:
                specs.append(fam.FamilySpec(case, tuple(a), tuple(b),
                                            mu=None if case == fam.QUADRATIC else rng.uniform(0.3, 3)))
        for name, window in WINDOWS.items():
            gen = builtin_generator(name)
            ok, mu_err, c_err = 0, 0.0, 0.0
            for s in specs:
                p = fam.build_pair(s, gen)
                r = cl.classify_original(p.phi, p.psi, gen, window, opts)
                if r.case != case:
                    continue
                ok += 1
                if s.mu:
                    mu_err = max(mu_err, abs(r.mu - s.mu) / s.mu)
                c_err = max(c_err, np.linalg.norm(unit(r.coeffs_f) - unit(s.coeffs_phi)),
                            np.linalg.norm(unit(r.coeffs_g) - unit(s.coeffs_psi)))
            print(f"{case:<14}{name:<10}{ok:>6}/{len(specs):<2}{mu_err:>12.1e}{c_err:>15.1e}")
    print(f"elapsed {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
