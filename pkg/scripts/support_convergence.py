"""Support boundaries of the bounded-interval counterexample and of g = x^2 - 1
as the scan grid is refined."""
import argparse

from cauchymean import classify as cl
from cauchymean import families as fam
from cauchymean.funcmodel import Func1D, Interval


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grids", type=int, nargs="+", default=[256, 512, 1024, 2048, 4096, 8192, 16384])
    args = ap.parse_args()

    pair = fam.counterexample_pair()
    g = Func1D.from_expr("x^2 - 1")
    print(f"{'gridN':>7}{'err U_g end':>14}{'err U_f start':>15}{'err root -1':>13}{'err root 1':>12}{'2/gridN':>10}")
    for n in args.grids:
        (ug,) = cl.decompose_support(pair.G.deriv1, Interval(0, 1), n).intervals
        (uf,) = cl.decompose_support(pair.F.deriv1, Interval(0, 1), n).intervals
        a, b, _ = cl.decompose_support(g, Interval(-2, 2), n).intervals
        print(f"{n:>7}{abs(ug.hi - 0.4):>14.2e}{abs(uf.lo - 0.8):>15.2e}"
              f"{abs(a.hi + 1):>13.2e}{abs(b.hi - 1):>12.2e}{2 / n:>10.2e}")


if __name__ == "__main__":
    main()
