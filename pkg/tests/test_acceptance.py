"""Acceptance criteria 1-9, each at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py``; the terminal summary
prints one PASS/FAIL line per criterion.
"""
import math
import sys

import numpy as np
import pytest

from cauchymean import cli
from cauchymean import classify as cl
from cauchymean import families as fam
from cauchymean import residual as res
from cauchymean.funcmodel import Func1D, Interval, SamplePlan
from cauchymean.qam import MeanWeights, QuasiArithmeticMean, builtin_generator, make_generator, mean
from conftest import (CLASSIFY_WINDOWS, GENERATORS, VERIFY_WINDOWS, random_dependent_spec,
                      random_typed_spec)

criterion = pytest.mark.criterion


# ---------------------------------------------------------------------------
# 1. exact typed families verify at alpha = 1/2


@criterion(1, "exact-family verification, 3 cases x 20 specs x 4 generators, tol 1e-9")
@pytest.mark.parametrize("case", fam.TYPED_CASES)
def test_exact_family_verification(case):
    rng = np.random.default_rng(101)
    for i in range(20):
        spec = random_typed_spec(case, rng)
        for name in GENERATORS:
            gen = builtin_generator(name)
            pair = fam.build_pair(spec, gen)
            q = QuasiArithmeticMean(gen, MeanWeights(0.5))
            plan = SamplePlan(VERIFY_WINDOWS[name], 101, seed=i)
            rep = res.verify_grid(pair.phi, pair.psi, q, plan, 1e-9, n_random=10_000)
            assert rep.passed, (spec, name, rep)


# ---------------------------------------------------------------------------
# 2. dependent families at asymmetric weights, plus one derived residual value


@criterion(2, "dependent families at alpha in {0.2, 1/3, 0.75}, tol 1e-9; R(0,1) = -1/3")
@pytest.mark.parametrize("alpha", [0.2, 1 / 3, 0.75])
def test_dependent_family_asymmetric(alpha):
    rng = np.random.default_rng(202)
    for i in range(20):
        spec = random_dependent_spec(rng)
        name = GENERATORS[i % len(GENERATORS)]
        gen = builtin_generator(name)
        pair = fam.build_pair(spec, gen)
        q = QuasiArithmeticMean(gen, MeanWeights(alpha))
        rep = res.verify_grid(pair.phi, pair.psi, q, SamplePlan(VERIFY_WINDOWS[name], 101, seed=i), 1e-9)
        assert rep.passed, (spec, name, rep)


@criterion(2, "dependent families at alpha in {0.2, 1/3, 0.75}, tol 1e-9; R(0,1) = -1/3")
def test_quadratic_pair_asymmetric_residual_value():
    # h = 2/3, so R = 1 * 1 - 1 * 2 * (2/3) = -1/3
    gen = builtin_generator("identity")
    q = QuasiArithmeticMean(gen, MeanWeights(1 / 3))
    r = res.residual(Func1D.from_expr("x^2"), Func1D.from_expr("x"), q, 0.0, 1.0)
    assert abs(r - (-1 / 3)) <= 1e-12


# ---------------------------------------------------------------------------
# 3. counterexample with disjoint supports on a bounded interval


@criterion(3, "counterexample passes at tol 1e-12; U_g ~ (0, 0.4), U_f ~ (0.8, 1), disjoint")
@pytest.mark.parametrize("grid_n", [1024, 4096, 10001])
def test_counterexample_fixture(grid_n):
    pair = fam.counterexample_pair()
    J = Interval(0.0, 1.0)
    q = QuasiArithmeticMean(builtin_generator("identity", J), MeanWeights(0.5))
    rep = res.verify_grid(pair.F, pair.G, q, SamplePlan(J, 101, seed=3), 1e-12)
    assert rep.passed, rep
    u_f = cl.decompose_support(pair.F.deriv1, J, grid_n)
    u_g = cl.decompose_support(pair.G.deriv1, J, grid_n)
    assert len(u_f.intervals) == 1 and len(u_g.intervals) == 1
    (f_iv,), (g_iv,) = u_f.intervals, u_g.intervals
    bound = 2.0 / grid_n
    assert abs(g_iv.lo - 0.0) <= bound and abs(g_iv.hi - 0.4) <= bound
    assert abs(f_iv.lo - 0.8) <= bound and abs(f_iv.hi - 1.0) <= bound
    assert g_iv.hi <= f_iv.lo


# ---------------------------------------------------------------------------
# 4. classifier round trip


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


@criterion(4, "classifier round trip: case exact, mu within 1e-3, coefficients within 1e-6")
@pytest.mark.parametrize("case", fam.TYPED_CASES)
def test_classifier_round_trip(case):
    rng = np.random.default_rng(404)
    for i in range(20):
        spec = random_typed_spec(case, rng)
        name = GENERATORS[i % len(GENERATORS)]
        gen = builtin_generator(name)
        pair = fam.build_pair(spec, gen)
        rep = cl.classify_original(pair.phi, pair.psi, gen, CLASSIFY_WINDOWS[name])
        assert rep.case == case, (spec, name, rep.notes)
        if spec.mu is not None:
            assert abs(rep.mu - spec.mu) <= 1e-3 * spec.mu
        for got, want in ((rep.coeffs_f, spec.coeffs_phi), (rep.coeffs_g, spec.coeffs_psi)):
            err = np.linalg.norm(_unit(got) - _unit(want))
            assert err <= 1e-6, (spec, name, got, want)


# ---------------------------------------------------------------------------
# 5. mean-value locator


@criterion(5, "mean-value points: 1/sqrt(3), 1 and quadratic midpoints")
def test_locator_known_points():
    (c,) = res.locate_mean_points(Func1D.from_expr("x^3"), Func1D.from_expr("x"), 0.0, 1.0)
    assert abs(c - 1 / math.sqrt(3)) <= 1e-10
    (c,) = res.locate_mean_points(Func1D.from_expr("cosh(x)"), Func1D.from_expr("sinh(x)"), 0.0, 2.0)
    assert abs(c - 1.0) <= 1e-10


@criterion(5, "mean-value points: 1/sqrt(3), 1 and quadratic midpoints")
def test_locator_quadratic_midpoint():
    rng = np.random.default_rng(505)
    gen = builtin_generator("identity")
    for _ in range(50):
        spec = random_typed_spec(fam.QUADRATIC, rng)
        pair = fam.build_pair(spec, gen)
        a, b = np.sort(rng.uniform(-5, 5, 2))
        (c,) = res.locate_mean_points(pair.phi, pair.psi, a, b)
        assert abs(c - 0.5 * (a + b)) <= 1e-9


# ---------------------------------------------------------------------------
# 6. reduction to the linear mean


REDUCTION_PAIRS = {
    "identity": ("sin(x) + x^3", "exp(x/2)"),
    "ln": ("x^3 - x", "sqrt(x)"),
    "power:2": ("cos(x)", "x^4 + x"),
    "power:-1": ("ln(x)", "x^2"),
    "x + x^3": ("sinh(x)", "x^2 - x"),
}


@criterion(6, "R_orig = R_reduced(H(x), H(y)) H'(h) to 1e-8 relative, 1000 pairs per generator")
@pytest.mark.parametrize("name", list(REDUCTION_PAIRS))
def test_reduction_equivalence(name):
    if name in GENERATORS:
        gen = builtin_generator(name)
        window = VERIFY_WINDOWS[name]
    else:
        gen = make_generator(name, Interval(-2.0, 2.0))
        window = Interval(-1.5, 1.5)
    phi = Func1D.from_expr(REDUCTION_PAIRS[name][0], gen.E)
    psi = Func1D.from_expr(REDUCTION_PAIRS[name][1], gen.E)
    alpha = 0.37
    q = QuasiArithmeticMean(gen, MeanWeights(alpha))
    x, y = res.random_pairs(window, 1000, seed=6, margin=1e-3)
    t1, t2, h = res._terms(phi, psi, q, x, y)
    red = res.reduce(phi, psi, gen)
    s1, s2 = res.linear_mean_terms(red.F, red.G, alpha, gen.H(x), gen.H(y))
    dH = gen.H.deriv1(h)
    lhs = t1 - t2
    rhs = (s1 - s2) * dH
    scale = np.abs(t1) + np.abs(t2)
    assert np.all(np.abs(lhs - rhs) <= 1e-8 * scale)


# ---------------------------------------------------------------------------
# 7. representation fit


@criterion(7, "representation fit of (e^-x, e^x) on (0, 2): rSquared >= 1 - 1e-6, (A, K) within 1e-4")
def test_representation_fit_exponential():
    F, G = Func1D.from_expr("exp(-x)"), Func1D.from_expr("exp(x)")
    fit = cl.fit_representation(F, G, Interval(0.0, 2.0))
    # f/g = -e^{-2x} = A + K (e^{-2 x0} - e^{-2x}) / 2  =>  K = 2, A = -e^{-2 x0}
    assert fit.r_squared >= 1 - 1e-6
    assert abs(fit.K - 2.0) <= 1e-4
    assert abs(fit.A + math.exp(-2 * fit.x0)) <= 1e-4


# ---------------------------------------------------------------------------
# 8. the f/g balance identity


def _nonvanishing_interval(G, window):
    sup = cl.decompose_support(G.deriv1, window, 4096)
    iv = max(sup.intervals, key=lambda v: v.width)
    return iv.shrink(0.05)


@criterion(8, "f/g balance identity vanishes to 1e-8 scaled, 1000 pairs inside a g-nonvanishing interval")
@pytest.mark.parametrize("case", fam.TYPED_CASES)
@pytest.mark.parametrize("name", ["identity", "ln"])
def test_ratio_balance_identity(case, name):
    rng = np.random.default_rng(808)
    spec = random_typed_spec(case, rng)
    gen = builtin_generator(name)
    pair = fam.build_pair(spec, gen)
    red = res.reduce(pair.phi, pair.psi, gen)
    window = Interval(*sorted(gen.H(np.array([CLASSIFY_WINDOWS[name].lo, CLASSIFY_WINDOWS[name].hi]))))
    iv = _nonvanishing_interval(red.G, window)
    g = np.asarray(red.G.deriv1(np.linspace(iv.lo, iv.hi, 2001)))
    assert np.all(g > 0) or np.all(g < 0)
    a, b = res.random_pairs(iv, 1000, seed=8, margin=1e-3)
    vals = res.ratio_balance(red.F, red.G, 0.5, a, b)
    assert np.max(vals) <= 1e-8


# ---------------------------------------------------------------------------
# 9. CLI contract


@criterion(9, "CLI verify exit codes 0/1/2; grid CSV byte-identical across reruns")
@pytest.mark.parametrize("extra, code", [
    (["--generator", "identity", "--alpha", "0.5", "--domain", "0,1"], 0),
    (["--generator", "identity", "--alpha", "0.3", "--domain", "0,1"], 1),
    (["--generator", "x^2", "--domain", "-1,1"], 2),
])
def test_cli_verify_exit_codes(extra, code, capsys):
    assert cli.main(["verify", "--phi", "x^2", "--psi", "x", *extra]) == code


@criterion(9, "CLI verify exit codes 0/1/2; grid CSV byte-identical across reruns")
def test_cli_grid_deterministic(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        argv = ["grid", "--phi", "x^2", "--psi", "x", "--domain", "0,1", "--seed", "7", "--out", str(p)]
        assert cli.main(argv) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
