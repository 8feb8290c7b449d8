import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cauchymean import classify as cl
from cauchymean import families as fam
from cauchymean import residual as res
from cauchymean.funcmodel import Func1D, Interval, POSITIVE, SamplePlan
from cauchymean.qam import MeanWeights, QuasiArithmeticMean, builtin_generator, make_generator
from conftest import CLASSIFY_WINDOWS, FREE_FUNCTIONS, random_dependent_spec, random_typed_spec


def fx(src):
    return Func1D.from_expr(src)


def inexact(f):
    """Same function, but derivatives must come from differences."""
    return Func1D(f.value, f.derivs, f.domain, "sample", f.label)


# ---------------------------------------------------------------------------
# support decomposition


def test_support_of_nonvanishing_derivative():
    sup = cl.decompose_support(fx("1 + 0*x"), Interval(0, 1))
    assert sup.intervals == [Interval(0, 1)] and sup.zeros == []


def test_support_of_counterexample():
    sup = cl.decompose_support(fam.counterexample_pair().G.deriv1, Interval(0, 1), 4096)
    (iv,) = sup.intervals
    assert iv.lo == 0 and abs(iv.hi - 0.4) <= 2 / 4096
    assert sup.to_dict()["tauG"] == sup.tau


def test_support_splits_at_zero_crossings():
    sup = cl.decompose_support(fx("x^2 - 1"), Interval(-2, 2), 1024)
    assert len(sup.intervals) == 3
    ends = [sup.intervals[0].hi, sup.intervals[1].lo, sup.intervals[1].hi, sup.intervals[2].lo]
    np.testing.assert_allclose(ends, [-1, -1, 1, 1], atol=4 / 1024)


def test_support_empty_for_constant():
    sup = cl.decompose_support(lambda x: np.zeros_like(x), Interval(0, 1))
    assert sup.empty and sup.zeros == [(0.0, 1.0)]


@pytest.mark.parametrize("n", [256, 512, 1024, 2048])
def test_support_convergence(n):
    # boundaries move by O(width / n) when n doubles
    w = Interval(-2, 2)
    a = cl.decompose_support(fx("x^2 - 1"), w, n)
    b = cl.decompose_support(fx("x^2 - 1"), w, 2 * n)
    for ia, ib in zip(a.intervals, b.intervals):
        assert abs(ia.lo - ib.lo) <= 2 * w.width / n
        assert abs(ia.hi - ib.hi) <= 2 * w.width / n
    assert abs(a.intervals[0].hi + 1) <= w.width / n


@settings(max_examples=40)
@given(st.floats(-0.9, 0.9), st.floats(0.05, 0.5))
def test_support_gap_matches_flat_region(center, half):
    # g vanishes exactly on [center - half, center + half]
    lo, hi = center - half, center + half

    def g(x):
        return np.where(x < lo, x - lo, np.where(x > hi, x - hi, 0.0))

    sup = cl.decompose_support(g, Interval(-1.5, 1.5), 2048)
    step = 3 / 2048
    assert len(sup.intervals) == 2
    assert abs(sup.intervals[0].hi - lo) <= 2 * step
    assert abs(sup.intervals[1].lo - hi) <= 2 * step


# ---------------------------------------------------------------------------
# dependence test and ODE level


def test_dependence_examples():
    G = fx("x^3")
    F = fx("3*x^3 + 7")
    assert cl.dependence_test(F, G, Interval(0.1, 1)) == pytest.approx(3, rel=1e-12)
    assert cl.dependence_test(fx("x^2"), fx("x"), Interval(0, 1)) is None
    p = fam.counterexample_pair()
    assert cl.dependence_test(p.F, p.G, Interval(0, 0.4)) == 0.0


@pytest.mark.parametrize("src, I, want", [
    ("exp(2*x)", Interval(0, 3), 4.0),
    ("x^2", Interval(1, 2), 0.0),
    ("cos(3*x)", Interval(0.1, 0.9), -9.0),
])
def test_ode_level_exact(src, I, want):
    c, spread = cl.ode_level(fx(src), I)
    assert c == pytest.approx(want, abs=1e-9)
    assert spread <= 1e-9


@pytest.mark.parametrize("src, I, want", [
    ("exp(2*x)", Interval(0, 3), 4.0),
    ("cos(3*x)", Interval(0.1, 0.9), -9.0),
])
def test_ode_level_finite_difference(src, I, want):
    c, _ = cl.ode_level(inexact(fx(src)), I, grid_n=int(round(I.width / 1e-3)), h=1e-3)
    assert c == pytest.approx(want, abs=1e-4)


def test_ode_level_too_short():
    with pytest.raises(cl.IntervalTooShort):
        cl.ode_level(fam.counterexample_pair().G, Interval(0.5, 0.9), grid_n=64)


# ---------------------------------------------------------------------------
# representation fit


def test_fit_representation_rational():
    fit = cl.fit_representation(fx("x"), fx("x^2/2"), Interval(1, 2))
    # v = 1/x, S = 1/x0 - 1/x  =>  K = -1, A = 1/x0
    assert fit.x0 == 1.5
    assert fit.K == pytest.approx(-1, abs=1e-5)
    assert fit.A == pytest.approx(1 / 1.5, abs=1e-5)
    assert fit.r_squared >= 1 - 1e-9


def test_fit_representation_dependent():
    fit = cl.fit_representation(fx("3*sin(x)"), fx("sin(x)"), Interval(0.2, 1.2))
    assert fit.A == pytest.approx(3, abs=1e-12)
    assert abs(fit.K) <= 1e-9
    assert fit.r_squared == 1.0


# ---------------------------------------------------------------------------
# classify_pair


def test_classify_quadratic():
    rep = cl.classify_pair(fx("x^2"), fx("x"), Interval(-5, 5))
    assert rep.case == fam.QUADRATIC and rep.mu is None
    np.testing.assert_allclose(rep.coeffs_f, [0, 0, 1], atol=1e-9)
    np.testing.assert_allclose(rep.coeffs_g, [0, 1, 0], atol=1e-9)


@pytest.mark.parametrize("F, G, case, mu", [
    ("exp(2*x)", "exp(-2*x)", fam.EXPONENTIAL, 2.0),
    ("sin(x)", "cos(x)", fam.TRIGONOMETRIC, 1.0),
    ("sin(2*x)", "cos(2*x)", fam.TRIGONOMETRIC, 2.0),
])
def test_classify_typed(F, G, case, mu):
    rep = cl.classify_pair(fx(F), fx(G), Interval(0, 3))
    assert rep.case == case
    assert rep.mu == pytest.approx(mu, rel=1e-3)
    assert rep.c_estimate == pytest.approx(mu * mu if case == fam.EXPONENTIAL else -mu * mu, rel=1e-3)


def test_classify_counterexample():
    p = fam.counterexample_pair()
    rep = cl.classify_pair(p.F, p.G, Interval(0, 1), cl.ClassifyOptions(grid_n=4096))
    assert rep.case == fam.DEPENDENT
    ((iv, c),) = rep.per_interval_dependence
    assert c == 0 and iv.lo == 0 and abs(iv.hi - 0.4) <= 2 / 4096
    assert any("disjoint" in n for n in rep.notes)


def test_classify_indeterminate():
    rep = cl.classify_pair(fx("x^4"), fx("exp(x)"), Interval(0, 1))
    assert rep.case == cl.INDETERMINATE
    assert rep.fit_residual > 1e-6


def test_report_json_keys():
    d = cl.classify_pair(fx("sin(x)"), fx("cos(x)"), Interval(0, 3)).to_dict()
    assert set(d) == {"schemaVersion", "case", "mu", "coeffsF", "coeffsG", "perIntervalDependence",
                      "cEstimate", "fitResidual", "support", "notes"}
    assert d["schemaVersion"] == 1


@pytest.mark.parametrize("F, G, case, mu", [
    (np.exp, lambda u: np.exp(-u), fam.EXPONENTIAL, 1.0),
    (lambda u: u * u, lambda u: u, fam.QUADRATIC, None),
    (lambda u: np.sin(2 * u), lambda u: np.cos(2 * u), fam.TRIGONOMETRIC, 2.0),
])
def test_classify_sample_backed(F, G, case, mu):
    xs = np.linspace(0, 3, 301)
    rep = cl.classify_pair(Func1D.from_samples(xs, F(xs)), Func1D.from_samples(xs, G(xs)), Interval(0, 3))
    assert rep.case == case
    if mu is not None:
        assert rep.mu == pytest.approx(mu, rel=1e-3)


def test_read_samples_csv(tmp_path):
    xs = np.linspace(0, 3, 301)
    path = tmp_path / "pair.csv"
    rows = "\n".join(f"{float(x)!r},{math.exp(x)!r},{math.exp(-x)!r}" for x in xs)
    path.write_text("x,F,G\n" + rows + "\n")
    F, G = cl.read_samples_csv(path)
    assert F.domain == Interval(0, 3) and not F.exact
    bad = tmp_path / "bad.csv"
    bad.write_text("u,F,G\n0,0,0\n")
    with pytest.raises(ValueError):
        cl.read_samples_csv(bad)


# ---------------------------------------------------------------------------
# classify_original


@pytest.mark.parametrize("phi, psi, gen, window, case, mu", [
    ("x^4", "x^2", "power:2", Interval(0.5, 3), fam.QUADRATIC, None),
    ("x^2", "x^(-2)", "ln", Interval(0.5, 5), fam.EXPONENTIAL, 2.0),
])
def test_classify_original_examples(phi, psi, gen, window, case, mu):
    rep = cl.classify_original(fx(phi), fx(psi), builtin_generator(gen), window)
    assert rep.case == case
    if mu is None:
        np.testing.assert_allclose(rep.coeffs_f, [0, 0, 1], atol=1e-8)
        np.testing.assert_allclose(rep.coeffs_g, [0, 1, 0], atol=1e-8)
    else:
        assert rep.mu == pytest.approx(mu, rel=1e-3)


@pytest.mark.parametrize("gen", ["identity", "ln", "power:2", "power:-1"])
@pytest.mark.parametrize("free", FREE_FUNCTIONS[:3])
def test_classify_original_dependent(gen, free):
    rep = cl.classify_original(fx(f"2*({free}) + 1"), fx(free), builtin_generator(gen), CLASSIFY_WINDOWS[gen])
    assert rep.case == fam.DEPENDENT
    for _, c in rep.per_interval_dependence:
        assert c == pytest.approx(2, abs=1e-6)


def test_classify_original_numeric_generator():
    gen = make_generator("x + x^3", Interval(-2, 2))
    rep = cl.classify_original(fx("(x + x^3)^2"), fx("x + x^3"), gen, Interval(-1, 1.5))
    assert rep.case == fam.QUADRATIC


def test_classify_original_rejects_window_outside_domain():
    with pytest.raises(ValueError):
        cl.classify_original(fx("x"), fx("x^2"), builtin_generator("ln"), Interval(-1, 1))


def test_dependence_soundness_random():
    rng = np.random.default_rng(12)
    for i in range(12):
        spec = random_dependent_spec(rng)
        c1, c2, _ = spec.dependence
        if c1 == 0:
            continue
        name = ("identity", "ln", "power:2", "power:-1")[i % 4]
        gen = builtin_generator(name)
        pair = fam.build_pair(spec, gen)
        rep = cl.classify_original(pair.phi, pair.psi, gen, CLASSIFY_WINDOWS[name])
        assert rep.case == fam.DEPENDENT, (spec, rep.notes)
        for _, c in rep.per_interval_dependence:
            assert c == pytest.approx(-c2 / c1, abs=1e-6)


@pytest.mark.parametrize("case", fam.TYPED_CASES)
def test_representation_consistency(case):
    spec = random_typed_spec(case, np.random.default_rng(21))
    gen = builtin_generator("identity")
    pair = fam.build_pair(spec, gen)
    rep = cl.classify_pair(pair.phi, pair.psi, Interval(-1, 1))
    assert rep.case == case
    iv = max(rep.support.intervals, key=lambda v: v.width).shrink(0.05)
    fit = cl.fit_representation(pair.phi, pair.psi, iv)
    assert fit.r_squared >= 1 - 1e-6
    assert abs(fit.K) > 1e-6


# ---------------------------------------------------------------------------
# asymmetric weights on a semi-infinite domain


@pytest.mark.parametrize("alpha", [0.3, 0.75])
def test_asymmetric_consistency_semi_infinite(alpha):
    gen = builtin_generator("ln")
    assert gen.E == POSITIVE
    window = Interval(0, 20)  # anchored clamp of (0, inf)
    q = QuasiArithmeticMean(gen, MeanWeights(alpha))
    plan = SamplePlan(window, 41, seed=5)
    rng = np.random.default_rng(31)
    for _ in range(6):
        spec = random_dependent_spec(rng)
        pair = fam.build_pair(spec, gen)
        assert res.verify_grid(pair.phi, pair.psi, q, plan, 1e-9).passed
        rep = cl.classify_original(pair.phi, pair.psi, gen, window)
        assert rep.case == fam.DEPENDENT, (spec, rep.notes)
    for case in fam.TYPED_CASES:
        spec = random_typed_spec(case, rng, mu_range=(0.3, 1.0))
        pair = fam.build_pair(spec, gen)
        rep = res.verify_grid(pair.phi, pair.psi, q, plan, 1e-9)
        assert not rep.passed
        x, y = rep.argmax_pair
        assert 0 < x < y < 20
