"""Decide which solution family a pair (F, G) on an interval belongs to.

Pipeline: split the window where g = G' is non-zero, test f = c g on each
piece, otherwise read the constant c in g'' = c g (zero: quadratic,
positive: exponential with mu = sqrt(c), negative: trigonometric with
mu = sqrt(-c)), then fit both functions in the detected basis over the
whole window.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import least_squares

from .families import DEPENDENT, EXPONENTIAL, QUADRATIC, TRIGONOMETRIC, basis
from .funcmodel import DEFAULT_MARGIN, Func1D, Interval, grid
from .qam import Generator
from .residual import reduce

INDETERMINATE = "Indeterminate"
SCHEMA_VERSION = 1
MIN_LEVEL_POINTS = 7
MIN_RUN = 3


class IntervalTooShort(ValueError):
    pass


@dataclass(frozen=True)
class ClassifyOptions:
    grid_n: int = 1024
    tau_rel: float = 1e-8
    tau_v: float = 1e-6
    tau_c: float = 1e-4
    fit_tol: float = 1e-6
    margin: float = DEFAULT_MARGIN


@dataclass
class SupportDecomposition:
    intervals: List[Interval]
    zeros: List[Tuple[float, float]]
    tau: float

    @property
    def empty(self) -> bool:
        return not self.intervals

    def to_dict(self) -> dict:
        return {"intervals": [[iv.lo, iv.hi] for iv in self.intervals], "tauG": self.tau}


@dataclass
class RepresentationFit:
    A: float
    K: float
    x0: float
    r_squared: float
    interval: Interval


@dataclass
class ClassificationReport:
    case: str
    mu: Optional[float]
    coeffs_f: Optional[List[float]]
    coeffs_g: Optional[List[float]]
    per_interval_dependence: List[Tuple[Interval, float]]
    c_estimate: Optional[float]
    fit_residual: float
    support: SupportDecomposition
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "case": self.case,
            "mu": self.mu,
            "coeffsF": self.coeffs_f,
            "coeffsG": self.coeffs_g,
            "perIntervalDependence": [{"interval": [iv.lo, iv.hi], "c": c} for iv, c in self.per_interval_dependence],
            "cEstimate": self.c_estimate,
            "fitResidual": self.fit_residual,
            "support": self.support.to_dict(),
            "notes": self.notes,
        }


# ---------------------------------------------------------------------------
# derivative access


def _step(window: Interval, n: int) -> float:
    return window.width / n


def first_derivative(F: Func1D, h: float) -> Callable:
    """g = F', exact when carried, else a central difference with step h."""
    if F.exact:
        return F.deriv1
    return lambda x: (np.asarray(F(np.asarray(x) + h)) - np.asarray(F(np.asarray(x) - h))) / (2 * h)


def third_derivative(F: Func1D, h: float) -> Callable:
    """g'' = F''', exact when carried, else a five-point stencil on g."""
    if F.exact and F.derivative(3) is not None:
        return F.derivative(3)
    g = first_derivative(F, h)

    def g2(x):
        x = np.asarray(x, dtype=float)
        return (-g(x + 2 * h) + 16 * g(x + h) - 30 * g(x) + 16 * g(x - h) - g(x - 2 * h)) / (12 * h * h)

    return g2


def _as_callable(g):
    return g.value if isinstance(g, Func1D) else g


# ---------------------------------------------------------------------------
# operations


def _edge(xs, gv, i, j, crossing):
    if crossing:
        return float(xs[i] - gv[i] * (xs[j] - xs[i]) / (gv[j] - gv[i]))
    return float(0.5 * (xs[i] + xs[j]))


def decompose_support(g, window: Interval, grid_n: int = 1024, tau_rel: float = 1e-8,
                      margin: float = DEFAULT_MARGIN) -> SupportDecomposition:
    """Maximal runs of grid points where |g| exceeds ``tau_rel * max |g|``.

    ``g`` is the derivative itself (a Func1D whose value is g, or a callable).
    A sign change between neighbouring points also splits a run, at the
    linearly interpolated zero; other run boundaries sit halfway to the
    neighbouring sub-threshold point. Runs under three points are dropped.
    """
    if grid_n < 64:
        raise ValueError("grid_n must be at least 64")
    fn = _as_callable(g)
    xs = grid(window, grid_n, margin)
    gv = np.asarray(fn(xs), dtype=float)
    ag = np.abs(gv)
    gmax = float(np.max(ag))
    tau = tau_rel * gmax
    if gmax == 0.0:
        return SupportDecomposition([], [(window.lo, window.hi)], 0.0)
    above = ag > tau
    # a sign change between neighbours hides a zero of g even when both exceed tau
    flips = np.nonzero(above[:-1] & above[1:] & (np.sign(gv[:-1]) != np.sign(gv[1:])))[0]
    intervals = []
    edges = np.diff(np.concatenate([[0], above.astype(np.int8), [0]]))
    starts = np.nonzero(edges == 1)[0]
    stops = np.nonzero(edges == -1)[0]  # exclusive
    cuts = set(flips.tolist())
    for i, j in zip(starts, stops):
        bounds = [i] + [k + 1 for k in range(i, j - 1) if k in cuts] + [j]
        for a, b in zip(bounds[:-1], bounds[1:]):
            if b - a < MIN_RUN:
                continue
            lo = window.lo if a == 0 else _edge(xs, gv, a - 1, a, a - 1 in cuts)
            hi = window.hi if b == len(xs) else _edge(xs, gv, b - 1, b, b - 1 in cuts)
            intervals.append(Interval(lo, hi))
    zeros = []
    cursor = window.lo
    for iv in intervals:
        if iv.lo > cursor:
            zeros.append((cursor, iv.lo))
        cursor = iv.hi
    if cursor < window.hi:
        zeros.append((cursor, window.hi))
    return SupportDecomposition(intervals, zeros, tau)


def _ratio_stats(F: Func1D, G: Func1D, I: Interval, grid_n: int, h: float, margin: float):
    xs = grid(I, grid_n, margin)
    f = np.asarray(first_derivative(F, h)(xs), dtype=float)
    g = np.asarray(first_derivative(G, h)(xs), dtype=float)
    keep = np.abs(g) > 1e-8 * np.max(np.abs(g)) if np.any(g) else np.zeros_like(g, dtype=bool)
    if not np.any(keep):
        return None, math.inf
    v = f[keep] / g[keep]
    med = float(np.median(v))
    return med, float(np.max(np.abs(v - med)))


def dependence_test(F: Func1D, G: Func1D, I: Interval, grid_n: int = 1024, tau_v: float = 1e-6,
                    margin: float = DEFAULT_MARGIN, h: Optional[float] = None) -> Optional[float]:
    """c with f = c g on I, or None when v = f/g is not constant."""
    h = _step(I, grid_n) if h is None else h
    med, spread = _ratio_stats(F, G, I, grid_n, h, margin)
    if med is None or spread > tau_v * (1.0 + abs(med)):
        return None
    return med


def ode_level(G: Func1D, I: Interval, grid_n: int = 1024, margin: float = DEFAULT_MARGIN,
              h: Optional[float] = None) -> Tuple[float, float]:
    """Median of g''/g over I and its interquartile spread."""
    h = _step(I, grid_n) if h is None else h
    xs = grid(I, grid_n, margin)
    g = np.asarray(first_derivative(G, h)(xs), dtype=float)
    keep = np.abs(g) > 1e-8 * np.max(np.abs(g)) if np.any(g) else np.zeros_like(g, dtype=bool)
    if np.count_nonzero(keep) < MIN_LEVEL_POINTS:
        raise IntervalTooShort(f"need at least {MIN_LEVEL_POINTS} usable grid points on {I}")
    g2 = np.asarray(third_derivative(G, h)(xs[keep]), dtype=float)
    ratio = g2 / g[keep]
    q1, med, q3 = np.percentile(ratio, [25, 50, 75])
    return float(med), float(q3 - q1)


def fit_representation(F: Func1D, G: Func1D, I: Interval, grid_n: int = 2048,
                       margin: float = DEFAULT_MARGIN) -> RepresentationFit:
    """Regress v = f/g on S(x) = int_{x0}^{x} dt/g(t)^2 with x0 the midpoint of I."""
    n = grid_n + 1 if grid_n % 2 == 0 else grid_n
    if n < MIN_LEVEL_POINTS:
        raise IntervalTooShort("interval too short for a representation fit")
    h = _step(I, grid_n)
    xs = grid(I, n, margin)
    x0 = I.midpoint
    f = np.asarray(first_derivative(F, h)(xs), dtype=float)
    g = np.asarray(first_derivative(G, h)(xs), dtype=float)
    if np.any(g == 0):
        raise ValueError("g vanishes on the interval")
    v = f / g
    S = cumulative_trapezoid(1.0 / g**2, xs, initial=0.0)
    S -= np.interp(x0, xs, S)
    design = np.column_stack([np.ones_like(S), S])
    (A, K), *_ = np.linalg.lstsq(design, v, rcond=None)
    resid = v - (A + K * S)
    ss_tot = float(np.sum((v - v.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    if ss_tot <= 1e-28 * (1.0 + float(np.sum(v**2))):
        r2 = 1.0
    else:
        r2 = max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return RepresentationFit(float(A), float(K), x0, r2, I)


# ---------------------------------------------------------------------------
# basis fitting


def _lstsq(case, mu, xs, y):
    B = basis(case, mu, xs).T
    norms = np.linalg.norm(B, axis=0)
    norms[norms == 0] = 1.0
    coef, *_ = np.linalg.lstsq(B / norms, y, rcond=None)
    coef = coef / norms
    return coef, B @ coef


def _scale(y):
    s = float(np.max(np.abs(y)))
    return s if s > 0 else 1.0


def fit_basis(case, mu, xs, Fv, Gv):
    """Least-squares coefficients of F and G plus the max relative deviation."""
    cf, ff = _lstsq(case, mu, xs, Fv)
    cg, gg = _lstsq(case, mu, xs, Gv)
    dev = max(np.max(np.abs(Fv - ff)) / _scale(Fv), np.max(np.abs(Gv - gg)) / _scale(Gv))
    return cf, cg, float(dev)


def refine_mu(case, mu0, xs, Fv, Gv):
    """Variable-projection Gauss-Newton refinement of mu."""
    sF, sG = _scale(Fv), _scale(Gv)

    def resid(p):
        m = p[0]
        _, ff = _lstsq(case, m, xs, Fv)
        _, gg = _lstsq(case, m, xs, Gv)
        return np.concatenate([(Fv - ff) / sF, (Gv - gg) / sG])

    sol = least_squares(resid, [mu0], bounds=([mu0 * 0.5], [mu0 * 2.0]), x_scale=[mu0],
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, diff_step=1e-7, method="trf")
    return float(sol.x[0])


def _typed_fit(case, c, xs, Fv, Gv):
    if case == QUADRATIC:
        cf, cg, dev = fit_basis(case, None, xs, Fv, Gv)
        return None, cf, cg, dev
    mu = math.sqrt(abs(c))
    cf, cg, dev = fit_basis(case, mu, xs, Fv, Gv)
    mu2 = refine_mu(case, mu, xs, Fv, Gv)
    cf2, cg2, dev2 = fit_basis(case, mu2, xs, Fv, Gv)
    if dev2 < dev:
        return mu2, cf2, cg2, dev2
    return mu, cf, cg, dev


def _overlaps(a: List[Interval], b: List[Interval]) -> bool:
    return any(x.lo < y.hi and y.lo < x.hi for x in a for y in b)


def classify_pair(F: Func1D, G: Func1D, window: Interval, opts: ClassifyOptions = ClassifyOptions()) -> ClassificationReport:
    if not window.finite:
        raise ValueError("classification window must be finite; clamp it with finite_window first")
    n = opts.grid_n
    h = _step(window, n)
    if not (F.exact and G.exact):
        # keep difference stencils inside the sampled range
        window = Interval(window.lo + 4 * h, window.hi - 4 * h)
    g = first_derivative(G, h)
    f = first_derivative(F, h)
    support = decompose_support(g, window, n, opts.tau_rel, opts.margin)
    notes = []

    if support.empty:
        notes.append("g vanishes on the window: G is constant")
        return ClassificationReport(DEPENDENT, None, None, None, [], None, 0.0, support, notes)

    u_f = decompose_support(f, window, n, opts.tau_rel, opts.margin)
    if u_f.empty:
        notes.append("f vanishes on the window: F is constant")
    elif not _overlaps(u_f.intervals, support.intervals):
        notes.append("U_f and U_g are disjoint and both non-empty; U_f = "
                     + ", ".join(str(iv) for iv in u_f.intervals))

    deps = []
    free = []
    worst_spread = 0.0
    for iv in support.intervals:
        med, spread = _ratio_stats(F, G, iv, n, h, opts.margin)
        if med is not None and spread <= opts.tau_v * (1.0 + abs(med)):
            deps.append((iv, med))
            worst_spread = max(worst_spread, spread / (1.0 + abs(med)))
        else:
            free.append(iv)

    if not free:
        cs = sorted(c for _, c in deps)
        if len(deps) > 1 and cs[-1] - cs[0] > opts.tau_v * (1.0 + max(abs(cs[0]), abs(cs[-1]))):
            notes.append("dependence constants differ between intervals")
        return ClassificationReport(DEPENDENT, None, None, None, deps, None, worst_spread, support, notes)

    target = max(free, key=lambda iv: iv.width)
    c, spread = ode_level(G, target, n, opts.margin, h)
    band = opts.tau_c * (1.0 + spread)
    if abs(c) <= band:
        case = QUADRATIC
    elif c > 0:
        case = EXPONENTIAL
    else:
        case = TRIGONOMETRIC

    xs = grid(window, n, opts.margin)
    Fv = np.asarray(F(xs), dtype=float)
    Gv = np.asarray(G(xs), dtype=float)
    mu, cf, cg, dev = _typed_fit(case, c, xs, Fv, Gv)

    if 0.5 * band < abs(c) <= 2 * band:
        other = TRIGONOMETRIC if c < 0 else EXPONENTIAL
        rival = other if case == QUADRATIC else QUADRATIC
        rmu, rcf, rcg, rdev = _typed_fit(rival, c, xs, Fv, Gv)
        if rival == QUADRATIC and rdev <= opts.fit_tol:
            notes.append(f"c = {c:.3g} is at the dead-band edge; {case} also considered (fit {dev:.3g})")
            case, mu, cf, cg, dev = rival, rmu, rcf, rcg, rdev
        else:
            notes.append(f"c = {c:.3g} is at the dead-band edge; {rival} also considered (fit {rdev:.3g})")

    if deps:
        notes.append(f"{len(deps)} support interval(s) passed the dependence test")
    if dev > opts.fit_tol:
        notes.append(f"best {case} fit deviates by {dev:.3g} > {opts.fit_tol:g}")
        case = INDETERMINATE
    return ClassificationReport(case, mu, [float(v) for v in cf], [float(v) for v in cg], deps, c, dev, support, notes)


def classify_original(phi: Func1D, psi: Func1D, gen: Generator, window: Interval,
                      opts: ClassifyOptions = ClassifyOptions()) -> ClassificationReport:
    """Classify (phi, psi) through F = phi o H^-1, G = psi o H^-1.

    Coefficients refer to the basis in H, e.g. {1, H, H^2}.
    """
    if not window.finite:
        raise ValueError("classification window must be finite")
    if not gen.E.contains_interval(window):
        raise ValueError(f"window {window} is not inside the generator domain {gen.E}")
    inner = window.shrink(opts.margin)
    ends = sorted(float(v) for v in gen.H(np.array([inner.lo, inner.hi])))
    red = reduce(phi, psi, gen)
    report = classify_pair(red.F, red.G, Interval(*ends), opts)
    report.notes.append(f"classified in reduced coordinates u = H(x) with H = {gen.name}")
    return report


# ---------------------------------------------------------------------------
# sample-backed input


def read_samples_csv(path) -> Tuple[Func1D, Func1D]:
    """Read ``x,F,G`` rows (strictly increasing x) into sample-backed functions."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [c.strip() for c in next(reader, [])]
        if header != ["x", "F", "G"]:
            raise ValueError(f"expected header x,F,G, got {','.join(header)!r}")
        rows = [[float(v) for v in row] for row in reader if row]
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("every row needs three numbers")
    xs = arr[:, 0]
    return Func1D.from_samples(xs, arr[:, 1], "F"), Func1D.from_samples(xs, arr[:, 2], "G")
