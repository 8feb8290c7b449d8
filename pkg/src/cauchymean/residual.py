"""Residual of the mean-value equation, grid verification, mean-value points
and reduction to the linear-mean problem.

For a pair (phi, psi) and a quasi-arithmetic mean h the residual is

    R(x, y) = [phi(y) - phi(x)] psi'(h(x, y)) - [psi(y) - psi(x)] phi'(h(x, y)).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .expr import DomainError
from .funcmodel import Func1D, Interval, SamplePlan, chain, random_points, sample
from .qam import Generator, InversionError, QuasiArithmeticMean, inverse, mean

CSV_HEADER = ("x", "y", "h", "residual", "scaled_residual")
DEFAULT_ROOT_GRID = 2048
_EVAL_ERRORS = (DomainError, InversionError)


class LocateError(ArithmeticError):
    pass


class NoSignChange(LocateError):
    pass


class IdenticallyZero(LocateError):
    """The mean-value residual vanishes at every scanned point."""


def _terms(phi: Func1D, psi: Func1D, q: QuasiArithmeticMean, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    h = np.asarray(mean(q, x, y))
    t1 = (np.asarray(phi(y)) - np.asarray(phi(x))) * np.asarray(psi.deriv1(h))
    t2 = (np.asarray(psi(y)) - np.asarray(psi(x))) * np.asarray(phi.deriv1(h))
    return t1, t2, h


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def residual(phi: Func1D, psi: Func1D, q: QuasiArithmeticMean, x, y):
    t1, t2, _ = _terms(phi, psi, q, x, y)
    return _out(t1 - t2)


def _scaled(t1, t2):
    return np.abs(t1 - t2) / (1.0 + np.abs(t1) + np.abs(t2))


def scaled_residual(phi: Func1D, psi: Func1D, q: QuasiArithmeticMean, x, y):
    """|R| / (1 + |first product| + |second product|)."""
    t1, t2, _ = _terms(phi, psi, q, x, y)
    return _out(_scaled(t1, t2))


@dataclass
class ResidualReport:
    max_scaled: float
    argmax_pair: tuple
    count: int
    tolerance: float
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.max_scaled <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "maxScaled": self.max_scaled,
            "argmaxPair": list(self.argmax_pair),
            "count": self.count,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "error": self.error,
        }


def ordered_pairs(points):
    i, j = np.triu_indices(len(points), k=1)
    return points[i], points[j]


def random_pairs(window: Interval, count: int, seed: int, margin: float):
    pts = random_points(window, 2 * count, seed, margin)
    a, b = pts[:count], pts[count:]
    x, y = np.minimum(a, b), np.maximum(a, b)
    keep = x < y
    return x[keep], y[keep]


def _scan(phi, psi, q, x, y):
    """Scaled residuals, falling back to per-pair evaluation to isolate failures."""
    try:
        t1, t2, _ = _terms(phi, psi, q, x, y)
        return _scaled(t1, t2), None
    except _EVAL_ERRORS:
        pass
    out = np.empty_like(x)
    for k in range(len(x)):
        try:
            t1, t2, _ = _terms(phi, psi, q, x[k], y[k])
            out[k] = _scaled(t1, t2)
        except _EVAL_ERRORS as exc:
            return out[:k], (k, str(exc))
    return out, None


def verify_grid(phi: Func1D, psi: Func1D, q: QuasiArithmeticMean, plan: SamplePlan, tol: float,
                n_random: Optional[int] = None) -> ResidualReport:
    """Max scaled residual over all sampled pairs x < y plus random pairs.

    ``n_random`` defaults to ``plan.count``. A domain or inversion failure
    ends the sweep with an infinite maximum at the offending pair.
    """
    pts = sample(plan)
    gx, gy = ordered_pairs(pts)
    n_random = plan.count if n_random is None else n_random
    rx, ry = random_pairs(plan.window, n_random, plan.seed, plan.margin)
    x = np.concatenate([gx, rx])
    y = np.concatenate([gy, ry])
    vals, failure = _scan(phi, psi, q, x, y)
    if failure is not None:
        k, msg = failure
        return ResidualReport(float("inf"), (float(x[k]), float(y[k])), len(x), tol, error=msg)
    if len(vals) == 0:
        return ResidualReport(0.0, (float("nan"), float("nan")), 0, tol)
    k = int(np.argmax(vals))
    return ResidualReport(float(vals[k]), (float(x[k]), float(y[k])), len(x), tol)


def residual_table(phi: Func1D, psi: Func1D, q: QuasiArithmeticMean, plan: SamplePlan):
    """Columns x, y, h, residual, scaled_residual over all sampled pairs x < y."""
    x, y = ordered_pairs(sample(plan))
    t1, t2, h = _terms(phi, psi, q, x, y)
    return x, y, h, t1 - t2, _scaled(t1, t2)


def write_residual_csv(stream, columns) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in zip(*columns):
        w.writerow(["%.17g" % v for v in row])


def residual_csv_text(phi, psi, q, plan) -> str:
    buf = io.StringIO()
    write_residual_csv(buf, residual_table(phi, psi, q, plan))
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Cauchy mean-value points


def locate_mean_points(phi: Func1D, psi: Func1D, a: float, b: float, grid: int = DEFAULT_ROOT_GRID,
                       rtol: float = 1e-12) -> list:
    """All c in (a, b) with [phi(b) - phi(a)] psi'(c) = [psi(b) - psi(a)] phi'(c).

    Sign changes on ``grid`` subintervals are refined by bisection to
    ``rtol * (b - a)``. Tangential roots are not detected.
    """
    if not a < b:
        raise ValueError("need a < b")
    dphi = float(phi(b)) - float(phi(a))
    dpsi = float(psi(b)) - float(psi(a))

    def r(c):
        return dphi * np.asarray(psi.deriv1(c)) - dpsi * np.asarray(phi.deriv1(c))

    nodes = np.linspace(a, b, grid + 1)[1:-1]
    vals = r(nodes)
    scale = abs(dphi) * np.max(np.abs(psi.deriv1(nodes))) + abs(dpsi) * np.max(np.abs(phi.deriv1(nodes)))
    if scale == 0 or np.max(np.abs(vals)) <= 1e-13 * scale:
        raise IdenticallyZero("mean-value residual vanishes identically on (a, b)")
    roots = [float(c) for c in nodes[vals == 0]]
    s = np.sign(vals)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    xtol = rtol * (b - a)
    for i in idx:
        lo, hi = nodes[i], nodes[i + 1]
        slo = s[i]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo <= xtol or mid in (lo, hi):
                break
            sm = np.sign(r(mid))
            if sm == 0:
                lo = hi = mid
                break
            if sm == slo:
                lo = mid
            else:
                hi = mid
        roots.append(float(0.5 * (lo + hi)))
    if not roots:
        raise NoSignChange("no sign change found on the scan grid")
    return sorted(roots)


# ---------------------------------------------------------------------------
# reduction to the linear mean


@dataclass(frozen=True)
class ReducedPair:
    F: Func1D
    G: Func1D
    J: Interval


def _inverse_derivs(gen: Generator, u, order: int):
    x = np.asarray(inverse(gen, u), dtype=float)
    hv = gen.H.values(x, order)
    h1 = hv[1]
    ks = [x, 1.0 / h1]
    if order >= 2:
        ks.append(-hv[2] / h1**3)
    if order >= 3:
        ks.append((3 * hv[2] ** 2 - h1 * hv[3]) / h1**5)
    return ks


def _reduced(f: Func1D, gen: Generator) -> Func1D:
    order = min(f.order, gen.H.order, 3)

    def at(k):
        def fn(u):
            ks = _inverse_derivs(gen, u, max(k, 1))
            if k == 0:
                out = f(ks[0])
            else:
                out = chain(f.values(ks[0], k), ks)[k]
            return _out(np.asarray(out))

        return fn

    prov = "sample" if f.provenance == "sample" else "family"
    return Func1D(at(0), tuple(at(k) for k in range(1, order + 1)), gen.J, prov, f"{f.label} o H^-1")


def reduce(phi: Func1D, psi: Func1D, gen: Generator) -> ReducedPair:
    """F = phi o H^-1 and G = psi o H^-1 on J = H(E)."""
    return ReducedPair(_reduced(phi, gen), _reduced(psi, gen), gen.J)


def linear_mean_terms(F: Func1D, G: Func1D, alpha: float, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = alpha * a + (1.0 - alpha) * b
    t1 = (np.asarray(F(b)) - np.asarray(F(a))) * np.asarray(G.deriv1(m))
    t2 = (np.asarray(G(b)) - np.asarray(G(a))) * np.asarray(F.deriv1(m))
    return t1, t2


def reduced_residual(F: Func1D, G: Func1D, alpha: float, a, b):
    """[F(b) - F(a)] G'(alpha a + beta b) - [G(b) - G(a)] F'(alpha a + beta b)."""
    t1, t2 = linear_mean_terms(F, G, alpha, a, b)
    return _out(t1 - t2)


def ratio_balance(F: Func1D, G: Func1D, alpha: float, a, b, scaled: bool = True):
    """beta g(a) (v(m) - v(a)) - alpha g(b) (v(b) - v(m)) with v = f/g and
    m = alpha a + beta b; divided by 1 + |both products| when ``scaled``.
    Vanishes on any interval where g has no zero and the pair is a solution."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    beta = 1.0 - alpha
    m = alpha * a + beta * b

    def v(z):
        return np.asarray(F.deriv1(z)) / np.asarray(G.deriv1(z))

    ga = np.asarray(G.deriv1(a))
    gb = np.asarray(G.deriv1(b))
    vm = v(m)
    lhs = beta * ga * (vm - v(a))
    rhs = alpha * gb * (v(b) - vm)
    if not scaled:
        return _out(lhs - rhs)
    return _out(np.abs(lhs - rhs) / (1.0 + np.abs(lhs) + np.abs(rhs)))
