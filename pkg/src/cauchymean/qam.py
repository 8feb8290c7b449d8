"""Generators H and quasi-arithmetic means h(x, y) = H^-1(alpha H(x) + beta H(y))."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import expr as _expr
from .expr import BinOp, Call, DomainError, X
from .funcmodel import DEFAULT_MARGIN, DEFAULT_SPAN, POSITIVE, REAL_LINE, Func1D, Interval, finite_window

INVERSE_RTOL = 1e-12
MAX_BISECT = 200
MAX_NEWTON = 20
MONOTONE_SWEEP = 1001
RANGE_INFINITY = 1e15

BUILTIN_NAMES = ("identity", "ln", "exp", "power:<p>")


class GeneratorError(ValueError):
    pass


class MonotonicityError(GeneratorError):
    pass


class InversionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Generator:
    H: Func1D
    direction: int
    J: Interval
    name: str = ""
    analytic_inverse: Optional[Callable] = None
    span: float = DEFAULT_SPAN

    @property
    def E(self) -> Interval:
        return self.H.domain

    @property
    def increasing(self) -> bool:
        return self.direction > 0

    def __call__(self, x):
        return self.H(x)

    def inverse(self, u):
        return inverse(self, u)


@dataclass(frozen=True)
class MeanWeights:
    alpha: float = 0.5

    def __post_init__(self):
        a = float(self.alpha)
        if not 0.0 < a < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(self, "alpha", a)

    @property
    def beta(self) -> float:
        return 1.0 - self.alpha

    def swapped(self) -> "MeanWeights":
        return MeanWeights(self.beta)


@dataclass(frozen=True)
class QuasiArithmeticMean:
    gen: Generator
    w: MeanWeights = MeanWeights()

    def __call__(self, x, y):
        return mean(self, x, y)


# ---------------------------------------------------------------------------
# helpers


def _safe_eval(f, x, below, above, pivot):
    """Evaluate f elementwise-tolerantly: domain failures map to ``below``
    left of ``pivot`` and ``above`` right of it."""
    x = np.asarray(x, dtype=float)
    try:
        return np.asarray(f(x), dtype=float)
    except DomainError:
        pass
    flat = x.ravel()
    out = np.empty_like(flat)
    for i, xi in enumerate(flat):
        try:
            out[i] = f(xi)
        except DomainError:
            out[i] = below if xi < pivot else above
    return out.reshape(x.shape)


def _probe_points(E: Interval, anchor: float, side: int):
    """Scalar probe sequence from ``anchor`` toward one end of E (side=-1 or +1)."""
    end = E.lo if side < 0 else E.hi
    if math.isfinite(end):
        gap = anchor - end
        for j in range(1, 1100):
            p = end + gap * 2.0 ** (-j)
            if p == end:
                return
            yield p
    else:
        step = max(1.0, abs(anchor))
        for j in range(0, 1024):
            p = anchor + side * step * 2.0**j
            if not math.isfinite(p):
                return
            yield p


def _end_limit(H: Func1D, E: Interval, ref: float, side: int) -> float:
    """Approximate lim H(x) as x tends to one end of E (+-inf when divergent)."""
    end = E.lo if side < 0 else E.hi
    if math.isfinite(end):
        gap = ref - end
        probes = [end + gap * 10.0 ** (-k) for k in range(1, 21)]
        probes = [p for p in probes if p != end]
    else:
        base = max(1.0, abs(ref))
        probes = [ref + side * base * 10.0**k for k in range(0, 309)]
        probes = [p for p in probes if math.isfinite(p)]
    vals = []
    for p in probes:
        try:
            v = float(H.value(p))
        except DomainError:
            v = math.nan
        if not math.isfinite(v):
            break
        vals.append(v)
        if abs(v) > RANGE_INFINITY:
            break
    if not vals:
        raise GeneratorError("cannot evaluate the generator near the domain end")
    last = vals[-1]
    trend = 1.0 if len(vals) < 2 else math.copysign(1.0, vals[-1] - vals[-2])
    if abs(last) > RANGE_INFINITY or len(vals) < len(probes):
        return math.copysign(math.inf, last if abs(last) > RANGE_INFINITY else trend)
    if len(vals) >= 3:
        d1 = abs(vals[-1] - vals[-2])
        d0 = abs(vals[-2] - vals[-3])
        if d1 > 1e-9 * (1.0 + abs(last)) and d1 >= 0.5 * d0:
            return math.copysign(math.inf, vals[-1] - vals[-2])
        # Aitken extrapolation of the geometric tail
        e1, e0 = vals[-1] - vals[-2], vals[-2] - vals[-3]
        if e1 != e0 and d1 < d0:
            return last - e1 * e1 / (e1 - e0)
    return last


def _range_of(H: Func1D, E: Interval, direction: int, span: float) -> Interval:
    ref = finite_window(E, span).midpoint
    a = _end_limit(H, E, ref, -1)
    b = _end_limit(H, E, ref, +1)
    lo, hi = (a, b) if direction > 0 else (b, a)
    return Interval(lo, hi)


# ---------------------------------------------------------------------------
# operations


def make_generator(H, E: Interval = REAL_LINE, *, name: str = "", span: float = DEFAULT_SPAN,
                   analytic_inverse: Optional[Callable] = None, J: Optional[Interval] = None) -> Generator:
    """Build a generator from expression text, an Expr, or a Func1D.

    The sign of H' is checked on a 1001-point sweep of the (clamped, margined)
    domain; zeros are tolerated, a sign change is not.
    """
    if isinstance(H, Func1D):
        func = Func1D(H.value, H.derivs, E, H.provenance, H.label)
    else:
        func = Func1D.from_expr(H, E)
    window = finite_window(E, span).shrink(DEFAULT_MARGIN)
    xs = np.linspace(window.lo, window.hi, MONOTONE_SWEEP)
    try:
        d = np.asarray(func.deriv1(xs), dtype=float)
        func.value(xs)
    except DomainError as exc:
        raise GeneratorError(f"generator is not differentiable on {E}: {exc}") from None
    pos, neg = bool(np.any(d > 0)), bool(np.any(d < 0))
    if pos and neg:
        sg = np.sign(d)
        first = sg[np.nonzero(sg)[0][0]]
        i = int(np.argmax(sg == -first))
        raise MonotonicityError(f"H' changes sign on {E} (near x = {xs[i]:.6g})")
    if not (pos or neg):
        raise MonotonicityError("H' vanishes on the whole sweep; generator is not strictly monotone")
    direction = 1 if pos else -1
    if J is None:
        J = _range_of(func, E, direction, span)
    return Generator(func, direction, J, name or func.label, analytic_inverse, span)


def _power_expr(p: float):
    return BinOp("^", X, _expr._num(float(p)))


def power_mean_generator(p: float, E: Interval = POSITIVE) -> Generator:
    """H(x) = x^p with analytic inverse u^(1/p); E must lie in (0, inf)."""
    p = float(p)
    if p == 0:
        raise GeneratorError("power generator needs p != 0")
    if E.lo < 0:
        raise GeneratorError("power generator domain must lie in (0, inf)")
    with np.errstate(divide="ignore", over="ignore"):
        ends = np.power(np.array([E.lo, E.hi]), p)
    J = Interval(*sorted(ends))
    inv = lambda u: np.power(u, 1.0 / p)
    return make_generator(_power_expr(p), E, name=f"power:{p:g}", analytic_inverse=inv, J=J)


def builtin_generator(name: str, E: Optional[Interval] = None) -> Generator:
    """Look up ``identity``, ``ln``, ``exp`` or ``power:<p>``."""
    if name == "identity":
        E = E or REAL_LINE
        return make_generator(X, E, name="identity", analytic_inverse=lambda u: np.asarray(u, float) + 0.0, J=E)
    if name == "ln":
        E = E or POSITIVE
        if E.lo < 0:
            raise GeneratorError("ln generator domain must lie in (0, inf)")
        with np.errstate(divide="ignore"):
            J = Interval(*np.log([E.lo, E.hi]))
        return make_generator(Call("ln", X), E, name="ln", analytic_inverse=np.exp, J=J)
    if name == "exp":
        E = E or REAL_LINE
        with np.errstate(over="ignore"):
            J = Interval(*np.exp([E.lo, E.hi]))
        return make_generator(Call("exp", X), E, name="exp", analytic_inverse=np.log, J=J)
    if name.startswith("power:"):
        try:
            p = float(name.split(":", 1)[1])
        except ValueError:
            raise GeneratorError(f"bad power generator {name!r}") from None
        return power_mean_generator(p, E or POSITIVE)
    raise GeneratorError(f"unknown built-in generator {name!r}")


def resolve_generator(spec: str, E: Optional[Interval] = None, span: float = DEFAULT_SPAN) -> Generator:
    """Built-in name or expression text."""
    if spec in ("identity", "ln", "exp") or spec.startswith("power:"):
        return builtin_generator(spec, E)
    return make_generator(spec, E or REAL_LINE, span=span)


def inverse(gen: Generator, u):
    """Solve H(x) = u for x in E.

    Analytic inverses are used when attached. Otherwise: bracket by
    expanding from the domain midpoint, bisect, then polish with Newton
    steps that fall back to bisection when they leave the bracket.
    """
    u_arr = np.asarray(u, dtype=float)
    scalar = u_arr.ndim == 0
    u_arr = np.atleast_1d(u_arr)
    J = gen.J
    slack = INVERSE_RTOL * (1.0 + np.abs(u_arr))
    if np.any(u_arr <= J.lo - slack) or np.any(u_arr >= J.hi + slack) or not np.all(np.isfinite(u_arr)):
        bad = u_arr[(u_arr <= J.lo - slack) | (u_arr >= J.hi + slack) | ~np.isfinite(u_arr)][0]
        raise InversionError(f"value {bad:.17g} lies outside the generator range {J}")
    if gen.analytic_inverse is not None:
        with np.errstate(all="ignore"):
            x = np.asarray(gen.analytic_inverse(u_arr), dtype=float)
        if not np.all(np.isfinite(x)):
            raise InversionError("analytic inverse produced a non-finite value")
        return float(x[0]) if scalar else x
    x = _numeric_inverse(gen, u_arr)
    return float(x[0]) if scalar else x


def _numeric_inverse(gen: Generator, u: np.ndarray) -> np.ndarray:
    s = float(gen.direction)
    E = gen.E
    x0 = finite_window(E, gen.span).midpoint
    t = s * u
    k = lambda x: s * gen.H.value(x)
    ksafe = lambda x: _safe_eval(k, x, -math.inf, math.inf, x0)
    k0 = float(ksafe(np.array(x0)))

    lo = np.full_like(u, x0)
    hi = np.full_like(u, x0)
    need_down = t < k0
    need_up = t > k0
    for side, need in ((-1, need_down), (1, need_up)):
        if not np.any(need):
            continue
        pending = need.copy()
        prev = x0
        for p in _probe_points(E, x0, side):
            kp = float(ksafe(np.array(p)))
            hit = pending & ((kp <= t) if side < 0 else (kp >= t))
            if side < 0:
                lo[hit], hi[hit] = p, prev
            else:
                lo[hit], hi[hit] = prev, p
            pending &= ~hit
            if not np.any(pending):
                break
            prev = p
        if np.any(pending):
            raise InversionError(f"could not bracket H(x) = {u[pending][0]:.17g} inside {E}")

    tol = INVERSE_RTOL * (1.0 + np.abs(u))
    x = np.where(need_down | need_up, 0.5 * (lo + hi), x0)
    done = ~(need_down | need_up)
    for _ in range(MAX_BISECT):
        if np.all(done):
            break
        mid = 0.5 * (lo + hi)
        km = ksafe(mid)
        active = ~done
        below = active & (km < t)
        above = active & ~(km < t)
        lo = np.where(below, mid, lo)
        hi = np.where(above, mid, hi)
        x = np.where(active, mid, x)
        width = np.abs(hi - lo)
        conv = active & ((np.abs(km - t) <= tol) | (width <= 2 * np.spacing(np.abs(mid) + 1e-300)))
        done |= conv

    dk = lambda z: s * gen.H.deriv1(z)
    lo_b = np.minimum(lo, hi)
    hi_b = np.maximum(lo, hi)
    # polish until steps stall at rounding level, not merely until within tol
    open_ = np.ones_like(x, dtype=bool)
    for _ in range(MAX_NEWTON):
        r = ksafe(x) - t
        slope = _safe_eval(dk, x, math.nan, math.nan, x0)
        open_ &= r != 0
        if not np.any(open_):
            break
        with np.errstate(all="ignore"):
            cand = x - r / slope
        ok = open_ & np.isfinite(cand) & (cand >= lo_b) & (cand <= hi_b)
        lo_b = np.where(open_ & (r < 0), np.maximum(lo_b, x), lo_b)
        hi_b = np.where(open_ & (r > 0), np.minimum(hi_b, x), hi_b)
        fallback = open_ & ~ok & (np.abs(r) > tol)
        new = np.where(ok, cand, np.where(fallback, 0.5 * (lo_b + hi_b), x))
        open_ &= np.abs(new - x) > 2 * np.spacing(np.abs(x) + 1e-300)
        x = new
    return x


def mean(q: QuasiArithmeticMean, x, y):
    """h(x, y), clamped into [min(x, y), max(x, y)]."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    H = q.gen.H.value
    u = q.w.alpha * np.asarray(H(xa)) + q.w.beta * np.asarray(H(ya))
    h = np.asarray(inverse(q.gen, u), dtype=float)
    h = np.clip(h, np.minimum(xa, ya), np.maximum(xa, ya))
    return float(h) if h.ndim == 0 else h
