"""Open intervals, real functions with attached derivatives, and sampling plans."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import expr as _expr

DEFAULT_MARGIN = 1e-3
DEFAULT_SPAN = 20.0

PROVENANCES = ("expression", "family", "sample")


@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi); either end may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise ValueError(f"interval needs lo < hi, got ({self.lo}, {self.hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __contains__(self, x) -> bool:
        return self.lo < x < self.hi

    @property
    def finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def semi_infinite(self) -> bool:
        return math.isfinite(self.lo) != math.isfinite(self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def shrink(self, margin: float) -> "Interval":
        """Shrink by ``margin * width`` on each side (finite intervals only)."""
        d = margin * self.width
        return Interval(self.lo + d, self.hi - d)

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def as_tuple(self):
        return (self.lo, self.hi)

    def __str__(self):
        return f"({_fmt_end(self.lo)}, {_fmt_end(self.hi)})"


def _fmt_end(v):
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return f"{v:.12g}"


REAL_LINE = Interval(-math.inf, math.inf)
POSITIVE = Interval(0.0, math.inf)


def parse_interval(text: str) -> Interval:
    """Parse ``"lo,hi"``; accepts ``inf``/``-inf``."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"domain must look like 'lo,hi', got {text!r}")
    try:
        lo, hi = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"domain must look like 'lo,hi', got {text!r}") from None
    return Interval(lo, hi)


def finite_window(iv: Interval, span: float = DEFAULT_SPAN) -> Interval:
    if span <= 0:
        raise ValueError("span must be positive")
    if iv.finite:
        return iv
    if math.isfinite(iv.lo):
        return Interval(iv.lo, iv.lo + span)
    if math.isfinite(iv.hi):
        return Interval(iv.hi - span, iv.hi)
    return Interval(-span / 2, span / 2)


@dataclass(frozen=True)
class Func1D:
    """A real function on an open interval together with its derivatives.

    ``derivs[k]`` is the (k+1)-th derivative; at least the first is always
    present. All callables accept scalars or numpy arrays.
    """

    value: Callable
    derivs: tuple
    domain: Interval = REAL_LINE
    provenance: str = "expression"
    label: str = ""

    def __post_init__(self):
        if not self.derivs:
            raise ValueError("Func1D needs at least a first derivative")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "derivs", tuple(self.derivs))

    def __call__(self, x):
        return self.value(x)

    @property
    def deriv1(self) -> Callable:
        return self.derivs[0]

    @property
    def deriv2(self) -> Optional[Callable]:
        return self.derivative(2)

    @property
    def order(self) -> int:
        return len(self.derivs)

    @property
    def exact(self) -> bool:
        """Whether the attached derivatives are analytic rather than interpolated."""
        return self.provenance != "sample"

    def derivative(self, k: int) -> Optional[Callable]:
        if k == 0:
            return self.value
        return self.derivs[k - 1] if k <= len(self.derivs) else None

    def values(self, x, order: int):
        """Return ``[f(x), f'(x), ..., f^(order)(x)]``."""
        out = []
        for k in range(order + 1):
            fk = self.derivative(k)
            if fk is None:
                raise ValueError(f"{self.label or 'function'} carries no derivative of order {k}")
            out.append(fk(x))
        return out

    @classmethod
    def from_expr(cls, src, domain: Interval = REAL_LINE, order: int = 3) -> "Func1D":
        e = _expr.as_expr(src)
        exprs = [e]
        for _ in range(order):
            exprs.append(_expr.differentiate(exprs[-1]))
        fns = [_bind(c) for c in exprs]
        label = src if isinstance(src, str) else _expr.serialize(e)
        return cls(fns[0], tuple(fns[1:]), domain, "expression", label)

    @classmethod
    def from_samples(cls, xs: Sequence[float], ys: Sequence[float], label: str = "") -> "Func1D":
        """Quintic interpolating spline through strictly increasing samples."""
        from scipy.interpolate import make_interp_spline

        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape:
            raise ValueError("sample arrays must be one-dimensional and of equal length")
        if len(xs) < 8:
            raise ValueError("need at least 8 samples")
        if not np.all(np.diff(xs) > 0):
            raise ValueError("sample abscissae must be strictly increasing")
        spl = make_interp_spline(xs, ys, k=5)
        derivs = tuple(_spline_fn(spl.derivative(k)) for k in (1, 2, 3))
        return cls(_spline_fn(spl), derivs, Interval(xs[0], xs[-1]), "sample", label)


def _bind(e):
    def fn(x):
        return _expr.evaluate(e, x)

    fn.expr = e
    return fn


def _spline_fn(spl):
    def fn(x):
        out = spl(np.asarray(x, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    return fn


def chain(outer, inner):
    """Derivatives of a composition, up to third order (Faa di Bruno).

    ``outer`` holds P, P', P'', ... evaluated at the inner value; ``inner``
    holds h, h', h'', ... . Returns the composite values, truncated to the
    shorter of the two lists (at most order 3).
    """
    n = min(len(outer), len(inner), 4)
    out = [outer[0]]
    if n > 1:
        out.append(outer[1] * inner[1])
    if n > 2:
        out.append(outer[2] * inner[1] ** 2 + outer[1] * inner[2])
    if n > 3:
        out.append(outer[3] * inner[1] ** 3 + 3 * outer[2] * inner[1] * inner[2] + outer[1] * inner[3])
    return out


def affine(f: Func1D, scale: float, shift: float = 0.0, label: str = "") -> Func1D:
    """``scale * f + shift`` with derivatives scaled accordingly."""
    derivs = tuple(_scaled(d, scale) for d in f.derivs)
    value = lambda x: scale * np.asarray(f.value(x)) + shift
    return Func1D(_squeeze(value), derivs, f.domain, f.provenance, label or f"{scale:g}*({f.label})+{shift:g}")


def _scaled(d, scale):
    return _squeeze(lambda x: scale * np.asarray(d(x)))


def _squeeze(fn):
    def wrapped(x):
        out = fn(x)
        return float(out) if np.ndim(out) == 0 else out

    return wrapped


@dataclass(frozen=True)
class SamplePlan:
    window: Interval
    count: int
    mode: str = "uniform"
    seed: int = 0
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if not self.window.finite:
            raise ValueError("sample window must be finite")
        if self.count < 1:
            raise ValueError("count must be positive")
        if self.mode not in ("uniform", "uniform-plus-random"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        if not 0 < self.margin <= 0.25:
            raise ValueError("margin must lie in (0, 1/4]")

    @property
    def inner(self) -> Interval:
        return self.window.shrink(self.margin)


def sample(plan: SamplePlan) -> np.ndarray:
    """Strictly increasing points inside the margined window.

    ``uniform`` gives an arithmetic progression that includes both margined
    endpoints. ``uniform-plus-random`` jitters each progression point by at
    most a quarter spacing (inward only at the two ends), seeded by ``plan.seed``.
    """
    inner = plan.inner
    if plan.count == 1:
        return np.array([inner.midpoint])
    pts = np.linspace(inner.lo, inner.hi, plan.count)
    if plan.mode == "uniform":
        return pts
    rng = np.random.default_rng(plan.seed)
    step = pts[1] - pts[0]
    jitter = rng.uniform(-0.25, 0.25, plan.count) * step
    jitter[0] = abs(jitter[0])
    jitter[-1] = -abs(jitter[-1])
    return pts + jitter


def random_points(window: Interval, count: int, seed: int, margin: float = DEFAULT_MARGIN) -> np.ndarray:
    inner = window.shrink(margin)
    rng = np.random.default_rng(seed)
    return rng.uniform(inner.lo, inner.hi, count)


def grid(window: Interval, n: int, margin: float = DEFAULT_MARGIN) -> np.ndarray:
    return sample(SamplePlan(window, n, margin=margin))
