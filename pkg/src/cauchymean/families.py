"""Exact solution families and the bounded-interval counterexample.

Every solution (phi, psi) of the mean-value equation is either linearly
dependent with 1, or both functions live in one of three three-dimensional
spaces composed with the generator H:

* quadratic:      span{1, H, H^2}
* exponential:    span{1, exp(mu H), exp(-mu H)}
* trigonometric:  span{1, sin(mu H), cos(mu H)}
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .funcmodel import Func1D, Interval, affine, chain
from .qam import Generator

DEPENDENT = "Dependent"
QUADRATIC = "Quadratic"
EXPONENTIAL = "Exponential"
TRIGONOMETRIC = "Trigonometric"
TYPED_CASES = (QUADRATIC, EXPONENTIAL, TRIGONOMETRIC)
CASES = (DEPENDENT,) + TYPED_CASES

MAX_ORDER = 3


class FamilySpecError(ValueError):
    pass


def basis(case: str, mu: Optional[float], u, k: int = 0):
    """k-th derivative (in u) of the three basis functions, stacked on axis 0."""
    u = np.asarray(u, dtype=float)
    one = np.ones_like(u)
    zero = np.zeros_like(u)
    if case == QUADRATIC:
        rows = {0: (one, u, u * u), 1: (zero, one, 2 * u), 2: (zero, zero, 2 * one)}.get(k, (zero, zero, zero))
        return np.stack(rows)
    if case == EXPONENTIAL:
        ep, em = np.exp(mu * u), np.exp(-mu * u)
        return np.stack((one if k == 0 else zero, mu**k * ep, (-mu) ** k * em))
    if case == TRIGONOMETRIC:
        s, c = np.sin(mu * u), np.cos(mu * u)
        cycle = [(s, c), (c, -s), (-s, -c), (-c, s)][k % 4]
        return np.stack((one if k == 0 else zero, mu**k * cycle[0], mu**k * cycle[1]))
    raise FamilySpecError(f"no basis for case {case!r}")


def combination(case: str, mu: Optional[float], coeffs: Sequence[float], u, k: int = 0):
    return np.tensordot(np.asarray(coeffs, dtype=float), basis(case, mu, u, k), axes=1)


@dataclass(frozen=True)
class FamilySpec:
    case: str
    coeffs_phi: tuple = (0.0, 0.0, 0.0)
    coeffs_psi: tuple = (0.0, 0.0, 0.0)
    mu: Optional[float] = None
    dependence: Optional[tuple] = None
    free: Optional[str] = None

    def __post_init__(self):
        if self.case not in CASES:
            raise FamilySpecError(f"unknown case {self.case!r}; expected one of {CASES}")
        cphi = tuple(float(c) for c in self.coeffs_phi)
        cpsi = tuple(float(c) for c in self.coeffs_psi)
        if len(cphi) != 3 or len(cpsi) != 3:
            raise FamilySpecError("coefficient vectors must have length 3")
        mu = self.mu
        if self.case in (EXPONENTIAL, TRIGONOMETRIC):
            if mu is None or not np.isfinite(mu) or mu == 0:
                raise FamilySpecError(f"{self.case} family needs a non-zero mu")
            mu = float(mu)
            if mu < 0:
                # mu -> -mu permutes the exponential basis and flips sin
                mu = -mu
                if self.case == EXPONENTIAL:
                    cphi = (cphi[0], cphi[2], cphi[1])
                    cpsi = (cpsi[0], cpsi[2], cpsi[1])
                else:
                    cphi = (cphi[0], -cphi[1], cphi[2])
                    cpsi = (cpsi[0], -cpsi[1], cpsi[2])
        elif mu is not None:
            raise FamilySpecError(f"{self.case} family takes no mu")
        dep = self.dependence
        if self.case == DEPENDENT:
            if dep is None or len(dep) != 3:
                raise FamilySpecError("Dependent family needs dependence constants (c1, c2, c3)")
            dep = tuple(float(c) for c in dep)
            if dep[0] == 0 and dep[1] == 0:
                raise FamilySpecError("c1 = c2 = 0 gives no usable dependence")
            if not self.free:
                raise FamilySpecError("Dependent family needs a free function expression")
        elif dep is not None:
            raise FamilySpecError("only the Dependent family carries dependence constants")
        object.__setattr__(self, "coeffs_phi", cphi)
        object.__setattr__(self, "coeffs_psi", cpsi)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "dependence", dep)

    def to_dict(self) -> dict:
        d = {"case": self.case, "coeffsPhi": list(self.coeffs_phi), "coeffsPsi": list(self.coeffs_psi)}
        if self.mu is not None:
            d["mu"] = self.mu
        if self.dependence is not None:
            d["dependence"] = list(self.dependence)
            d["free"] = self.free
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "FamilySpec":
        try:
            return cls(
                case=d["case"],
                coeffs_phi=tuple(d.get("coeffsPhi", (0, 0, 0))),
                coeffs_psi=tuple(d.get("coeffsPsi", (0, 0, 0))),
                mu=d.get("mu"),
                dependence=tuple(d["dependence"]) if d.get("dependence") is not None else None,
                free=d.get("free"),
            )
        except KeyError as exc:
            raise FamilySpecError(f"missing key {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "FamilySpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SolutionPair:
    phi: Func1D
    psi: Func1D
    gen: Generator
    spec: FamilySpec


def _composed(case, mu, coeffs, gen: Generator, label: str) -> Func1D:
    H = gen.H
    order = min(MAX_ORDER, H.order)

    def at(k):
        def fn(x):
            xa = np.asarray(x, dtype=float)
            hv = H.values(xa, k)
            outer = [combination(case, mu, coeffs, hv[0], j) for j in range(k + 1)]
            out = chain(outer, hv)[k]
            return float(out) if np.ndim(out) == 0 else out

        return fn

    return Func1D(at(0), tuple(at(k) for k in range(1, order + 1)), H.domain, "family", label)


def build_pair(spec: FamilySpec, gen: Generator) -> SolutionPair:
    """(phi, psi) = (P o H, Q o H) with chain-rule derivatives attached."""
    if spec.case == DEPENDENT:
        c1, c2, c3 = spec.dependence
        free = Func1D.from_expr(spec.free, gen.E)
        if c1 != 0:
            psi = free
            phi = affine(free, -c2 / c1, -c3 / c1, label=f"dependent phi ({spec.free})")
        else:
            phi = free
            psi = affine(free, 0.0, -c3 / c2, label="constant psi")
        phi = Func1D(phi.value, phi.derivs, gen.E, "family", phi.label)
        psi = Func1D(psi.value, psi.derivs, gen.E, "family", psi.label)
        return SolutionPair(phi, psi, gen, spec)
    phi = _composed(spec.case, spec.mu, spec.coeffs_phi, gen, f"{spec.case} phi")
    psi = _composed(spec.case, spec.mu, spec.coeffs_psi, gen, f"{spec.case} psi")
    return SolutionPair(phi, psi, gen, spec)


# ---------------------------------------------------------------------------
# counterexample on a bounded interval

_F_KNOT = 4.0 / 5.0
_G_KNOT = 2.0 / 5.0


@dataclass(frozen=True)
class CounterexamplePair:
    F: Func1D
    G: Func1D
    c1: float
    c2: float


def _piecewise(active, shift, knot):
    # (x - knot)^2 + shift where active(x), else shift; exact derivatives
    def make(k):
        def fn(x):
            xa = np.asarray(x, dtype=float)
            m = active(xa)
            d = xa - knot
            if k == 0:
                out = np.where(m, d * d, 0.0) + shift
            elif k == 1:
                out = np.where(m, 2 * d, 0.0)
            elif k == 2:
                out = np.where(m, 2.0, 0.0)
            else:
                out = np.zeros_like(xa)
            return float(out) if np.ndim(out) == 0 else out

        return fn

    return make


def counterexample_pair(c1: float = 0.0, c2: float = 0.0) -> CounterexamplePair:
    """F flat on (0, 4/5] then quadratic; G quadratic on (0, 2/5) then flat."""
    J = Interval(0.0, 1.0)
    mf = _piecewise(lambda x: x > _F_KNOT, c1, _F_KNOT)
    mg = _piecewise(lambda x: x < _G_KNOT, c2, _G_KNOT)
    F = Func1D(mf(0), (mf(1), mf(2), mf(3)), J, "family", "counterexample F")
    G = Func1D(mg(0), (mg(1), mg(2), mg(3)), J, "family", "counterexample G")
    return CounterexamplePair(F, G, float(c1), float(c2))
