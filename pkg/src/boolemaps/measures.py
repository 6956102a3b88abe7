"""Analytic invariant densities and quasi-measures built from complex fixed points.

The density catalog collects the closed forms that Boole-type maps
preserve: Cauchy kernels, the single-pole ``sqrt(beta(1-alpha))`` family,
the Gauss density ``1/(ln 2 (1+x))``, the constant density of Lebesgue
measure, and half-plane quasi-measure densities ``Im[k/(omega - x)]``.

``quasi_measure_from_fixed_point`` realizes the construction that turns
each upper-half-plane fixed point ``omega = u + iv`` of a generalized
Boole map into the Poisson-kernel probability density
``v / (pi ((x-u)^2 + v^2))`` (normalization ``k = -1/pi``).  Fixed points
on the real axis yield degenerate (identically zero) densities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.integrate import quad

from .errors import DomainError
from .maps1d import (
    BooleMap1D,
    ClassicalBoole,
    Map1D,
    SpecialBoole,
    complex_fixed_points,
)

POISSON_K = -1.0 / math.pi
_DEGENERATE_IMAG = 1e-10


@dataclass(frozen=True)
class CauchyDensity:
    """``gamma / (pi ((x - center)^2 + gamma^2))``; integrates to 1."""

    center: float
    gamma: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    def __call__(self, x):
        xv = np.asarray(x, dtype=float) if np.ndim(x) else x
        return self.gamma / (math.pi * ((xv - self.center) ** 2 + self.gamma**2))

    def integral(self, lo: float, hi: float) -> float:
        t_hi = math.atan((hi - self.center) / self.gamma) if math.isfinite(hi) else math.pi / 2
        t_lo = math.atan((lo - self.center) / self.gamma) if math.isfinite(lo) else -math.pi / 2
        return (t_hi - t_lo) / math.pi

    def to_dict(self) -> dict:
        return {"variant": "cauchy", "center": self.center, "gamma": self.gamma}


@dataclass(frozen=True)
class AlphaBetaDensity:
    """``sqrt(beta(1-alpha)) / (pi (x^2 (1-alpha) + beta))`` for 0 < alpha < 1.

    Equals the Cauchy density centered at 0 with half-width
    ``sqrt(beta/(1-alpha))``.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0,1)")
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    @property
    def half_width(self) -> float:
        return math.sqrt(self.beta / (1.0 - self.alpha))

    def __call__(self, x):
        x = np.asarray(x, dtype=float) if np.ndim(x) else x
        num = math.sqrt(self.beta * (1.0 - self.alpha))
        return num / (math.pi * (x * x * (1.0 - self.alpha) + self.beta))

    def integral(self, lo: float, hi: float) -> float:
        return CauchyDensity(0.0, self.half_width).integral(lo, hi)

    def to_dict(self) -> dict:
        return {"variant": "alphabeta", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class GaussDensity:
    """``1 / (ln 2 (1 + x))`` on (0,1)."""

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        if np.any((xs <= 0.0) | (xs >= 1.0)):
            raise DomainError("GaussDensity defined on (0,1)")
        val = 1.0 / (math.log(2.0) * (1.0 + xs))
        return val if np.ndim(x) else float(val)

    def integral(self, lo: float, hi: float) -> float:
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        if hi <= lo:
            return 0.0
        return (math.log1p(hi) - math.log1p(lo)) / math.log(2.0)

    def to_dict(self) -> dict:
        return {"variant": "gauss"}


@dataclass(frozen=True)
class LebesgueUnit:
    """Constant density 1 (infinite total mass on the line)."""

    def __call__(self, x):
        return np.ones(np.shape(x)) if np.ndim(x) else 1.0

    def integral(self, lo: float, hi: float) -> float:
        return hi - lo

    def to_dict(self) -> dict:
        return {"variant": "lebesgue"}


@dataclass(frozen=True)
class QuasiMeasureDensity:
    """``x -> Im[k/(omega - x)]``, signed unless ``k`` is normalized.

    With ``omega = u + iv`` (v > 0) and the probability normalization
    ``k = -1/pi`` this is the Poisson kernel ``v/(pi((x-u)^2 + v^2))``.
    Real ``omega`` marks the degenerate case: the density is identically
    zero.
    """

    omega: complex
    k: complex = POISSON_K

    @property
    def degenerate(self) -> bool:
        return self.omega.imag <= _DEGENERATE_IMAG

    def __call__(self, x):
        if self.degenerate:
            return np.zeros(np.shape(x)) if np.ndim(x) else 0.0
        val = (self.k / (self.omega - np.asarray(x, dtype=complex))).imag
        return val if np.ndim(x) else float(val)

    def integral(self, lo: float, hi: float) -> float:
        if self.degenerate:
            return 0.0
        if math.isinf(lo) or math.isinf(hi):
            if abs(self.k.imag) > 0.0:
                raise DomainError("infinite integral diverges for Im k != 0")
            u, v = self.omega.real, self.omega.imag
            t_hi = math.atan((hi - u) / v) if math.isfinite(hi) else math.pi / 2
            t_lo = math.atan((lo - u) / v) if math.isfinite(lo) else -math.pi / 2
            return -self.k.real * (t_hi - t_lo)
        return (self.k * np.log((self.omega - lo) / (self.omega - hi))).imag

    def to_dict(self) -> dict:
        return {
            "variant": "quasi_measure",
            "omega": [self.omega.real, self.omega.imag],
            "k": [self.k.real, self.k.imag],
        }


@dataclass(frozen=True)
class GridDensity:
    """Piecewise-linear density from sample points (trapezoid integration)."""

    points: tuple
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.points) != len(self.values) or len(self.points) < 2:
            raise ValueError("need at least two (point, value) pairs")
        if any(p >= q for p, q in zip(self.points, self.points[1:])):
            raise ValueError("points must be strictly increasing")
        if any(v < 0 for v in self.values):
            raise ValueError("values must be nonnegative")

    @property
    def total_mass(self) -> float:
        return float(np.trapezoid(self.values, self.points))

    def __call__(self, x):
        val = np.interp(np.asarray(x, dtype=float), self.points, self.values, left=0.0, right=0.0)
        return val if np.ndim(x) else float(val)

    def integral(self, lo: float, hi: float) -> float:
        pts = np.asarray(self.points)
        lo = max(lo, pts[0])
        hi = min(hi, pts[-1])
        if hi <= lo:
            return 0.0
        inner = pts[(pts > lo) & (pts < hi)]
        xs = np.concatenate(([lo], inner, [hi]))
        return float(np.trapezoid(self(xs), xs))

    def to_dict(self) -> dict:
        return {"variant": "grid", "points": list(self.points), "values": list(self.values)}


DensitySpec = Union[
    CauchyDensity,
    AlphaBetaDensity,
    GaussDensity,
    LebesgueUnit,
    QuasiMeasureDensity,
    GridDensity,
]


def density_eval(d: DensitySpec, x: float) -> float:
    return d(x)


def density_integral(d: DensitySpec, interval) -> float:
    """Integral of the density over ``interval = (lo, hi)``.

    Closed forms for the analytic variants; trapezoid for grids.
    """
    lo, hi = float(interval[0]), float(interval[1])
    return d.integral(lo, hi)


def density_expectation(d: DensitySpec, f, interval=(-math.inf, math.inf), points=None) -> float:
    """Quadrature of ``f(x) * d(x)`` over the interval."""
    lo, hi = interval
    val, _ = quad(lambda x: f(x) * d(x), lo, hi, points=points, limit=400)
    return val


def density_from_dict(d: dict) -> DensitySpec:
    variant = d.get("variant")
    if variant == "cauchy":
        return CauchyDensity(d["center"], d["gamma"])
    if variant == "alphabeta":
        return AlphaBetaDensity(d["alpha"], d["beta"])
    if variant == "gauss":
        return GaussDensity()
    if variant == "lebesgue":
        return LebesgueUnit()
    if variant == "quasi_measure":
        return QuasiMeasureDensity(complex(*d["omega"]), complex(*d["k"]))
    if variant == "grid":
        return GridDensity(tuple(d["points"]), tuple(d["values"]))
    raise ValueError(f"unknown density variant {variant!r}")


class ErgodicityClass(enum.Enum):
    FINITE_ERGODIC = "finite_ergodic"
    INFINITE_ERGODIC_LEBESGUE = "infinite_ergodic_lebesgue"
    TOTALLY_DISSIPATIVE = "totally_dissipative"
    DEGENERATE = "degenerate"


def quasi_measure_from_fixed_point(m: Map1D) -> list:
    """One normalized quasi-measure per complex fixed point.

    Upper-half-plane fixed points produce Poisson-kernel probability
    densities (``k = -1/pi``); purely real fixed points produce degenerate
    markers with density identically zero.
    """
    fps = complex_fixed_points(m)
    out = []
    for w in fps.roots:
        if w.imag > _DEGENERATE_IMAG:
            out.append(QuasiMeasureDensity(omega=w))
        elif w.imag == 0.0:
            out.append(QuasiMeasureDensity(omega=w))
    return out


def classify_ergodicity(m: Map1D) -> ErgodicityClass:
    """Parameter test: (alpha, a) decide the measure class of a Boole map."""
    if isinstance(m, (ClassicalBoole, SpecialBoole, BooleMap1D)):
        bm = m.as_boole()
    else:
        raise DomainError(f"classification applies to Boole-type maps, not {type(m).__name__}")
    if bm.alpha == 1.0:
        if bm.a == 0.0:
            return ErgodicityClass.INFINITE_ERGODIC_LEBESGUE
        return ErgodicityClass.TOTALLY_DISSIPATIVE
    if complex_fixed_points(bm).upper:
        return ErgodicityClass.FINITE_ERGODIC
    return ErgodicityClass.DEGENERATE
