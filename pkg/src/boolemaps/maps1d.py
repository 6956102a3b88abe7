"""One-dimensional map catalog.

The central object is the generalized Boole transformation

    phi(y) = alpha*y + a - sum_j betas[j] / (y - bs[j]),

an (N+1)-to-1 surjection of the real line with simple poles at the
``bs[j]``.  Alongside it the module provides the classical Boole map
``y - 1/y``, the single-pole special form ``alpha*y + a - beta/(y - b)``,
and three unit-interval maps (baker/tent, Gauss, doubling) used by the
measure-generating-function machinery.

All map objects are immutable values.  Point preimages are found by
clearing denominators into a monic degree-(N+1) polynomial, seeding with
companion-matrix roots and polishing with safeguarded Newton steps inside
the map's monotone intervals, which brackets every root.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DegenerateEquation,
    DomainError,
    PoleProximity,
    RootSolveFailure,
    UnsupportedMap,
)

GAUSS_BRANCH_LIMIT = 64
_RESIDUAL_TOL = 1e-9
_REAL_SNAP = 1e-9
_UPPER_MIN_IMAG = 1e-10


def pole_radius(b: float) -> float:
    """Exclusion radius around a pole at ``b``."""
    return 1e-12 * (1.0 + abs(b))


@dataclass(frozen=True)
class BooleMap1D:
    """Generalized Boole transformation with ``N = len(betas)`` poles.

    Parameters
    ----------
    alpha : positive slope at infinity
    a : additive shift
    betas : positive pole strengths
    bs : pole locations, strictly increasing
    """

    alpha: float
    a: float
    betas: tuple
    bs: tuple

    domain = "line"

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "bs", tuple(float(b) for b in self.bs))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "a", float(self.a))
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if len(self.betas) != len(self.bs) or not self.betas:
            raise ValueError("betas and bs must be nonempty and equal length")
        if any(b <= 0 for b in self.betas):
            raise ValueError("every beta must be positive")
        if any(p >= q for p, q in zip(self.bs, self.bs[1:])):
            raise ValueError("pole locations must be strictly increasing")

    @property
    def n_poles(self) -> int:
        return len(self.bs)

    def _check_pole(self, y: float) -> None:
        for b in self.bs:
            if abs(y - b) < pole_radius(b):
                raise PoleProximity(f"y={y!r} within exclusion radius of pole {b!r}")

    def __call__(self, y: float) -> float:
        self._check_pole(y)
        s = self.alpha * y + self.a
        for beta, b in zip(self.betas, self.bs):
            s -= beta / (y - b)
        return s

    def derivative(self, y: float) -> float:
        self._check_pole(y)
        s = self.alpha
        for beta, b in zip(self.betas, self.bs):
            s += beta / (y - b) ** 2
        return s

    def eval_complex(self, w: complex) -> complex:
        s = self.alpha * w + self.a
        for beta, b in zip(self.betas, self.bs):
            s -= beta / (w - b)
        return s

    def eval_many(self, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=float)
        s = self.alpha * ys + self.a
        for beta, b in zip(self.betas, self.bs):
            s -= beta / (ys - b)
        return s

    def pole_mask(self, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=float)
        mask = np.zeros(ys.shape, dtype=bool)
        for b in self.bs:
            mask |= np.abs(ys - b) < pole_radius(b)
        return mask

    def as_boole(self) -> "BooleMap1D":
        return self

    def to_dict(self) -> dict:
        return {
            "type": "generalized_boole",
            "alpha": self.alpha,
            "a": self.a,
            "betas": list(self.betas),
            "bs": list(self.bs),
        }


@dataclass(frozen=True)
class ClassicalBoole:
    """The map ``y -> y - 1/y``."""

    domain = "line"

    def as_boole(self) -> BooleMap1D:
        return BooleMap1D(1.0, 0.0, (1.0,), (0.0,))

    def __call__(self, y: float) -> float:
        return self.as_boole()(y)

    def derivative(self, y: float) -> float:
        return self.as_boole().derivative(y)

    def eval_many(self, ys: np.ndarray) -> np.ndarray:
        return self.as_boole().eval_many(ys)

    def pole_mask(self, ys: np.ndarray) -> np.ndarray:
        return self.as_boole().pole_mask(ys)

    def to_dict(self) -> dict:
        return {"type": "classical_boole"}


@dataclass(frozen=True)
class SpecialBoole:
    """Single-pole form ``alpha*y + a - beta/(y - b)``.

    Carries the derived scale ``gamma = sqrt(2*beta)``; for
    ``alpha = 1/2`` and ``b = 2*a`` the map preserves the Cauchy density
    centered at ``2*a`` with half-width ``gamma``.
    """

    alpha: float
    a: float
    b: float
    beta: float

    domain = "line"

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")

    @property
    def gamma(self) -> float:
        return math.sqrt(2.0 * self.beta)

    def as_boole(self) -> BooleMap1D:
        return BooleMap1D(self.alpha, self.a, (self.beta,), (self.b,))

    def __call__(self, y: float) -> float:
        return self.as_boole()(y)

    def derivative(self, y: float) -> float:
        return self.as_boole().derivative(y)

    def eval_many(self, ys: np.ndarray) -> np.ndarray:
        return self.as_boole().eval_many(ys)

    def pole_mask(self, ys: np.ndarray) -> np.ndarray:
        return self.as_boole().pole_mask(ys)

    def to_dict(self) -> dict:
        return {
            "type": "special_boole",
            "alpha": self.alpha,
            "a": self.a,
            "b": self.b,
            "beta": self.beta,
        }


def _check_unit_domain(y: float, lo_open: bool = False) -> None:
    if y < 0.0 or y > 1.0 or (lo_open and y == 0.0):
        raise DomainError(f"y={y!r} outside the map domain")


@dataclass(frozen=True)
class Baker:
    """Tent map ``2x`` on [0,1/2), ``2(1-x)`` on [1/2,1]."""

    domain = "unit"

    def __call__(self, y: float) -> float:
        _check_unit_domain(y)
        return 2.0 * y if y < 0.5 else 2.0 * (1.0 - y)

    def derivative(self, y: float) -> float:
        _check_unit_domain(y)
        return 2.0 if y < 0.5 else -2.0

    def eval_many(self, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=float)
        return np.where(ys < 0.5, 2.0 * ys, 2.0 * (1.0 - ys))

    def pole_mask(self, ys: np.ndarray) -> np.ndarray:
        return np.zeros(np.asarray(ys).shape, dtype=bool)

    def to_dict(self) -> dict:
        return {"type": "baker"}


@dataclass(frozen=True)
class Doubling:
    """Shift map ``2x mod 1`` on [0,1]."""

    domain = "unit"

    def __call__(self, y: float) -> float:
        _check_unit_domain(y)
        return (2.0 * y) % 1.0

    def derivative(self, y: float) -> float:
        _check_unit_domain(y)
        return 2.0

    def eval_many(self, ys: np.ndarray) -> np.ndarray:
        return (2.0 * np.asarray(ys, dtype=float)) % 1.0

    def pole_mask(self, ys: np.ndarray) -> np.ndarray:
        return np.zeros(np.asarray(ys).shape, dtype=bool)

    def to_dict(self) -> dict:
        return {"type": "doubling"}


@dataclass(frozen=True)
class Gauss:
    """Continued-fraction map ``{1/x}`` on (0,1]."""

    domain = "unit"

    def __call__(self, y: float) -> float:
        _check_unit_domain(y, lo_open=True)
        inv = 1.0 / y
        return inv - math.floor(inv)

    def derivative(self, y: float) -> float:
        _check_unit_domain(y, lo_open=True)
        return -1.0 / (y * y)

    def eval_many(self, ys: np.ndarray) -> np.ndarray:
        inv = 1.0 / np.asarray(ys, dtype=float)
        return inv - np.floor(inv)

    def pole_mask(self, ys: np.ndarray) -> np.ndarray:
        return np.asarray(ys) <= 0.0

    def to_dict(self) -> dict:
        return {"type": "gauss"}


Map1D = Union[BooleMap1D, ClassicalBoole, SpecialBoole, Baker, Doubling, Gauss]

_UNIT_MAPS = (Baker, Doubling, Gauss)
_BOOLE_LIKE = (BooleMap1D, ClassicalBoole, SpecialBoole)


def eval_map(m: Map1D, y: float) -> float:
    return m(y)


def eval_derivative(m: Map1D, y: float) -> float:
    return m.derivative(y)


@dataclass(frozen=True)
class PreimageSet:
    """All real solutions of ``phi(y) = x`` with weights ``1/|phi'(y)|``."""

    x: float
    branches: tuple  # ((y, weight), ...) ascending in y

    @property
    def ys(self) -> np.ndarray:
        return np.array([y for y, _ in self.branches])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.branches])

    @property
    def weight_sum(self) -> float:
        return float(sum(w for _, w in self.branches))


def _preimage_poly(m: BooleMap1D, x: float) -> np.ndarray:
    # (alpha*y + a - x) * prod_j (y - b_j) - sum_j beta_j * prod_{k != j} (y - b_k)
    p = np.array([m.alpha, m.a - x])
    for b in m.bs:
        p = np.polymul(p, [1.0, -b])
    q = np.zeros(1)
    for j, beta in enumerate(m.betas):
        t = np.array([beta])
        for k, b in enumerate(m.bs):
            if k != j:
                t = np.polymul(t, [1.0, -b])
        q = np.polyadd(q, t)
    return np.polysub(p, q)


def _bracketed_root(m: BooleMap1D, x: float, lo: float, hi: float, guess: float) -> float:
    """Root of ``phi(y) - x`` on the monotone interval (lo, hi).

    ``lo``/``hi`` may be -inf/+inf; ``phi - x`` goes from -inf to +inf on
    the interval, so a sign change always brackets the root.
    """

    def g(y: float) -> float:
        return m(y) - x

    width = hi - lo if (math.isfinite(lo) and math.isfinite(hi)) else math.inf
    if math.isinf(lo):
        step = max(1.0, abs(x) / m.alpha + 1.0)
        left = (hi if not math.isinf(hi) else 0.0) - step
        while g(left) >= 0.0:
            step *= 2.0
            left -= step
    else:
        off = min(1e-3 * (1.0 + abs(lo)), 0.25 * width)
        left = lo + off
        while g(left) >= 0.0:
            off *= 0.25
            left = lo + off
            if off < 4.0 * pole_radius(lo):
                raise RootSolveFailure(f"no bracket above pole {lo!r}")
    if math.isinf(hi):
        step = max(1.0, abs(x) / m.alpha + 1.0)
        right = (lo if not math.isinf(lo) else 0.0) + step
        while g(right) <= 0.0:
            step *= 2.0
            right += step
    else:
        off = min(1e-3 * (1.0 + abs(hi)), 0.25 * width)
        right = hi - off
        while g(right) <= 0.0:
            off *= 0.25
            right = hi - off
            if off < 4.0 * pole_radius(hi):
                raise RootSolveFailure(f"no bracket below pole {hi!r}")

    y = guess if left < guess < right else 0.5 * (left + right)
    for _ in range(200):
        gy = g(y)
        if gy == 0.0:
            return y
        if gy > 0.0:
            right = y
        else:
            left = y
        y_new = y - gy / m.derivative(y)
        if y_new == y:
            return y
        if not (left < y_new < right):
            y_new = 0.5 * (left + right)
            if y_new == left or y_new == right:
                return y
        y = y_new
    return y


def preimages(m: Map1D, x: float) -> PreimageSet:
    """Solve ``phi(y) = x`` on every monotone branch of a Boole-type map."""
    if not isinstance(m, _BOOLE_LIKE):
        raise UnsupportedMap(f"preimages not defined for {type(m).__name__}")
    bm = m.as_boole()
    if not math.isfinite(x):
        raise DomainError("x must be finite")

    guesses = np.sort(np.roots(_preimage_poly(bm, x)).real)
    edges = (-math.inf,) + bm.bs + (math.inf,)
    roots = []
    for i in range(bm.n_poles + 1):
        lo, hi = edges[i], edges[i + 1]
        inside = [g for g in guesses if lo < g < hi]
        guess = inside[0] if inside else 0.5 * (max(lo, -1e6) + min(hi, 1e6))
        y = _bracketed_root(bm, x, lo, hi, guess)
        if abs(bm(y) - x) > _RESIDUAL_TOL * max(1.0, abs(x)):
            raise RootSolveFailure(
                f"residual {abs(bm(y) - x):.3e} at branch {i} of x={x!r}"
            )
        roots.append(y)
    branches = tuple((y, 1.0 / bm.derivative(y)) for y in roots)
    return PreimageSet(x=x, branches=branches)


@dataclass(frozen=True)
class ComplexFixedPoints:
    """Roots of ``phi(w) = w`` under the complex extension of the map."""

    roots: tuple  # complex, sorted by real part
    upper: tuple  # the subset with imaginary part > 1e-10

    @property
    def n_roots(self) -> int:
        return len(self.roots)


def _fixed_point_poly(m: BooleMap1D) -> np.ndarray:
    # (alpha-1)*w*prod(w-b) + a*prod(w-b) - sum_j beta_j prod_{k!=j}(w-b_k)
    p = np.array([m.alpha - 1.0, m.a])
    for b in m.bs:
        p = np.polymul(p, [1.0, -b])
    q = np.zeros(1)
    for j, beta in enumerate(m.betas):
        t = np.array([beta])
        for k, b in enumerate(m.bs):
            if k != j:
                t = np.polymul(t, [1.0, -b])
        q = np.polyadd(q, t)
    coeffs = np.polysub(p, q)
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        raise DegenerateEquation("fixed-point polynomial is identically zero")
    nz = np.nonzero(np.abs(coeffs) > 1e-14 * scale)[0]
    return coeffs[nz[0]:]

def _poly_rel_residual(coeffs: np.ndarray, w: complex) -> float:
    num = abs(np.polyval(coeffs, w))
    den = float(np.sum(np.abs(coeffs) * np.abs(w) ** np.arange(len(coeffs) - 1, -1, -1)))
    return num / max(den, 1e-300)


def complex_fixed_points(m: Map1D) -> ComplexFixedPoints:
    """All fixed points of the complex extension, polished to 1e-12."""
    if not isinstance(m, _BOOLE_LIKE):
        raise UnsupportedMap(f"fixed points not defined for {type(m).__name__}")
    bm = m.as_boole()
    coeffs = _fixed_point_poly(bm)
    if len(coeffs) == 1:
        return ComplexFixedPoints(roots=(), upper=())
    roots = np.roots(coeffs).astype(complex)
    dcoeffs = np.polyder(coeffs)
    polished = []
    for w in roots:
        for _ in range(50):
            pw = np.polyval(coeffs, w)
            dw = np.polyval(dcoeffs, w)
            if dw == 0:
                break
            step = pw / dw
            w = w - step
            if abs(step) < 1e-16 * (1.0 + abs(w)):
                break
        if _poly_rel_residual(coeffs, w) > 1e-12:
            raise RootSolveFailure(f"fixed point {w!r} residual above 1e-12")
        if abs(w.imag) <= _REAL_SNAP * (1.0 + abs(w.real)):
            w = complex(w.real, 0.0)
        polished.append(w)
    polished.sort(key=lambda z: (z.real, z.imag))
    upper = tuple(w for w in polished if w.imag > _UPPER_MIN_IMAG)
    return ComplexFixedPoints(roots=tuple(polished), upper=upper)


def interval_preimage(m: Map1D, interval) -> list:
    """Disjoint intervals mapping onto ``interval`` under one step of the map.

    Gauss preimages are truncated to the first ``GAUSS_BRANCH_LIMIT``
    continued-fraction branches (mass loss at most 1/GAUSS_BRANCH_LIMIT).
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not (lo < hi):
        raise DomainError(f"need lo < hi, got {interval!r}")
    if isinstance(m, Doubling):
        if lo < 0.0 or hi > 1.0:
            raise DomainError("interval outside [0,1]")
        return [(0.5 * lo, 0.5 * hi), (0.5 * (lo + 1.0), 0.5 * (hi + 1.0))]
    if isinstance(m, Baker):
        if lo < 0.0 or hi > 1.0:
            raise DomainError("interval outside [0,1]")
        return [(0.5 * lo, 0.5 * hi), (1.0 - 0.5 * hi, 1.0 - 0.5 * lo)]
    if isinstance(m, Gauss):
        if lo < 0.0 or hi > 1.0:
            raise DomainError("interval outside [0,1]")
        return [
            (1.0 / (k + hi), 1.0 / (k + lo))
            for k in range(1, GAUSS_BRANCH_LIMIT + 1)
        ]
    raise UnsupportedMap(f"interval_preimage not implemented for {type(m).__name__}")


_MAP_TYPES = {
    "classical_boole": ClassicalBoole,
    "baker": Baker,
    "gauss": Gauss,
    "doubling": Doubling,
}


def map_to_dict(m: Map1D) -> dict:
    return m.to_dict()


def map_from_dict(d: dict) -> Map1D:
    kind = d.get("type")
    if kind == "generalized_boole":
        return BooleMap1D(d["alpha"], d["a"], tuple(d["betas"]), tuple(d["bs"]))
    if kind == "special_boole":
        return SpecialBoole(d["alpha"], d["a"], d["b"], d["beta"])
    if kind in _MAP_TYPES:
        return _MAP_TYPES[kind]()
    raise ValueError(f"unknown map type {kind!r}")


def map_from_json(s: str) -> Map1D:
    return map_from_dict(json.loads(s))
