"""Measure generating functions, Schur averages, and the Abel limit.

For a unit-interval map ``phi`` and a normalized base measure ``mu`` the
pulled-back values ``mu(phi^{-k} A)`` feed three summaries:

* ``mgf_partial`` -- the truncated power series ``sum lam^k mu(phi^{-k}A)``
  with its geometric tail bound,
* ``schur_average`` -- the Cesaro mean ``(1/n) sum mu(phi^{-k}A)``,
* ``abel_limit`` -- the scaled series ``(1-lam) * mgf`` along the schedule
  ``lam_m = 1 - 2^-m`` with a Richardson-extrapolated limit.

Pullbacks are computed by iterated interval preimages.  Branch counts for
the doubling and baker maps double per level, so beyond the enumeration
cap both maps switch to an equivalent transfer-operator recursion on a
dyadic grid.  The recursion is exact (to rounding) whenever the base
density is piecewise linear with dyadic breakpoints, which covers the
constant and polynomial-degree-one bases used throughout.

The module also evaluates the Poisson-kernel representation of a
generating function given a discrete Stieltjes measure on [0, 2pi], and
the baker-map series expansions of ``2x - x^2`` together with the
Takagi-type sum ``sum 2^-n phi^n(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.integrate import quad

from .errors import BranchExplosion, DomainError, UnsupportedMap
from .maps1d import Baker, Doubling, Gauss, Map1D, interval_preimage

MAX_INTERVALS = 10**6
_ENUM_DEPTH = 18          # doubling/baker enumeration depth before the grid path
_GRID_LEVEL = 12          # dyadic grid 2^level + 1 points
_TRAP_NODES = 9
_TRAP_MAX_WIDTH = 1.0 / 512.0


@dataclass(frozen=True)
class LebesgueOn01:
    """Length measure on [0,1]."""

    def measure(self, los: np.ndarray, his: np.ndarray) -> float:
        return float(np.sum(np.asarray(his) - np.asarray(los)))

    def density_values(self, xs: np.ndarray) -> np.ndarray:
        return np.ones_like(xs)

    def to_dict(self) -> dict:
        return {"base": "lebesgue01"}


@dataclass(frozen=True)
class DensityOn01:
    """Absolutely continuous measure ``d mu = density(x) dx`` on [0,1].

    Interval masses use composite trapezoid rule (exact for piecewise
    linear densities); construction checks mu([0,1]) = 1 to 1e-10.
    """

    density: Callable
    label: str = "density"

    def __post_init__(self):
        total, _ = quad(self.density, 0.0, 1.0, limit=200)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"density integrates to {total!r}, expected 1")

    def measure(self, los: np.ndarray, his: np.ndarray) -> float:
        los = np.asarray(los, dtype=float)
        his = np.asarray(his, dtype=float)
        widths = his - los
        wide = widths > _TRAP_MAX_WIDTH
        total = 0.0
        if wide.any():
            for lo, hi in zip(los[wide], his[wide]):
                pieces = int(math.ceil((hi - lo) / _TRAP_MAX_WIDTH))
                cuts = np.linspace(lo, hi, pieces + 1)
                total += self._trap(cuts[:-1], cuts[1:])
        if (~wide).any():
            total += self._trap(los[~wide], his[~wide])
        return float(total)

    def _trap(self, los: np.ndarray, his: np.ndarray) -> float:
        t = np.linspace(0.0, 1.0, _TRAP_NODES)
        xs = los[:, None] + (his - los)[:, None] * t[None, :]
        vals = self.density(xs)
        w = np.full(_TRAP_NODES, 1.0)
        w[0] = w[-1] = 0.5
        return float(np.sum(vals @ w * (his - los) / (_TRAP_NODES - 1)))

    def density_values(self, xs: np.ndarray) -> np.ndarray:
        return np.asarray(self.density(xs), dtype=float)

    def to_dict(self) -> dict:
        return {"base": self.label}


BaseMeasure = Union[LebesgueOn01, DensityOn01]


def _as_interval_list(A) -> list:
    if len(A) == 2 and np.isscalar(A[0]):
        A = [tuple(A)]
    out = []
    for lo, hi in A:
        lo, hi = float(lo), float(hi)
        if not (0.0 <= lo < hi <= 1.0):
            raise DomainError(f"interval {(lo, hi)!r} not inside [0,1]")
        out.append((lo, hi))
    return out


def measure_of(base: BaseMeasure, intervals) -> float:
    intervals = _as_interval_list(intervals)
    los = np.array([p[0] for p in intervals])
    his = np.array([p[1] for p in intervals])
    return base.measure(los, his)


def preimage_step(m: Map1D, intervals) -> list:
    """One level of interval preimages for a whole interval list."""
    out = []
    for iv in _as_interval_list(intervals):
        out.extend(interval_preimage(m, iv))
    if len(out) > MAX_INTERVALS:
        raise BranchExplosion(f"{len(out)} intervals exceed cap {MAX_INTERVALS}")
    return out


def pullback_intervals(m: Map1D, A, k: int) -> list:
    intervals = _as_interval_list(A)
    for _ in range(k):
        intervals = preimage_step(m, intervals)
    return intervals


def pullback_measure(m: Map1D, base: BaseMeasure, A, k: int) -> float:
    """``mu(phi^{-k} A)`` by iterated interval preimages."""
    if not isinstance(m, (Doubling, Baker, Gauss)):
        raise UnsupportedMap(f"pullbacks need interval preimages; got {type(m).__name__}")
    return measure_of(base, pullback_intervals(m, A, k))


# -- dyadic transfer recursion ------------------------------------------------
#
# For the doubling map the transfer operator is
#     (L rho)(y) = (rho(y/2) + rho((y+1)/2)) / 2
# and for the baker (tent) map
#     (L rho)(y) = (rho(y/2) + rho(1 - y/2)) / 2.
# Both map the space of piecewise-linear functions with breakpoints on the
# dyadic grid into itself, so iterating on grid values (with exact linear
# interpolation at midpoints) is closed, and mu(phi^{-k}A) = int_A L^k rho.


def _interp_half(vals: np.ndarray, offset_half: bool, reflect: bool) -> np.ndarray:
    # values of rho at (i + offset*2^d) / 2^{d+1}, i = 0..2^d, via exact
    # linear interpolation on the level-d grid
    n = vals.size - 1  # 2^d
    idx = np.arange(n + 1)
    num = idx + (n if offset_half else 0)        # numerator at level d+1
    if reflect:
        num = 2 * n - num
    even = num % 2 == 0
    out = np.empty(n + 1)
    out[even] = vals[num[even] // 2]
    odd = ~even
    out[odd] = 0.5 * (vals[(num[odd] - 1) // 2] + vals[(num[odd] + 1) // 2])
    return out


def _transfer_step(kind: str, vals: np.ndarray) -> np.ndarray:
    if kind == "doubling":
        return 0.5 * (_interp_half(vals, False, False) + _interp_half(vals, True, False))
    # baker: rho(y/2) + rho(1 - y/2)
    return 0.5 * (_interp_half(vals, False, False) + _interp_half(vals, False, True))


def _grid_integral(vals: np.ndarray, intervals) -> float:
    # exact integral of the piecewise-linear function over the intervals
    n = vals.size - 1
    xs = np.arange(n + 1) / n
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (vals[:-1] + vals[1:]) / n)))

    def F(t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t >= 1.0:
            return float(cum[-1])
        p = min(int(t * n), n - 1)
        x0 = xs[p]
        v_t = vals[p] + (vals[p + 1] - vals[p]) * (t - x0) * n
        return float(cum[p] + 0.5 * (vals[p] + v_t) * (t - x0))

    return float(sum(F(hi) - F(lo) for lo, hi in intervals))


def _dyadic_profile(m: Map1D, base: BaseMeasure, A, kmax: int, level: int = _GRID_LEVEL) -> np.ndarray:
    kind = "doubling" if isinstance(m, Doubling) else "baker"
    n = 1 << level
    xs = np.arange(n + 1) / n
    vals = base.density_values(xs)
    A = _as_interval_list(A)
    out = np.empty(kmax)
    for k in range(kmax):
        out[k] = _grid_integral(vals, A)
        if k + 1 < kmax:
            vals = _transfer_step(kind, vals)
    return out


def pullback_sequence(m: Map1D, base: BaseMeasure, A, kmax: int) -> np.ndarray:
    """``[mu(A), mu(phi^-1 A), ..., mu(phi^-(kmax-1) A)]``.

    Uses interval enumeration up to the branch cap and the dyadic
    transfer recursion beyond it (doubling/baker only).
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    if isinstance(m, (Doubling, Baker)) and kmax - 1 > _ENUM_DEPTH:
        return _dyadic_profile(m, base, A, kmax)
    out = np.empty(kmax)
    intervals = _as_interval_list(A)
    for k in range(kmax):
        out[k] = measure_of(base, intervals)
        if k + 1 < kmax:
            intervals = preimage_step(m, intervals)
    return out


@dataclass(frozen=True)
class MgfPartial:
    value: float
    tail_bound: float
    lam: float
    n: int


def mgf_partial(m: Map1D, base: BaseMeasure, A, lam: float, n: int) -> MgfPartial:
    """Truncated generating function ``sum_{k<n} lam^k mu(phi^{-k}A)``.

    The reported truncation bound is ``|lam|^n mu(A) / (1 - |lam|)``.
    """
    if not abs(lam) < 1.0:
        raise DomainError("need |lam| < 1")
    mus = pullback_sequence(m, base, A, n)
    value = 0.0
    p = 1.0
    for mu_k in mus:
        value += p * mu_k
        p *= lam
    mu_A = float(mus[0])
    bound = abs(lam) ** n * mu_A / (1.0 - abs(lam))
    return MgfPartial(value=float(value), tail_bound=bound, lam=lam, n=n)


@dataclass(frozen=True)
class FunctionalEquationCheck:
    residual: float
    tail_bound: float
    lam: float
    n: int

    @property
    def passed(self) -> bool:
        return self.residual <= self.tail_bound


def check_functional_equation(m: Map1D, base: BaseMeasure, A, lam: float, n: int) -> FunctionalEquationCheck:
    """Residual of ``mgf(A) = lam * mgf(phi^-1 A) + mu(A)`` at matched truncation."""
    lhs = mgf_partial(m, base, A, lam, n)
    A1 = preimage_step(m, A)
    rhs = lam * mgf_partial(m, base, A1, lam, n).value + measure_of(base, A)
    return FunctionalEquationCheck(
        residual=abs(lhs.value - rhs),
        tail_bound=lhs.tail_bound,
        lam=lam,
        n=n,
    )


def modified_measure_identity(m: Map1D, base: BaseMeasure, A, s: float, n: int = 50) -> float:
    """Residual of the telescoping identity for ``mu - s * mu o phi^-1``.

    The generating function of the modified measure, evaluated at
    ``lam = s``, telescopes back to ``mu(A)``; returns the truncated
    residual (``s^n mu(phi^{-n}A)`` in exact arithmetic).
    """
    if not abs(s) < 1.0:
        raise DomainError("need |s| < 1")
    mus = pullback_sequence(m, base, A, n + 1)
    value = 0.0
    p = 1.0
    for k in range(n):
        value += p * (mus[k] - s * mus[k + 1])
        p *= s
    return abs(value - float(mus[0]))


def schur_average(m: Map1D, base: BaseMeasure, A, n: int) -> float:
    """Cesaro mean ``(1/n) sum_{k<n} mu(phi^{-k}A)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(np.mean(pullback_sequence(m, base, A, n)))


@dataclass(frozen=True)
class AbelRecord:
    lambdas: tuple
    values: tuple        # (1-lam) * truncated mgf per lambda
    ns: tuple
    tail_bounds: tuple   # lam^n per lambda (coefficients bounded by mu(M)=1)
    extrapolated: float

    def rows(self) -> list:
        return [(l, v) for l, v in zip(self.lambdas, self.values)]

    def to_dict(self) -> dict:
        return {
            "lambdas": list(self.lambdas),
            "values": list(self.values),
            "ns": list(self.ns),
            "tail_bounds": list(self.tail_bounds),
            "extrapolated": self.extrapolated,
        }


def abel_limit(m: Map1D, base: BaseMeasure, A, tol: float = 1e-6, m_range=range(2, 9)) -> AbelRecord:
    """``(1 - lam) * mgf`` along ``lam_m = 1 - 2^-m`` plus Richardson limit.

    The truncation depth per lambda is chosen so the geometric tail of the
    scaled series stays below ``tol``.
    """
    lambdas, values, ns, bounds = [], [], [], []
    for mm in m_range:
        lam = 1.0 - 2.0 ** (-mm)
        n = max(8, int(math.ceil(math.log(tol) / math.log(lam))))
        part = mgf_partial(m, base, A, lam, n)
        lambdas.append(lam)
        ns.append(n)
        bounds.append(lam**n)
        values.append((1.0 - lam) * part.value)
    vals = np.asarray(values)
    rich = 2.0 * vals[1:] - vals[:-1]
    return AbelRecord(
        lambdas=tuple(lambdas),
        values=tuple(values),
        ns=tuple(ns),
        tail_bounds=tuple(bounds),
        extrapolated=float(rich[-1]) if rich.size else float(vals[-1]),
    )


@dataclass(frozen=True)
class StieltjesAtoms:
    """Finite point measure on [0, 2pi] driving the Poisson representation."""

    atoms: tuple  # ((s, mass), ...)

    def __post_init__(self):
        atoms = tuple((float(s), float(w)) for s, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        for s, w in atoms:
            if not 0.0 <= s <= 2.0 * math.pi:
                raise DomainError(f"atom location {s!r} outside [0, 2pi]")
            if w < 0.0:
                raise DomainError("atom masses must be nonnegative")

    @property
    def total_mass(self) -> float:
        return sum(w for _, w in self.atoms)

    def mass_at_zero(self) -> float:
        return sum(w for s, w in self.atoms if s == 0.0 or s == 2.0 * math.pi)


def poisson_mgf(atoms: StieltjesAtoms, lam: float) -> float:
    """``sum_i mass_i (1 - lam^2) / (1 - 2 lam cos(s_i) + lam^2)``."""
    if not abs(lam) < 1.0:
        raise DomainError("need |lam| < 1")
    total = 0.0
    for s, w in atoms.atoms:
        total += w * (1.0 - lam * lam) / (1.0 - 2.0 * lam * math.cos(s) + lam * lam)
    return total


def poisson_abel_limit(atoms: StieltjesAtoms, m_range=range(2, 9)) -> AbelRecord:
    """``lim (1 - lam) * poisson_mgf``; equals twice the mass at s = 0."""
    lambdas, values = [], []
    for mm in m_range:
        lam = 1.0 - 2.0 ** (-mm)
        lambdas.append(lam)
        values.append((1.0 - lam) * poisson_mgf(atoms, lam))
    vals = np.asarray(values)
    rich = 2.0 * vals[1:] - vals[:-1]
    return AbelRecord(
        lambdas=tuple(lambdas),
        values=tuple(values),
        ns=tuple(0 for _ in lambdas),
        tail_bounds=tuple(0.0 for _ in lambdas),
        extrapolated=float(rich[-1]) if rich.size else float(vals[-1]),
    )


def _baker_orbit(x: float, n: int) -> np.ndarray:
    out = np.empty(n)
    b = Baker()
    for i in range(n):
        out[i] = x
        x = b(x)
    return out


@dataclass(frozen=True)
class BakerExpansion:
    value: float          # (2-4s) * linear + (4s-1) * square
    linear_sum: float     # sum s^k phi^k(x)
    square_sum: float     # sum s^k (phi^k(x))^2
    tail_bound: float
    s: float
    n_terms: int


def baker_expansion(x: float, s: float, n_terms: int) -> BakerExpansion:
    """Partial sums of the baker-orbit expansion of ``2x - x^2``.

    ``value`` combines the two series with coefficients ``2-4s`` and
    ``4s-1``; for ``s = 1/4`` and ``s = 1/2`` the individual series equal
    ``2x - x^2`` on their own.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError("x must lie in [0,1]")
    if not abs(s) < 1.0:
        raise DomainError("need |s| < 1")
    orbit = _baker_orbit(x, n_terms)
    powers = s ** np.arange(n_terms)
    linear = float(np.sum(powers * orbit))
    square = float(np.sum(powers * orbit * orbit))
    value = (2.0 - 4.0 * s) * linear + (4.0 * s - 1.0) * square
    tail = (abs(2.0 - 4.0 * s) + abs(4.0 * s - 1.0)) * abs(s) ** n_terms / (1.0 - abs(s))
    return BakerExpansion(
        value=value,
        linear_sum=linear,
        square_sum=square,
        tail_bound=tail,
        s=s,
        n_terms=n_terms,
    )


def takagi_sum(x: float, n_terms: int) -> float:
    """Takagi-type sum ``sum_k 2^-k phi^k(x)`` over the baker orbit."""
    orbit = _baker_orbit(x, n_terms)
    return float(np.sum(0.5 ** np.arange(n_terms) * orbit))


@dataclass(frozen=True)
class MgfRecord:
    """Aggregate of the generating-function summaries for one (map, A) pair."""

    map_id: str
    A: tuple
    lam: float
    n: int
    partial_sum: float
    tail_bound: float
    schur: tuple
    abel: AbelRecord

    def to_dict(self) -> dict:
        return {
            "map": self.map_id,
            "A": [list(iv) for iv in self.A],
            "lambda": self.lam,
            "n": self.n,
            "partial_sum": self.partial_sum,
            "tail_bound": self.tail_bound,
            "schur": list(self.schur),
            "abel": self.abel.to_dict(),
        }


def build_mgf_record(m: Map1D, base: BaseMeasure, A, lam: float, n: int, schur_ns=(8, 16, 32, 64)) -> MgfRecord:
    part = mgf_partial(m, base, A, lam, n)
    schur = tuple(schur_average(m, base, A, k) for k in schur_ns)
    abel = abel_limit(m, base, A)
    return MgfRecord(
        map_id=type(m).__name__.lower(),
        A=tuple(_as_interval_list(A)),
        lam=lam,
        n=n,
        partial_sum=part.value,
        tail_bound=part.tail_bound,
        schur=schur,
        abel=abel,
    )
