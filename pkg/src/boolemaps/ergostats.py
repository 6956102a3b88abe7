"""Orbit statistics: Birkhoff time averages, empirical densities, and
time-vs-space comparisons.

Orbits of the Boole-type and Gauss maps iterate in 64-bit floating point
(jit-compiled); an orbit step inside a pole's exclusion radius raises
``PoleHit`` with the step index rather than propagating NaN.  The
doubling and baker maps lose one bit of state per step in floating
point, so their orbits are generated symbolically instead: a 64-bit
window slides over a seeded random bit stream (drawn in 2048-bit
blocks), which keeps the empirical statistics faithful for arbitrarily
long runs.  Batch means over 32 blocks provide the stderr estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import Divergence, DomainError, PoleHit
from .maps1d import (
    Baker,
    BooleMap1D,
    ClassicalBoole,
    Doubling,
    Gauss,
    Map1D,
    SpecialBoole,
)
from .measures import ErgodicityClass, classify_ergodicity, density_expectation

_CHUNK = 1_000_000
_N_BATCHES = 32
_BOOLE_LIKE = (BooleMap1D, ClassicalBoole, SpecialBoole)


@njit(cache=True)
def _gauss_chunk(x, out):
    n = out.size
    for i in range(n):
        if x < 1e-18:
            return x, i, 1
        out[i] = x
        inv = 1.0 / x
        x = inv - math.floor(inv)
    return x, n, 0


@njit(cache=True)
def _boole_chunk(x, alpha, a, betas, bs, eps, out):
    n = out.size
    nb = bs.size
    for i in range(n):
        for j in range(nb):
            if abs(x - bs[j]) < eps[j]:
                return x, i, 1
        if abs(x) > 1e300:
            return x, i, 2
        out[i] = x
        s = alpha * x + a
        for j in range(nb):
            s -= betas[j] / (x - bs[j])
        x = s
    return x, n, 0


class _BitOrbit:
    """Sliding 64-bit window over a seeded bit stream (doubling/baker orbits)."""

    def __init__(self, x0: float, seed, tent: bool):
        if not 0.0 <= x0 < 1.0:
            raise DomainError("x0 must lie in [0,1)")
        self.window = int(x0 * (1 << 64)) & ((1 << 64) - 1)
        self.tent = tent
        self.rng = np.random.default_rng(0 if seed is None else seed)
        self.block = 0
        self.block_bits = 0

    def _next_bit(self) -> int:
        if self.block_bits == 0:
            self.block = int.from_bytes(self.rng.bytes(256), "big")
            self.block_bits = 2048
        self.block_bits -= 1
        return (self.block >> self.block_bits) & 1

    def fill(self, out: np.ndarray) -> None:
        mask = (1 << 64) - 1
        scale = 2.0**-64
        w = self.window
        tent = self.tent
        for i in range(out.size):
            out[i] = w * scale
            top = w >> 63
            w = ((w << 1) & mask) | self._next_bit()
            if tent and top:
                w = mask - w
        self.window = w


def _orbit_chunks(m: Map1D, x0: float, n: int, seed):
    """Yield (start_index, points) arrays covering the orbit x0..x_{n-1}."""
    done = 0
    if isinstance(m, Gauss):
        if not 0.0 < x0 <= 1.0:
            raise DomainError("x0 must lie in (0,1]")
        x = x0
        while done < n:
            out = np.empty(min(_CHUNK, n - done))
            x, filled, status = _gauss_chunk(x, out)
            if status == 1:
                raise PoleHit(done + filled, x)
            yield done, out
            done += filled
    elif isinstance(m, _BOOLE_LIKE):
        bm = m.as_boole()
        betas = np.array(bm.betas)
        bs = np.array(bm.bs)
        eps = 1e-12 * (1.0 + np.abs(bs))
        x = float(x0)
        while done < n:
            out = np.empty(min(_CHUNK, n - done))
            x, filled, status = _boole_chunk(x, bm.alpha, bm.a, betas, bs, eps, out)
            if status == 1:
                raise PoleHit(done + filled, x)
            if status == 2:
                raise Divergence(done + filled, x)
            yield done, out
            done += filled
    elif isinstance(m, (Doubling, Baker)):
        orbit = _BitOrbit(x0, seed, tent=isinstance(m, Baker))
        while done < n:
            out = np.empty(min(_CHUNK, n - done))
            orbit.fill(out)
            yield done, out
            done += out.size
    else:
        raise DomainError(f"no orbit generator for {type(m).__name__}")


@dataclass(frozen=True)
class OrbitStats:
    map_id: str
    x0: float
    n: int
    observable: str
    mean: float
    stderr: float
    n_batches: int

    def to_dict(self) -> dict:
        return {
            "map": self.map_id,
            "x0": self.x0,
            "n": self.n,
            "observable": self.observable,
            "mean": self.mean,
            "stderr": self.stderr,
            "n_batches": self.n_batches,
        }


def birkhoff_average(
    m: Map1D,
    f,
    x0: float,
    n: int,
    seed=None,
    observable: str = "f",
) -> OrbitStats:
    """Time average ``(1/n) sum f(phi^k x0)`` with a batch-means stderr.

    ``f`` must accept numpy arrays.  ``seed`` only affects the doubling
    and baker orbits (bit-stream continuation); floating orbits are fully
    determined by ``x0``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    batch_size = (n + _N_BATCHES - 1) // _N_BATCHES
    batch_sums = np.zeros(_N_BATCHES)
    batch_counts = np.zeros(_N_BATCHES, dtype=np.int64)
    total = 0.0
    for start, xs in _orbit_chunks(m, x0, n, seed):
        vals = np.asarray(f(xs), dtype=float)
        total += float(vals.sum())
        ids = (start + np.arange(xs.size)) // batch_size
        batch_sums += np.bincount(ids, weights=vals, minlength=_N_BATCHES)
        batch_counts += np.bincount(ids, minlength=_N_BATCHES)
    used = batch_counts > 0
    means = batch_sums[used] / batch_counts[used]
    stderr = float(np.std(means, ddof=1) / math.sqrt(used.sum())) if used.sum() > 1 else math.inf
    return OrbitStats(
        map_id=type(m).__name__.lower(),
        x0=x0,
        n=n,
        observable=observable,
        mean=total / n,
        stderr=stderr,
        n_batches=int(used.sum()),
    )


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    normalized: np.ndarray | None   # None for infinite-measure maps
    window: tuple
    n: int
    in_window: int
    infinite_measure: bool

    def csv_rows(self) -> list:
        rows = []
        for i in range(self.counts.size):
            norm = self.normalized[i] if self.normalized is not None else ""
            rows.append((self.bin_edges[i], self.bin_edges[i + 1], int(self.counts[i]), norm))
        return rows

    def to_dict(self) -> dict:
        return {
            "window": list(self.window),
            "bins": int(self.counts.size),
            "n": self.n,
            "in_window": self.in_window,
            "infinite_measure": self.infinite_measure,
        }


def _has_infinite_invariant_measure(m: Map1D) -> bool:
    if isinstance(m, _BOOLE_LIKE):
        cls = classify_ergodicity(m)
        return cls in (
            ErgodicityClass.INFINITE_ERGODIC_LEBESGUE,
            ErgodicityClass.TOTALLY_DISSIPATIVE,
        )
    return False


def empirical_density(m: Map1D, x0: float, n: int, window, bins: int, seed=None) -> Histogram:
    """Histogram of orbit points inside ``window``.

    For maps whose invariant measure is infinite the histogram keeps raw
    counts only: normalizing a window of an infinite measure would
    fabricate a density, so ``normalized`` is None and the flag is set.
    """
    if bins < 10:
        raise ValueError("need at least 10 bins")
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise DomainError("window must satisfy lo < hi")
    edges = np.linspace(lo, hi, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    for _, xs in _orbit_chunks(m, x0, n, seed):
        counts += np.histogram(xs, bins=edges)[0]
    in_window = int(counts.sum())
    infinite = _has_infinite_invariant_measure(m)
    if infinite or in_window == 0:
        normalized = None
    else:
        width = edges[1] - edges[0]
        normalized = counts / (in_window * width)
    return Histogram(
        bin_edges=edges,
        counts=counts,
        normalized=normalized,
        window=(lo, hi),
        n=n,
        in_window=in_window,
        infinite_measure=infinite,
    )


@dataclass(frozen=True)
class TimeSpaceReport:
    time_mean: float
    time_stderr: float
    space_mean: float
    discrepancy: float
    within_3sigma: bool
    composition_residual: float   # |int f(phi x) rho dx - int f rho dx|

    def to_dict(self) -> dict:
        return {
            "time_mean": self.time_mean,
            "time_stderr": self.time_stderr,
            "space_mean": self.space_mean,
            "discrepancy": self.discrepancy,
            "within_3sigma": self.within_3sigma,
            "composition_residual": self.composition_residual,
        }


def time_vs_space_report(m: Map1D, density, f, x0: float, n: int, seed=None) -> TimeSpaceReport:
    """Birkhoff average vs the density-weighted space average of ``f``.

    Also checks the composition invariance ``int f(phi x) rho(x) dx =
    int f(x) rho(x) dx`` by quadrature, splitting the domain at the map's
    poles.
    """
    stats = birkhoff_average(m, f, x0, n, seed=seed)
    space = density_expectation(density, f)

    if isinstance(m, _BOOLE_LIKE):
        bm = m.as_boole()
        cuts = sorted(bm.bs)
    else:
        cuts = []
    pieces = [-math.inf] + list(cuts) + [math.inf]
    comp = 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        comp += density_expectation(density, lambda x: f(m(x)), interval=(lo, hi))
    residual = abs(comp - space)
    disc = abs(stats.mean - space)
    return TimeSpaceReport(
        time_mean=stats.mean,
        time_stderr=stats.stderr,
        space_mean=space,
        discrepancy=disc,
        within_3sigma=disc <= 3.0 * stats.stderr,
        composition_residual=residual,
    )
