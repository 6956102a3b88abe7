"""Transfer (Frobenius-Perron) operator: exact pointwise action and Ulam matrices.

``apply_fp`` pushes a density through one step of the dynamics by summing
``rho(y) / |phi'(y)|`` over all preimage branches ``y`` of the evaluation
point.  A density is invariant exactly when this returns the density
itself; ``verify_invariant_density`` measures the residual on a grid.

``ulam_matrix`` discretizes the operator on a cell partition by stratified
sampling of each cell, and ``stationary_density`` extracts the leading
left fixed vector by power iteration.  Line partitions carry two
absorbing tail cells so that truncation loss is visible as tail mass
rather than silently renormalized away.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergence, PoleProximity
from .maps1d import (
    Baker,
    BooleMap1D,
    ClassicalBoole,
    Doubling,
    Gauss,
    GAUSS_BRANCH_LIMIT,
    Map1D,
    PreimageSet,
    SpecialBoole,
    preimages,
)

_BOOLE_LIKE = (BooleMap1D, ClassicalBoole, SpecialBoole)


def point_preimages(m: Map1D, x: float) -> PreimageSet:
    """Preimage branches with weights ``1/|phi'|`` for any catalog map.

    Gauss branches are truncated at ``GAUSS_BRANCH_LIMIT`` (the dropped
    weight tail is O(1/limit)).
    """
    if isinstance(m, _BOOLE_LIKE):
        return preimages(m, x)
    if isinstance(m, Doubling):
        if not 0.0 <= x <= 1.0:
            raise DomainError("x outside [0,1]")
        return PreimageSet(x=x, branches=((0.5 * x, 0.5), (0.5 * (x + 1.0), 0.5)))
    if isinstance(m, Baker):
        if not 0.0 <= x <= 1.0:
            raise DomainError("x outside [0,1]")
        return PreimageSet(x=x, branches=tuple(sorted(
            ((0.5 * x, 0.5), (1.0 - 0.5 * x, 0.5)))))
    if isinstance(m, Gauss):
        if not 0.0 <= x < 1.0:
            raise DomainError("x outside [0,1)")
        branches = []
        for k in range(1, GAUSS_BRANCH_LIMIT + 1):
            y = 1.0 / (k + x)
            branches.append((y, y * y))
        return PreimageSet(x=x, branches=tuple(sorted(branches)))
    raise DomainError(f"no preimage rule for {type(m).__name__}")


def apply_fp(m: Map1D, density, x: float) -> float:
    """One application of the transfer operator to ``density`` at ``x``."""
    ps = point_preimages(m, x)
    return float(sum(density(y) * w for y, w in ps.branches))


@dataclass(frozen=True)
class InvarianceReport:
    max_abs_residual: float
    max_rel_residual: float
    worst_x: float
    grid_size: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_rel_residual <= self.tol

    def to_dict(self) -> dict:
        return {
            "max_abs_residual": self.max_abs_residual,
            "max_rel_residual": self.max_rel_residual,
            "worst_x": self.worst_x,
            "grid_size": self.grid_size,
            "tol": self.tol,
            "passed": self.passed,
        }


def verify_invariant_density(m: Map1D, density, grid, tol: float) -> InvarianceReport:
    """Residual of ``T rho - rho`` over a grid, absolute and relative.

    Relative residuals are taken where the density exceeds 1e-300; the
    report passes iff the max relative residual is within ``tol``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("grid must be nonempty")
    max_abs = 0.0
    max_rel = 0.0
    worst = float(grid[0])
    for x in grid:
        r = apply_fp(m, density, float(x)) - density(float(x))
        absr = abs(r)
        ref = density(float(x))
        rel = absr / ref if ref > 1e-300 else absr
        if rel > max_rel:
            max_rel = rel
            worst = float(x)
        max_abs = max(max_abs, absr)
    return InvarianceReport(
        max_abs_residual=max_abs,
        max_rel_residual=max_rel,
        worst_x=worst,
        grid_size=int(grid.size),
        tol=tol,
    )


@dataclass(frozen=True)
class UlamPartition:
    """Uniform cells over [0,1] or [-L,L]; line partitions add two tail cells."""

    edges: tuple
    has_tails: bool

    @classmethod
    def unit(cls, m: int) -> "UlamPartition":
        if m < 1:
            raise ValueError("need at least one cell")
        return cls(edges=tuple(np.linspace(0.0, 1.0, m + 1)), has_tails=False)

    @classmethod
    def line(cls, L: float, m: int) -> "UlamPartition":
        if m < 1 or L <= 0:
            raise ValueError("need m >= 1 and L > 0")
        return cls(edges=tuple(np.linspace(-L, L, m + 1)), has_tails=True)

    @property
    def n_interior(self) -> int:
        return len(self.edges) - 1

    @property
    def n_cells(self) -> int:
        return self.n_interior + (2 if self.has_tails else 0)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.asarray(self.edges))


@dataclass(frozen=True)
class UlamMatrix:
    """Row-stochastic discretization of the transfer operator.

    For line partitions the last two indices are the tail cells
    ``(-inf, -L)`` and ``(L, inf)``, which absorb (self-loop with
    probability 1): mass that escapes the window stays visible there.
    """

    P: np.ndarray
    partition: UlamPartition
    samples_per_cell: int
    seed: int
    resampled: int

    def row_sums(self) -> np.ndarray:
        return self.P.sum(axis=1)

    def to_csv(self, path) -> None:
        np.savetxt(path, self.P, delimiter=",")

    def summary(self) -> dict:
        edges = np.asarray(self.partition.edges)
        n_int = self.partition.n_interior
        tail = float(self.P[:n_int, n_int:].sum() / n_int) if self.partition.has_tails else 0.0
        return {
            "m": n_int,
            "L": float(edges[-1]) if self.partition.has_tails else None,
            "cells": self.partition.n_cells,
            "samples_per_cell": self.samples_per_cell,
            "seed": self.seed,
            "resampled": self.resampled,
            "tail_mass": tail,
        }


def _cell_row(m: Map1D, part: UlamPartition, i: int, spc: int, seed: int) -> tuple:
    edges = np.asarray(part.edges)
    lo, hi = edges[i], edges[i + 1]
    rng = np.random.default_rng(seed ^ i)
    n_cols = part.n_cells
    offsets = (np.arange(spc) + rng.uniform(size=spc)) / spc
    xs = lo + (hi - lo) * offsets
    resampled = 0
    bad = m.pole_mask(xs)
    tries = 0
    while bad.any():
        n_bad = int(bad.sum())
        resampled += n_bad
        xs[bad] = lo + (hi - lo) * rng.uniform(size=n_bad)
        bad = m.pole_mask(xs)
        tries += 1
        if tries > 16 or resampled > 0.1 * spc:
            raise PoleProximity(f"more than 10% of cell {i} samples hit poles")
    fx = m.eval_many(xs)
    row = np.zeros(n_cols)
    if part.has_tails:
        idx = np.searchsorted(edges, fx, side="right") - 1
        left_tail = fx < edges[0]
        right_tail = fx >= edges[-1]
        interior = ~(left_tail | right_tail)
        idx = np.clip(idx, 0, part.n_interior - 1)
        row[: part.n_interior] = np.bincount(idx[interior], minlength=part.n_interior)
        row[part.n_interior] = left_tail.sum()
        row[part.n_interior + 1] = right_tail.sum()
    else:
        idx = np.clip(np.searchsorted(edges, fx, side="right") - 1, 0, part.n_interior - 1)
        row = np.bincount(idx, minlength=part.n_interior).astype(float)
    return row / spc, resampled


def ulam_matrix(
    m: Map1D,
    partition: UlamPartition,
    samples_per_cell: int,
    seed: int,
    threads: int = 1,
) -> UlamMatrix:
    """Stratified-sample transition matrix; deterministic for a given seed.

    Each cell draws its jitter from an RNG seeded by ``seed ^ cell_index``
    so rows are identical regardless of execution order or thread count.
    """
    if samples_per_cell < 100:
        raise ValueError("samples_per_cell must be >= 100")
    if m.domain == "unit" and partition.has_tails:
        raise DomainError("unit-interval map needs a unit partition")
    if m.domain == "line" and not partition.has_tails:
        raise DomainError("line map needs a line partition with tails")
    n_int = partition.n_interior
    n_cells = partition.n_cells
    P = np.zeros((n_cells, n_cells))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(
                lambda i: _cell_row(m, partition, i, samples_per_cell, seed),
                range(n_int),
            ))
    else:
        rows = [_cell_row(m, partition, i, samples_per_cell, seed) for i in range(n_int)]
    resampled = 0
    for i, (row, res) in enumerate(rows):
        P[i] = row
        resampled += res
    if partition.has_tails:
        P[n_int, n_int] = 1.0
        P[n_int + 1, n_int + 1] = 1.0
    return UlamMatrix(
        P=P,
        partition=partition,
        samples_per_cell=samples_per_cell,
        seed=seed,
        resampled=resampled,
    )


@dataclass(frozen=True)
class StationaryDensity:
    masses: np.ndarray       # cell masses over interior cells, sum 1
    density: np.ndarray      # masses / cell widths
    tail_mass: float
    iterations: int
    increment: float
    unique: bool

    def to_dict(self) -> dict:
        return {
            "tail_mass": self.tail_mass,
            "iterations": self.iterations,
            "increment": self.increment,
            "unique": self.unique,
        }


def _power_iterate(P: np.ndarray, pi0: np.ndarray, tol: float, max_iter: int):
    pi = pi0.copy()
    inc = math.inf
    for it in range(1, max_iter + 1):
        nxt = pi @ P
        s = nxt.sum()
        if s > 0:
            nxt = nxt / s
        inc = float(np.abs(nxt - pi).sum())
        pi = nxt
        if inc <= tol:
            return pi, it, inc
    return pi, max_iter, inc


def stationary_density(
    um: UlamMatrix,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    fail_increment: float = 1e-8,
) -> StationaryDensity:
    """Leading left fixed vector of the Ulam matrix by power iteration.

    Startup is uniform on the interior cells; a second run from a
    randomized start flags non-uniqueness (reducible matrices such as the
    identity).  Raises NonConvergence if the L1 increment is still above
    ``fail_increment`` after the iteration cap.
    """
    P = um.P
    part = um.partition
    n_int = part.n_interior
    n = P.shape[0]
    pi0 = np.zeros(n)
    pi0[:n_int] = 1.0 / n_int
    pi, iters, inc = _power_iterate(P, pi0, tol, max_iter)
    if inc > fail_increment:
        raise NonConvergence(f"power iteration increment {inc:.3e} after {max_iter} steps")

    rng = np.random.default_rng(um.seed)
    alt0 = np.zeros(n)
    alt0[:n_int] = rng.uniform(0.5, 1.5, size=n_int)
    alt0 /= alt0.sum()
    alt, _, _ = _power_iterate(P, alt0, tol, max_iter)
    unique = float(np.abs(alt - pi).sum()) <= 1e-6

    interior = pi[:n_int]
    tail = float(pi[n_int:].sum()) if part.has_tails else 0.0
    total = interior.sum()
    if total <= 0:
        raise NonConvergence("all stationary mass escaped to the tails")
    masses = interior / total
    density = masses / part.widths
    return StationaryDensity(
        masses=masses,
        density=density,
        tail_mass=tail,
        iterations=iters,
        increment=inc,
        unique=unique,
    )
