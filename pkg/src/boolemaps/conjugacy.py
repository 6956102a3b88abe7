"""Cotangent conjugacy between the half-slope Boole map and angle doubling.

The change of variables ``xi(s) = gamma * cot(pi s) + 2a`` sends the unit
circle (as [0,1) mod 1) onto the real line.  Composing with the map
``phi(y) = y/2 + a - (gamma^2/2)/(y - 2a)`` closes the diagram

    s   --- 2s mod 1 -->  s'
    |                      |
    xi                     xi
    v                      v
    y   ---   phi    -->   y'

and pulls the Cauchy density centered at ``2a`` back to the uniform
density on the circle.  Both residuals are checked on grids here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .maps1d import SpecialBoole
from .measures import CauchyDensity

_EDGE = 1e-9


@dataclass(frozen=True)
class CotangentConjugacy:
    """Coordinates of ``xi(s) = gamma * cot(pi s) + 2a`` on (0,1)."""

    gamma: float
    a: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    def xi(self, s: float) -> float:
        if not _EDGE <= s <= 1.0 - _EDGE:
            raise DomainError(f"s={s!r} too close to the endpoints of (0,1)")
        return self.gamma * math.cos(math.pi * s) / math.sin(math.pi * s) + 2.0 * self.a

    def xi_prime(self, s: float) -> float:
        if not _EDGE <= s <= 1.0 - _EDGE:
            raise DomainError(f"s={s!r} too close to the endpoints of (0,1)")
        return -self.gamma * math.pi / math.sin(math.pi * s) ** 2

    def matching_map(self) -> SpecialBoole:
        """The Boole-type map this conjugacy linearizes."""
        return SpecialBoole(alpha=0.5, a=self.a, b=2.0 * self.a, beta=0.5 * self.gamma**2)

    def cauchy_density(self) -> CauchyDensity:
        return CauchyDensity(center=2.0 * self.a, gamma=self.gamma)


def xi(c: CotangentConjugacy, s: float) -> float:
    return c.xi(s)


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    argmax_s: float
    grid_size: int

    def to_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "argmax_s": self.argmax_s,
            "grid_size": self.grid_size,
        }


def _default_grid(n: int) -> np.ndarray:
    # uniform in (0,1), bounded away from {0, 1/2, 1} where xi or xi(2s) blow up
    s = np.linspace(0.0, 1.0, n + 2)[1:-1]
    keep = (np.abs(s - 0.5) > 1e-6) & (s > 1e-6) & (s < 1.0 - 1e-6)
    return s[keep]


def check_commutation(c: CotangentConjugacy, m: SpecialBoole | None = None, s_grid=None) -> ResidualReport:
    """Max relative gap between ``phi(xi(s))`` and ``xi(2s mod 1)``."""
    if m is None:
        m = c.matching_map()
    if s_grid is None:
        s_grid = _default_grid(1000)
    worst = -1.0
    worst_s = float(s_grid[0])
    for s in s_grid:
        s = float(s)
        target = c.xi((2.0 * s) % 1.0)
        r = abs(m(c.xi(s)) - target) / (1.0 + abs(target))
        if r > worst:
            worst, worst_s = r, s
    return ResidualReport(max_residual=worst, argmax_s=worst_s, grid_size=len(s_grid))


def pushforward_density_check(c: CotangentConjugacy, s_grid=None, density=None) -> ResidualReport:
    """Max deviation of ``rho(xi(s)) * |xi'(s)|`` from 1.

    With the Cauchy density matched to the conjugacy this is an exact
    identity: the pulled-back measure is the uniform density on (0,1).
    """
    if s_grid is None:
        s_grid = _default_grid(1000)
    if density is None:
        density = c.cauchy_density()
    worst = -1.0
    worst_s = float(s_grid[0])
    for s in s_grid:
        s = float(s)
        r = abs(density(c.xi(s)) * abs(c.xi_prime(s)) - 1.0)
        if r > worst:
            worst, worst_s = r, s
    return ResidualReport(max_residual=worst, argmax_s=worst_s, grid_size=len(s_grid))
