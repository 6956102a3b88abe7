"""Two-dimensional Boole-type maps and the permuted n-dimensional family.

Two planar variants act on ``R^2 \\ {xy = 0}``:

* product:  ``(x, y) -> (x - 1/x, y - 1/y)``
* swapped:  ``(x, y) -> (x - 1/y, y - 1/x)``

The swapped map is 2-to-1 onto the region where the radicands
``u^2 + 4u/v`` and ``v^2 + 4v/u`` are nonnegative; its inverse branches
follow from the quadratic ``v x^2 - uv x - u = 0`` with the second
coordinate forced by ``y = v + 1/x``.  The cleared quadratics give the
branch relations

    x+ + x- = u,   x+ x- = -u/v,   x/y = u/v   (both branches),
    y+ + y- = v,   y+ y- = -v/u.

Measure bookkeeping note: the *signed* inverse-branch Jacobians sum to 1
identically (it is the derivative of the first Vieta relation), but one
branch is always orientation-reversing, so the sum of absolute Jacobians
equals ``|uv + 2| / sqrt(uv (uv + 4))`` and exceeds 1 at every valid
point.  ``jacobian_sum`` reports the absolute (measure-transport) sum;
``signed_jacobian_sum`` reports the algebraic one.

``PermutationBooleMap`` generalizes to ``x_i -> x_i - 1/x_{sigma(i)}``.
Preimages factor over the cycles of ``sigma``: fixed points contribute
classical-Boole quadratic branches, transpositions the swapped-map
branches, and longer cycles are solved by damped Newton from multistart
(best-effort; the branch count is not certified).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, OutsideImage, PoleProximity
from .maps1d import ClassicalBoole, preimages

_POLE_EPS = 1e-12


@dataclass(frozen=True)
class ProductBoole2D:
    variant = "product"

    def __call__(self, p):
        x, y = p
        if abs(x) < _POLE_EPS or abs(y) < _POLE_EPS:
            raise PoleProximity(f"point {p!r} on a coordinate axis")
        return (x - 1.0 / x, y - 1.0 / y)


@dataclass(frozen=True)
class SwappedBoole2D:
    variant = "swapped"

    def __call__(self, p):
        x, y = p
        if abs(x) < _POLE_EPS or abs(y) < _POLE_EPS:
            raise PoleProximity(f"point {p!r} on a coordinate axis")
        return (x - 1.0 / y, y - 1.0 / x)


Boole2DMap = Union[ProductBoole2D, SwappedBoole2D]


def eval2d(m: Boole2DMap, p) -> tuple:
    return m(p)


@dataclass(frozen=True)
class InverseBranches2D:
    """Both preimages of ``(u, v)`` under the swapped map.

    ``pairing_swapped`` records whether ``y = v + 1/x_+`` landed on the
    minus radical branch ``(v - Y)/2`` (the radical labelling of the y
    quadratic flips with the sign region; the map itself forces the
    ``v + 1/x`` pairing).
    """

    u: float
    v: float
    X: float
    Y: float
    plus: tuple
    minus: tuple
    pairing_swapped: bool

    @property
    def branches(self) -> tuple:
        return (self.plus, self.minus)

    def roundtrip_residual(self) -> float:
        m = SwappedBoole2D()
        worst = 0.0
        for b in self.branches:
            fu, fv = m(b)
            worst = max(worst, abs(fu - self.u), abs(fv - self.v))
        return worst

    def vieta_residuals(self) -> dict:
        (xp, yp), (xm, ym) = self.plus, self.minus
        u, v = self.u, self.v
        return {
            "sum_x": abs(xp + xm - u),
            "sum_y": abs(yp + ym - v),
            "prod_x": abs(xp * xm + u / v),
            "prod_y": abs(yp * ym + v / u),
            "ratio": max(abs(xp / yp - u / v), abs(xm / ym - u / v)),
        }


def inverse_branches_swapped(u: float, v: float) -> InverseBranches2D:
    """Solve ``x - 1/y = u, y - 1/x = v`` for both real branches."""
    if abs(u) < _POLE_EPS or abs(v) < _POLE_EPS:
        raise PoleProximity(f"target ({u!r}, {v!r}) on a coordinate axis")
    X2 = u * u + 4.0 * u / v
    Y2 = v * v + 4.0 * v / u
    if X2 < 0.0 or Y2 < 0.0:
        raise OutsideImage(f"negative radicand at ({u!r}, {v!r})")
    X, Y = math.sqrt(X2), math.sqrt(Y2)
    xp, xm = 0.5 * (u + X), 0.5 * (u - X)
    yp, ym = v + 1.0 / xp, v + 1.0 / xm
    swapped = abs(yp - 0.5 * (v + Y)) > abs(yp - 0.5 * (v - Y))
    return InverseBranches2D(
        u=u, v=v, X=X, Y=Y, plus=(xp, yp), minus=(xm, ym), pairing_swapped=swapped,
    )


def inverse_jacobians_swapped(u: float, v: float) -> tuple:
    """Signed Jacobian determinants of the (+, -) inverse branches.

    Because ``y = v + 1/x(u,v)``, each branch determinant reduces to
    ``dx/du = (1 +/- (u + 2/v)/X) / 2``.
    """
    br = inverse_branches_swapped(u, v)
    t = (u + 2.0 / v) / br.X
    return 0.5 * (1.0 + t), 0.5 * (1.0 - t)


def _classical_weight_sum(t: float) -> float:
    return preimages(ClassicalBoole(), t).weight_sum


def jacobian_sum(m: Boole2DMap, u: float, v: float) -> float:
    """Sum of absolute inverse-branch Jacobians at ``(u, v)``.

    This is the density of the pulled-back plane Lebesgue measure
    relative to ``du dv``.  For the product map it factors into the two
    one-dimensional weight sums and equals 1; for the swapped map it
    equals ``|uv + 2| / sqrt(uv (uv + 4))``.
    """
    if isinstance(m, ProductBoole2D):
        return _classical_weight_sum(u) * _classical_weight_sum(v)
    dp, dm = inverse_jacobians_swapped(u, v)
    return abs(dp) + abs(dm)


def signed_jacobian_sum(m: Boole2DMap, u: float, v: float) -> float:
    """Orientation-signed sum of inverse-branch Jacobians (identically 1)."""
    if isinstance(m, ProductBoole2D):
        return jacobian_sum(m, u, v)
    dp, dm = inverse_jacobians_swapped(u, v)
    return dp + dm


@dataclass(frozen=True)
class PermutationBooleMap:
    """``psi_sigma(x)_i = x_i - 1/x_{sigma(i)}`` for a permutation sigma.

    ``sigma`` uses 0-based indices: component ``i`` reads pole coordinate
    ``sigma[i]``.
    """

    n: int
    sigma: tuple

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(int(s) for s in self.sigma))
        if sorted(self.sigma) != list(range(self.n)):
            raise ValueError("sigma must be a permutation of 0..n-1")

    @property
    def cycles(self) -> tuple:
        seen = [False] * self.n
        out = []
        for i in range(self.n):
            if seen[i]:
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = self.sigma[j]
            out.append(tuple(cyc))
        return tuple(out)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DomainError(f"expected a length-{self.n} vector")
        if np.any(np.abs(x[list(self.sigma)]) < _POLE_EPS):
            raise PoleProximity("a pole coordinate is on the axis")
        return x - 1.0 / x[list(self.sigma)]

    def jacobian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        J = np.eye(self.n)
        for i, s in enumerate(self.sigma):
            J[i, s] += 1.0 / x[s] ** 2
        return J


def eval_nd(m: PermutationBooleMap, x) -> np.ndarray:
    return m(x)


@dataclass(frozen=True)
class NdPreimages:
    """Real preimages of a target with weights ``1/|det J|``.

    ``certainty`` is "exact" when every cycle of sigma has length <= 2
    (quadratic branch enumeration), otherwise "best_effort" with the
    ``incomplete_enumeration`` flag raised: Newton multistart cannot
    certify the branch count for longer cycles.
    """

    target: tuple
    points: tuple
    weights: tuple
    certainty: str

    @property
    def weight_sum(self) -> float:
        return float(sum(self.weights))

    @property
    def n_branches(self) -> int:
        return len(self.points)

    @property
    def incomplete_enumeration(self) -> bool:
        return self.certainty != "exact"


def _cycle_solutions_fixed(u_i: float) -> list:
    ps = preimages(ClassicalBoole(), u_i)
    return [np.array([y]) for y, _ in ps.branches]


def _cycle_solutions_swap(u_i: float, u_j: float) -> list:
    try:
        br = inverse_branches_swapped(u_i, u_j)
    except OutsideImage:
        return []
    return [np.array(br.plus), np.array(br.minus)]


def _cycle_solutions_newton(u_c: np.ndarray, seed: int = 0) -> list:
    L = u_c.size
    radii = (0.3, 0.6, 1.0, 1.7, 3.0, 6.0, 10.0, 20.0)

    def F(z):
        return z - 1.0 / np.roll(z, -1) - u_c

    def J(z):
        M = np.eye(L)
        nxt = np.roll(z, -1)
        for t in range(L):
            M[t, (t + 1) % L] += 1.0 / nxt[t] ** 2
        return M

    sols = []
    for signs in itertools.product((-1.0, 1.0), repeat=L):
        for r in radii:
            z = np.array(signs) * r + 0.5 * u_c
            ok = False
            for _ in range(80):
                if np.any(np.abs(z) < 1e-9):
                    break
                f = F(z)
                if np.max(np.abs(f)) < 1e-11:
                    ok = True
                    break
                try:
                    step = np.linalg.solve(J(z), f)
                except np.linalg.LinAlgError:
                    break
                lam = 1.0
                base = np.max(np.abs(f))
                while lam > 1e-6:
                    z_new = z - lam * step
                    if np.any(np.abs(z_new) < 1e-12):
                        lam *= 0.5
                        continue
                    if np.max(np.abs(F(z_new))) < base:
                        break
                    lam *= 0.5
                z = z - lam * step
            if ok and not any(np.allclose(z, s, rtol=1e-6, atol=1e-9) for s in sols):
                sols.append(z.copy())
    return sols


def nd_preimages(m: PermutationBooleMap, u) -> NdPreimages:
    """Enumerate preimages of ``u`` cycle by cycle and combine them.

    The equations decouple along cycles of sigma, so preimage vectors are
    Cartesian products of per-cycle solutions; the full Jacobian is block
    diagonal in cycle coordinates.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (m.n,):
        raise DomainError(f"expected a length-{m.n} vector")
    certainty = "exact"
    per_cycle = []
    for cyc in m.cycles:
        if len(cyc) == 1:
            sols = _cycle_solutions_fixed(u[cyc[0]])
        elif len(cyc) == 2:
            sols = _cycle_solutions_swap(u[cyc[0]], u[cyc[1]])
        else:
            sols = _cycle_solutions_newton(u[list(cyc)])
            certainty = "best_effort"
        per_cycle.append((cyc, sols))
        if not sols:
            return NdPreimages(target=tuple(u), points=(), weights=(), certainty=certainty)

    points = []
    weights = []
    for combo in itertools.product(*(sols for _, sols in per_cycle)):
        x = np.empty(m.n)
        for (cyc, _), part in zip(per_cycle, combo):
            x[list(cyc)] = part
        det = np.linalg.det(m.jacobian(x))
        points.append(tuple(x))
        weights.append(1.0 / abs(det))
    order = np.lexsort(np.array(points).T[::-1])
    return NdPreimages(
        target=tuple(u),
        points=tuple(points[i] for i in order),
        weights=tuple(weights[i] for i in order),
        certainty=certainty,
    )
