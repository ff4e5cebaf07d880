"""Periodic orbits (s, t, ℓ): closure solve, construction and length.

An orbit with s σ-wall and t τ-wall bounces per period closes when

    w(α, β) = s/t   and   s ϑ_σ + t ϑ_τ = ℓ.

ℓ ≥ 1 is solved in the interior of the admissible triangle by a 2D Newton
iteration seeded from a grid scan.  ℓ = 0 orbits are meridional (β = 0) and
are found by 1D root bracketing of w(α, 0) = s/t along that edge.
"""

from dataclasses import dataclass
from math import gcd

import numpy as np
from scipy.optimize import brentq

from .actions import (
    closure_residual,
    reduced_action,
    theta_sigma,
    theta_tau,
    winding_number,
)
from .dynamics import MotionConstants, Trajectory, Triangle, simulate, starting_state
from .errors import ClosureFailure, ConfigError, NonConvergence, NoSolution
from .geometry import WallId

__all__ = [
    "OrbitSpec",
    "PeriodicOrbit",
    "SolverOptions",
    "lmax",
    "solve_orbit",
    "solve_orbit_all",
    "build_orbit",
    "orbit_length",
    "enumerate_specs",
]


def lmax(s, t):
    return (s + t) // 2


@dataclass(frozen=True)
class OrbitSpec:
    s: int
    t: int
    l: int

    def __post_init__(self):
        if self.s < 1 or self.t < 1:
            raise ConfigError(f"need s, t >= 1, got ({self.s}, {self.t})")
        if not 0 <= self.l <= lmax(self.s, self.t):
            raise ConfigError(f"l = {self.l} outside [0, {lmax(self.s, self.t)}] for (s, t) = ({self.s}, {self.t})")

    @property
    def ratio(self):
        return self.s / self.t

    def __str__(self):
        return f"({self.s},{self.t},{self.l})"


@dataclass(frozen=True)
class SolverOptions:
    grid: int = 64
    seed_threshold: float = 0.25
    tol: float = 1e-10
    fd_step: float = 1e-7
    margin: float = 1e-9
    max_iter: int = 100
    dedup: float = 1e-6
    edge_samples: int = 4000


@dataclass
class PeriodicOrbit:
    spec: OrbitSpec
    constants: MotionConstants
    length: float
    trajectory: Trajectory
    closure_error: float
    azimuthal_advance: float

    @property
    def arc_length(self):
        return self.trajectory.length


def enumerate_specs(max_sum, primitive=False):
    """All valid (s, t, ℓ) with s + t ≤ max_sum."""
    out = []
    for n in range(2, max_sum + 1):
        for s in range(1, n):
            t = n - s
            for l in range(lmax(s, t) + 1):
                if primitive and gcd(gcd(s, t), l) != 1:
                    continue
                out.append(OrbitSpec(s, t, l))
    return out


def _scaled_residual(cavity, spec, x):
    """(ln w − ln(s/t), sϑ_σ + tϑ_τ − ℓ); log keeps r1 tame near the σ edge."""
    a, b = x
    w = winding_number(cavity, a, b)
    phase = spec.s * theta_sigma(cavity, a, b) + spec.t * theta_tau(cavity, a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.log(w) - np.log(spec.ratio)
    return np.array([r1, phase - spec.l], dtype=float)


def _clip(tri, x, margin):
    a = float(np.clip(x[0], -tri.sigma0**2 + margin, tri.tau0**2 - margin))
    bmax = tri.beta_max(a)
    b = float(np.clip(x[1], margin, max(bmax - margin, margin)))
    return np.array([a, b])


def _edge_gap(tri, x):
    return min(x[1], tri.beta_max(x[0]) - x[1])


def _newton(cavity, spec, x0, opts):
    tri = Triangle(cavity.sigma0, cavity.tau0)
    x = _clip(tri, np.asarray(x0, dtype=float), opts.margin)
    r = _scaled_residual(cavity, spec, x)
    for _ in range(opts.max_iter):
        if np.max(np.abs(r)) < 1e-14:
            break
        J = np.empty((2, 2))
        for j in range(2):
            h = opts.fd_step * max(1.0, abs(x[j]))
            e = np.zeros(2)
            e[j] = h
            xp, xm = _clip(tri, x + e, opts.margin), _clip(tri, x - e, opts.margin)
            J[:, j] = (_scaled_residual(cavity, spec, xp) - _scaled_residual(cavity, spec, xm)) / (xp[j] - xm[j])
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(dx)):
            break
        norm0 = np.linalg.norm(r)
        lam = 1.0
        while lam > 1e-8:
            xn = _clip(tri, x + lam * dx, opts.margin)
            rn = _scaled_residual(cavity, spec, xn)
            if np.all(np.isfinite(rn)) and np.linalg.norm(rn) < norm0:
                break
            lam *= 0.5
        else:
            break
        if np.max(np.abs(xn - x)) < 1e-16 * max(1.0, np.max(np.abs(x))):
            x, r = xn, rn
            break
        x, r = xn, rn
    return x, r


def _solve_meridional(cavity, spec, opts):
    """Roots of w(α, 0) = s/t on the β = 0 edge that close meridionally."""
    if spec.s == spec.t:
        # w(0, 0) = 1: the axial orbit traversed s times
        return [MotionConstants(1.0, 0.0, 0.0)]
    lo, hi = -cavity.sigma0**2, cavity.tau0**2
    n = opts.edge_samples
    # cluster samples near the ends and near α = 0 where w varies fastest
    u = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, n)))
    grid = np.unique(np.concatenate([lo + (0.0 - lo) * u, hi * u]))
    grid = grid[(grid > lo) & (grid < hi) & (grid != 0.0)]

    def g(a):
        return float(np.log(winding_number(cavity, a, 0.0)) - np.log(spec.ratio))

    vals = np.array([g(a) for a in grid])
    roots = []
    for i in range(len(grid) - 1):
        if np.sign(vals[i]) == np.sign(vals[i + 1]) or not np.isfinite(vals[i] + vals[i + 1]):
            continue
        if np.signbit(grid[i]) != np.signbit(grid[i + 1]):
            continue
        a = brentq(g, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200)
        r1, r2 = closure_residual(cavity, a, 0.0, spec.s, spec.t, 0)
        if abs(r1) < opts.tol and abs(r2) < opts.tol:
            roots.append(MotionConstants(1.0, a, 0.0))
    return roots


def solve_orbit_all(cavity, spec, options=None):
    """Every distinct root of the closure system for ``spec`` (P = 1)."""
    opts = options or SolverOptions()
    if spec.l == 0:
        roots = _solve_meridional(cavity, spec, opts)
        if not roots:
            raise NoSolution(f"no meridional root for {spec} in cavity ({cavity.sigma0}, {cavity.tau0})")
        return roots

    tri = Triangle(cavity.sigma0, cavity.tau0)
    n = opts.grid
    u = (np.arange(n) + 0.5) / n
    U, V = np.meshgrid(u, u, indexing="ij")
    A = -tri.sigma0**2 + U * (tri.sigma0**2 + tri.tau0**2)
    B = V * tri.beta_max(A)
    with np.errstate(divide="ignore", invalid="ignore"):
        R = _scaled_residual(cavity, spec, (A, B))
    norm = np.hypot(R[0], R[1])
    norm = np.where(np.isfinite(norm), norm, np.inf)

    padded = np.pad(norm, 1, constant_values=np.inf)
    is_min = np.ones_like(norm, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= norm <= padded[1 + di : 1 + di + n, 1 + dj : 1 + dj + n]
    # cells where both residual components change sign bracket a root even
    # when the nearest sample's residual is large (steep ϑ near the top vertex)
    finite = np.isfinite(R[0]) & np.isfinite(R[1])
    ok = finite[:-1, :-1] & finite[1:, :-1] & finite[:-1, 1:] & finite[1:, 1:]
    bracket = np.zeros_like(is_min)
    bracket[:-1, :-1] = ok
    for k in range(2):
        Rk = np.where(finite, R[k], 0.0)
        blk = np.stack([Rk[:-1, :-1], Rk[1:, :-1], Rk[:-1, 1:], Rk[1:, 1:]])
        bracket[:-1, :-1] &= (blk.min(axis=0) < 0) & (blk.max(axis=0) > 0)
    seeds = np.argwhere((is_min & (norm < opts.seed_threshold)) | bracket)
    seeds = sorted(seeds.tolist(), key=lambda ij: norm[ij[0], ij[1]])

    roots, best = [], None
    for i, j in seeds:
        x, r = _newton(cavity, spec, (A[i, j], B[i, j]), opts)
        r1, r2 = closure_residual(cavity, x[0], x[1], spec.s, spec.t, spec.l)
        err = max(abs(r1), abs(r2))
        if best is None or err < best[1]:
            best = (x, err)
        if err < opts.tol and tri.contains(x[0], x[1]) and x[1] > 0:
            if all(np.hypot(x[0] - c.alpha, x[1] - c.beta) > opts.dedup for c in roots):
                roots.append(MotionConstants(1.0, float(x[0]), float(x[1])))
    if not roots:
        # iterates that run onto the triangle edge chase a boundary root,
        # which does not count as an orbit of the open region
        if best is not None and best[1] < opts.seed_threshold and _edge_gap(tri, best[0]) > 1e-6 * cavity.scale**2:
            raise NonConvergence(f"Newton stalled for {spec} (residual {best[1]:.2e})", best=best[0])
        raise NoSolution(f"no root for {spec} in cavity ({cavity.sigma0}, {cavity.tau0})")
    roots.sort(key=lambda c: (c.alpha, c.beta))
    return roots


def solve_orbit(cavity, spec, options=None):
    return solve_orbit_all(cavity, spec, options)[0]


def orbit_length(cavity, spec, constants, P=1.0):
    """Maupertuis length (2π/P)(sJ_σ + tJ_τ + ℓJ_φ); independent of P."""
    a, b = constants.alpha, constants.beta
    ls = reduced_action(cavity.sigma0, a, b)
    lt = reduced_action(cavity.tau0, -a, b)
    return float(spec.s * ls + spec.t * lt + spec.l * 2.0 * np.pi * np.sqrt(b))


def build_orbit(cavity, spec, constants, P=1.0, phi=0.0, signs=(1, -1, 1), closure_tol=1e-6):
    """Simulate one period from the standard start and verify it closes."""
    mc = MotionConstants(P, constants.alpha, constants.beta)
    initial = starting_state(cavity, mc, phi=phi, signs=signs)
    traj = simulate(cavity, initial, spec.s + spec.t)
    final = traj.final_state
    closure = max(
        float(np.linalg.norm(final.position - initial.position)),
        cavity.scale * float(np.linalg.norm(final.momentum - initial.momentum)) / P,
    )
    n_sigma = sum(1 for w in traj.walls if w is WallId.SIGMA)
    n_tau = len(traj.walls) - n_sigma
    if (n_sigma, n_tau) != (spec.s, spec.t):
        raise ClosureFailure(f"{spec}: simulated bounce counts (σ, τ) = ({n_sigma}, {n_tau})")
    if closure > closure_tol * cavity.scale:
        raise ClosureFailure(f"{spec}: orbit misses its start by {closure:.3e}")
    advance = traj.azimuthal_advance()
    if constants.beta > 0:
        expected = 2.0 * np.pi * spec.l * np.sign(signs[2])
        if abs(abs(advance) - abs(expected)) > 1e-6:
            raise ClosureFailure(f"{spec}: azimuthal advance {advance:.9f}, expected ±{abs(expected):.9f}")
    return PeriodicOrbit(spec, mc, orbit_length(cavity, spec, mc, P), traj, closure, advance)
