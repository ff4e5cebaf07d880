"""Classical billiard motion inside the cavity.

Trajectories are propagated in Cartesian form: straight segments between
quadric hits, specular reflection at each wall.  Parabolic quantities
(canonical momenta, caustics, the constants α and β) are derived views.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import AbortOnDrift, DomainViolation, ForbiddenRegion, NoHit, NotPlanar, RimHit, ZeroMomentum
from .geometry import Cavity, ParabolicPoint, WallId, coordinate_tangents, to_cartesian, to_parabolic

__all__ = [
    "MotionConstants",
    "PhaseState",
    "CausticPair",
    "Triangle",
    "BounceRecord",
    "Trajectory",
    "constants_from_state",
    "constant_C_parabolic",
    "parabolic_momenta",
    "canonical_momenta",
    "state_from_parabolic",
    "caustics",
    "admissible_region",
    "reflect",
    "simulate",
    "starting_state",
    "segment_min_coordinates",
    "poincare_field",
    "planar_constant",
]


@dataclass(frozen=True)
class MotionConstants:
    """Momentum magnitude P, normalized third constant α = C/P², and β = L_z²/P²."""

    P: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.P > 0:
            raise ValueError(f"P must be positive, got {self.P}")
        if self.beta < 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")

    @property
    def C(self):
        return self.alpha * self.P**2

    @property
    def Lz_abs(self):
        return self.P * math.sqrt(self.beta)

    def admissible(self, cavity, tol=0.0):
        return admissible_region(cavity).contains(self.alpha, self.beta, tol=tol)


@dataclass(frozen=True)
class PhaseState:
    position: np.ndarray
    momentum: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).copy())
        object.__setattr__(self, "momentum", np.asarray(self.momentum, dtype=float).copy())

    @property
    def P(self):
        return float(np.linalg.norm(self.momentum))

    def reversed(self):
        return PhaseState(self.position, -self.momentum)


class CausticPair(NamedTuple):
    sigma_c: float
    tau_c: float
    delta: float


class Triangle(NamedTuple):
    """Admissible (α, β) region of a cavity."""

    sigma0: float
    tau0: float

    @property
    def vertices(self):
        s2, t2 = self.sigma0**2, self.tau0**2
        return ((-s2, 0.0), (t2, 0.0), (t2 - s2, s2 * t2))

    def beta_max(self, alpha):
        s2, t2 = self.sigma0**2, self.tau0**2
        return np.minimum(s2 * s2 + alpha * s2, t2 * t2 - alpha * t2)

    def contains(self, alpha, beta, tol=0.0):
        """Closed-triangle membership; ``tol`` widens every edge."""
        s2, t2 = self.sigma0**2, self.tau0**2
        return bool(
            beta >= -tol
            and beta <= s2 * s2 + alpha * s2 + tol
            and beta <= t2 * t2 - alpha * t2 + tol
        )

    def interior_point(self, u, v, margin=0.0):
        """Map the unit square onto the triangle: u sweeps α, v sweeps β ∈ [0, β_max(α)]."""
        s2, t2 = self.sigma0**2, self.tau0**2
        alpha = -s2 + margin + u * (s2 + t2 - 2 * margin)
        bmax = np.maximum(self.beta_max(alpha) - margin, 0.0)
        return alpha, v * bmax


def constants_from_state(state):
    p = state.momentum
    x, y, z = state.position
    px, py, pz = p
    P2 = px * px + py * py + pz * pz
    if P2 == 0:
        raise ZeroMomentum("momentum vector is zero")
    Lz = x * py - y * px
    C = 2.0 * (px * px + py * py) * z - 2.0 * (x * px + y * py) * pz
    return MotionConstants(math.sqrt(P2), C / P2, Lz * Lz / P2)


def parabolic_momenta(state):
    """Canonical (p_σ, p_τ, p_φ) as projections of p on ∂r/∂q."""
    pp = to_parabolic(state.position)
    e_s, e_t, e_p = coordinate_tangents(pp)
    p = state.momentum
    return float(p @ e_s), float(p @ e_t), float(p @ e_p)


def constant_C_parabolic(point, p_sigma, p_tau, p_phi, P):
    """Parabolic-coordinate form of the third constant C (needs στ ≠ 0)."""
    s2, t2 = point.sigma**2, point.tau**2
    return 0.5 * (p_sigma**2 - p_tau**2) + 0.5 * (t2 - s2) * (P**2 + p_phi**2 / (s2 * t2))


def _radicand(q, beta, alpha_signed):
    q2 = q * q
    if q2 == 0.0:
        return -np.inf if beta > 0 else alpha_signed
    return q2 - beta / q2 + alpha_signed


def canonical_momenta(point, mc, signs=(1, 1, 1), tol=1e-12):
    """(p_σ, p_τ, p_φ) at ``point`` for constants ``mc``; radicands within tol are clamped to 0."""
    rs = _radicand(point.sigma, mc.beta, mc.alpha)
    rt = _radicand(point.tau, mc.beta, -mc.alpha)
    for name, r in (("sigma", rs), ("tau", rt)):
        if r < -tol:
            raise ForbiddenRegion(f"{name} radicand {r:.3e} < 0 at {tuple(point)}")
    s1, s2, s3 = signs
    return (
        math.copysign(mc.P * math.sqrt(max(rs, 0.0)), s1),
        math.copysign(mc.P * math.sqrt(max(rt, 0.0)), s2),
        math.copysign(mc.P * math.sqrt(mc.beta), s3),
    )


def state_from_parabolic(point, p_sigma, p_tau, p_phi):
    """Cartesian phase state from parabolic position and canonical momenta."""
    e_s, e_t, e_p = coordinate_tangents(point)
    h2 = point.sigma**2 + point.tau**2
    rho2 = (point.sigma * point.tau) ** 2
    p = (p_sigma * e_s + p_tau * e_t) / h2
    if rho2 > 0:
        p = p + p_phi * e_p / rho2
    elif p_phi != 0:
        raise DomainViolation("nonzero p_phi on the symmetry axis")
    return PhaseState(to_cartesian(point), p)


def caustics(alpha, beta):
    if beta < 0:
        raise ValueError("beta must be non-negative")
    delta = math.sqrt(alpha * alpha + 4.0 * beta)
    return CausticPair(
        math.sqrt(max(0.5 * (delta - alpha), 0.0)),
        math.sqrt(max(0.5 * (delta + alpha), 0.0)),
        delta,
    )


def admissible_region(cavity):
    return Triangle(cavity.sigma0, cavity.tau0)


def reflect(momentum, normal):
    momentum = np.asarray(momentum, dtype=float)
    normal = np.asarray(normal, dtype=float)
    return momentum - 2.0 * (momentum @ normal) * normal


def starting_state(cavity, mc, phi=0.0, signs=(1, -1, 1)):
    """Deterministic launch point on the σ wall for constants ``mc``.

    σ = σ₀ and τ is the midpoint of the allowed range [τ_c, τ₀].  ``signs``
    are those of the momentum arriving at the wall, so the returned
    (outgoing) state has p_σ flipped to point inward.  For α = β = 0 the
    launch point is the σ-wall vertex, which gives the axial orbit.
    """
    cp = caustics(mc.alpha, mc.beta)
    if cp.delta == 0.0:
        tau = 0.0
    else:
        tau = min(max(0.5 * (cp.tau_c + cavity.tau0), cp.tau_c), cavity.tau0)
    point = ParabolicPoint(cavity.sigma0, tau, phi)
    ps, pt, pp = canonical_momenta(point, mc, signs)
    return state_from_parabolic(point, -ps, pt, pp)


@dataclass
class BounceRecord:
    point: np.ndarray
    wall: WallId
    p_in: np.ndarray
    p_out: np.ndarray
    length: float  # cumulative path length up to this bounce
    constants: MotionConstants
    reflected: bool = True


@dataclass
class Trajectory:
    cavity: Cavity
    initial: PhaseState
    bounces: list = field(default_factory=list)
    # per-segment minima of σ and τ (segment i ends at bounce i)
    seg_min_sigma: list = field(default_factory=list)
    seg_min_tau: list = field(default_factory=list)

    @property
    def constants0(self):
        return constants_from_state(self.initial)

    @property
    def points(self):
        return np.array([self.initial.position] + [b.point for b in self.bounces])

    @property
    def walls(self):
        return [b.wall for b in self.bounces]

    @property
    def length(self):
        return self.bounces[-1].length if self.bounces else 0.0

    @property
    def final_state(self):
        if not self.bounces:
            return self.initial
        b = self.bounces[-1]
        return PhaseState(b.point, b.p_out)

    def drift(self):
        """Max relative drift of (P, α, β) over all bounces.

        α is measured against the cavity scale σ₀² + τ₀² and β against
        σ₀²τ₀², the extents of the admissible triangle.
        """
        c0 = self.constants0
        if not self.bounces:
            return {"P": 0.0, "alpha": 0.0, "beta": 0.0}
        P = np.array([b.constants.P for b in self.bounces])
        a = np.array([b.constants.alpha for b in self.bounces])
        bt = np.array([b.constants.beta for b in self.bounces])
        cav = self.cavity
        return {
            "P": float(np.max(np.abs(P - c0.P)) / c0.P),
            "alpha": float(np.max(np.abs(a - c0.alpha)) / cav.scale),
            "beta": float(np.max(np.abs(bt - c0.beta)) / (cav.sigma0 * cav.tau0) ** 2),
        }

    def azimuthal_advance(self):
        """Signed swept angle about the z axis, summed segment by segment.

        A segment through the axis (L_z = 0) has no rotation sense; such
        passages are mirror flips of the meridional half-plane, so they add
        π per pass modulo 2π and an even number of them cancels.
        """
        pts = self.points
        x0, y0 = pts[:-1, 0], pts[:-1, 1]
        x1, y1 = pts[1:, 0], pts[1:, 1]
        cross = x0 * y1 - y0 * x1
        dot = x0 * x1 + y0 * y1
        scale = np.hypot(x0, y0) * np.hypot(x1, y1)
        through = (np.abs(cross) <= 1e-12 * scale) & (dot < 0)
        swept = np.sum(np.arctan2(cross[~through], dot[~through]))
        return float(swept + np.pi * (np.count_nonzero(through) % 2))


def _sigma2_tau2(x, y, z):
    rho2 = x * x + y * y
    r = math.sqrt(rho2 + z * z)
    if z >= 0:
        return (rho2 / (r + z) if r + z > 0 else 0.0), r + z
    return r - z, (rho2 / (r - z) if r - z > 0 else 0.0)


def segment_min_coordinates(p0, d, length):
    """Minimum σ and τ along p0 + t·d, t ∈ [0, length], d a unit vector.

    σ² = r − z and τ² = r + z are convex along a line, so the interior
    stationary point (from (p·d + t) = ±d_z·r) plus the endpoints suffice.
    """
    x, y, z = p0
    dx, dy, dz = d
    pd = x * dx + y * dy + z * dz
    pp = x * x + y * y + z * z
    cands_s = [0.0, length]
    cands_t = [0.0, length]
    one_m = 1.0 - dz * dz
    if one_m > 1e-300:
        u = math.sqrt(max(pp - pd * pd, 0.0) / one_m)
        cands_s.append(min(max(dz * u - pd, 0.0), length))
        cands_t.append(min(max(-dz * u - pd, 0.0), length))
    smin = min(_sigma2_tau2(x + t * dx, y + t * dy, z + t * dz)[0] for t in cands_s)
    tmin = min(_sigma2_tau2(x + t * dx, y + t * dy, z + t * dz)[1] for t in cands_t)
    return math.sqrt(smin), math.sqrt(tmin)


def _exit_t(x, y, z, dx, dy, dz, w, sign):
    a = dx * dx + dy * dy
    b = x * dx + y * dy - sign * w * w * dz
    c = x * x + y * y - 2.0 * sign * w * w * z - w**4
    if a <= 1e-300:
        return -c / (2.0 * b) if b > 0 else math.inf
    disc = b * b - a * c
    if disc < 0:
        return -math.inf
    root = math.sqrt(disc)
    if b < 0:
        return (-b + root) / a
    return -c / (b + root) if (b + root) > 0 else 0.0


def simulate(cavity, initial, n_bounces, drift_abort=1e-6, tangency_tol=1e-12):
    """Bounce ``initial`` off the walls ``n_bounces`` times.

    Raises RimHit at the rim and AbortOnDrift if any constant drifts past
    ``drift_abort`` (relative, see :meth:`Trajectory.drift`).
    """
    c0 = constants_from_state(initial)
    traj = Trajectory(cavity, initial)
    s0, t0 = cavity.sigma0, cavity.tau0
    t_eps = 1e-12 * cavity.scale
    a_scale, b_scale = cavity.scale, (s0 * t0) ** 2
    x, y, z = (float(v) for v in initial.position)
    px, py, pz = (float(v) for v in initial.momentum)
    P = math.sqrt(px * px + py * py + pz * pz)
    total = 0.0
    for _ in range(n_bounces):
        dx, dy, dz = px / P, py / P, pz / P
        ts = _exit_t(x, y, z, dx, dy, dz, s0, 1.0)
        tt = _exit_t(x, y, z, dx, dy, dz, t0, -1.0)
        ts = ts if ts > t_eps else math.inf
        tt = tt if tt > t_eps else math.inf
        if ts == math.inf and tt == math.inf:
            raise NoHit(f"no forward wall crossing from {(x, y, z)}")
        wall, t = (WallId.SIGMA, ts) if ts <= tt else (WallId.TAU, tt)
        smin, tmin = segment_min_coordinates((x, y, z), (dx, dy, dz), t)
        x, y, z = x + t * dx, y + t * dy, z + t * dz
        rho = math.hypot(x, y)
        if math.hypot(rho - cavity.rim_radius, z - cavity.rim_height) < cavity.rim_exclusion_eps:
            raise RimHit(f"trajectory meets the rim circle at {(x, y, z)} after {len(traj.bounces)} bounces")
        total += t
        w = s0 if wall is WallId.SIGMA else t0
        gx, gy, gz = 2.0 * x, 2.0 * y, -2.0 * wall.sign * w * w
        gn = math.sqrt(gx * gx + gy * gy + gz * gz)
        nx, ny, nz = -gx / gn, -gy / gn, -gz / gn
        pn = px * nx + py * ny + pz * nz
        p_in = np.array([px, py, pz])
        reflected = abs(pn) >= tangency_tol * P
        if reflected:
            px, py, pz = px - 2 * pn * nx, py - 2 * pn * ny, pz - 2 * pn * nz
        Lz = x * py - y * px
        P2 = px * px + py * py + pz * pz
        C = 2.0 * (px * px + py * py) * z - 2.0 * (x * px + y * py) * pz
        mc = MotionConstants(math.sqrt(P2), C / P2, Lz * Lz / P2)
        if (
            abs(mc.P - c0.P) > drift_abort * c0.P
            or abs(mc.alpha - c0.alpha) > drift_abort * a_scale
            or abs(mc.beta - c0.beta) > drift_abort * b_scale
        ):
            raise AbortOnDrift(f"constants drifted to {mc} from {c0} after {len(traj.bounces) + 1} bounces")
        traj.bounces.append(
            BounceRecord(np.array([x, y, z]), wall, p_in, np.array([px, py, pz]), total, mc, reflected)
        )
        traj.seg_min_sigma.append(smin)
        traj.seg_min_tau.append(tmin)
    return traj


def poincare_field(plane, solve_for, q, p, P=1.0, alpha=None, beta=None):
    """Evaluate α or β on a (q, p_q) grid for the σ or τ surface of section.

    Returns an array of shape (len(q), len(p)).  ``plane`` is "sigma" or
    "tau"; ``solve_for`` is "alpha" (needs ``beta``) or "beta" (needs ``alpha``).
    """
    plane = WallId(plane)
    if P <= 0:
        raise ValueError("P must be positive")
    q = np.asarray(q, dtype=float)[:, None]
    pq2 = (np.asarray(p, dtype=float)[None, :] / P) ** 2
    sgn = 1.0 if plane is WallId.SIGMA else -1.0
    if solve_for == "alpha":
        if beta is None:
            raise ValueError("beta is required when solving for alpha")
        if beta > 0 and np.any(q == 0):
            raise DomainViolation("q = 0 with beta > 0: centrifugal term diverges")
        with np.errstate(divide="ignore", invalid="ignore"):
            cent = np.where(q == 0, 0.0, beta / np.where(q == 0, 1.0, q) ** 2)
        return sgn * (pq2 - q**2 + cent)
    if solve_for == "beta":
        if alpha is None:
            raise ValueError("alpha is required when solving for beta")
        return q**2 * (q**2 - pq2 + sgn * alpha)
    raise ValueError(f"solve_for must be 'alpha' or 'beta', got {solve_for!r}")


def planar_constant(state, tol=1e-10):
    """(τ²p_σ² − σ²p_τ²)/(σ² + τ²) for a meridional (L_z = 0) state."""
    pt = to_parabolic(state.position)
    h2 = pt.sigma**2 + pt.tau**2
    x, y, _ = state.position
    Lz = x * state.momentum[1] - y * state.momentum[0]
    if abs(Lz) / state.P > tol * math.sqrt(h2):
        raise NotPlanar(f"L_z/P = {Lz / state.P:.3e} is not zero")
    if h2 == 0:
        return 0.0
    ps, ptau, _ = parabolic_momenta(state)
    return (pt.tau**2 * ps**2 - pt.sigma**2 * ptau**2) / h2
