"""Parabolic coordinates and the two-wall paraboloidal cavity.

Coordinates follow x = στ cos φ, y = στ sin φ, z = (τ² − σ²)/2.  The wall
σ = σ₀ is the paraboloid x² + y² = 2σ₀²z + σ₀⁴ (vertex at z = −σ₀²/2) and
τ = τ₀ is x² + y² = −2τ₀²z + τ₀⁴ (vertex at z = τ₀²/2).  The interior is the
intersection of the two convex sets bounded by these quadrics.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import NoHit, OffSurface, RimHit

__all__ = [
    "ParabolicPoint",
    "WallId",
    "Cavity",
    "Hit",
    "to_cartesian",
    "to_parabolic",
    "scale_factors",
    "wall_residual",
    "wall_intersection",
    "surface_normal",
    "contains",
    "coordinate_tangents",
]

TWO_PI = 2.0 * np.pi


class ParabolicPoint(NamedTuple):
    """(σ, τ, φ); fields may be scalars or broadcastable arrays."""

    sigma: float
    tau: float
    phi: float = 0.0


class WallId(str, Enum):
    SIGMA = "sigma"
    TAU = "tau"

    @property
    def sign(self):
        # orientation of the linear term in x² + y² − 2·sign·w²z − w⁴
        return 1.0 if self is WallId.SIGMA else -1.0


@dataclass(frozen=True)
class Cavity:
    sigma0: float
    tau0: float
    rim_exclusion_eps: float = field(default=None)

    def __post_init__(self):
        if not (np.isfinite(self.sigma0) and np.isfinite(self.tau0)):
            raise ValueError("cavity walls must be finite")
        if self.sigma0 <= 0 or self.tau0 <= 0:
            raise ValueError(f"need sigma0 > 0 and tau0 > 0, got ({self.sigma0}, {self.tau0})")
        object.__setattr__(self, "sigma0", float(self.sigma0))
        object.__setattr__(self, "tau0", float(self.tau0))
        if self.rim_exclusion_eps is None:
            object.__setattr__(self, "rim_exclusion_eps", 1e-9 * self.scale)

    @property
    def rim_radius(self):
        return self.sigma0 * self.tau0

    @property
    def rim_height(self):
        return 0.5 * (self.tau0**2 - self.sigma0**2)

    @property
    def scale(self):
        """Axis length σ₀² + τ₀², used as the characteristic length."""
        return self.sigma0**2 + self.tau0**2

    def wall_param(self, wall):
        return self.sigma0 if WallId(wall) is WallId.SIGMA else self.tau0

    def scaled(self, c):
        return Cavity(c * self.sigma0, c * self.tau0)


class Hit(NamedTuple):
    point: np.ndarray
    wall: WallId
    path_length: float


def to_cartesian(p):
    """Map a ParabolicPoint to Cartesian coordinates, shape (..., 3)."""
    sigma, tau, phi = (np.asarray(v, dtype=float) for v in p)
    rho = sigma * tau
    return np.stack(
        np.broadcast_arrays(rho * np.cos(phi), rho * np.sin(phi), 0.5 * (tau**2 - sigma**2)),
        axis=-1,
    )


def to_parabolic(c):
    """Inverse of :func:`to_cartesian`; φ := 0 on the axis.

    Uses σ²τ² = ρ² to pick whichever of r ∓ z is free of cancellation.
    """
    c = np.asarray(c, dtype=float)
    x, y, z = c[..., 0], c[..., 1], c[..., 2]
    rho2 = x * x + y * y
    r = np.sqrt(rho2 + z * z)
    with np.errstate(divide="ignore", invalid="ignore"):
        upper = z >= 0
        sig2 = np.where(upper, np.where(r + z > 0, rho2 / (r + z), 0.0), r - z)
        tau2 = np.where(upper, r + z, np.where(r - z > 0, rho2 / (r - z), 0.0))
    phi = np.where(rho2 > 0, np.mod(np.arctan2(y, x), TWO_PI), 0.0)
    # mod can return exactly 2π for tiny negative angles
    phi = np.where(phi >= TWO_PI, 0.0, phi)
    out = ParabolicPoint(np.sqrt(sig2), np.sqrt(tau2), phi)
    if c.ndim == 1:
        return ParabolicPoint(*(float(v) for v in out))
    return out


def scale_factors(p):
    sigma, tau = np.asarray(p[0], dtype=float), np.asarray(p[1], dtype=float)
    h = np.sqrt(sigma**2 + tau**2)
    return h, h, sigma * tau


def coordinate_tangents(p):
    """Unnormalized ∂r/∂σ, ∂r/∂τ, ∂r/∂φ at a parabolic point (scalar input)."""
    sigma, tau, phi = (float(v) for v in p)
    c, s = np.cos(phi), np.sin(phi)
    return (
        np.array([tau * c, tau * s, -sigma]),
        np.array([sigma * c, sigma * s, tau]),
        np.array([-sigma * tau * s, sigma * tau * c, 0.0]),
    )


def wall_residual(point, wall, cavity):
    """x² + y² − 2·sign·w²z − w⁴; negative inside that wall's half."""
    wall = WallId(wall)
    w = cavity.wall_param(wall)
    point = np.asarray(point, dtype=float)
    x, y, z = point[..., 0], point[..., 1], point[..., 2]
    return x * x + y * y - 2.0 * wall.sign * w * w * z - w**4


def _exit_parameter(origin, direction, wall, cavity):
    """Larger root of the ray/quadric quadratic, or +inf if never exits."""
    w = cavity.wall_param(wall)
    x, y, z = origin
    dx, dy, dz = direction
    a = dx * dx + dy * dy
    b = x * dx + y * dy - wall.sign * w * w * dz
    c = x * x + y * y - 2.0 * wall.sign * w * w * z - w**4
    if a <= 1e-300:
        return -c / (2.0 * b) if b > 0 else np.inf
    disc = b * b - a * c
    if disc < 0:
        return -np.inf
    root = np.sqrt(disc)
    if b < 0:
        return (-b + root) / a
    return -c / (b + root) if (b + root) > 0 else 0.0


def wall_intersection(origin, direction, cavity, t_eps=None):
    """First wall met by the ray origin + t·direction, t > t_eps.

    Raises RimHit within ``cavity.rim_exclusion_eps`` of the rim circle and
    NoHit when neither quadric is crossed ahead of the origin.
    """
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if t_eps is None:
        t_eps = 1e-12 * cavity.scale
    best_t, best_wall = np.inf, None
    for wall in (WallId.SIGMA, WallId.TAU):
        t = _exit_parameter(origin, direction, wall, cavity)
        if t > t_eps and t < best_t:
            best_t, best_wall = t, wall
    if best_wall is None or not np.isfinite(best_t):
        raise NoHit(f"no forward wall crossing from {origin} along {direction}")
    point = origin + best_t * direction
    rho = np.hypot(point[0], point[1])
    if np.hypot(rho - cavity.rim_radius, point[2] - cavity.rim_height) < cavity.rim_exclusion_eps:
        raise RimHit(f"trajectory meets the rim circle at {point}")
    return Hit(point, best_wall, float(best_t))


def surface_normal(point, wall, cavity, tol=1e-8):
    """Unit normal of the wall quadric at ``point``, oriented inward."""
    wall = WallId(wall)
    point = np.asarray(point, dtype=float)
    w = cavity.wall_param(wall)
    grad = np.array([2.0 * point[0], 2.0 * point[1], -2.0 * wall.sign * w * w])
    gnorm = np.linalg.norm(grad)
    # |f|/|∇f| approximates the distance to the surface
    if abs(wall_residual(point, wall, cavity)) / gnorm > tol * max(1.0, cavity.scale):
        raise OffSurface(f"{point} is not on the {wall.value} wall")
    return -grad / gnorm


def contains(cavity, point, rtol=1e-10):
    """True iff σ ≤ σ₀ and τ ≤ τ₀ (closed cavity, small relative slack)."""
    p = to_parabolic(point)
    return bool(
        np.all(p.sigma <= cavity.sigma0 * (1 + rtol)) and np.all(p.tau <= cavity.tau0 * (1 + rtol))
    )
