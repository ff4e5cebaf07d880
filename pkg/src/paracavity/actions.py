"""Action integrals, their derivatives, the winding number and closure angles.

All functions broadcast over array-valued ``alpha`` and ``beta``.

Closed form of the σ action, with G = √(σ₀⁴ + ασ₀² − β), A = G − σ₀²,
Δ = √(α² + 4β), A_σ = 2σ₀² + α::

    J_σ = (P/π) [G/2 − (α/4) ln((α − 2A)/Δ) − √β arctan(X)]

Two identities make this stable on the closed admissible triangle:

* (α − 2A)(A_σ + 2G) = Δ², so the log argument is evaluated as
  Δ/(A_σ + 2G) and never suffers cancellation in α − 2A;
* arctan(X) = ½ atan2(2√β G, 2β − ασ₀²), which lies in [0, π/2] and equals
  π·ϑ_σ.  X itself is 0/0 on parts of the boundary.

The τ quantities follow by σ₀ → τ₀, α → −α.
"""

from typing import NamedTuple

import numpy as np
from scipy import integrate

from .errors import EmptyInterval, NumericalError
from .geometry import WallId

__all__ = [
    "ClosedFormAux",
    "closed_form_aux",
    "action_sigma_closed",
    "action_sigma_literal",
    "action_sigma_quadrature",
    "action_tau",
    "reduced_action",
    "action_tau_quadrature",
    "action_phi",
    "dJ_dalpha",
    "dJ_dbeta",
    "theta",
    "theta_sigma",
    "theta_tau",
    "theta_ratio_form",
    "winding_number",
    "closure_residual",
    "ActionTriple",
    "actions",
]


class ClosedFormAux(NamedTuple):
    G: np.ndarray
    A: np.ndarray
    delta: np.ndarray
    A_sigma: np.ndarray
    A_tau: np.ndarray


class ActionTriple(NamedTuple):
    J_sigma: float
    J_tau: float
    J_phi: float


def _G(w, alpha, beta):
    w2 = w * w
    return np.sqrt(np.maximum(w2 * w2 + alpha * w2 - beta, 0.0))


def closed_form_aux(w, alpha, beta, tau0=None):
    """G, A, Δ for the wall parameter ``w``; A_τ needs ``tau0``."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    G = _G(w, alpha, beta)
    A_tau = 2.0 * tau0**2 - alpha if tau0 is not None else np.nan
    return ClosedFormAux(G, G - w * w, np.hypot(alpha, 2.0 * np.sqrt(beta)), 2.0 * w * w + alpha, A_tau)


def _log_ratio(w, alpha, beta):
    """ln((2w² + α + 2G)/Δ); +inf at Δ = 0."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    delta = np.hypot(alpha, 2.0 * np.sqrt(beta))
    num = 2.0 * w * w + alpha + 2.0 * _G(w, alpha, beta)
    with np.errstate(divide="ignore"):
        return np.log(num) - np.log(delta)


def theta(w, alpha, beta):
    """ϑ(w; α, β) = (1/2π) atan2(2√β G, 2β − αw²) ∈ [0, 1/2].

    Equivalent to (1/π) arctan √[(Δ+α)(A_σ−Δ) / ((Δ−α)(A_σ+Δ))]; at α = β = 0
    the value is 0 by the atan2(0, 0) convention.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    out = np.arctan2(2.0 * np.sqrt(beta) * _G(w, alpha, beta), 2.0 * beta - alpha * w * w) / (2.0 * np.pi)
    return out[()] if out.ndim == 0 else out


def theta_ratio_form(w, alpha, beta):
    """ϑ from the nonnegative arctangent ratio; used to cross-check :func:`theta`."""
    delta = np.hypot(alpha, 2.0 * np.sqrt(beta))
    a_w = 2.0 * w * w + alpha
    ratio = (delta + alpha) * (a_w - delta) / ((delta - alpha) * (a_w + delta))
    return np.arctan(np.sqrt(ratio)) / np.pi


def theta_sigma(cavity, alpha, beta):
    return theta(cavity.sigma0, alpha, beta)


def theta_tau(cavity, alpha, beta):
    return theta(cavity.tau0, -np.asarray(alpha, dtype=float), beta)


def reduced_action(w, alpha, beta):
    """2πJ/P for the wall parameter ``w``: G + (α/2) ln((A + 2G)/Δ) − 2π√β ϑ.

    This is the loop length contributed by one oscillation; it avoids the
    1/π round trip, so the axial value G = w² comes out exact.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    G = _G(w, alpha, beta)
    L = _log_ratio(w, alpha, beta)
    # α·ln(·/Δ) → 0 as Δ → 0 since |α| ≤ Δ
    log_term = np.where(np.isfinite(L), 0.5 * alpha * np.where(np.isfinite(L), L, 0.0), 0.0)
    out = G + log_term - 2.0 * np.pi * np.sqrt(beta) * theta(w, alpha, beta)
    return out[()] if out.ndim == 0 else out


def action_sigma_closed(sigma0, alpha, beta, P=1.0):
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    G = _G(sigma0, alpha, beta)
    L = _log_ratio(sigma0, alpha, beta)
    log_term = np.where(np.isfinite(L), 0.25 * alpha * np.where(np.isfinite(L), L, 0.0), 0.0)
    out = (P / np.pi) * (0.5 * G + log_term) - P * np.sqrt(beta) * theta(sigma0, alpha, beta)
    return out[()] if out.ndim == 0 else out


def action_sigma_literal(sigma0, alpha, beta, P=1.0):
    """The closed form typed exactly as printed; valid only strictly inside."""
    G = np.sqrt(sigma0**4 + alpha * sigma0**2 - beta)
    A = G - sigma0**2
    delta = np.sqrt(alpha**2 + 4 * beta)
    sb = np.sqrt(beta)
    return (P / np.pi) * (
        G / 2
        - alpha / 4 * np.log((alpha - 2 * A) / delta)
        - sb * np.arctan(((delta + alpha) * A + 2 * beta) / (sb * (delta + alpha - 2 * A)))
    )


def action_tau(tau0, alpha, beta, P=1.0):
    return action_sigma_closed(tau0, -np.asarray(alpha, dtype=float), beta, P)


def action_phi(beta, P=1.0, sign=1):
    return float(np.copysign(P * np.sqrt(beta), sign))


def actions(cavity, alpha, beta, P=1.0, sign=1):
    return ActionTriple(
        float(action_sigma_closed(cavity.sigma0, alpha, beta, P)),
        float(action_tau(cavity.tau0, alpha, beta, P)),
        action_phi(beta, P, sign),
    )


def _smooth_integrand(qc, pc):
    """√(q² − β/q² + α)·2u at q = q_c + u², with the root factored out.

    q⁴ + αq² − β = (q² − q_c²)(q² + p_c²), p_c the opposite caustic, so the
    substituted integrand 2u²√((q + q_c)(q² + p_c²))/q is smooth in u.
    """

    def f(u):
        q = qc + u * u
        return 2.0 * u * u * np.sqrt((q + qc) * (q * q + pc * pc)) / q

    return f


def action_sigma_quadrature(sigma0, alpha, beta, P=1.0, rule="adaptive", tol=1e-13):
    """Numerical J_σ, independent of the closed form.

    ``rule`` is "adaptive" (QUADPACK Gauss–Kronrod) or "gauss" (fixed
    Gauss–Legendre, 64 and 128 nodes compared).
    """
    delta = np.hypot(alpha, 2.0 * np.sqrt(beta))
    qc = np.sqrt(max(0.5 * (delta - alpha), 0.0))
    pc = np.sqrt(max(0.5 * (delta + alpha), 0.0))
    if qc > sigma0 * (1 + 1e-12):
        raise EmptyInterval(f"caustic {qc} lies beyond the wall {sigma0}")
    umax = np.sqrt(max(sigma0 - qc, 0.0))
    if umax == 0.0:
        return 0.0
    f = _smooth_integrand(qc, pc)
    if rule == "adaptive":
        val, _ = integrate.quad(f, 0.0, umax, epsabs=tol, epsrel=tol, limit=400)
    elif rule == "gauss":
        vals = []
        for n in (64, 128):
            x, wts = np.polynomial.legendre.leggauss(n)
            u = 0.5 * umax * (x + 1.0)
            vals.append(0.5 * umax * np.sum(wts * f(u)))
        if abs(vals[1] - vals[0]) > 1e-11 * max(1.0, abs(vals[1])):
            raise NumericalError("Gauss-Legendre rule did not converge")
        val = vals[1]
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return P / np.pi * val


def action_tau_quadrature(tau0, alpha, beta, P=1.0, rule="adaptive"):
    return action_sigma_quadrature(tau0, -alpha, beta, P, rule=rule)


def dJ_dalpha(wall, cavity, alpha, beta, P=1.0):
    """∂J/∂α: ≥ 0 for the σ wall, ≤ 0 for the τ wall, ±inf at Δ = 0."""
    wall = WallId(wall)
    if wall is WallId.SIGMA:
        out = P / (4 * np.pi) * _log_ratio(cavity.sigma0, alpha, beta)
    else:
        out = -P / (4 * np.pi) * _log_ratio(cavity.tau0, -np.asarray(alpha, dtype=float), beta)
    return out[()] if np.ndim(out) == 0 else out


def dJ_dbeta(wall, cavity, alpha, beta, P=1.0):
    """∂J/∂β = −P ϑ/(2√β); diverges at β = 0 unless ϑ = 0."""
    th = theta_sigma(cavity, alpha, beta) if WallId(wall) is WallId.SIGMA else theta_tau(cavity, alpha, beta)
    with np.errstate(divide="ignore", invalid="ignore"):
        return -P * th / (2.0 * np.sqrt(beta))


def winding_number(cavity, alpha, beta):
    """w = ln[(A_τ + 2G_τ)/Δ] / ln[(A_σ + 2G_σ)/Δ]; 1 at α = β = 0."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    num = _log_ratio(cavity.tau0, -alpha, beta)
    den = _log_ratio(cavity.sigma0, alpha, beta)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(np.isinf(num) & np.isinf(den), 1.0, num / den)
    # den = 0 on the σ-caustic edge of the triangle
    w = np.where((den <= 0) & ~np.isinf(num), np.inf, w)
    return w[()] if w.ndim == 0 else w


def closure_residual(cavity, alpha, beta, s, t, l, beta_eps=1e-14):
    """(w − s/t, sϑ_σ + tϑ_τ − ℓ).

    For ℓ = 0 on the β = 0 edge the orbit is meridional: crossing the axis
    flips φ by π, which the ϑ values record as half turns.  Such an orbit
    closes iff sϑ_σ + tϑ_τ is an integer, so r2 is the distance to the
    nearest integer there.
    """
    r1 = winding_number(cavity, alpha, beta) - s / t
    phase = s * theta_sigma(cavity, alpha, beta) + t * theta_tau(cavity, alpha, beta)
    if l == 0 and np.all(np.asarray(beta) < beta_eps):
        r2 = phase - np.round(phase)
    else:
        r2 = phase - l
    return r1, r2
