"""Normalized eigenmodes, overlaps, penetration ratio and correspondence.

ψ_{l,n,m} = N S(σ) T(τ) e^{imφ} with dV = στ(σ² + τ²) dσ dτ dφ.  The φ
integral is done analytically (2π for equal m, 0 otherwise); the (σ, τ)
integrals use tensor-product Gauss–Legendre rules whose node count is
doubled until the result is stable.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .actions import theta_sigma, theta_tau, winding_number
from .dynamics import MotionConstants, Triangle, caustics
from .errors import QuadratureNotConverged
from .geometry import Cavity, WallId, to_parabolic
from .orbits import OrbitSpec, lmax
from .spectrum import EigenPair, radial

__all__ = [
    "Eigenmode",
    "QuantumConstants",
    "Correspondence",
    "normalize",
    "eigenmode_eval",
    "inner_product",
    "gram_matrix",
    "penetration_ratio",
    "quantum_constants",
    "correspond",
    "convergents",
]


@dataclass(frozen=True)
class Eigenmode:
    pair: EigenPair
    N: float
    cavity: Cavity


@dataclass(frozen=True)
class QuantumConstants:
    alpha_q: float
    beta_q: float
    C_q: float
    Lz_q: int
    Pi: float


@dataclass(frozen=True)
class Correspondence:
    constants: MotionConstants
    winding: float
    approx: OrbitSpec = None
    residual: float = np.nan


def _gauss(lo, hi, n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _rect_integral(f_sigma, f_tau, s_lim, t_lim, n):
    """∫∫ f_σ(σ) f_τ(τ) στ(σ² + τ²) over one rectangle, separable form."""
    s, ws = _gauss(*s_lim, n)
    t, wt = _gauss(*t_lim, n)
    fs = f_sigma(s) * s * ws
    ft = f_tau(t) * t * wt
    return np.sum(fs * s * s) * np.sum(ft) + np.sum(fs) * np.sum(ft * t * t)


def _converged(fn, n0, rtol, what, atol=0.0, n_max=1024):
    prev = fn(n0)
    n = 2 * n0
    while n <= n_max:
        cur = fn(n)
        if abs(cur - prev) <= max(rtol * abs(cur), atol):
            return cur
        prev, n = cur, 2 * n
    raise QuadratureNotConverged(f"{what} did not settle to {rtol:g} by {n_max} nodes")


def _radials(pair):
    m_abs = abs(pair.m)
    return (
        lambda s: radial(s, pair.a, pair.k, m_abs, WallId.SIGMA),
        lambda t: radial(t, pair.a, pair.k, m_abs, WallId.TAU),
    )


def normalize(pair, cavity, nodes=48, rtol=1e-10):
    S, T = _radials(pair)

    def norm2(n):
        return 2.0 * np.pi * _rect_integral(
            lambda s: S(s) ** 2, lambda t: T(t) ** 2, (0.0, cavity.sigma0), (0.0, cavity.tau0), n
        )

    return Eigenmode(pair, float(1.0 / np.sqrt(_converged(norm2, nodes, rtol, "normalization"))), cavity)


def eigenmode_eval(mode, point):
    """ψ at a ParabolicPoint (or Cartesian (..., 3) array); 0 outside."""
    if not hasattr(point, "sigma"):
        point = to_parabolic(point)
    sigma, tau, phi = (np.asarray(v, dtype=float) for v in point)
    p = mode.pair
    val = mode.N * radial(sigma, p.a, p.k, abs(p.m), WallId.SIGMA) * radial(tau, p.a, p.k, abs(p.m), WallId.TAU)
    inside = (sigma <= mode.cavity.sigma0) & (tau <= mode.cavity.tau0)
    out = np.where(inside, val, 0.0) * np.exp(1j * p.m * phi)
    return out[()] if out.ndim == 0 else out


def inner_product(mode1, mode2, nodes=48, rtol=1e-10):
    """⟨ψ₁, ψ₂⟩ over the cavity; exactly 0 when the m values differ."""
    if mode1.pair.m != mode2.pair.m:
        return 0.0 + 0.0j
    S1, T1 = _radials(mode1.pair)
    S2, T2 = _radials(mode2.pair)
    cav = mode1.cavity

    def ip(n):
        return 2.0 * np.pi * mode1.N * mode2.N * _rect_integral(
            lambda s: S1(s) * S2(s), lambda t: T1(t) * T2(t), (0.0, cav.sigma0), (0.0, cav.tau0), n
        )

    # overlaps of normalized modes are O(1) at most, so an absolute
    # criterion also covers orthogonal pairs that integrate to ~0
    return complex(_converged(ip, nodes, rtol, "overlap", atol=rtol))


def gram_matrix(modes, nodes=96):
    """Pairwise overlaps of a list of modes sharing one cavity."""
    n = len(modes)
    G = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            G[i, j] = inner_product(modes[i], modes[j], nodes=nodes)
            G[j, i] = np.conj(G[i, j])
    return G


def _alpha(pair, convention):
    if convention == "table":
        return pair.alpha
    if convention == "classical":
        return pair.alpha_classical
    raise ValueError(f"unknown alpha convention {convention!r}")


def penetration_ratio(mode, nodes=32, rtol=1e-4, convention="table"):
    """Share of |ψ|² in {σ < σ_c} ∪ {τ < τ_c}, the classically forbidden part.

    Caustics come from (α, β = m²/k²) with α = 2a/k ("table") or 2a/k²
    ("classical").  The (σ, τ) rectangle is split at the caustics so every
    Gauss panel sees a smooth integrand.
    """
    p, cav = mode.pair, mode.cavity
    sc, tc, _ = caustics(_alpha(p, convention), p.beta)
    sc, tc = min(sc, cav.sigma0), min(tc, cav.tau0)
    S, T = _radials(p)
    s_cuts = [(0.0, sc), (sc, cav.sigma0)]
    t_cuts = [(0.0, tc), (tc, cav.tau0)]

    def parts(n):
        out = np.zeros((2, 2))
        for i, sl in enumerate(s_cuts):
            for j, tl in enumerate(t_cuts):
                if sl[1] > sl[0] and tl[1] > tl[0]:
                    out[i, j] = _rect_integral(lambda s: S(s) ** 2, lambda t: T(t) ** 2, sl, tl, n)
        return out

    def ratio(n):
        q = parts(n)
        return (q.sum() - q[1, 1]) / q.sum()

    return float(_converged(ratio, nodes, rtol, "penetration ratio"))


def quantum_constants(pair, cavity=None):
    """α = 2a/k, β = m²/k², C = 2ka, L_z = m and (with a cavity) Π."""
    Pi = penetration_ratio(normalize(pair, cavity)) if cavity is not None else np.nan
    return QuantumConstants(pair.alpha, pair.m**2 / pair.k**2, 2.0 * pair.k * pair.a, pair.m, Pi)


def convergents(x, max_denominator):
    """Continued-fraction convergents p/q of x with q ≤ max_denominator."""
    out = []
    h0, h1, k0, k1 = 0, 1, 1, 0
    r = Fraction(x)
    while True:
        a = r.numerator // r.denominator
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > max_denominator:
            break
        out.append(Fraction(h1, k1))
        frac = r - a
        if frac == 0:
            break
        r = 1 / frac
    return out


def correspond(pair, cavity, max_denominator=20, eps=1e-9, convention="table"):
    """Classical counterpart of an eigenpair: constants, winding and (s,t,ℓ)."""
    mc = MotionConstants(pair.k, _alpha(pair, convention), pair.m**2 / pair.k**2)
    w = float(winding_number(cavity, mc.alpha, mc.beta))
    tri = Triangle(cavity.sigma0, cavity.tau0)
    inside = (
        mc.beta >= -eps
        and -cavity.sigma0**2 - eps < mc.alpha < cavity.tau0**2 + eps
        and mc.beta <= tri.beta_max(mc.alpha) + eps
    )
    if not inside or not np.isfinite(w) or w <= 0:
        return Correspondence(mc, w)
    cands = [c for c in convergents(w, max_denominator) if c.numerator >= 1]
    if not cands:
        return Correspondence(mc, w)
    c = cands[-1]
    s, t = c.numerator, c.denominator
    phase = s * float(theta_sigma(cavity, mc.alpha, mc.beta)) + t * float(theta_tau(cavity, mc.alpha, mc.beta))
    l = int(np.clip(np.round(phase), 0, lmax(s, t)))
    return Correspondence(mc, w, OrbitSpec(s, t, l), float(abs(phase - l)))
