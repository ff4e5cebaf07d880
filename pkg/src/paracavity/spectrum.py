"""Radial functions, Dirichlet eigenpairs and deformation scans.

Units: ħ = 1, 2M = 1, so E = k².  With u = w², the separated radial
equations have regular solutions S(σ) = σ^{|m|} U_S(σ²), T(τ) = τ^{|m|} U_T(τ²)
with power series U = Σ t_j u^j,

    t_0 = 1,  t_j = −(c u t_{j−1} + k² u² t_{j−2}) / (4 j (j + |m|)),

where c = +2a for S and c = −2a for T.  The same functions, up to a constant
factor, are w^{|m|} e^{−ikw²/2} M(μ − κ + 1/2, 1 + 2μ, ikw²) with μ = |m|/2
and κ_S = −ia/2k, κ_T = +ia/2k (see :func:`radial_complex`).

Eigenpairs are labeled by interior node counts: l zeros of S on (0, σ₀) and
n zeros of T on (0, τ₀).  Searches carry the separation constant as
α_c = 2a/k², the ratio that plays the role of the classical α: the radial
equations read S'' + S'/σ + k²(σ² + α_c − β/σ²)S = 0 with β = m²/k².  A
zero of S on (0, σ₀] needs the bracket to be positive somewhere, so every
eigenpair has (α_c, β) strictly inside the classical admissible triangle
and the search band is exactly that triangle's α range.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainExceeded, GridTooCoarse, NonConvergence
from .geometry import Cavity, WallId
from .specfun import DEFAULT_DOMAIN, kummer_m

__all__ = [
    "EigenPair",
    "ScanOptions",
    "radial",
    "radial_S",
    "radial_T",
    "radial_complex",
    "radial_max",
    "boundary_residuals",
    "node_count",
    "refine_eigenpair",
    "find_eigenpairs",
    "find_spectrum",
    "DeformationScan",
    "Crossing",
    "spectrum_vs_deformation",
]

MAX_TERMS = 4000


@dataclass(frozen=True)
class EigenPair:
    l: int
    n: int
    m: int
    a: float
    k: float

    @property
    def energy(self):
        return self.k * self.k

    @property
    def alpha(self):
        """α_q = 2a/k, the convention of the reference eigenvalue table."""
        return 2.0 * self.a / self.k

    @property
    def alpha_classical(self):
        """2a/k² = c/k², the coefficient ratio matching the classical α = C/P²."""
        return 2.0 * self.a / (self.k * self.k)

    @property
    def beta(self):
        return self.m * self.m / (self.k * self.k)

    @property
    def label(self):
        return (self.l, self.n, self.m)

    def with_m(self, m):
        return EigenPair(self.l, self.n, m, self.a, self.k)


@dataclass(frozen=True)
class ScanOptions:
    n_k: int = 200
    n_alpha: int = 200
    k_min_frac: float = 0.02
    band_pad: float = 0.0
    newton_tol: float = 1e-10
    node_samples: int = 1000
    verify: bool = True


def radial(w, a, k, m_abs, wall=WallId.SIGMA):
    """S (wall σ) or T (wall τ) at w ≥ 0, broadcasting over all arguments."""
    c = 2.0 * np.asarray(a, dtype=float) * WallId(wall).sign
    w = np.asarray(w, dtype=float)
    k = np.asarray(k, dtype=float)
    u = w * w
    A = c * u
    B = (k * u) ** 2
    shape = np.broadcast_shapes(A.shape, B.shape)
    A, B = np.broadcast_to(A, shape), np.broadcast_to(B, shape)
    t_prev = np.zeros(shape)
    t_cur = np.ones(shape)
    total = np.ones(shape)
    comp = np.zeros(shape)
    mag = np.ones(shape)
    quiet = 0
    for j in range(1, MAX_TERMS):
        t_next = -(A * t_cur + B * t_prev) / (4.0 * j * (j + m_abs))
        # Kahan-compensated accumulation
        y = t_next - comp
        s = total + y
        comp = (s - total) - y
        total = s
        mag = mag + np.abs(t_next)
        t_prev, t_cur = t_cur, t_next
        if j > 2 and np.all(np.abs(t_cur) + np.abs(t_prev) <= 1e-18 * mag):
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    else:
        raise NonConvergence("radial series did not converge")
    out = total * w**m_abs if m_abs else total
    return out[()] if np.ndim(out) == 0 else out


def radial_S(sigma, a, k, m_abs):
    return radial(sigma, a, k, m_abs, WallId.SIGMA)


def radial_T(tau, a, k, m_abs):
    return radial(tau, a, k, m_abs, WallId.TAU)


def radial_complex(w, a, k, m_abs, wall=WallId.SIGMA, domain=DEFAULT_DOMAIN):
    """w^{|m|} e^{−ikw²/2} M(μ − κ + 1/2, 1 + 2μ, ikw²), complex.

    Equal to :func:`radial` up to rounding; its imaginary part measures the
    realness of the Whittaker representation.
    """
    mu = 0.5 * m_abs
    kappa = -1j * WallId(wall).sign * a / (2.0 * k)
    out = []
    for wi in np.atleast_1d(np.asarray(w, dtype=float)):
        z = 1j * k * wi * wi
        if abs(z) > domain.max_abs_z:
            raise DomainExceeded(f"k·w² = {abs(z):.4g} exceeds the special-function domain")
        val = np.exp(-0.5 * z) * kummer_m(mu - kappa + 0.5, 1.0 + 2.0 * mu, z, domain)
        out.append(wi**m_abs * val)
    out = np.array(out)
    return out[0] if np.ndim(w) == 0 else out


def radial_max(w0, a, k, m_abs, wall, samples=400):
    w = np.linspace(0.0, w0, samples)
    return float(np.max(np.abs(radial(w, a, k, m_abs, wall))))


def boundary_residuals(a, k, cavity, m):
    """(S(σ₀), T(τ₀)); depends on m only through |m|."""
    m_abs = abs(int(m))
    return (
        float(radial(cavity.sigma0, a, k, m_abs, WallId.SIGMA)),
        float(radial(cavity.tau0, a, k, m_abs, WallId.TAU)),
    )


def node_count(w0, a, k, m_abs, wall, samples=1000):
    """Sign changes of the radial function on (0, w0)."""
    w = w0 * np.arange(1, samples) / samples
    v = radial(w, a, k, m_abs, wall)
    s = np.sign(v)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _normalized_residual(x, cavity, m_abs):
    alpha, k = x
    a = 0.5 * alpha * k * k
    return np.array(
        [
            radial(cavity.sigma0, a, k, m_abs, WallId.SIGMA) / radial_max(cavity.sigma0, a, k, m_abs, WallId.SIGMA),
            radial(cavity.tau0, a, k, m_abs, WallId.TAU) / radial_max(cavity.tau0, a, k, m_abs, WallId.TAU),
        ]
    )


def _residual_alpha_k(x, cavity, m_abs):
    alpha, k = x
    a = 0.5 * alpha * k * k
    return np.array(
        [
            radial(cavity.sigma0, a, k, m_abs, WallId.SIGMA),
            radial(cavity.tau0, a, k, m_abs, WallId.TAU),
        ]
    )


def refine_eigenpair(cavity, m, alpha0, k0, tol=1e-10, max_iter=60, label=None):
    """Damped Newton on (S(σ₀), T(τ₀)) in the variables (α_c, k), α_c = 2a/k².

    Returns an :class:`EigenPair` labeled by node counts.  Near-singular
    Jacobians fall back to a Levenberg–Marquardt step.
    """
    m_abs = abs(int(m))
    x = np.array([alpha0, k0], dtype=float)
    # rescale rows so both residuals are O(1) near the root
    scale = np.array(
        [
            radial_max(cavity.sigma0, 0.5 * alpha0 * k0 * k0, k0, m_abs, WallId.SIGMA),
            radial_max(cavity.tau0, 0.5 * alpha0 * k0 * k0, k0, m_abs, WallId.TAU),
        ]
    )

    def F(y):
        return _residual_alpha_k(y, cavity, m_abs) / scale

    r = F(x)
    for _ in range(max_iter):
        if np.max(np.abs(r)) < 1e-15:
            break
        J = np.empty((2, 2))
        for j in range(2):
            h = 1e-7 * max(1.0, abs(x[j]))
            e = np.zeros(2)
            e[j] = h
            J[:, j] = (F(x + e) - F(x - e)) / (2 * h)
        if np.linalg.cond(J) > 1e8:
            lam = 1e-6 * np.max(np.abs(J)) ** 2
            dx = np.linalg.solve(J.T @ J + lam * np.eye(2), -J.T @ r)
        else:
            dx = np.linalg.solve(J, -r)
        # trust region: far trial points overflow the series and never help
        dx *= min(1.0, 1.0 / max(abs(dx[0]), 1e-300), 0.2 * x[1] / max(abs(dx[1]), 1e-300))
        step = 1.0
        n0 = np.linalg.norm(r)
        while step > 1e-6:
            xn = x + step * dx
            if xn[1] > 0:
                with np.errstate(over="ignore", invalid="ignore"):
                    rn = F(xn)
                if np.all(np.isfinite(rn)) and np.linalg.norm(rn) < n0:
                    break
            step *= 0.5
        else:
            break
        done = np.max(np.abs(xn - x)) < 1e-15 * max(1.0, np.max(np.abs(x)))
        x, r = xn, rn
        if done:
            break
    res = _normalized_residual(x, cavity, m_abs)
    if np.max(np.abs(res)) > tol:
        raise NonConvergence(f"eigenpair refinement stalled at residual {np.max(np.abs(res)):.2e}", best=x)
    alpha, k = x
    a = 0.5 * alpha * k * k
    l = node_count(cavity.sigma0, a, k, m_abs, WallId.SIGMA)
    n = node_count(cavity.tau0, a, k, m_abs, WallId.TAU)
    if label is not None and (l, n) != tuple(label):
        raise NonConvergence(f"refinement converged to ({l},{n}) instead of {tuple(label)}", best=x)
    return EigenPair(l, n, int(m), float(a), float(k))


def _edge_nodes(w0, a, k, m_abs, wall, samples):
    """Node counts for a batch of (a, k) values, vectorized over the batch."""
    w = w0 * np.arange(1, samples) / samples
    v = np.sign(radial(w[None, :], np.asarray(a)[:, None], np.asarray(k)[:, None], m_abs, wall))
    return np.count_nonzero(v[:, 1:] * v[:, :-1] < 0, axis=1)


def _row_roots(w0, m_abs, ks, alphas, wall, samples):
    """Per k row: {node count: interpolated α root} for one wall.

    Along a row the node count changes by one each time the wall residual
    changes sign (Sturm ordering: zeros of S move inward as α grows, zeros
    of T as α falls), so labels follow from the count at the band end where
    the count is smallest.
    """
    A, K = np.meshgrid(alphas, ks)
    vals = radial(w0, 0.5 * A * K * K, K, m_abs, wall)
    if wall is WallId.SIGMA:
        base = _edge_nodes(w0, 0.5 * alphas[0] * ks * ks, ks, m_abs, wall, samples)
    else:
        base = _edge_nodes(w0, 0.5 * alphas[-1] * ks * ks, ks, m_abs, wall, samples)
    rows = []
    for i in range(len(ks)):
        v = vals[i]
        idx = np.nonzero(v[:-1] * v[1:] < 0)[0]
        roots = alphas[idx] - v[idx] * (alphas[idx + 1] - alphas[idx]) / (v[idx + 1] - v[idx])
        if wall is WallId.TAU:
            roots = roots[::-1]
        rows.append({int(base[i]) + j: float(r) for j, r in enumerate(roots)})
    return rows


def _crossings(cavity, m, k_max, opts):
    m_abs = abs(int(m))
    lo, hi = -cavity.sigma0**2, cavity.tau0**2
    pad = opts.band_pad * (hi - lo)
    alphas = np.linspace(lo - pad, hi + pad, opts.n_alpha)
    ks = np.linspace(opts.k_min_frac * k_max, k_max, opts.n_k)
    # band-edge counts only need to resolve the few lowest nodes
    samples = min(opts.node_samples, 300)
    s_rows = _row_roots(cavity.sigma0, m_abs, ks, alphas, WallId.SIGMA, samples)
    t_rows = _row_roots(cavity.tau0, m_abs, ks, alphas, WallId.TAU, samples)
    seeds = []
    for i in range(len(ks) - 1):
        s0, s1, t0, t1 = s_rows[i], s_rows[i + 1], t_rows[i], t_rows[i + 1]
        for l in s0.keys() & s1.keys():
            for n in t0.keys() & t1.keys():
                d0 = s0[l] - t0[n]
                d1 = s1[l] - t1[n]
                if d0 == 0 or np.sign(d0) != np.sign(d1):
                    f = d0 / (d0 - d1) if d0 != d1 else 0.0
                    k_guess = ks[i] + f * (ks[i + 1] - ks[i])
                    a_guess = s0[l] + f * (s1[l] - s0[l])
                    seeds.append(((l, n), a_guess, k_guess))
    return seeds


def find_eigenpairs(cavity, m, k_max, options=None):
    """All eigenpairs with 0 < k ≤ k_max for azimuthal number m, sorted by k."""
    opts = options or ScanOptions()
    if k_max <= 0:
        raise ValueError("k_max must be positive")
    pairs = _refine_seeds(cavity, m, _crossings(cavity, m, k_max, opts), k_max, opts)
    if opts.verify:
        fine = ScanOptions(
            n_k=2 * opts.n_k, n_alpha=2 * opts.n_alpha, k_min_frac=opts.k_min_frac / 2,
            band_pad=opts.band_pad, newton_tol=opts.newton_tol, verify=False,
        )
        fine_pairs = _refine_seeds(cavity, m, _crossings(cavity, m, k_max, fine), k_max, fine)
        if {p.label for p in fine_pairs} != {p.label for p in pairs}:
            warnings.warn(
                f"m={m}: refined scan found {len(fine_pairs)} pairs, coarse scan {len(pairs)}",
                GridTooCoarse,
                stacklevel=2,
            )
            pairs = fine_pairs
    return pairs


def _refine_seeds(cavity, m, seeds, k_max, opts):
    found = {}
    for label, a0, k0 in seeds:
        try:
            p = refine_eigenpair(cavity, m, a0, k0, tol=opts.newton_tol, label=label)
        except NonConvergence:
            continue
        if p.k <= k_max and p.label not in found:
            found[p.label] = p
    pairs = sorted(found.values(), key=lambda p: p.k)
    for p, q in zip(pairs, pairs[1:]):
        if abs(p.k - q.k) <= 1e-8 * q.k and abs(p.a - q.a) <= 1e-8 * max(1.0, abs(q.a)):
            raise NonConvergence(f"duplicate eigenpairs {p.label} and {q.label}")
    return pairs


def find_spectrum(cavity, k_max, m_values, options=None, include_negative=False):
    """Eigenpairs for several m, merged and sorted by (k, m, l, n)."""
    out = []
    for m in m_values:
        if m < 0 and abs(m) in m_values:
            continue
        pairs = find_eigenpairs(cavity, abs(m), k_max, options)
        out.extend(pairs)
        if include_negative and m != 0:
            out.extend(p.with_m(-abs(m)) for p in pairs)
    out.sort(key=lambda p: (p.k, abs(p.m), p.m, p.l, p.n))
    return out


@dataclass(frozen=True)
class Crossing:
    first: tuple
    second: tuple
    ratio: float
    energy: float


@dataclass
class DeformationScan:
    tau0: float
    ratios: np.ndarray
    rows: list = field(default_factory=list)  # (ratio, l, n, m, k²)
    crossings: list = field(default_factory=list)

    def energy(self, label):
        """E(ratio) for one labeled state; NaN where it was not found."""
        table = {(r, (l, n, m)): e for r, l, n, m, e in self.rows}
        return np.array([table.get((r, tuple(label)), np.nan) for r in self.ratios])


def _track(cavity, pair):
    return refine_eigenpair(cavity, pair.m, pair.alpha_classical, pair.k, label=(pair.l, pair.n))


def spectrum_vs_deformation(tau0_fixed, ratio_range, n_samples, m_max, states_per_m, k_max=None, options=None):
    """Lowest ``states_per_m`` levels per m = 0..m_max as σ₀/τ₀ varies.

    Crossings are detected from sign changes of E_A − E_B between samples and
    located by secant iteration on the ratio, re-solving both states at each
    trial shape by continuation.
    """
    opts = options or ScanOptions(n_k=120, n_alpha=160, verify=False)
    ratios = np.linspace(ratio_range[0], ratio_range[1], n_samples)
    scan = DeformationScan(float(tau0_fixed), ratios)
    states = {}
    for r in ratios:
        cav = Cavity(r * tau0_fixed, tau0_fixed)
        km = k_max if k_max is not None else _default_kmax(cav, states_per_m, m_max)
        for m in range(m_max + 1):
            pairs = find_eigenpairs(cav, m, km, opts)[:states_per_m]
            for p in pairs:
                scan.rows.append((float(r), p.l, p.n, p.m, p.energy))
                states.setdefault(p.label, {})[float(r)] = p
    scan.rows.sort()
    labels = sorted(states)
    for i, A in enumerate(labels):
        for B in labels[i + 1 :]:
            for r0, r1 in zip(ratios, ratios[1:]):
                pa0, pb0 = states[A].get(float(r0)), states[B].get(float(r0))
                pa1, pb1 = states[A].get(float(r1)), states[B].get(float(r1))
                if None in (pa0, pb0, pa1, pb1):
                    continue
                d0, d1 = pa0.energy - pb0.energy, pa1.energy - pb1.energy
                if np.sign(d0) == np.sign(d1) or d0 == 0:
                    continue
                rc, ec = _secant_crossing(tau0_fixed, (r0, pa0, pb0, d0), (r1, pa1, pb1, d1))
                scan.crossings.append(Crossing(A, B, rc, ec))
    scan.crossings.sort(key=lambda c: (c.ratio, c.first, c.second))
    return scan


def _default_kmax(cavity, states_per_m, m_max):
    # Weyl-type estimate with generous headroom; only bounds the scan
    vol = np.pi / 4 * cavity.sigma0**2 * cavity.tau0**2 * (cavity.sigma0**2 + cavity.tau0**2)
    n = states_per_m * (m_max + 1) * 4
    return float((6 * np.pi**2 * n / vol) ** (1 / 3)) + 2.0


def _secant_crossing(tau0, left, right, max_iter=40):
    r0, pa0, pb0, d0 = left
    r1, pa1, pb1, d1 = right
    for _ in range(max_iter):
        rc = r1 - d1 * (r1 - r0) / (d1 - d0)
        if not (min(r0, r1) < rc < max(r0, r1)):
            rc = 0.5 * (r0 + r1)
        cav = Cavity(rc * tau0, tau0)
        # continuation from the nearer bracket end
        near_a, near_b = (pa0, pb0) if abs(rc - r0) < abs(rc - r1) else (pa1, pb1)
        pa, pb = _track(cav, near_a), _track(cav, near_b)
        dc = pa.energy - pb.energy
        if abs(dc) < 1e-12 or abs(r1 - r0) < 1e-12:
            return float(rc), pa.energy
        # regula falsi: keep the sign change bracketed
        if np.sign(dc) == np.sign(d0):
            r0, pa0, pb0, d0 = rc, pa, pb, dc
        else:
            r1, pa1, pb1, d1 = rc, pa, pb, dc
    return float(rc), pa.energy
