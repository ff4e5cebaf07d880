"""Kummer M(a, b, z) and Whittaker M_{κ,μ}(z) for complex arguments.

The kernel is the Taylor series Σ (a)_n zⁿ / ((b)_n n!) built from the term
recurrence, summed with Neumaier compensation.  For Re z < 0 the Kummer
transformation M(a, b, z) = e^z M(b − a, b, −z) is applied first.

The ratio Σ|term| / |Σ term| bounds the relative rounding error of the sum.
When it would exceed the target accuracy in double precision (large |z| off
the positive real axis), the identical series is re-summed with mpmath at a
working precision sized from that ratio.  The returned value is always a
Python complex.
"""

from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainExceeded, NonConvergence, PoleInB

__all__ = ["SpecFunDomain", "DEFAULT_DOMAIN", "kummer_m", "kummer_m_series", "whittaker_m"]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SpecFunDomain:
    """Accuracy contract: relative error ≤ 1e-12 for |z| ≤ max_abs_z."""

    max_abs_z: float = 80.0
    tol: float = 1e-15
    max_terms: int = 2000
    # target relative accuracy that decides when to leave double precision
    target: float = 1e-14


DEFAULT_DOMAIN = SpecFunDomain()


def _check(b, z, domain):
    if b.imag == 0 and b.real <= 0 and b.real == round(b.real):
        raise PoleInB(f"b = {b} is a nonpositive integer")
    if abs(z) > domain.max_abs_z:
        raise DomainExceeded(f"|z| = {abs(z):.6g} exceeds max_abs_z = {domain.max_abs_z}")
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise DomainExceeded(f"non-finite argument z = {z}")


def kummer_m_series(a, b, z, domain=DEFAULT_DOMAIN):
    """Plain double-precision series; returns (value, Σ|term|, n_terms)."""
    a, b, z = complex(a), complex(b), complex(z)
    term = 1.0 + 0.0j
    s_re, c_re, s_im, c_im = 1.0, 0.0, 0.0, 0.0
    mag = 1.0
    small = 0
    for n in range(domain.max_terms):
        term *= (a + n) * z / ((b + n) * (n + 1))
        mag += abs(term)
        # Neumaier two-sum on each component
        t = s_re + term.real
        c_re += (s_re - t) + term.real if abs(s_re) >= abs(term.real) else (term.real - t) + s_re
        s_re = t
        t = s_im + term.imag
        c_im += (s_im - t) + term.imag if abs(s_im) >= abs(term.imag) else (term.imag - t) + s_im
        s_im = t
        total = abs(complex(s_re + c_re, s_im + c_im))
        past_peak = abs((a + n + 1) * z) < abs((b + n + 1) * (n + 2))
        if abs(term) <= domain.tol * total and past_peak:
            small += 1
            if small >= 3:
                return complex(s_re + c_re, s_im + c_im), mag, n + 1
        elif term == 0:
            return complex(s_re + c_re, s_im + c_im), mag, n + 1
        else:
            small = 0
    raise NonConvergence(f"series for M({a}, {b}, {z}) did not converge in {domain.max_terms} terms")


def _series_mp(a, b, z, dps, domain):
    with mpmath.workdps(dps):
        a, b, z = mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(z)
        term = mpmath.mpc(1)
        total = mpmath.mpc(1)
        mag = mpmath.mpf(1)
        tol = mpmath.mpf(10) ** (-(dps - 2))
        small = 0
        for n in range(domain.max_terms):
            term = term * (a + n) * z / ((b + n) * (n + 1))
            total += term
            mag += abs(term)
            if abs(term) <= tol * abs(total) and abs((a + n + 1) * z) < abs((b + n + 1) * (n + 2)):
                small += 1
                if small >= 3:
                    return complex(total), float(mag / max(abs(total), mpmath.mpf(10) ** -300))
            elif term == 0:
                return complex(total), float(mag / max(abs(total), mpmath.mpf(10) ** -300))
            else:
                small = 0
    raise NonConvergence(f"extended series for M({a}, {b}, {z}) did not converge")


def _kummer_right_half(a, b, z, domain):
    value, mag, _ = kummer_m_series(a, b, z, domain)
    if value == 0 or mag * _EPS * 4 > domain.target * abs(value):
        # the double-precision sum may be pure noise, so the estimate is
        # re-derived from each extended result until the precision suffices
        cond = mag / max(abs(value), 1e-300)
        for _ in range(6):
            dps = int(20 + max(0.0, np.log10(cond)))
            value, cond = _series_mp(a, b, z, dps, domain)
            if np.log10(max(cond, 1.0)) + 18 <= dps:
                break
    return value


def kummer_m(a, b, z, domain=DEFAULT_DOMAIN):
    """Confluent hypergeometric M(a, b, z) = ₁F₁(a; b; z)."""
    a, b, z = complex(a), complex(b), complex(z)
    _check(b, z, domain)
    if z == 0:
        return 1.0 + 0.0j
    if z.real < 0:
        return complex(np.exp(z)) * _kummer_right_half(b - a, b, -z, domain)
    return _kummer_right_half(a, b, z, domain)


def whittaker_m(kappa, mu, z, domain=DEFAULT_DOMAIN):
    """M_{κ,μ}(z) = e^{−z/2} z^{μ+1/2} M(μ − κ + 1/2, 1 + 2μ, z), principal branch."""
    kappa, mu, z = complex(kappa), complex(mu), complex(z)
    b = 1.0 + 2.0 * mu
    if b.imag == 0 and b.real <= 0 and b.real == round(b.real):
        raise PoleInB(f"1 + 2μ = {b} is a nonpositive integer")
    m = kummer_m(mu - kappa + 0.5, b, z, domain)
    if z == 0:
        return 0.0j if (mu + 0.5).real > 0 else complex(np.nan, np.nan)
    return complex(np.exp(-0.5 * z) * np.power(z, mu + 0.5) * m)
