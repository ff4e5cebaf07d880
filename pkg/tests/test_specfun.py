import cmath

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paracavity.errors import DomainExceeded, PoleInB
from paracavity.specfun import SpecFunDomain, kummer_m, kummer_m_series, whittaker_m

re = st.floats(-5, 5)
bre = st.floats(0.5, 6)
zmod = st.floats(0, 60)
zarg = st.floats(-np.pi, np.pi)


def test_frozen_values():
    assert kummer_m(0.5 + 0.3j, 1, 2j) == pytest.approx(0.17348883385358416 + 0.27019284998494286j, rel=1e-14)
    assert kummer_m(-1.5 + 2j, 2.5 - 1j, -30 + 10j) == pytest.approx(
        -19.087680128150225 + 52.398694730134274j, rel=1e-13
    )
    assert whittaker_m(0.3, 0.7 + 0.2j, 1.5 - 2j) == pytest.approx(1.8552996871815968 - 2.165803343528486j, rel=1e-13)


def test_trivial_identities():
    assert kummer_m(1, 1, 1) == pytest.approx(np.e, rel=1e-15)
    assert kummer_m(2, 3, 0) == 1
    assert kummer_m(0, 3, 17 + 4j) == 1
    assert whittaker_m(0, 0.5, 1.0) == pytest.approx(2 * np.sinh(0.5), rel=1e-15)
    assert whittaker_m(0, 0.5, 1j) == pytest.approx(2 * cmath.sinh(0.5j), rel=1e-15)
    assert whittaker_m(0.2, 0.3, 0) == 0


def test_polynomial_case():
    # a = −2 terminates: 1 − 2z/b + z²/(b(b+1))
    z, b = 3 - 1j, 1.5
    assert kummer_m(-2, b, z) == pytest.approx(1 - 2 * z / b + z * z / (b * (b + 1)), rel=1e-14)


def test_errors():
    with pytest.raises(PoleInB):
        kummer_m(1, -2, 1)
    with pytest.raises(PoleInB):
        whittaker_m(0.1, -1.0, 1)
    with pytest.raises(DomainExceeded):
        kummer_m(1, 1, 200)
    assert kummer_m(1, 1, 100, SpecFunDomain(max_abs_z=120)) == pytest.approx(np.exp(100), rel=1e-13)


@given(re, re, bre, st.floats(-3, 3), zmod, zarg)
def test_against_mpmath(ar, ai, br, bi, r, th):
    a, b, z = complex(ar, ai), complex(br, bi), cmath.rect(r, th)
    ref = complex(mpmath.hyp1f1(a, b, z, maxterms=10**6))
    assert abs(kummer_m(a, b, z) - ref) <= 1e-12 * abs(ref)


@given(re, re, bre, st.floats(-3, 3), st.floats(0, 40), zarg)
def test_kummer_transformation(ar, ai, br, bi, r, th):
    a, b, z = complex(ar, ai), complex(br, bi), cmath.rect(r, th)
    m = kummer_m(a, b, z)
    assert abs(m - cmath.exp(z) * kummer_m(b - a, b, -z)) <= 1e-11 * abs(m)


@given(re, st.floats(0.5, 5), zmod, zarg)
def test_m_a_a_is_exp(ar, ai, r, th):
    z = cmath.rect(r, th)
    assert abs(kummer_m(complex(ar, ai), complex(ar, ai), z) - cmath.exp(z)) <= 1e-11 * abs(cmath.exp(z))


def test_series_kernel_reports_magnitude():
    v, mag, n = kummer_m_series(1, 1, 2.0)
    assert v == pytest.approx(np.exp(2)) and mag == pytest.approx(np.exp(2)) and n > 10
