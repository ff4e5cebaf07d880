import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paracavity.geometry import Cavity, ParabolicPoint, to_cartesian
from paracavity.modes import (
    convergents,
    correspond,
    eigenmode_eval,
    gram_matrix,
    inner_product,
    normalize,
    penetration_ratio,
    quantum_constants,
)
from paracavity.spectrum import find_eigenpairs


@pytest.fixture(scope="module")
def modes(cav32):
    pairs = find_eigenpairs(cav32, 0, 1.9)
    return [normalize(p, cav32) for p in pairs]


def test_normalized_gram(modes):
    G = gram_matrix(modes)
    assert np.allclose(np.diag(G), 1.0, atol=1e-9)
    off = G - np.diag(np.diag(G))
    assert np.max(np.abs(off)) < 1e-8


def test_different_m_orthogonal_exactly(cav32):
    a = normalize(find_eigenpairs(cav32, 0, 1.0)[0], cav32)
    b = normalize(find_eigenpairs(cav32, 1, 1.1)[0], cav32)
    assert inner_product(a, b) == 0


def test_mode_vanishes_on_walls_and_outside(modes, cav32):
    m = modes[0]
    for tau in (0.3, 1.1, 1.9):
        assert abs(eigenmode_eval(m, ParabolicPoint(3.0, tau, 0.0))) < 1e-8
    assert eigenmode_eval(m, ParabolicPoint(3.5, 1.0, 0.0)) == 0
    p = ParabolicPoint(1.2, 0.7, 0.4)
    assert eigenmode_eval(m, to_cartesian(p)) == pytest.approx(eigenmode_eval(m, p), rel=1e-12)


def test_ground_state_density_peaks_in_allowed_shell(modes, cav32):
    from paracavity.dynamics import caustics

    m = modes[0]
    s = np.linspace(0.01, 3, 200)
    t = np.linspace(0.01, 2, 200)
    S, T = np.meshgrid(s, t, indexing="ij")
    d = np.abs(eigenmode_eval(m, ParabolicPoint(S, T, 0 * S))) ** 2
    i, j = np.unravel_index(np.argmax(d), d.shape)
    cp = caustics(m.pair.alpha, m.pair.beta)
    assert s[i] >= cp.sigma_c and t[j] >= cp.tau_c


def test_penetration_frozen(modes):
    by = {m.pair.label: m for m in modes}
    assert penetration_ratio(by[(0, 0, 0)]) == pytest.approx(0.0555, abs=5e-4)
    assert penetration_ratio(by[(1, 0, 0)]) == pytest.approx(0.0120, abs=5e-4)
    assert 0 <= penetration_ratio(by[(0, 1, 0)], convention="classical") <= 1


def test_quantum_constants(modes, cav32):
    p = modes[0].pair
    q = quantum_constants(p)
    assert q.beta_q == 0 and q.Lz_q == 0 and np.isnan(q.Pi)
    assert q.C_q == pytest.approx(2 * p.k * p.a)


def test_correspondence_of_001(cav32):
    p = find_eigenpairs(cav32, 1, 1.1)[0]
    c = correspond(p, cav32)
    assert c.winding == pytest.approx(0.8086, abs=1e-4)
    assert (c.approx.s, c.approx.t, c.approx.l) == (4, 5, 2)


@given(st.fractions(min_value="1/20", max_value=20, max_denominator=50))
def test_convergents_end_at_rational(x):
    cs = convergents(x, 1000)
    assert cs[-1] == x
    assert all(c1.denominator <= c2.denominator for c1, c2 in zip(cs, cs[1:]))


@given(st.floats(0.01, 10))
def test_convergents_approach(x):
    cs = convergents(x, 500)
    errs = [abs(float(c) - x) for c in cs]
    assert all(e <= 1.0 / c.denominator**2 + 1e-12 for e, c in zip(errs, cs))
