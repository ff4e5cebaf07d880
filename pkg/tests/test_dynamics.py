import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paracavity.dynamics import (
    MotionConstants,
    PhaseState,
    Triangle,
    canonical_momenta,
    caustics,
    constant_C_parabolic,
    constants_from_state,
    parabolic_momenta,
    planar_constant,
    poincare_field,
    simulate,
    starting_state,
)
from paracavity.errors import DomainViolation, ForbiddenRegion, NotPlanar, ZeroMomentum
from paracavity.geometry import ParabolicPoint, to_parabolic

unit = st.floats(0.02, 0.98)


def test_constants_trivial_states():
    c = constants_from_state(PhaseState([0, 0, 1], [0, 0, -1]))
    assert (c.P, c.alpha, c.beta) == (1.0, 0.0, 0.0)
    c = constants_from_state(PhaseState([1, 0, 0], [0, 1, 0]))
    assert (c.P, c.alpha, c.beta) == (1.0, 0.0, 1.0)
    with pytest.raises(ZeroMomentum):
        constants_from_state(PhaseState([1, 0, 0], [0, 0, 0]))


def test_motion_constants_validation():
    with pytest.raises(ValueError):
        MotionConstants(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        MotionConstants(1.0, 0.0, -1.0)


def test_caustic_examples():
    assert caustics(0, 1) == (1.0, 1.0, 2.0)
    s, t, d = caustics(2, 0)
    assert (s, d) == (0.0, 2.0) and t == pytest.approx(np.sqrt(2))
    s, t, d = caustics(-3, 0)
    assert s == pytest.approx(np.sqrt(3)) and t == 0.0


@given(st.floats(-10, 10), st.floats(0, 20))
def test_caustic_identities(a, b):
    s, t, d = caustics(a, b)
    assert s * s + t * t == pytest.approx(d, rel=1e-12, abs=1e-12)
    assert t * t - s * s == pytest.approx(a, rel=1e-10, abs=1e-12)


def test_canonical_momenta_trivial():
    assert canonical_momenta(ParabolicPoint(1, 1), MotionConstants(1, 0, 0)) == (1.0, 1.0, 0.0)
    s, t, _ = caustics(-1.0, 2.0)
    ps, _, _ = canonical_momenta(ParabolicPoint(s, 1.9), MotionConstants(1.0, -1.0, 2.0))
    assert abs(ps) < 1e-6
    with pytest.raises(ForbiddenRegion):
        canonical_momenta(ParabolicPoint(0.5, 1.9), MotionConstants(1.0, -1.0, 2.0))


@given(unit, unit, unit, unit, st.floats(0.1, 3.0))
def test_momenta_reconstruct_state(u, v, fs, ft, P):
    tri = Triangle(3.0, 2.0)
    a, b = tri.interior_point(u, v, margin=1e-3)
    cp = caustics(a, b)
    sig = cp.sigma_c + fs * (3.0 - cp.sigma_c)
    tau = cp.tau_c + ft * (2.0 - cp.tau_c)
    pt = ParabolicPoint(sig, tau, 0.3)
    mc = MotionConstants(P, a, b)
    ps, pq, pp = canonical_momenta(pt, mc, (1, -1, 1))
    lhs = (ps**2 + pq**2) / (sig**2 + tau**2) + pp**2 / (sig * tau) ** 2
    assert lhs == pytest.approx(P * P, rel=1e-12)
    from paracavity.dynamics import state_from_parabolic

    st_ = state_from_parabolic(pt, ps, pq, pp)
    back = constants_from_state(st_)
    assert back.P == pytest.approx(P, rel=1e-12)
    assert back.alpha == pytest.approx(a, abs=1e-10 * 13)
    assert back.beta == pytest.approx(b, abs=1e-10 * 36)
    C = constant_C_parabolic(pt, *parabolic_momenta(st_), P)
    assert C / P**2 == pytest.approx(back.alpha, rel=1e-10, abs=1e-10)


def test_triangle():
    tri = Triangle(3.0, 2.0)
    assert tri.vertices == ((-9.0, 0.0), (4.0, 0.0), (-5.0, 36.0))
    assert tri.contains(-5.0, 36.0) and not tri.contains(-5.0, 36.1)
    assert tri.beta_max(0.0) == 16.0


def test_axial_orbit_two_cycle(cav32):
    traj = simulate(cav32, starting_state(cav32, MotionConstants(1.0, 0.0, 0.0)), 4)
    assert [w.value for w in traj.walls] == ["tau", "sigma", "tau", "sigma"]
    assert traj.length == pytest.approx(26.0, rel=1e-14)


def test_simulation_reproducible(cav32):
    mc = MotionConstants(1.3, -2.0, 3.0)
    t1 = simulate(cav32, starting_state(cav32, mc), 300)
    t2 = simulate(cav32, starting_state(cav32, mc), 300)
    assert np.array_equal(t1.points, t2.points)


@given(unit, unit)
def test_short_runs_conserve_and_respect_caustics(u, v):
    from paracavity.geometry import Cavity

    cav = Cavity(3.0, 2.0)
    a, b = Triangle(3.0, 2.0).interior_point(u, v, margin=1e-2)
    traj = simulate(cav, starting_state(cav, MotionConstants(1.0, a, b)), 200)
    assert max(traj.drift().values()) < 1e-11
    cp = caustics(a, b)
    assert min(traj.seg_min_sigma) > cp.sigma_c - 1e-9
    assert min(traj.seg_min_tau) > cp.tau_c - 1e-9
    assert all(np.isclose(np.linalg.norm(r.p_out), 1.0, rtol=1e-12) for r in traj.bounces)


def test_poincare_parity_and_planar_formula():
    q = np.linspace(0.1, 3, 30)
    p = np.linspace(-4, 4, 41)
    g = poincare_field("sigma", "alpha", q, p, beta=0.2)
    assert np.array_equal(g, poincare_field("sigma", "alpha", q, -p, beta=0.2))
    g0 = poincare_field("sigma", "alpha", q, p, beta=0.0)
    assert np.allclose(g0, p[None, :] ** 2 - q[:, None] ** 2, atol=1e-14)
    with pytest.raises(DomainViolation):
        poincare_field("sigma", "alpha", [0.0, 1.0], p, beta=0.1)


def test_poincare_beta_is_inverse_of_alpha():
    q = np.linspace(0.3, 3, 10)
    p = np.linspace(-2, 2, 9)
    b = poincare_field("sigma", "beta", q, p, alpha=-1.0)
    # feeding β back in reproduces α pointwise
    for i, qi in enumerate(q):
        for j, pj in enumerate(p):
            a = poincare_field("sigma", "alpha", [qi], [pj], beta=max(b[i, j], 0.0))[0, 0]
            if b[i, j] >= 0:
                assert a == pytest.approx(-1.0, abs=1e-12)


def test_planar_constant_requires_meridional_state():
    with pytest.raises(NotPlanar):
        planar_constant(PhaseState([1, 0, 0], [0, 1, 0]))
    pc = planar_constant(PhaseState([1, 0, 0.5], [0.6, 0, 0.8]))
    pt = to_parabolic([1, 0, 0.5])
    assert np.isfinite(pc) and pt.sigma > 0
