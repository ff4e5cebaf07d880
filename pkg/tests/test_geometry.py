import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paracavity.errors import NoHit, OffSurface, RimHit
from paracavity.geometry import (
    Cavity,
    ParabolicPoint,
    WallId,
    contains,
    surface_normal,
    to_cartesian,
    to_parabolic,
    wall_intersection,
    wall_residual,
)

pos = st.floats(0.05, 5.0)
ang = st.floats(0.0, 2 * np.pi - 1e-9)


def test_cartesian_known_points():
    assert np.allclose(to_cartesian(ParabolicPoint(1.0, 1.0, 0.0)), [1.0, 0.0, 0.0])
    assert np.allclose(to_cartesian(ParabolicPoint(0.0, 2.0, 0.0)), [0.0, 0.0, 2.0])
    assert np.allclose(to_cartesian(ParabolicPoint(3.0, 0.0, 1.0)), [0.0, 0.0, -4.5])


def test_parabolic_on_axis_has_zero_phi():
    p = to_parabolic([0.0, 0.0, 1.5])
    assert p.phi == 0.0 and p.sigma == 0.0
    assert p.tau == pytest.approx(np.sqrt(3.0))


@given(pos, pos, ang)
def test_round_trip(sigma, tau, phi):
    back = to_parabolic(to_cartesian(ParabolicPoint(sigma, tau, phi)))
    assert back.sigma == pytest.approx(sigma, rel=1e-12)
    assert back.tau == pytest.approx(tau, rel=1e-12)
    assert abs(np.angle(np.exp(1j * (back.phi - phi)))) < 1e-11


def test_cavity_validation():
    with pytest.raises(ValueError):
        Cavity(0.0, 1.0)
    with pytest.raises(ValueError):
        Cavity(1.0, np.inf)
    c = Cavity(3, 2)
    assert c.rim_radius == 6.0 and c.rim_height == -2.5 and c.scale == 13.0


def test_wall_residual_vanishes_on_walls(cav32):
    for tau in (0.0, 0.7, 2.0):
        x = to_cartesian(ParabolicPoint(3.0, tau, 0.4))
        assert abs(wall_residual(x, WallId.SIGMA, cav32)) < 1e-12
    for sigma in (0.0, 1.3, 3.0):
        x = to_cartesian(ParabolicPoint(sigma, 2.0, 2.0))
        assert abs(wall_residual(x, WallId.TAU, cav32)) < 1e-12


def test_axial_ray_hits_vertices(cav32):
    up = wall_intersection([0, 0, 0], [0, 0, 1], cav32)
    down = wall_intersection([0, 0, 0], [0, 0, -1], cav32)
    assert up.wall is WallId.TAU and np.allclose(up.point, [0, 0, 2.0])
    assert down.wall is WallId.SIGMA and np.allclose(down.point, [0, 0, -4.5])


@given(st.floats(0.05, 2.95), st.floats(0.05, 1.95), ang, st.floats(-1, 1), st.floats(0, 2 * np.pi))
def test_hits_lie_on_a_wall_inside_cavity(sigma, tau, phi, cz, az):
    cav = Cavity(3.0, 2.0)
    origin = to_cartesian(ParabolicPoint(sigma, tau, phi))
    sz = np.sqrt(1 - cz * cz)
    d = np.array([sz * np.cos(az), sz * np.sin(az), cz])
    try:
        hit = wall_intersection(origin, d, cav)
    except RimHit:
        return
    assert abs(wall_residual(hit.point, hit.wall, cav)) < 1e-9 * cav.scale**2
    assert contains(cav, hit.point, rtol=1e-9)
    assert hit.path_length > 0


def test_rim_hit_raised(cav32):
    rim = np.array([cav32.rim_radius, 0.0, cav32.rim_height])
    with pytest.raises(RimHit):
        wall_intersection([0.0, 0.0, 0.0], rim, cav32)


def test_no_hit_outside_going_away(cav32):
    with pytest.raises(NoHit):
        wall_intersection([100.0, 0.0, 0.0], [1.0, 0.0, 0.0], cav32)


def test_normals_point_inward(cav32):
    n = surface_normal([0, 0, -4.5], WallId.SIGMA, cav32)
    assert np.allclose(n, [0, 0, 1])
    n = surface_normal([0, 0, 2.0], WallId.TAU, cav32)
    assert np.allclose(n, [0, 0, -1])
    with pytest.raises(OffSurface):
        surface_normal([0, 0, 0], WallId.SIGMA, cav32)
