"""Classical and quantum particle in a confocal paraboloidal cavity."""

__version__ = "0.1.0"

from .actions import (
    action_phi,
    action_sigma_closed,
    action_sigma_quadrature,
    action_tau,
    actions,
    closure_residual,
    dJ_dalpha,
    dJ_dbeta,
    theta_sigma,
    theta_tau,
    winding_number,
)
from .dynamics import (
    MotionConstants,
    PhaseState,
    Trajectory,
    Triangle,
    canonical_momenta,
    caustics,
    constants_from_state,
    planar_constant,
    poincare_field,
    simulate,
    starting_state,
)
from .geometry import Cavity, ParabolicPoint, WallId, to_cartesian, to_parabolic, wall_intersection
from .modes import correspond, eigenmode_eval, gram_matrix, inner_product, normalize, penetration_ratio
from .orbits import OrbitSpec, build_orbit, solve_orbit, solve_orbit_all
from .specfun import kummer_m, whittaker_m
from .spectrum import EigenPair, ScanOptions, find_eigenpairs, find_spectrum, spectrum_vs_deformation
