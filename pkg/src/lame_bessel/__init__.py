"""Generalized Bessel functions of the p-circle lattice point problem."""

from .errors import (ConsistencyError, ConvergenceError, DomainError, LameBesselError,
                     ResourceError, TruncationError)
from .gbessel import (BesselOrder, SeriesSpec, j0, j0_direct, j0_odd, j0_oscillatory, j_omega,
                      j_omega_fast, j_omega_kernel, j_omega_series, j_ratio_at_origin)
from .lattice import (IdentityReport, LatticeCount, area_main_term, count_lattice, d_beta,
                      p_error, script_d_beta, series_rhs, verify_identity)
from .phase import (PhaseFamily, PhaseKind, StationaryPointSet, UFunction, phase_derivative,
                    phase_value, stationary_phi0, stationary_points, stationary_theta_delta,
                    verify_prop25)
from .pnorm import PExponent, PPolar, Vec2, cartesian_to_polar, gamma_fn, p_norm, polar_to_cartesian
from .quadrature import QuadratureSpec, QuadValue

__version__ = "0.1.0"
