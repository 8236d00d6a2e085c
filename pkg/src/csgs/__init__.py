"""Radial ground states of the coupled Chern-Simons-Schrodinger system."""

from .errors import GridError, ParameterError, ProjectionError, RegimeError
from .functionals import (B_functional, EnergyBreakdown, GaugeProfile, coupling_F, energy,
                          extremal_profile, gauge_profile, gradient, interpolation_gap, pairing,
                          pohozaev_residual)
from .grid import (RadialFunction, RadialGrid, StatePair, apply_radial_laplacian, gradient_energy,
                   h1_norm_sq, integrate)
from .manifolds import (J_value, PathDiagnostics, ProblemParams, default_alpha, mb_project,
                        nehari_project, nehari_value, scaling_path)
from .seeds import InitialGuess
from .single_eq import (ScalarGroundState, ThresholdSet, b_tilde, nonexistence_certificate,
                        solve_scalar, thresholds)
from .solver import SolveReport, flow_to_zero_check, level_vs_b_sweep, solve_coupled

__version__ = "1.0.0"
