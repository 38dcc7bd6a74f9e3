"""Numerical laboratory for the degenerate diffusion equation with gradient
absorption du/dt - div(|grad u|^(p-2) grad u) + |grad u|^q = 0 (p > 2,
1 < q < p-1): localized decay, conical limit profiles, waiting times.
"""

from .params import Params, DerivedConstants, Regime, Classification, derive, classify
from .grid import Grid, Field, PositivitySet, Norms, norms, positivity_set, initial_bump
from .operators import StencilOutput, apply_stencil, p_laplacian, godunov_hamiltonian
from .stepper import (StepControl, Trajectory, run, step_original, step_rescaled,
                      time_map, time_map_inverse, rescale_field, unrescale_field)
from .profile import (LimitProfile, build_vinf, distance_transform, self_similar,
                      stationary_profile, eikonal_residual, vinf_coefficient)
from .barriers import Barrier, max_amplitude, check_comparison
from .config import RunConfig
from .errors import (GradAbsorbError, ValidationError, NumericalAbort,
                     ProfileError, BarrierPreconditionError)

__version__ = "0.1.0"
