"""bondsim: bonded consensus models (Kuramoto / Cucker-Smale) on the desk scale.

Deterministic RK4 simulation of two second-order consensus models with
pairwise bonding feedback, energy diagnostics, sufficient-condition
validators for collision-free ordering, and an exact piecewise solver for
the two-particle 1D system.
"""

from .core import (BondsimError, CSState, KuramotoState, ModelParams,
                   Scenario, TargetMatrix, target_from_phases,
                   target_from_points, validate_scenario)
from .cucker_smale import (ALGEBRAIC, CONSTANT_ONE, CommWeight, csbf_rhs,
                           pair_deviation, psi_eval)
from .diagnostics import DecayFit, diameters, fit_decay, target_error
from .energy import (EnergyReport, cs_energy, energy_balance_residual,
                     km_energy)
from .filippov2 import (F2Params, FilippovResult, RegimeClass, classify,
                        decay_envelope, next_event, segment_solution,
                        solve_filippov)
from .framework import (BoundsReport, FrameworkVerdict, cs_bounds, cs_check,
                        km_bounds, km_check)
from .integrator import Trajectory, min_gap, rk4_step, simulate
from .kuramoto import (Km1Params, circle_log, constrained_initial_frequencies,
                       km1_rhs, kmbf_rhs)
from .scenario_io import (builtin, emit_scenario, parse_scenario, read_series,
                          series_to_string, write_series)

__version__ = "0.1.0"
