"""Two-phase incompressible flow in heterogeneous porous media.

A locally conservative cell-centered pressure/velocity solver coupled
sequentially to two high-resolution central transport schemes: a staggered
second-order scheme re-averaged onto the base grid, and a semi-discrete
scheme integrated with SSP Runge-Kutta.
"""

from .analysis import (ComparisonReport, ShapeError, compare_refinement_study,
                       contour_polylines, export_plot_data, l2_relative_difference)
from .config import ConfigError, config_from_pairs, config_hash, load_config
from .driver import (KT, NT, RunResult, ScenarioConfig, SimulationState, Snapshot,
                     build_scenario, advance_pressure_period, cfl_dt, run)
from .fieldgen import FieldSpec, field_statistics, generate_field
from .grid import (FaceVelocityField, ScalarField, StructuredGrid, prolong_field,
                   restrict_field)
from .pressure import (BoundarySpec, ConfigurationError, EdgeFlow, LinearSystem,
                       PressureProblem, SolverFailure, Well, assemble,
                       face_transmissibility, recover_velocities, solve_pcg,
                       solve_pressure)
from .reconstruct import SlopeField, flux_slopes, limited_slopes, minmod3, minmod_slopes
from .rockfluid import FluidModel
from .snapshots import SnapshotFile, read_snapshot, write_snapshot
from .transport_common import EdgeFluxes, TimeStepError, TransportBlowUp
from .transport_kt import (InterfaceStates, interface_states, kt_flux_x, kt_flux_y,
                           kt_step_with_fluxes, local_speeds_x, local_speeds_y,
                           semi_discrete_rhs, ssp_rk3_step)
from .transport_nt import (nt_step, nt_step_with_fluxes, predictor_midvalues,
                           reaverage_to_grid, staggered_average_now, staggered_corrector)

__version__ = "0.1.0"
