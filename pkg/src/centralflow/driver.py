"""Sequential pressure/transport time loop and the flooding scenarios.

The pressure/velocity pair is recomputed every ``dt_pressure_days`` with the
mobility frozen at the current saturation; transport then advances through
CFL-limited micro-steps that tile the pressure period exactly (the last step
is shortened).  Velocities seen by transport always come from the most recent
pressure solve; a stamp on the state asserts it.

Scenarios
---------
slab
    Uniform inflow across the left edge, matching outflow across the right
    edge, no-flow top and bottom.
five-spot-diagonal
    Rate well ``+Q`` in the bottom-left corner cell, ``-Q`` in the top-right
    corner cell, all edges no-flow.
five-spot-parallel
    ``+Q/2`` in the bottom-left and top-right corners, ``-Q/2`` in the other
    two, all edges no-flow.

``Q`` comes from the injection rate in pore volumes per year; with porosity
scaled out of the equations the pore volume is the domain area, and a year is
365 days.  ``time_scale`` (days per solver time unit) rescales all times on
the way in; at the default 1.0 solver time is measured in days.

Well sources are applied as a splitting update after each transport
micro-step: an injector adds pure water (``q * dt`` per cell volume), a
producer removes total fluid of which the water fraction is ``f`` at the
cell's current saturation.

A mass ledger is maintained every micro-step: change of water volume must
equal injected minus produced to 1e-8 relative, else the run aborts.
"""

import time as _time
from dataclasses import dataclass, field, replace

import numpy as np

from .fieldgen import FieldSpec, generate_field
from .grid import FaceVelocityField, ScalarField, StructuredGrid
from .pressure import (BoundarySpec, ConfigurationError, EdgeFlow, INFLOW, OUTFLOW,
                       PressureProblem, Well, assemble, recover_velocities, solve_pcg)
from .reconstruct import DEFAULT_THETA
from .rockfluid import FluidModel
from .transport_kt import DEFAULT_KT_CFL, kt_step_with_fluxes
from .transport_nt import nt_step_with_fluxes

SLAB = "slab"
FIVE_SPOT_DIAGONAL = "five-spot-diagonal"
FIVE_SPOT_PARALLEL = "five-spot-parallel"
_GEOMETRIES = (SLAB, FIVE_SPOT_DIAGONAL, FIVE_SPOT_PARALLEL)

NT = "nt"
KT = "kt"
DEFAULT_NT_CFL = 0.45
DAYS_PER_YEAR = 365.0


class MassBalanceError(RuntimeError):
    """The water-volume ledger drifted beyond tolerance."""


@dataclass
class ScenarioConfig:
    kind: str = SLAB
    nx: int = 64
    ny: int = 16
    lx: float = 256.0
    ly: float = 64.0
    fluid: FluidModel = field(default_factory=FluidModel)
    permeability: ScalarField = None
    field_spec: FieldSpec = None
    initial_saturation: float = 0.21
    injection_pv_per_year: float = 0.2
    scheme: str = NT
    theta: float = DEFAULT_THETA
    cfl_nt: float = DEFAULT_NT_CFL
    cfl_kt: float = DEFAULT_KT_CFL
    dt_pressure_days: float = None
    end_time_days: float = 100.0
    snapshot_days: tuple = ()
    time_scale: float = 1.0
    transport_dt_factor: float = 1.0
    pcg_tol: float = 1e-10
    pcg_preconditioner: str = "jacobi"

    def __post_init__(self):
        if self.kind not in _GEOMETRIES:
            raise ConfigurationError(f"unknown scenario kind {self.kind!r}")
        if self.scheme not in (NT, KT):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if not (0.0 <= self.initial_saturation <= 1.0 - self.fluid.s_ro):
            raise ConfigurationError(
                f"initial saturation {self.initial_saturation} outside "
                f"[0, {1.0 - self.fluid.s_ro}]"
            )
        if self.end_time_days < 0:
            raise ConfigurationError("end time must be nonnegative")
        if self.injection_pv_per_year <= 0:
            raise ConfigurationError("injection rate must be positive")
        if self.dt_pressure_days is not None and self.dt_pressure_days <= 0:
            raise ConfigurationError("pressure step must be positive")
        if self.time_scale <= 0:
            raise ConfigurationError("time_scale must be positive")
        if self.transport_dt_factor <= 0 or self.transport_dt_factor > 1:
            raise ConfigurationError("transport_dt_factor must be in (0, 1]")

    @property
    def grid(self) -> StructuredGrid:
        return StructuredGrid(self.nx, self.ny, self.lx, self.ly)

    @property
    def cfl(self) -> float:
        return self.cfl_nt if self.scheme == NT else self.cfl_kt

    def to_solver_time(self, days: float) -> float:
        return days / self.time_scale

    @property
    def injection_rate(self) -> float:
        """Total injected volume per solver time unit."""
        pore_volume = self.lx * self.ly
        return self.injection_pv_per_year * pore_volume * self.time_scale / DAYS_PER_YEAR

    @property
    def pressure_period(self) -> float:
        """Pressure step in solver time units (default: a quarter of the run)."""
        if self.dt_pressure_days is not None:
            return self.to_solver_time(self.dt_pressure_days)
        if self.end_time_days == 0.0:
            return 1.0
        return self.to_solver_time(self.end_time_days) / 4.0

    def resolve_permeability(self) -> ScalarField:
        if self.permeability is not None:
            if self.permeability.grid.shape != self.grid.shape:
                raise ConfigurationError(
                    f"permeability grid {self.permeability.grid.shape} does not match "
                    f"scenario grid {self.grid.shape}"
                )
            return self.permeability
        if self.field_spec is not None:
            spec = self.field_spec
            if (spec.nx, spec.ny) != (self.nx, self.ny):
                spec = replace(spec, nx=self.nx, ny=self.ny, lx=self.lx, ly=self.ly)
            return generate_field(spec)
        return ScalarField.constant(self.grid, 100.0)


@dataclass
class SimulationState:
    time: float  # solver time units
    saturation: ScalarField
    velocities: FaceVelocityField = None
    pressure: np.ndarray = None
    pressure_solves: int = 0
    transport_steps: int = 0
    velocity_stamp: int = -1
    injected: float = 0.0
    produced: float = 0.0
    initial_water: float = 0.0

    def water_volume(self) -> float:
        return self.saturation.total()

    def check_mass_ledger(self, rel_tol: float = 1e-8):
        balance = self.water_volume() - self.initial_water - (self.injected - self.produced)
        scale = max(self.water_volume(), self.initial_water, 1e-300)
        if abs(balance) > rel_tol * scale:
            raise MassBalanceError(
                f"mass ledger off by {balance:.3e} (relative {abs(balance) / scale:.3e}) "
                f"at t={self.time}, step {self.transport_steps}"
            )


@dataclass
class Snapshot:
    requested_day: float
    actual_day: float
    scheme: str
    saturation: ScalarField


@dataclass
class RunReport:
    wall_seconds: float = 0.0
    pressure_solves: int = 0
    transport_steps: int = 0
    s_min: float = float("inf")
    s_max: float = float("-inf")
    history: list = field(default_factory=list)  # (day, s_min, s_max) per period
    injected: float = 0.0
    produced: float = 0.0


@dataclass
class RunResult:
    config: ScenarioConfig
    snapshots: list
    final_state: SimulationState
    report: RunReport


def build_scenario(config: ScenarioConfig):
    """Materialize the pressure problem and the initial simulation state."""
    grid = config.grid
    perm = config.resolve_permeability()
    q = config.injection_rate
    s_inj = 1.0 - config.fluid.s_ro

    if config.kind == SLAB:
        boundary = BoundarySpec(
            left=EdgeFlow(INFLOW, q), right=EdgeFlow(OUTFLOW, q),
            inflow_saturation=s_inj,
        )
        wells = ()
    elif config.kind == FIVE_SPOT_DIAGONAL:
        boundary = BoundarySpec(inflow_saturation=s_inj)
        wells = (Well(0, 0, q), Well(grid.nx - 1, grid.ny - 1, -q))
    else:
        boundary = BoundarySpec(inflow_saturation=s_inj)
        wells = (
            Well(0, 0, q / 2), Well(grid.nx - 1, grid.ny - 1, q / 2),
            Well(grid.nx - 1, 0, -q / 2), Well(0, grid.ny - 1, -q / 2),
        )

    saturation = ScalarField.constant(grid, config.initial_saturation)
    problem = PressureProblem(grid, perm, saturation, config.fluid, boundary, wells)
    state = SimulationState(time=0.0, saturation=saturation)
    state.initial_water = state.water_volume()
    return problem, state


def cfl_dt(sat: ScalarField, vel: FaceVelocityField, fluid, scheme: str,
           cfl: float, dt_cap: float, inflow_saturation: float = None) -> float:
    """Stable transport step: cfl / (a_x/dx + a_y/dy) with global speed bounds."""
    g = sat.grid
    lo = float(sat.values.min())
    hi = float(sat.values.max())
    if inflow_saturation is not None:
        lo = min(lo, inflow_saturation)
        hi = max(hi, inflow_saturation)
    fp_max = float(fluid.max_abs_flux_derivative(lo, hi))
    a_x = float(np.abs(vel.vx).max()) * fp_max
    a_y = float(np.abs(vel.vy).max()) * fp_max
    denom = a_x / g.dx + a_y / g.dy
    if denom <= 0.0:
        return dt_cap
    return min(cfl / denom, dt_cap)


def _apply_wells(state: SimulationState, wells, fluid, dt: float, cell_area: float):
    s = state.saturation.values
    for w in wells:
        if w.rate > 0:
            added = w.rate * dt
            s[w.k, w.j] += added / cell_area
            state.injected += added
        elif w.rate < 0:
            removed = -w.rate * dt * float(fluid.fractional_flow(s[w.k, w.j]))
            s[w.k, w.j] -= removed / cell_area
            state.produced += removed


def advance_pressure_period(state: SimulationState, problem: PressureProblem,
                            config: ScenarioConfig, period: float = None,
                            on_step=None) -> SimulationState:
    """One pressure solve followed by transport micro-steps tiling the period."""
    if period is None:
        period = config.pressure_period
    problem.saturation = state.saturation
    system = assemble(problem)
    pressure = solve_pcg(system, tol=config.pcg_tol,
                         preconditioner=config.pcg_preconditioner)
    state.pressure = pressure
    state.velocities = recover_velocities(problem, pressure, system)
    state.pressure_solves += 1
    state.velocity_stamp = state.pressure_solves

    t_end = state.time + period
    boundary = problem.boundary
    fluid = config.fluid
    cell_area = config.grid.cell_area
    step = nt_step_with_fluxes if config.scheme == NT else kt_step_with_fluxes
    while state.time < t_end - 1e-12 * max(t_end, 1.0):
        assert state.velocity_stamp == state.pressure_solves
        dt = cfl_dt(state.saturation, state.velocities, fluid, config.scheme,
                    config.cfl, t_end - state.time,
                    inflow_saturation=boundary.inflow_saturation)
        dt = min(dt * config.transport_dt_factor, t_end - state.time)
        new_sat, edges = step(state.saturation, state.velocities, fluid, dt,
                              theta=config.theta, boundary=boundary)
        state.saturation = new_sat
        state.injected += edges.inward
        state.produced += edges.outward
        _apply_wells(state, problem.wells, fluid, dt, cell_area)
        state.time += dt
        state.transport_steps += 1
        state.check_mass_ledger()
        if on_step is not None:
            on_step(state)
    return state


def run(config: ScenarioConfig) -> RunResult:
    """Execute a scenario, capturing snapshots at the requested days.

    Snapshots are taken at the first micro-step boundary at or past each
    requested time (no temporal interpolation); the actual time is recorded.
    """
    started = _time.perf_counter()
    problem, state = build_scenario(config)
    report = RunReport()
    snapshots = []
    pending = sorted(set(float(d) for d in config.snapshot_days))
    t_end = config.to_solver_time(config.end_time_days)

    def day_of(t_solver):
        return t_solver * config.time_scale

    def capture_due(st):
        while pending and config.to_solver_time(pending[0]) <= st.time + 1e-12:
            snapshots.append(Snapshot(pending.pop(0), day_of(st.time),
                                      config.scheme, st.saturation.copy()))

    def on_step(st):
        report.s_min = min(report.s_min, float(st.saturation.values.min()))
        report.s_max = max(report.s_max, float(st.saturation.values.max()))
        capture_due(st)

    report.s_min = float(state.saturation.values.min())
    report.s_max = float(state.saturation.values.max())
    capture_due(state)
    while state.time < t_end - 1e-12 * max(t_end, 1.0):
        period = min(config.pressure_period, t_end - state.time)
        advance_pressure_period(state, problem, config, period, on_step=on_step)
        report.history.append((day_of(state.time), report.s_min, report.s_max))

    if not snapshots and not pending:
        snapshots.append(Snapshot(config.end_time_days, day_of(state.time),
                                  config.scheme, state.saturation.copy()))
    # anything still pending was requested past the end: capture the final state
    for day in pending:
        snapshots.append(Snapshot(day, day_of(state.time), config.scheme,
                                  state.saturation.copy()))

    report.wall_seconds = _time.perf_counter() - started
    report.pressure_solves = state.pressure_solves
    report.transport_steps = state.transport_steps
    report.injected = state.injected
    report.produced = state.produced
    return RunResult(config, snapshots, state, report)
