"""Incompressible pressure equation div(v) = q, v = -lambda(s) K grad(p).

Discretization is the cell-centered five-point scheme with harmonic face
transmissibilities (the cell-centered equivalent of lowest-order mixed
elements on a rectangular grid).  All scenarios are flux-driven: edges carry
prescribed uniform in/outflow rates or are no-flow, wells are per-cell rate
sources, and pressure Dirichlet data never appears.  The resulting system is
symmetric positive semi-definite with the constants as null space; the solver
projects the right-hand side onto the compatible subspace and returns the
zero-mean pressure.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import FaceVelocityField, ScalarField, StructuredGrid
from .rockfluid import FluidModel

NOFLOW = "noflow"
INFLOW = "inflow"
OUTFLOW = "outflow"

_EDGE_KINDS = (NOFLOW, INFLOW, OUTFLOW)


class ConfigurationError(ValueError):
    """Inconsistent problem setup (incompatible sources, bad edge spec, ...)."""


class SolverFailure(RuntimeError):
    """PCG did not reach the requested tolerance."""

    def __init__(self, message, achieved_residual, iterations):
        super().__init__(message)
        self.achieved_residual = achieved_residual
        self.iterations = iterations


@dataclass(frozen=True)
class EdgeFlow:
    """Condition on one domain edge: no-flow, or a total in/outflow rate."""

    kind: str = NOFLOW
    rate: float = 0.0

    def __post_init__(self):
        if self.kind not in _EDGE_KINDS:
            raise ConfigurationError(f"unknown edge kind {self.kind!r}")
        if self.kind == NOFLOW and self.rate != 0.0:
            raise ConfigurationError("no-flow edge cannot carry a rate")
        if self.rate < 0.0:
            raise ConfigurationError("edge rates are magnitudes; use kind for direction")


@dataclass(frozen=True)
class BoundarySpec:
    """Per-edge flow conditions plus the saturation carried by inflow."""

    left: EdgeFlow = EdgeFlow()
    right: EdgeFlow = EdgeFlow()
    bottom: EdgeFlow = EdgeFlow()
    top: EdgeFlow = EdgeFlow()
    inflow_saturation: float = 0.85

    def edges(self):
        return (("left", self.left), ("right", self.right),
                ("bottom", self.bottom), ("top", self.top))

    def net_rate(self) -> float:
        """Total signed volumetric rate into the domain through the edges."""
        total = 0.0
        for _, e in self.edges():
            if e.kind == INFLOW:
                total += e.rate
            elif e.kind == OUTFLOW:
                total -= e.rate
        return total


@dataclass(frozen=True)
class Well:
    """Point rate source (positive injects) in cell (j, k)."""

    j: int
    k: int
    rate: float


@dataclass
class PressureProblem:
    grid: StructuredGrid
    permeability: ScalarField
    saturation: ScalarField
    fluid: FluidModel
    boundary: BoundarySpec = field(default_factory=BoundarySpec)
    wells: tuple = ()

    def __post_init__(self):
        if self.permeability.grid.shape != self.grid.shape:
            raise ConfigurationError("permeability grid mismatch")
        if self.saturation.grid.shape != self.grid.shape:
            raise ConfigurationError("saturation grid mismatch")
        if np.any(self.permeability.values <= 0):
            raise ConfigurationError("permeability must be positive in every cell")
        for w in self.wells:
            if not (0 <= w.j < self.grid.nx and 0 <= w.k < self.grid.ny):
                raise ConfigurationError(f"well cell ({w.j},{w.k}) outside grid")
        scale = sum(abs(e.rate) for _, e in self.boundary.edges())
        scale += sum(abs(w.rate) for w in self.wells)
        net = self.boundary.net_rate() + sum(w.rate for w in self.wells)
        if abs(net) > 1e-12 * max(scale, 1.0):
            raise ConfigurationError(
                f"incompatible sources: net rate {net} with magnitude scale {scale}"
            )

    def mobility_permeability(self) -> np.ndarray:
        """Cell values of lambda(s) * K."""
        return self.fluid.total_mobility(self.saturation.values) * self.permeability.values


@dataclass
class LinearSystem:
    """Symmetric five-point operator: face transmissibilities plus a source term.

    ``tx`` has shape (ny, nx+1) (zero on boundary columns), ``ty`` has shape
    (ny+1, nx) (zero on boundary rows).  Row j,k of the operator is
    ``sum(T of the cell's faces) * p - sum(T * p_neighbor)``.
    """

    tx: np.ndarray
    ty: np.ndarray
    rhs: np.ndarray

    @property
    def shape(self):
        return self.rhs.shape

    def matvec(self, p: np.ndarray) -> np.ndarray:
        out = (self.tx[:, :-1] + self.tx[:, 1:] + self.ty[:-1, :] + self.ty[1:, :]) * p
        out[:, 1:] -= self.tx[:, 1:-1] * p[:, :-1]
        out[:, :-1] -= self.tx[:, 1:-1] * p[:, 1:]
        out[1:, :] -= self.ty[1:-1, :] * p[:-1, :]
        out[:-1, :] -= self.ty[1:-1, :] * p[1:, :]
        return out

    def diagonal(self) -> np.ndarray:
        return self.tx[:, :-1] + self.tx[:, 1:] + self.ty[:-1, :] + self.ty[1:, :]

    def to_sparse(self):
        """CSR form (flattened k-outer j-inner ordering), for factorized preconditioning."""
        from scipy import sparse

        ny, nx = self.shape
        n = nx * ny
        diag = self.diagonal().ravel()
        west = -self.tx[:, 1:-1]
        south = -self.ty[1:-1, :]
        rows, cols, vals = [np.arange(n)], [np.arange(n)], [diag]
        idx = np.arange(n).reshape(ny, nx)
        rows.append(idx[:, 1:].ravel()); cols.append(idx[:, :-1].ravel()); vals.append(west.ravel())
        rows.append(idx[:, :-1].ravel()); cols.append(idx[:, 1:].ravel()); vals.append(west.ravel())
        rows.append(idx[1:, :].ravel()); cols.append(idx[:-1, :].ravel()); vals.append(south.ravel())
        rows.append(idx[:-1, :].ravel()); cols.append(idx[1:, :].ravel()); vals.append(south.ravel())
        return sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        )


def face_transmissibility(problem: PressureProblem, cell_a, cell_b) -> float:
    """Harmonic-average transmissibility between two adjacent cells."""
    g = problem.grid
    ja, ka = cell_a
    jb, kb = cell_b
    m = problem.mobility_permeability()
    ma, mb = m[ka, ja], m[kb, jb]
    if ma <= 0 or mb <= 0:
        raise ValueError("nonpositive mobility-permeability product")
    if abs(ja - jb) == 1 and ka == kb:
        return 2.0 * g.dy / (g.dx / ma + g.dx / mb)
    if abs(ka - kb) == 1 and ja == jb:
        return 2.0 * g.dx / (g.dy / ma + g.dy / mb)
    raise ValueError(f"cells {cell_a} and {cell_b} are not adjacent")


def _edge_face_rates(problem: PressureProblem):
    """Per-face signed volumetric rates on each edge (positive into the domain)."""
    g = problem.grid
    b = problem.boundary
    sign = {INFLOW: 1.0, OUTFLOW: -1.0, NOFLOW: 0.0}
    left = sign[b.left.kind] * b.left.rate / g.ny
    right = sign[b.right.kind] * b.right.rate / g.ny
    bottom = sign[b.bottom.kind] * b.bottom.rate / g.nx
    top = sign[b.top.kind] * b.top.rate / g.nx
    return left, right, bottom, top


def assemble(problem: PressureProblem) -> LinearSystem:
    """Build the five-point system; edge rates and wells feed the right-hand side."""
    g = problem.grid
    m = problem.mobility_permeability()
    tx = np.zeros((g.ny, g.nx + 1))
    ty = np.zeros((g.ny + 1, g.nx))
    ma, mb = m[:, :-1], m[:, 1:]
    tx[:, 1:-1] = 2.0 * g.dy / (g.dx / ma + g.dx / mb)
    ma, mb = m[:-1, :], m[1:, :]
    ty[1:-1, :] = 2.0 * g.dx / (g.dy / ma + g.dy / mb)

    rhs = np.zeros(g.shape)
    left, right, bottom, top = _edge_face_rates(problem)
    rhs[:, 0] += left
    rhs[:, -1] += right
    rhs[0, :] += bottom
    rhs[-1, :] += top
    for w in problem.wells:
        rhs[w.k, w.j] += w.rate
    return LinearSystem(tx, ty, rhs)


def _jacobi_apply(system):
    inv = 1.0 / system.diagonal()
    return lambda r: inv * r


def _ilu_apply(system):
    from scipy.sparse.linalg import spilu

    a = system.to_sparse().tocsc()
    # tiny diagonal shift keeps the factorization of the singular operator stable
    shift = 1e-12 * float(a.diagonal().max())
    ilu = spilu(a + shift * _speye(a.shape[0]))
    shape = system.shape
    return lambda r: ilu.solve(r.ravel()).reshape(shape)


def _speye(n):
    from scipy import sparse

    return sparse.identity(n, format="csc")


def solve_pcg(system: LinearSystem, tol: float = 1e-10, max_iter: int = None,
              preconditioner: str = "jacobi") -> np.ndarray:
    """Preconditioned conjugate gradients on the singular five-point system.

    The right-hand side is projected onto the complement of the constant null
    vector; convergence is measured on the preconditioned residual norm
    relative to the right-hand side, and the returned pressure has zero mean.
    Raises :class:`SolverFailure` (carrying the achieved residual) when the
    iteration budget runs out.
    """
    if preconditioner == "jacobi":
        apply_m = _jacobi_apply(system)
    elif preconditioner == "ilu":
        apply_m = _ilu_apply(system)
    else:
        raise ConfigurationError(f"unknown preconditioner {preconditioner!r}")

    b = system.rhs - system.rhs.mean()
    n = b.size
    if max_iter is None:
        max_iter = 10 * n

    x = np.zeros_like(b)
    r = b.copy()
    z = apply_m(r)
    d = z.copy()
    rz = float((r * z).sum())
    target = tol * np.sqrt(max(float((b * apply_m(b)).sum()), 0.0))
    if np.sqrt(max(rz, 0.0)) <= target:
        return x
    for _ in range(max_iter):
        ad = system.matvec(d)
        alpha = rz / float((d * ad).sum())
        x += alpha * d
        r -= alpha * ad
        r -= r.mean()  # guard against null-space drift from roundoff
        z = apply_m(r)
        rz_new = float((r * z).sum())
        if np.sqrt(max(rz_new, 0.0)) <= target:
            x -= x.mean()
            return x
        d = z + (rz_new / rz) * d
        rz = rz_new
    achieved = np.sqrt(max(rz, 0.0)) / (target / tol) if target > 0 else 0.0
    raise SolverFailure(
        f"PCG stalled after {max_iter} iterations (relative residual {achieved:.3e})",
        achieved_residual=achieved,
        iterations=max_iter,
    )


def recover_velocities(problem: PressureProblem, pressure: np.ndarray,
                       system: LinearSystem = None) -> FaceVelocityField:
    """Face velocities from the pressure gradient; boundary faces carry the
    prescribed edge rates (inflow positive into the domain, no-flow exactly zero)."""
    g = problem.grid
    if system is None:
        system = assemble(problem)
    p = np.asarray(pressure)
    vx = np.zeros((g.ny, g.nx + 1))
    vy = np.zeros((g.ny + 1, g.nx))
    vx[:, 1:-1] = system.tx[:, 1:-1] * (p[:, :-1] - p[:, 1:]) / g.dy
    vy[1:-1, :] = system.ty[1:-1, :] * (p[:-1, :] - p[1:, :]) / g.dx

    left, right, bottom, top = _edge_face_rates(problem)
    # positive component points along +x/+y: inflow on the far edges flips sign
    vx[:, 0] = left / g.dy
    vx[:, -1] = -right / g.dy
    vy[0, :] = bottom / g.dx
    vy[-1, :] = -top / g.dx
    return FaceVelocityField(g, vx, vy)


def solve_pressure(problem: PressureProblem, tol: float = 1e-10,
                   preconditioner: str = "jacobi"):
    """Assemble, solve, and recover velocities; returns (pressure, velocities)."""
    system = assemble(problem)
    p = solve_pcg(system, tol=tol, preconditioner=preconditioner)
    return p, recover_velocities(problem, p, system)
