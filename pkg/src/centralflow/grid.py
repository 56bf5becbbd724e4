"""Structured rectangular grid geometry and cell/face indexed fields.

Layout contract
---------------
Cell ``(j, k)`` (0-based, ``j`` along x, ``k`` along y) spans
``[j*dx, (j+1)*dx] x [k*dy, (k+1)*dy]`` with center ``((j+1/2)*dx, (k+1/2)*dy)``;
the origin ``(x=0, y=0)`` is the bottom-left corner.  Cell values are stored in
C-order arrays of shape ``(ny, nx)``, i.e. element ``[k, j]``; the flattened
order is row-major with ``k`` outer and ``j`` inner.

Face values live on the two face sets: x-faces (normal along x) form an
``(ny, nx+1)`` array whose column ``j`` is the face at ``x = j*dx``; y-faces
form ``(ny+1, nx)`` with row ``k`` at ``y = k*dy``.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class StructuredGrid:
    """Uniform rectangular grid with nx*ny cells over an lx-by-ly domain."""

    nx: int
    ny: int
    lx: float
    ly: float

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.nx}x{self.ny}")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError(f"domain lengths must be positive, got {self.lx}x{self.ly}")

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def shape(self) -> tuple:
        """Array shape (ny, nx) of cell-value storage."""
        return (self.ny, self.nx)

    def cell_centers(self):
        """Return 1D center coordinate arrays (x of length nx, y of length ny)."""
        x = (np.arange(self.nx) + 0.5) * self.dx
        y = (np.arange(self.ny) + 0.5) * self.dy
        return x, y

    def staggered_neighbors(self, j: int, k: int):
        """The four cells overlapping the staggered cell centered on vertex (j+1, k+1).

        The staggered cell spans the quadrants of cells (j,k), (j+1,k),
        (j,k+1), (j+1,k+1), returned in that order.
        """
        if not (0 <= j <= self.nx - 2) or not (0 <= k <= self.ny - 2):
            raise IndexError(
                f"staggered cell ({j},{k}) out of range for {self.nx}x{self.ny} grid"
            )
        return (j, k), (j + 1, k), (j, k + 1), (j + 1, k + 1)


@dataclass
class ScalarField:
    """One value per cell, stored as an (ny, nx) float array (element [k, j])."""

    grid: StructuredGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.size != self.grid.n_cells:
            raise ValueError(
                f"field size {self.values.size} != cell count {self.grid.n_cells}"
            )
        self.values = np.ascontiguousarray(self.values.reshape(self.grid.shape))
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    @classmethod
    def constant(cls, grid: StructuredGrid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_flat(cls, grid: StructuredGrid, flat: np.ndarray) -> "ScalarField":
        """Build from the documented flat order (k outer, j inner)."""
        return cls(grid, np.asarray(flat, dtype=np.float64).reshape(grid.shape))

    def flat(self) -> np.ndarray:
        """Values in the documented flat order (k outer, j inner)."""
        return self.values.ravel()

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def total(self) -> float:
        """Domain integral: sum of values times cell area."""
        return float(self.values.sum()) * self.grid.cell_area


@dataclass
class FaceVelocityField:
    """Normal velocities on cell faces: vx is (ny, nx+1), vy is (ny+1, nx)."""

    grid: StructuredGrid
    vx: np.ndarray = field(default=None)
    vy: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.vx is None:
            self.vx = np.zeros((self.grid.ny, self.grid.nx + 1))
        if self.vy is None:
            self.vy = np.zeros((self.grid.ny + 1, self.grid.nx))
        self.vx = np.asarray(self.vx, dtype=np.float64)
        self.vy = np.asarray(self.vy, dtype=np.float64)
        if self.vx.shape != (self.grid.ny, self.grid.nx + 1):
            raise ValueError(f"vx shape {self.vx.shape} != {(self.grid.ny, self.grid.nx + 1)}")
        if self.vy.shape != (self.grid.ny + 1, self.grid.nx):
            raise ValueError(f"vy shape {self.vy.shape} != {(self.grid.ny + 1, self.grid.nx)}")

    def max_speed(self) -> float:
        return max(float(np.abs(self.vx).max()), float(np.abs(self.vy).max()))

    def cell_centered(self):
        """Per-cell velocity components, averaging the two bounding faces."""
        vxc = 0.5 * (self.vx[:, :-1] + self.vx[:, 1:])
        vyc = 0.5 * (self.vy[:-1, :] + self.vy[1:, :])
        return vxc, vyc

    def divergence(self) -> np.ndarray:
        """Net outgoing volumetric flux per cell (velocity times face length)."""
        g = self.grid
        return (self.vx[:, 1:] - self.vx[:, :-1]) * g.dy + (
            self.vy[1:, :] - self.vy[:-1, :]
        ) * g.dx


def restrict_field(fine: ScalarField, factor: int) -> ScalarField:
    """Coarsen by block-averaging factor*factor fine cells into one coarse cell.

    Preserves the domain integral exactly (up to roundoff).
    """
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    g = fine.grid
    if g.nx % factor or g.ny % factor:
        raise ValueError(
            f"grid {g.nx}x{g.ny} not divisible by restriction factor {factor}"
        )
    coarse_grid = StructuredGrid(g.nx // factor, g.ny // factor, g.lx, g.ly)
    blocks = fine.values.reshape(coarse_grid.ny, factor, coarse_grid.nx, factor)
    return ScalarField(coarse_grid, blocks.mean(axis=(1, 3)))


def prolong_field(coarse: ScalarField, factor: int) -> ScalarField:
    """Refine by piecewise-constant block replication (inverse layout of restrict)."""
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    g = coarse.grid
    fine_grid = StructuredGrid(g.nx * factor, g.ny * factor, g.lx, g.ly)
    values = np.repeat(np.repeat(coarse.values, factor, axis=0), factor, axis=1)
    return ScalarField(fine_grid, values)
