"""Field comparison metrics, refinement studies, and plot-data export.

Fields on nested grids are compared on the coarsest grid after mean
restriction.  The relative difference between two fields f, g against a
reference field r is::

    ||f - g||_2 / ||r||_2,   ||u||_2 = sqrt( sum(u^2) * dx * dy )

Plot output is plain text: ``x y value`` triplets for surfaces, and
level-line polylines (marching squares with linear interpolation on the
cell-center lattice) for contours.
"""

from dataclasses import dataclass

import numpy as np

from .grid import ScalarField, restrict_field
from .snapshots import SnapshotFile


class ShapeError(ValueError):
    """Field grids that cannot be brought onto a common lattice."""


def _l2_norm(values: np.ndarray, cell_area: float) -> float:
    return float(np.sqrt(np.sum(values**2) * cell_area))


def _restrict_to(field: ScalarField, target: ScalarField) -> ScalarField:
    """Mean-restrict ``field`` onto the grid of ``target`` (no-op if equal)."""
    gf, gt = field.grid, target.grid
    if (gf.nx, gf.ny) == (gt.nx, gt.ny):
        return field
    if gf.nx % gt.nx or gf.ny % gt.ny:
        raise ShapeError(f"grid {gf.nx}x{gf.ny} is not a refinement of {gt.nx}x{gt.ny}")
    fx, fy = gf.nx // gt.nx, gf.ny // gt.ny
    if fx != fy:
        raise ShapeError(f"anisotropic refinement {fx}x{fy} between grids")
    return restrict_field(field, fx)


def l2_relative_difference(f: ScalarField, g: ScalarField,
                           reference: ScalarField) -> float:
    """Relative difference of f and g against a reference field.

    f and g must share a grid; a finer reference is mean-restricted onto it.
    """
    if f.grid.shape != g.grid.shape:
        raise ShapeError(f"fields on different grids: {f.grid.shape} vs {g.grid.shape}")
    ref = _restrict_to(reference, f)
    ref_norm = _l2_norm(ref.values, ref.grid.cell_area)
    if ref_norm == 0.0:
        raise ValueError("reference field has zero norm")
    return _l2_norm(f.values - g.values, f.grid.cell_area) / ref_norm


@dataclass
class ComparisonReport:
    """Relative differences of one coarse-grid field against a refinement ladder."""

    labels: list
    differences: list
    reference_label: str

    def rows(self):
        return list(zip(self.labels, self.differences))


def compare_refinement_study(kt_coarse: SnapshotFile, nt_snapshots) -> ComparisonReport:
    """Differences between a coarse-grid field and each level of a refinement
    ladder, all restricted to the coarse grid; the finest level is the
    reference for the norm."""
    if not nt_snapshots:
        raise ValueError("need at least one refinement-ladder snapshot")
    base = kt_coarse.field
    ladder = sorted(nt_snapshots, key=lambda s: s.grid.nx)
    reference = _restrict_to(ladder[-1].field, base)
    labels, diffs = [], []
    for level, snap in enumerate(ladder):
        g = snap.grid
        if g.nx * base.grid.ny != g.ny * base.grid.nx:
            raise ShapeError(
                f"grid {g.nx}x{g.ny} has a different aspect than {base.grid.nx}x{base.grid.ny}"
            )
        restricted = _restrict_to(snap.field, base)
        labels.append(f"{snap.scheme}-{g.nx}x{g.ny}" if snap.scheme != "-" else f"{g.nx}x{g.ny}")
        diffs.append(l2_relative_difference(base, restricted, reference))
    return ComparisonReport(labels, diffs, labels[-1])


# ---------------------------------------------------------------------------
# contour extraction (marching squares on the cell-center lattice)

# edge keys: B bottom, R right, T top, L left of one lattice quad
_SEGMENTS = {
    1: [("L", "B")], 2: [("B", "R")], 3: [("L", "R")], 4: [("R", "T")],
    6: [("B", "T")], 7: [("L", "T")], 8: [("T", "L")], 9: [("B", "T")],
    11: [("R", "T")], 12: [("L", "R")], 13: [("B", "R")], 14: [("L", "B")],
}


def _edge_point(edge, x, y, j, k, v00, v10, v11, v01, level):
    if edge == "B":
        t = (level - v00) / (v10 - v00)
        return (x[j] + t * (x[j + 1] - x[j]), y[k])
    if edge == "T":
        t = (level - v01) / (v11 - v01)
        return (x[j] + t * (x[j + 1] - x[j]), y[k + 1])
    if edge == "L":
        t = (level - v00) / (v01 - v00)
        return (x[j], y[k] + t * (y[k + 1] - y[k]))
    t = (level - v10) / (v11 - v10)
    return (x[j + 1], y[k] + t * (y[k + 1] - y[k]))


def _chain_segments(segments, scale):
    """Join shared endpoints into polylines; leftovers become closed loops."""
    def key(p):
        return (round(p[0] / scale * 1e9), round(p[1] / scale * 1e9))

    adjacency = {}
    for seg_id, (a, b) in enumerate(segments):
        adjacency.setdefault(key(a), []).append((seg_id, a, b))
        adjacency.setdefault(key(b), []).append((seg_id, b, a))
    used = set()
    polylines = []

    def walk(start_entry):
        seg_id, a, b = start_entry
        used.add(seg_id)
        points = [a, b]
        while True:
            nxt = [e for e in adjacency.get(key(points[-1]), []) if e[0] not in used]
            if not nxt:
                return points
            seg_id, a, b = nxt[0]
            used.add(seg_id)
            points.append(b)

    # open chains first (endpoints of degree 1), then remaining loops
    for entries in adjacency.values():
        free = [e for e in entries if e[0] not in used]
        if len(entries) == 1 and free:
            polylines.append(walk(free[0]))
    for entries in adjacency.values():
        for e in entries:
            if e[0] not in used:
                polylines.append(walk(e))
    return [np.array(p) for p in polylines]


def contour_polylines(field: ScalarField, level: float):
    """Marching-squares level lines on the cell-center lattice.

    Returns a list of (n, 2) arrays of (x, y) points.  Saddle quads are
    disambiguated by the cell average of the four corners.
    """
    g = field.grid
    x, y = g.cell_centers()
    s = field.values
    segments = []
    for k in range(g.ny - 1):
        for j in range(g.nx - 1):
            v00, v10 = s[k, j], s[k, j + 1]
            v01, v11 = s[k + 1, j], s[k + 1, j + 1]
            case = ((v00 >= level) + 2 * (v10 >= level)
                    + 4 * (v11 >= level) + 8 * (v01 >= level))
            if case in (0, 15):
                continue
            if case in (5, 10):
                center_inside = 0.25 * (v00 + v10 + v01 + v11) >= level
                if case == 5:
                    pairs = [("B", "R"), ("T", "L")] if center_inside else [("L", "B"), ("R", "T")]
                else:
                    pairs = [("L", "B"), ("R", "T")] if center_inside else [("B", "R"), ("T", "L")]
            else:
                pairs = _SEGMENTS[case]
            for ea, eb in pairs:
                pa = _edge_point(ea, x, y, j, k, v00, v10, v11, v01, level)
                pb = _edge_point(eb, x, y, j, k, v00, v10, v11, v01, level)
                segments.append((pa, pb))
    if not segments:
        return []
    return _chain_segments(segments, max(g.lx, g.ly))


SURFACE = "surface"
CONTOUR = "contour-levels"


def export_plot_data(snapshot: SnapshotFile, kind: str, path, levels=None):
    """Write plot data for a snapshot: 'surface' x/y/value triplets, or
    'contour-levels' polylines for each requested level."""
    field = snapshot.field
    g = field.grid
    lines = [
        f"# centralflow plot data: {kind}",
        f"# grid {g.nx}x{g.ny} domain {g.lx}x{g.ly} "
        f"time_days {snapshot.time_days} scheme {snapshot.scheme}",
    ]
    if kind == SURFACE:
        x, y = g.cell_centers()
        for k in range(g.ny):
            for j in range(g.nx):
                lines.append(f"{x[j]!r} {y[k]!r} {field.values[k, j]!r}")
    elif kind == CONTOUR:
        if not levels:
            raise ValueError("contour export needs at least one level")
        for level in levels:
            lines.append(f"level {float(level)!r}")
            for poly in contour_polylines(field, float(level)):
                lines.append(f"polyline {len(poly)}")
                for px, py in poly:
                    lines.append(f"{px!r} {py!r}")
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return path
