"""Per-cell ground elevation, base flood elevation, and flood depth.

Zonal elevation is the arithmetic mean of DEM samples whose cell-center
points fall inside the fishnet cell (half-open membership, NODATA excluded).
BFE is assigned by cell-centroid containment against the zone polygons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geodata import BfeZone, Raster, format_number
from .grid import GridSpec, col_of, row_of
from .overlay import CellAttribution, points_in_polygon

Cell = tuple[int, int]


@dataclass
class CellState:
    """Everything known about one fishnet cell before running scenarios."""

    cell: Cell
    mean_elevation: float | None = None
    bfe: float | None = None
    exposed_value: float = 0.0
    exposed_area: float = 0.0


def zonal_mean_elevation(dem: Raster, g: GridSpec) -> dict[Cell, float]:
    """Mean DEM elevation per fishnet cell.

    A DEM sample belongs to the fishnet cell containing its center point;
    NODATA samples are excluded. Cells with no samples are absent from the
    returned map.
    """
    cs = dem.cellsize
    centers_x = dem.xllcorner + (np.arange(dem.ncols) + 0.5) * cs
    # row 0 of the value array is the northernmost row
    centers_y = dem.yllcorner + (dem.nrows - np.arange(dem.nrows) - 0.5) * cs

    jj = col_of(g, centers_x)
    ii = row_of(g, centers_y)

    valid = (ii[:, None] >= 0) & (jj[None, :] >= 0) & dem.data_mask()
    if not valid.any():
        return {}

    flat = (ii[:, None] * g.n_cols + jj[None, :])[valid]
    weights = dem.values[valid]
    sums = np.bincount(flat, weights=weights, minlength=g.n_cells)
    counts = np.bincount(flat, minlength=g.n_cells)

    out: dict[Cell, float] = {}
    for idx in np.flatnonzero(counts):
        out[(int(idx) // g.n_cols, int(idx) % g.n_cols)] = float(sums[idx] / counts[idx])
    return out


def assign_bfe(g: GridSpec, zones: list[BfeZone]) -> dict[Cell, float]:
    """Base flood elevation per cell by centroid containment.

    The first zone in input order whose polygon contains the cell centroid
    wins; cells whose centroid lies outside every zone are absent (they can
    never flood).
    """
    cx = g.origin_x + (np.arange(g.n_cols) + 0.5) * g.cell_size
    cy = g.origin_y + (np.arange(g.n_rows) + 0.5) * g.cell_size
    xs = np.broadcast_to(cx[None, :], (g.n_rows, g.n_cols)).ravel()
    ys = np.broadcast_to(cy[:, None], (g.n_rows, g.n_cols)).ravel()

    bfe = np.full(g.n_cells, np.nan)
    unassigned = np.ones(g.n_cells, dtype=bool)
    for zone in zones:
        if not unassigned.any():
            break
        hit = points_in_polygon(xs, ys, zone.rings) & unassigned
        bfe[hit] = zone.static_bfe
        unassigned &= ~hit

    out: dict[Cell, float] = {}
    for idx in np.flatnonzero(~np.isnan(bfe)):
        out[(int(idx) // g.n_cols, int(idx) % g.n_cols)] = float(bfe[idx])
    return out


def flood_depth(bfe: float, slr: float, elevation: float) -> float:
    """Water depth over ground: (bfe + slr) - elevation.

    Positive means the cell floods; negative means the ground sits above the
    flood elevation.
    """
    return (bfe + slr) - elevation


def build_cell_states(
    g: GridSpec,
    attributions: list[CellAttribution],
    elevations: dict[Cell, float],
    bfes: dict[Cell, float],
) -> dict[Cell, CellState]:
    """Assemble the per-cell state map for the whole grid, row-major.

    Exposure sums assume ``attributions`` is already in deterministic order
    (see overlay.apportion_many).
    """
    states: dict[Cell, CellState] = {}
    for i in range(g.n_rows):
        for j in range(g.n_cols):
            cell = (i, j)
            states[cell] = CellState(
                cell=cell,
                mean_elevation=elevations.get(cell),
                bfe=bfes.get(cell),
            )
    for a in attributions:
        st = states.get(a.cell)
        if st is None:
            continue
        st.exposed_value += a.apportioned_value
        st.exposed_area += a.clipped_area
    return states


def cell_states_csv(states: dict[Cell, CellState]) -> str:
    """Dump cell states as CSV, row-major; absent elevations/BFEs are empty."""
    lines = ["row,col,mean_elevation,bfe,exposed_value,exposed_area"]
    for cell in sorted(states):
        st = states[cell]
        elev = "" if st.mean_elevation is None else format_number(st.mean_elevation)
        bfe = "" if st.bfe is None else format_number(st.bfe)
        lines.append(
            f"{cell[0]},{cell[1]},{elev},{bfe},"
            f"{st.exposed_value:.2f},{format_number(st.exposed_area)}"
        )
    return "\n".join(lines) + "\n"
