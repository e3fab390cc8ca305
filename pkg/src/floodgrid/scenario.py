"""Base-flood and sea-level-rise scenario runs.

Each scenario adds a uniform rise to every cell's base flood elevation,
recomputes depths, and aggregates flooded area and damage. Percent deltas
follow the incremental-over-base formula: the k-th delta is the change from
the previous scenario divided by the base total.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .damage import cell_damage
from .geodata import DamageCurve
from .grid import GridSpec, cell_rect
from .terrain import Cell, CellState, flood_depth

logger = logging.getLogger(__name__)

AREA_BASES = ("parcel", "cell")


@dataclass
class ScenarioResult:
    """Totals and per-cell detail for one sea-level-rise scenario."""

    slr: float
    total_damage: float
    total_flooded_area: float
    cost_pct_delta: float | None = None
    area_pct_delta: float | None = None
    per_cell: list[tuple[Cell, float, float]] = field(default_factory=list)


def run_scenario(
    cells: dict[Cell, CellState],
    curve: DamageCurve,
    slr: float,
    area_basis: str = "parcel",
    cell_area: float = 0.0,
) -> ScenarioResult:
    """Evaluate one scenario over the cell states.

    A cell floods when it has both a mean elevation and a BFE and its depth
    is positive. A flooded cell contributes its whole exposed parcel area
    (or, under the ``cell`` basis, the full cell area) once, plus its capped
    damage. Cells are visited in ascending (row, col) order so totals are
    deterministic.
    """
    if area_basis not in AREA_BASES:
        raise ValueError(f"area_basis must be one of {AREA_BASES}, got {area_basis!r}")
    if area_basis == "cell" and cell_area <= 0:
        raise ValueError("cell basis requires a positive cell_area")

    total_damage = 0.0
    total_area = 0.0
    per_cell: list[tuple[Cell, float, float]] = []
    for cell in sorted(cells):
        st = cells[cell]
        if st.mean_elevation is None or st.bfe is None:
            continue
        depth = flood_depth(st.bfe, slr, st.mean_elevation)
        if depth <= 0:
            continue
        dmg = cell_damage(st, depth, curve)
        total_damage += dmg
        total_area += st.exposed_area if area_basis == "parcel" else cell_area
        per_cell.append((cell, depth, dmg))
    return ScenarioResult(slr=slr, total_damage=total_damage, total_flooded_area=total_area,
                          per_cell=per_cell)


def incremental_deltas(totals: list[float]) -> list[float | None]:
    """Per-scenario deltas: (T_k - T_{k-1}) / T_base, base entry absent.

    This is the reading that reproduces every printed delta in the source
    risk table. A base total of 0 with nonzero later totals makes the deltas
    undefined; they come back absent with a warning. All-zero totals give 0.
    """
    base = totals[0]
    deltas: list[float | None] = [None]
    if base == 0:
        if any(t != 0 for t in totals[1:]):
            logger.warning("base total is 0 but later totals are nonzero; deltas undefined")
            deltas.extend(None for _ in totals[1:])
        else:
            deltas.extend(0.0 for _ in totals[1:])
        return deltas
    prev = base
    for t in totals[1:]:
        deltas.append((t - prev) / base)
        prev = t
    return deltas


def sweep(
    cells: dict[Cell, CellState],
    curve: DamageCurve,
    slr_list: list[float],
    area_basis: str = "parcel",
    cell_area: float = 0.0,
    workers: int = 1,
) -> list[ScenarioResult]:
    """Run the scenario list (base first) and attach percent deltas.

    ``slr_list`` must be strictly ascending and start at 0. Totals are
    checked for monotonicity in the rise: more water can never flood less.
    """
    if not slr_list:
        raise ValueError("empty slr list")
    if slr_list[0] != 0:
        raise ValueError(f"first scenario must be the base flood (slr 0), got {slr_list[0]}")
    if any(not b > a for a, b in zip(slr_list, slr_list[1:])):
        raise ValueError("slr list must be strictly ascending")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda s: run_scenario(cells, curve, s, area_basis, cell_area), slr_list))
    else:
        results = [run_scenario(cells, curve, s, area_basis, cell_area) for s in slr_list]

    for prev, cur in zip(results, results[1:]):
        assert cur.total_damage >= prev.total_damage, "damage decreased with rising sea level"
        assert cur.total_flooded_area >= prev.total_flooded_area, \
            "flooded area decreased with rising sea level"

    cost_deltas = incremental_deltas([r.total_damage for r in results])
    area_deltas = incremental_deltas([r.total_flooded_area for r in results])
    for r, cd, ad in zip(results, cost_deltas, area_deltas):
        r.cost_pct_delta = cd
        r.area_pct_delta = ad
    return results


def flooded_cells_geojson(g: GridSpec, result: ScenarioResult) -> str:
    """GeoJSON FeatureCollection of flooded cells for external map rendering.

    One square polygon per flooded cell with properties slr, depth, damage
    (damage rounded to cents at serialization).
    """
    features = []
    for cell, depth, dmg in result.per_cell:
        xmin, ymin, xmax, ymax = cell_rect(g, *cell)
        ring = [[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax], [xmin, ymin]]
        features.append({
            "type": "Feature",
            "geometry": {"type": "Polygon", "coordinates": [ring]},
            "properties": {
                "slr": result.slr,
                "depth": depth,
                "damage": round(dmg, 2),
            },
        })
    doc = {"type": "FeatureCollection", "features": features}
    return json.dumps(doc, separators=(",", ":")) + "\n"
