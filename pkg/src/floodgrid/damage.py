"""Depth-damage costing.

The damage fraction comes from a piecewise-linear curve over depth; cost is
fraction times the cell's exposed value, capped at the exposed value so a
cell can never lose more than what it holds.
"""

from __future__ import annotations

from importlib import resources

from .geodata import DamageCurve, parse_damage_curve


def evaluate_curve(curve: DamageCurve, depth: float) -> float:
    """Damage fraction at ``depth`` by linear interpolation between breakpoints.

    Depths below the first breakpoint clamp to the first fraction, above the
    last to the last fraction.
    """
    pts = curve.breakpoints
    if depth <= pts[0][0]:
        return pts[0][1]
    if depth >= pts[-1][0]:
        return pts[-1][1]
    for (d0, f0), (d1, f1) in zip(pts, pts[1:]):
        if depth <= d1:
            t = (depth - d0) / (d1 - d0)
            return f0 + t * (f1 - f0)
    return pts[-1][1]


def cell_damage(state, depth: float, curve: DamageCurve) -> float:
    """Damage cost (USD) for one cell at the given flood depth.

    Zero when the cell is dry (depth <= 0); otherwise curve fraction times
    exposed value, capped at the exposed value.
    """
    if depth <= 0:
        return 0.0
    return min(evaluate_curve(curve, depth) * state.exposed_value, state.exposed_value)


def load_default_curve() -> DamageCurve:
    """Packaged placeholder curve.

    UNCALIBRATED: the shape loosely mimics published depth-damage curves and
    exists so the pipeline runs out of the box. Real assessments should
    supply a calibrated curve file.
    """
    text = resources.files("floodgrid").joinpath("data/default_curve.json").read_text()
    return parse_damage_curve(text)
