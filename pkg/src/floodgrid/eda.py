"""Exploratory data analysis over the parcel attribute table.

Reproduces the filtering funnel (minimum value, minimum price per square
foot, positive base flood, positive area cost), Tukey-fence outlier removal,
the area-cost scatter export, an OLS fit, and the Breusch-Pagan
heteroskedasticity diagnostic.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass

import numpy as np

from .geodata import ParseError, format_number

logger = logging.getLogger(__name__)

# 5% critical value of chi-square with 1 degree of freedom
CHI2_1DF_5PCT = 3.8415

TABLE_HEADER = ["parcel_id", "current_assessment", "land_area", "shape_area", "base_flood"]


@dataclass
class EdaRecord:
    parcel_id: str
    current_assessment: float
    land_area: float
    shape_area: float
    base_flood: float


@dataclass
class EdaReport:
    """Filter funnel counts plus regression and heteroskedasticity results."""

    counts: dict[str, int]
    slope: float
    intercept: float
    r_squared: float
    bp_statistic: float
    heteroskedastic: bool

    def to_json(self) -> str:
        import json

        return json.dumps({
            "counts": self.counts,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "bp_statistic": self.bp_statistic,
            "heteroskedastic": self.heteroskedastic,
        }, indent=2) + "\n"


def read_attribute_table(text: str) -> list[EdaRecord]:
    """Parse the attribute CSV (fixed 5-column header)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty attribute table") from None
    if [h.strip() for h in header] != TABLE_HEADER:
        raise ParseError(
            f"line 1: expected header {','.join(TABLE_HEADER)!r}, got {','.join(header)!r}"
        )
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(TABLE_HEADER):
            raise ParseError(f"line {lineno}: expected {len(TABLE_HEADER)} fields, got {len(row)}")
        try:
            records.append(EdaRecord(
                parcel_id=row[0],
                current_assessment=float(row[1]),
                land_area=float(row[2]),
                shape_area=float(row[3]),
                base_flood=float(row[4]),
            ))
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric field in {row!r}") from None
    return records


def area_cost(r: EdaRecord) -> float:
    """shape_area / land_area, scaled by the current assessment."""
    if r.land_area <= 0:
        raise ValueError(f"undefined area cost for parcel {r.parcel_id!r} (land_area <= 0)")
    return r.shape_area / r.land_area * r.current_assessment


def filter_records(rs: list[EdaRecord]) -> tuple[list[EdaRecord], dict[str, int]]:
    """Apply the four record filters in order, tracking survivors per stage.

    All comparisons are strict: assessment > $10,000, price per square foot
    (assessment / land area) > $1, base flood > 0, area cost > 0.
    """
    counts = {"input": len(rs)}

    kept = [r for r in rs if r.current_assessment > 10_000]
    counts["min_assessment"] = len(kept)

    kept = [r for r in kept if r.land_area > 0 and r.current_assessment / r.land_area > 1]
    counts["min_price_per_sqft"] = len(kept)

    kept = [r for r in kept if r.base_flood > 0]
    counts["positive_base_flood"] = len(kept)

    kept = [r for r in kept if area_cost(r) > 0]
    counts["positive_area_cost"] = len(kept)

    return kept, counts


def tukey_outlier_mask(values) -> np.ndarray:
    """Boolean mask flagging values outside the 1.5*IQR Tukey fences.

    Quartiles use linear interpolation of order statistics at position
    p*(n-1), 0-based.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 4:
        raise ValueError(f"need at least 4 values for outlier fences, got {v.size}")
    q1, q3 = np.quantile(v, [0.25, 0.75])
    iqr = q3 - q1
    lo = q1 - 1.5 * iqr
    hi = q3 + 1.5 * iqr
    return (v < lo) | (v > hi)


def _least_squares_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    sxx = float(np.dot(dx, dx))
    if sxx == 0:
        raise ValueError("degenerate regressor (constant x)")
    slope = float(np.dot(dx, y - ym)) / sxx
    return slope, float(ym - slope * xm)


def ols_fit(x, y) -> tuple[float, float, float]:
    """Least-squares line through (x, y): returns (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 3:
        raise ValueError(f"need at least 3 observations, got {x.size}")
    slope, intercept = _least_squares_line(x, y)
    resid = y - (intercept + slope * x)
    ss_res = float(np.dot(resid, resid))
    dy = y - y.mean()
    ss_tot = float(np.dot(dy, dy))
    if ss_tot == 0:
        if ss_res == 0:
            return slope, intercept, 1.0
        raise ValueError("zero total variance with nonzero residuals")
    return slope, intercept, 1.0 - ss_res / ss_tot


def breusch_pagan(x, y) -> tuple[float, bool]:
    """Breusch-Pagan LM test of the fit of y on x.

    Squared residuals from the main fit are regressed on x (with intercept);
    the statistic is n times the R-squared of that auxiliary regression.
    The boolean compares against the 5% chi-square(1) critical value. When
    the squared residuals carry no variance at all there is nothing to
    explain and the statistic is 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 3:
        raise ValueError(f"need at least 3 observations, got {x.size}")
    slope, intercept = _least_squares_line(x, y)
    resid = y - (intercept + slope * x)
    e2 = resid * resid

    de = e2 - e2.mean()
    ss_tot = float(np.dot(de, de))
    if ss_tot == 0:
        return 0.0, False
    aux_slope, aux_intercept = _least_squares_line(x, e2)
    aux_resid = e2 - (aux_intercept + aux_slope * x)
    r2 = 1.0 - float(np.dot(aux_resid, aux_resid)) / ss_tot
    lm = x.size * r2
    return lm, lm > CHI2_1DF_5PCT


def scatter_export(rs: list[EdaRecord]) -> str:
    """Plot-ready CSV of the filtered records: parcel_id, shape_area, area_cost."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["parcel_id", "shape_area", "area_cost"])
    for r in rs:
        writer.writerow([r.parcel_id, format_number(r.shape_area), format_number(area_cost(r))])
    return buf.getvalue()


def run_eda(records: list[EdaRecord]) -> tuple[EdaReport, list[EdaRecord]]:
    """Full EDA pipeline: filters, outlier removal, OLS, Breusch-Pagan.

    A record is dropped as an outlier if it trips the Tukey fences on either
    area cost or shape area. The outlier stage is skipped when fewer than 4
    records survive the filters (fences need 4 values). Raises ValueError
    when fewer than 3 records remain for the regression.
    """
    kept, counts = filter_records(records)

    if len(kept) >= 4:
        costs = np.array([area_cost(r) for r in kept])
        shapes = np.array([r.shape_area for r in kept])
        bad = tukey_outlier_mask(costs) | tukey_outlier_mask(shapes)
        kept = [r for r, flagged in zip(kept, bad) if not flagged]
    counts["outlier_removal"] = len(kept)
    logger.info("filter funnel: %s", " -> ".join(f"{k}={v}" for k, v in counts.items()))

    if len(kept) < 3:
        raise ValueError(
            f"only {len(kept)} records survive filtering; regression impossible"
        )

    x = np.array([r.shape_area for r in kept])
    y = np.array([area_cost(r) for r in kept])
    slope, intercept, r2 = ols_fit(x, y)
    lm, het = breusch_pagan(x, y)

    report = EdaReport(
        counts=counts,
        slope=slope,
        intercept=intercept,
        r_squared=r2,
        bp_statistic=lm,
        heteroskedastic=het,
    )
    return report, kept
