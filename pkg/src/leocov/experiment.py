"""Parameter sweeps and their CSV tables.

Output format: UTF-8, LF line endings, ``#``-prefixed metadata lines (tool
version, seed, JSON echo of the resolved config), then a header row and one
row per grid point. Columns, in order::

    <sweep column>, p_s_gw, p_gw_u, p_end_to_end, p_abs,
    mc_p_s_gw, mc_p_s_gw_ci, mc_p_gw_u, mc_p_gw_u_ci,
    mc_p_end_to_end, mc_p_end_to_end_ci, error

Engines that were not requested leave their cells empty. Floats are written
with ``repr`` so they read back bit-exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from . import __version__
from .channel import Thresholds
from .config import ExperimentSpec
from .coverage import SystemConfig, p_cov_abs, p_cov_gw_u, p_cov_s_gw
from .geometry import ConstellationConfig, DistributionVariant, Shell, contact_cdf, contact_pdf
from .montecarlo import simulate_all

RESULT_COLUMNS = (
    "p_s_gw", "p_gw_u", "p_end_to_end", "p_abs",
    "mc_p_s_gw", "mc_p_s_gw_ci", "mc_p_gw_u", "mc_p_gw_u_ci",
    "mc_p_end_to_end", "mc_p_end_to_end_ci", "error",
)


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def system_at(spec: ExperimentSpec, value: float) -> tuple[SystemConfig, float]:
    """The system config and base-station distance at one sweep point (SI value)."""
    s = spec.system
    r_abs = spec.abs_distance
    var = spec.sweep.variable
    if var == "threshold":
        s = replace(s, thresholds=Thresholds.common(value))
    elif var == "gw_density":
        s = replace(s, gw_density=value)
    elif var == "abs_distance":
        r_abs = value
    elif var in ("altitude", "count"):
        cons = s.constellation
        first = cons.shells[0]
        shell = Shell(value, first.count) if var == "altitude" else Shell(first.altitude, int(value))
        s = replace(s, constellation=ConstellationConfig((shell,) + cons.shells[1:], cons.earth_radius))
    return s, r_abs


def evaluate_point(spec: ExperimentSpec, index: int) -> list:
    """One result row (without the sweep column). Numerical failures land in ``error``."""
    value = spec.sweep.grid[index]
    row: list = [None] * len(RESULT_COLUMNS)
    errors = []
    try:
        cfg, r_abs = system_at(spec, value)
        row[3] = p_cov_abs(r_abs, cfg.budget, cfg.thresholds)
    except Exception as e:  # noqa: BLE001 - recorded in-row
        return row[:-1] + [f"config: {e}"]
    if spec.engines in ("analytic", "both"):
        try:
            s = p_cov_s_gw(cfg)
            u = p_cov_gw_u(cfg)
            row[0:3] = [s, u, s * u]
        except Exception as e:  # noqa: BLE001
            errors.append(f"analytic: {e}")
    if spec.engines in ("mc", "both"):
        try:
            es, eu, ee = simulate_all(cfg, spec.mc)
            row[4:10] = [es.mean, es.ci_halfwidth, eu.mean, eu.ci_halfwidth, ee.mean, ee.ci_halfwidth]
        except Exception as e:  # noqa: BLE001
            errors.append(f"mc: {e}")
    row[10] = "; ".join(errors)
    return row


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ResultTable:
    """Evaluate every grid point; rows come back in grid order whatever ``workers`` is.

    Every row's Monte-Carlo run uses the same seed (common random numbers
    across the sweep), so curves are smooth and the table is reproducible.
    """
    if spec.sweep is None:
        raise ValueError("experiment has no sweep section")
    n = len(spec.sweep.grid)
    if workers > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate_point, [spec] * n, range(n)))
    else:
        rows = [evaluate_point(spec, i) for i in range(n)]
    table = ResultTable([spec.sweep.column, *RESULT_COLUMNS], metadata=_metadata(spec))
    for v, r in zip(spec.sweep.values, rows):
        table.rows.append([v, *r])
    return table


def _metadata(spec: ExperimentSpec) -> dict:
    return {"tool": f"leocov {__version__}", "seed": spec.mc.seed,
            "config": json.dumps(spec.echo(), sort_keys=True)}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def table_text(table: ResultTable) -> str:
    buf = io.StringIO()
    for k, v in table.metadata.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_table(table: ResultTable, path) -> None:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(table_text(table))
    except OSError as e:
        raise OSError(f"cannot write table to {path}: {e.strerror or e}") from e


def _parse_cell(s: str):
    if s == "":
        return None
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def read_table(path) -> ResultTable:
    meta = {}
    body = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition(": ")
                meta[k] = v
            else:
                body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        return ResultTable([], [], meta)
    header, data = rows[0], rows[1:]
    return ResultTable(header, [[_parse_cell(c) for c in r] for r in data], meta)


def distribution_table(cons: ConstellationConfig, points: int = 200,
                       d_max: Optional[float] = None) -> ResultTable:
    """Contact-distance CDF and PDF under both variants on a uniform distance grid (km)."""
    hi = d_max if d_max is not None else 1.05 * cons.max_horizon
    cols = ["d_km", "cdf_cap_area", "pdf_cap_area_per_km", "cdf_arc_angle", "pdf_arc_angle_per_km"]
    table = ResultTable(cols, metadata={"tool": f"leocov {__version__}", "config": json.dumps({
        "earth_radius_m": cons.earth_radius,
        "shells": [{"altitude_m": s.altitude, "count": s.count} for s in cons.shells]},
        sort_keys=True)})
    for i in range(points):
        d = hi * i / (points - 1) if points > 1 else hi
        row = [d / 1e3]
        for v in (DistributionVariant.CAP_AREA, DistributionVariant.ARC_ANGLE):
            pdf = float(contact_pdf(d, cons, v)) * 1e3
            row += [float(contact_cdf(d, cons, v)), pdf if math.isfinite(pdf) else None]
        table.rows.append(row)
    return table
