"""Wire/file formats: trajectory tables and check-report dictionaries.

Trajectory files use one fixed column set for every kind of curve (base
geodesics ride along with a zero fiber).  Floats in CSV are written with 17
significant digits so files round-trip exactly; JSON uses Python's shortest
round-trip representation.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .bundle import BundleTrajectory
from .distributions import CheckReport, DistributionCheckOutcome

__all__ = [
    "TRAJECTORY_COLUMNS",
    "trajectory_payload",
    "base_solution_payload",
    "check_report_dict",
    "distribution_outcome_dict",
    "format_float",
    "write_csv",
    "write_json",
]

TRAJECTORY_COLUMNS = (
    "t",
    "x1", "x2", "x3",
    "y1", "y2", "y3",
    "v1", "v2", "v3",
    "yp1", "yp2", "yp3",
)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def trajectory_payload(traj: BundleTrajectory) -> dict:
    """Column/row table of a bundle trajectory (t, x, y, v, yp order)."""
    ts = traj.times
    s = traj.states
    table = np.column_stack([ts, s[:, 0:3], s[:, 6:9], s[:, 3:6], s[:, 9:12]])
    return {"columns": list(TRAJECTORY_COLUMNS), "rows": table.tolist()}


def base_solution_payload(ts: np.ndarray, xs: np.ndarray, vs: np.ndarray) -> dict:
    """A base curve as a trajectory table with zero fiber columns."""
    zeros = np.zeros_like(xs)
    table = np.column_stack([ts, xs, zeros, vs, zeros])
    return {"columns": list(TRAJECTORY_COLUMNS), "rows": table.tolist()}


def check_report_dict(report: CheckReport) -> dict:
    return {
        "name": report.name,
        "criterion": report.criterion,
        "tolerance": report.tolerance,
        "global_max": report.global_max,
        "verdict": report.verdict,
        "witness": {
            "point": {
                "x": report.witness_point.base.as_array().tolist(),
                "y": report.witness_point.fiber.as_array().tolist(),
            },
            "residual": report.witness_residual,
        },
    }


def distribution_outcome_dict(outcome: DistributionCheckOutcome) -> dict:
    return {
        "name": outcome.name,
        "totally_geodesic": check_report_dict(outcome.totally_geodesic),
        "isocline": check_report_dict(outcome.isocline) if outcome.isocline else None,
        "isocline_skipped": outcome.isocline_skipped,
    }


def write_json(path: str | Path, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_csv(path: str | Path, columns, rows) -> None:
    """CSV with every float rendered at 17 significant digits."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(
                [format_float(v) if isinstance(v, float) else v for v in row]
            )
