"""Trajectory CSV and crisis report formatting.

Every number is written in scientific notation with 12 significant digits.
"""

from __future__ import annotations

import csv
import io
from typing import Optional

import numpy as np

from .domain import CrisisReport, Trajectory

CSV_HEADER = ("tau", "K", "I", "Y", "C", "Y_R", "K_R", "C_R")
_CSV_SERIES = ("grid", "capital", "investment", "income", "consumption",
               "realized_income", "realized_capital", "realized_consumption")


def fmt(value: Optional[float]) -> str:
    if value is None:
        return "none"
    return "%.11e" % value


def trajectory_csv(traj: Trajectory) -> str:
    columns = [getattr(traj, name) for name in _CSV_SERIES]
    lines = [",".join(CSV_HEADER)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def read_trajectory_csv(text: str) -> dict[str, np.ndarray]:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected header {header}")
    rows = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    return {name: rows[:, i] for i, name in enumerate(CSV_HEADER)}


def report_fields(report: CrisisReport, extra: Optional[dict] = None) -> dict[str, str]:
    """Flat key/value view of a crisis report plus optional extra entries."""
    fields = {
        "variant": report.variant.value,
        "crisis_time": fmt(report.crisis_time),
        "method": report.method.value,
        "horizon": fmt(report.horizon),
        "within_horizon": "true" if report.within_horizon else "false",
        "margin_to_horizon": fmt(report.margin_to_horizon),
        "denominator_margin": fmt(report.denominator_margin),
        "guard_time": fmt(report.guard_time),
        "extrapolated": "true" if report.extrapolated else "false",
    }
    if report.note:
        fields["note"] = report.note
    for key, value in (extra or {}).items():
        if isinstance(value, bool):
            fields[key] = "true" if value else "false"
        elif isinstance(value, (int, float, np.floating)) or value is None:
            fields[key] = fmt(value)
        else:
            fields[key] = str(value)
    return fields


def report_machine(fields: dict[str, str]) -> str:
    return "".join(f"{k}={v}\n" for k, v in fields.items())


def parse_report_machine(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if line.strip():
            key, _, value = line.partition("=")
            out[key] = value
    return out


def report_text(report: CrisisReport, extra: Optional[dict] = None) -> str:
    lines = [f"Scenario variant: {report.variant.value}"]
    if report.crisis_time is None:
        lines.append("Crisis: none within horizon" + (f" ({report.note})" if report.note else ""))
    else:
        lines.append(f"Crisis time: {fmt(report.crisis_time)} (method: {report.method.value})")
        if report.horizon is not None:
            state = "inside" if report.within_horizon else "beyond"
            lines.append(f"Horizon: {fmt(report.horizon)}; crisis lies {state} the horizon "
                         f"(margin {fmt(report.margin_to_horizon)})")
        if report.guard_time is not None:
            lines.append(f"Integrator guard stopped at tau={fmt(report.guard_time)} with "
                         f"denominator {fmt(report.denominator_margin)}")
        if report.note:
            lines.append(f"Note: {report.note}")
    extra = extra or {}
    if "milestones.reformat_time" in extra:
        lines.append(f"Realized income balances capital at tau={fmt(extra['milestones.balance_time'])}")
        lines.append(f"Realized consumption reaches K0 at tau={fmt(extra['milestones.reformat_time'])}: "
                     "initial capital has been consumed; re-formatting point")
    for key, value in extra.items():
        if not key.startswith("milestones."):
            shown = fmt(value) if isinstance(value, float) else value
            lines.append(f"{key}: {shown}")
    return "\n".join(lines) + "\n"
