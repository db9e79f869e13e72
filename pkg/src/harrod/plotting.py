"""SVG figures for trajectories.

Output is byte-stable for identical input: the SVG hash salt is fixed, text
is emitted as text rather than glyph paths, and the date metadata is dropped.
"""

from __future__ import annotations

import io
from typing import Iterable, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .domain import Trajectory, ValidationError  # noqa: E402

CHANNELS = {
    "K": ("capital", "capital $K$"),
    "I": ("investment", "investment $I$"),
    "Y": ("income", "income $Y$"),
    "C": ("consumption", "consumption $C$"),
    "Y_R": ("realized_income", "realized income $Y_R$"),
    "K_R": ("realized_capital", "realized capital $K_R$"),
    "C_R": ("realized_consumption", "realized consumption $C_R$"),
}

STYLE = {
    "svg.hashsalt": "harrod",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 9,
    "lines.linewidth": 1.4,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "path.simplify": False,
}


def emit_plot(trajectory: Trajectory, channels: Iterable[str] = ("K",), log_scale: bool = False,
              title: Optional[str] = None, crisis_time: Optional[float] = None) -> str:
    channels = list(channels)
    if not channels:
        raise ValidationError("channels", "at least one channel is required")
    unknown = [c for c in channels if c not in CHANNELS]
    if unknown:
        raise ValidationError("channels", f"unknown channels {unknown}")
    if len(trajectory) == 0:
        raise ValidationError("trajectory", "empty trajectory")

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for name in channels:
            attr, label = CHANNELS[name]
            ax.plot(trajectory.grid, getattr(trajectory, attr), label=label)
        if crisis_time is not None and crisis_time <= trajectory.grid[-1] * 1.05:
            ax.axvline(crisis_time, color="0.5", linestyle="--", linewidth=0.8,
                       label=f"crisis $\\tau$={crisis_time:.6g}")
        if log_scale:
            ax.set_yscale("log")
        ax.set_xlabel("dimensionless time $\\tau$")
        ax.set_ylabel("money units")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper left", frameon=False)
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()
