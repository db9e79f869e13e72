"""Harrod growth models with finite-time crisis detection."""

from .domain import (CrisisMethod, CrisisReport, GrowthLaw, ModelParams, MuSchedule,
                     ScenarioConfig, Tolerances, Trajectory, Variant, make_params)

__all__ = [
    "CrisisMethod", "CrisisReport", "GrowthLaw", "ModelParams", "MuSchedule",
    "ScenarioConfig", "Tolerances", "Trajectory", "Variant", "make_params",
]
__version__ = "0.1.0"
