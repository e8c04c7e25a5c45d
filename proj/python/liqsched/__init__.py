"""Optimal liquidation schedules under transient and persistent price impact."""

from ._core import (
    LiqschedError,
    Model,
    RiccatiSolution,
    Trajectory,
    check_bounds,
    feedback_rate,
    obizhaeva_wang_schedule,
    oracle_value,
    simulate,
    solve,
    value_function,
)

__all__ = [
    "LiqschedError",
    "Model",
    "RiccatiSolution",
    "Trajectory",
    "check_bounds",
    "feedback_rate",
    "obizhaeva_wang_schedule",
    "oracle_value",
    "simulate",
    "solve",
    "value_function",
]
