"""Time integration of bracket-generated flows."""

from .integrate import NonFiniteStateError, Trajectory, integrate, step_rk4

__all__ = ["NonFiniteStateError", "Trajectory", "integrate", "step_rk4"]
