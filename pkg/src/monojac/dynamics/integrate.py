"""Classical RK4 on flat state vectors with per-step monitors."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np


class NonFiniteStateError(FloatingPointError):
    def __init__(self, step: int, time: float):
        super().__init__(f"non-finite state at step {step} (t = {time:g})")
        self.step = step
        self.time = time


def step_rk4(rhs: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float) -> np.ndarray:
    if not dt > 0:
        raise ValueError("dt must be positive")
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * dt * k1)
    k3 = rhs(y + 0.5 * dt * k2)
    k4 = rhs(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    monitors: dict = field(default_factory=dict)
    aborted: str | None = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def integrate(rhs: Callable[[np.ndarray], np.ndarray], y0: np.ndarray, dt: float, steps: int,
              monitors: Mapping[str, Callable[[np.ndarray], float]] | None = None,
              decimate: int = 1, keep_states: bool = True) -> Trajectory:
    """Advance ``y' = rhs(y)`` by ``steps`` RK4 steps of size ``dt``.

    Monitors are evaluated at every step; states are stored every
    ``decimate`` steps (the final state is always kept). Raises
    :class:`NonFiniteStateError` as soon as the state stops being finite.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if decimate < 1:
        raise ValueError("decimate must be >= 1")
    monitors = dict(monitors or {})
    y = np.array(y0, dtype=float)
    series = {name: [float(m(y))] for name, m in monitors.items()}
    times = [0.0]
    states = [y.copy()]
    for n in range(1, steps + 1):
        y = step_rk4(rhs, y, dt)
        if not np.all(np.isfinite(y)):
            raise NonFiniteStateError(n, n * dt)
        for name, m in monitors.items():
            series[name].append(float(m(y)))
        if keep_states and (n % decimate == 0 or n == steps):
            states.append(y.copy())
            times.append(n * dt)
        elif not keep_states and n == steps:
            states = [y.copy()]
            times = [n * dt]
    return Trajectory(np.asarray(times), states, {k: np.asarray(v) for k, v in series.items()})


def observed_order(errors, steps) -> float:
    """Least-squares slope of ``log(error)`` against ``log(step)``."""
    e = np.asarray(errors, dtype=float)
    h = np.asarray(steps, dtype=float)
    if np.any(e <= 0):
        return float("nan")
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])
