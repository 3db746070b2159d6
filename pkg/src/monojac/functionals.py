"""Declarative functionals of the state with closed-form first derivatives.

Each variant knows its value (midpoint quadrature of its defining integral)
and its functional derivatives with respect to every ``f_s``, ``E`` and ``B``.
Derivatives are taken with respect to the quadrature inner product, so
``d/dh F(state + h*dir) = <gradient, dir>`` holds exactly for linear and
quadratic functionals on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .state import (
    PhaseSpaceGrid,
    StateTangent,
    SystemState,
    phase_integral,
    sample_phase,
    sample_vector,
    spatial_integral,
)

FOUR_PI = 4.0 * np.pi

Weight = Union[str, np.ndarray]


class FunctionalError(ValueError):
    pass


@dataclass(frozen=True)
class PhaseWeight:
    """``F = int w(x, v) f_s dx dv`` for one species ``s``."""

    species: int
    weight: Weight

    def describe(self) -> str:
        w = self.weight if isinstance(self.weight, str) else "<array>"
        return f"PhaseWeight(s={self.species}, w={w})"


@dataclass(frozen=True)
class FieldProbe:
    """``F = int a(x) . E dx`` (or with ``B``)."""

    target: str
    weight: Union[tuple[str, str, str], np.ndarray]

    def __post_init__(self):
        if self.target not in ("E", "B"):
            raise FunctionalError(f"FieldProbe target must be 'E' or 'B', got {self.target!r}")
        if isinstance(self.weight, (list, tuple)):
            object.__setattr__(self, "weight", tuple(self.weight))

    def describe(self) -> str:
        w = list(self.weight) if isinstance(self.weight, tuple) else "<array>"
        return f"FieldProbe({self.target}, a={w})"


@dataclass(frozen=True)
class KineticEnergy:
    relativistic: bool = False

    def describe(self) -> str:
        return f"KineticEnergy(relativistic={self.relativistic})"


@dataclass(frozen=True)
class FieldEnergy:
    def describe(self) -> str:
        return "FieldEnergy()"


@dataclass(frozen=True)
class Sum:
    terms: tuple
    coefficients: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if len(self.terms) != len(self.coefficients):
            raise FunctionalError("Sum needs one coefficient per term")

    def describe(self) -> str:
        return " + ".join(f"{c:g}*{t.describe()}" for c, t in zip(self.coefficients, self.terms))


FunctionalSpec = Union[PhaseWeight, FieldProbe, KineticEnergy, FieldEnergy, Sum]


def hamiltonian(relativistic: bool = False) -> Sum:
    """Kinetic plus field energy."""
    return Sum((KineticEnergy(relativistic), FieldEnergy()), (1.0, 1.0))


@dataclass(frozen=True)
class FunctionalGradient:
    """``dF/df_s`` per species plus ``dF/dE`` and ``dF/dB``; ``None`` means zero."""

    f: tuple
    E: object = None
    B: object = None

    def as_tangent(self) -> StateTangent:
        return StateTangent(self.f, self.E, self.B)


# ---------------------------------------------------------------------------


def _phase_weight(w: Weight, grid: PhaseSpaceGrid) -> np.ndarray:
    if isinstance(w, str):
        return sample_phase(w, grid)
    arr = np.asarray(w, dtype=float)
    if arr.shape != grid.phase_shape:
        raise FunctionalError(f"weight shape {arr.shape} != phase grid {grid.phase_shape}")
    return arr


def _vector_weight(w, grid: PhaseSpaceGrid) -> np.ndarray:
    if isinstance(w, tuple) and all(isinstance(t, str) for t in w):
        return sample_vector(w, grid)
    arr = np.asarray(w, dtype=float)
    if arr.shape != (3,) + grid.x_shape:
        raise FunctionalError(f"probe weight shape {arr.shape} != (3, *{grid.x_shape})")
    return arr


def kinetic_weight(grid: PhaseSpaceGrid, mass: float, c: float, relativistic: bool) -> np.ndarray:
    """``dK/df_s``: ``m |v|^2 / 2`` or ``m c^2 (sqrt(1 + |v|^2/c^2) - 1)``."""
    vs = grid.v_mesh()
    v2 = sum(v * v for v in vs if not np.isscalar(v))
    if relativistic:
        # c^2 (sqrt(1+u) - 1) written without cancellation
        w = mass * v2 / (np.sqrt(1.0 + v2 / c**2) + 1.0)
    else:
        w = 0.5 * mass * v2
    return np.broadcast_to(w, grid.phase_shape)


def _check_species(F: PhaseWeight, state: SystemState) -> None:
    if not 0 <= F.species < len(state.species):
        raise FunctionalError(f"species index {F.species} out of range")


def evaluate(F: FunctionalSpec, state: SystemState) -> float:
    grid = state.grid
    if isinstance(F, PhaseWeight):
        _check_species(F, state)
        return float(phase_integral(_phase_weight(F.weight, grid) * state.f[F.species], grid))
    if isinstance(F, FieldProbe):
        field = state.E if F.target == "E" else state.B
        return float(spatial_integral(np.sum(_vector_weight(F.weight, grid) * field, axis=0), grid))
    if isinstance(F, KineticEnergy):
        total = 0.0
        for sp, f in zip(state.species, state.f.f):
            w = kinetic_weight(grid, sp.mass, state.c, F.relativistic)
            total += float(phase_integral(w * f, grid))
        return total
    if isinstance(F, FieldEnergy):
        density = np.sum(state.E**2, axis=0) + np.sum(state.B**2, axis=0)
        return float(spatial_integral(density, grid)) / (2.0 * FOUR_PI)
    if isinstance(F, Sum):
        return sum(c * evaluate(t, state) for c, t in zip(F.coefficients, F.terms))
    raise FunctionalError(f"unknown functional {F!r}")


def _add(a, b, beta: float = 1.0):
    if b is None:
        return a
    if a is None:
        return beta * np.asarray(b)
    return a + beta * np.asarray(b)


def gradient(F: FunctionalSpec, state: SystemState) -> FunctionalGradient:
    grid = state.grid
    n = len(state.species)
    if isinstance(F, PhaseWeight):
        _check_species(F, state)
        f = [None] * n
        f[F.species] = _phase_weight(F.weight, grid)
        return FunctionalGradient(tuple(f))
    if isinstance(F, FieldProbe):
        a = _vector_weight(F.weight, grid)
        return FunctionalGradient((None,) * n, a if F.target == "E" else None,
                                  a if F.target == "B" else None)
    if isinstance(F, KineticEnergy):
        return FunctionalGradient(tuple(kinetic_weight(grid, sp.mass, state.c, F.relativistic)
                                        for sp in state.species))
    if isinstance(F, FieldEnergy):
        return FunctionalGradient((None,) * n, state.E / FOUR_PI, state.B / FOUR_PI)
    if isinstance(F, Sum):
        f = [None] * n
        E = B = None
        for c, term in zip(F.coefficients, F.terms):
            g = gradient(term, state)
            f = [_add(a, b, c) for a, b in zip(f, g.f)]
            E = _add(E, g.E, c)
            B = _add(B, g.B, c)
        return FunctionalGradient(tuple(f), E, B)
    raise FunctionalError(f"unknown functional {F!r}")


def pairing(grad: FunctionalGradient, direction: StateTangent, grid: PhaseSpaceGrid) -> float:
    """Quadrature inner product of a gradient with a state-shaped direction."""
    total = 0.0
    for g, d in zip(grad.f, direction.f):
        if g is not None and d is not None:
            total += float(np.sum(g * d)) * grid.cell_volume
    for g, d in ((grad.E, direction.E), (grad.B, direction.B)):
        if g is not None and d is not None:
            total += float(np.sum(g * d)) * grid.x_cell_volume
    return total


@dataclass(frozen=True)
class FDCheck:
    analytic: float
    numeric: float
    rel_error: float


def fd_check(F: FunctionalSpec, state: SystemState, direction: StateTangent, h: float) -> FDCheck:
    """Centred-difference check of :func:`gradient` along one direction."""
    if not h > 0:
        raise FunctionalError("step h must be positive")
    analytic = pairing(gradient(F, state), direction, state.grid)
    numeric = (evaluate(F, state.displaced(direction, h))
               - evaluate(F, state.displaced(direction, -h))) / (2.0 * h)
    scale = max(abs(analytic), abs(numeric))
    rel = abs(analytic - numeric) / scale if scale > 0 else 0.0
    return FDCheck(analytic, numeric, rel)


# ---------------------------------------------------------------------------
# JSON form


def to_dict(F: FunctionalSpec) -> dict:
    def weight(w):
        if isinstance(w, str):
            return w
        if isinstance(w, tuple) and all(isinstance(t, str) for t in w):
            return list(w)
        return np.asarray(w).tolist()

    if isinstance(F, PhaseWeight):
        return {"type": "phase_weight", "species": F.species, "weight": weight(F.weight)}
    if isinstance(F, FieldProbe):
        return {"type": "field_probe", "target": F.target, "weight": weight(F.weight)}
    if isinstance(F, KineticEnergy):
        return {"type": "kinetic_energy", "relativistic": F.relativistic}
    if isinstance(F, FieldEnergy):
        return {"type": "field_energy"}
    if isinstance(F, Sum):
        return {"type": "sum", "terms": [to_dict(t) for t in F.terms],
                "coefficients": list(F.coefficients)}
    raise FunctionalError(f"unknown functional {F!r}")


_KEYS = {
    "phase_weight": {"type", "species", "weight"},
    "field_probe": {"type", "target", "weight"},
    "kinetic_energy": {"type", "relativistic"},
    "field_energy": {"type"},
    "hamiltonian": {"type", "relativistic"},
    "sum": {"type", "terms", "coefficients"},
}


def from_dict(d: dict) -> FunctionalSpec:
    if not isinstance(d, dict) or d.get("type") not in _KEYS:
        raise FunctionalError(f"functional needs a 'type' in {sorted(_KEYS)}: {d!r}")
    kind = d["type"]
    extra = set(d) - _KEYS[kind]
    if extra:
        raise FunctionalError(f"unknown keys for {kind}: {sorted(extra)}")
    if kind == "phase_weight":
        w = d["weight"]
        return PhaseWeight(int(d["species"]), w if isinstance(w, str) else np.asarray(w, float))
    if kind == "field_probe":
        w = d["weight"]
        if isinstance(w, list) and len(w) == 3 and all(isinstance(t, str) for t in w):
            w = tuple(w)
        else:
            w = np.asarray(w, float)
        return FieldProbe(d["target"], w)
    if kind == "kinetic_energy":
        return KineticEnergy(bool(d.get("relativistic", False)))
    if kind == "field_energy":
        return FieldEnergy()
    if kind == "hamiltonian":
        return hamiltonian(bool(d.get("relativistic", False)))
    return Sum(tuple(from_dict(t) for t in d["terms"]), tuple(d["coefficients"]))
