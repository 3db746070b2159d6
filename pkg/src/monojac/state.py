"""Phase-space discretization: grids, species, states and discrete operators.

Layout conventions
------------------
* Nodes sit at cell centres; every phase-space integral is a midpoint sum.
* A distribution array has shape ``x_points + v_points`` (spatial axes first).
* A vector field has shape ``(3,) + x_points``. Components are always three,
  whatever the number of active spatial axes; derivatives along inactive axes
  are zero.
* First derivatives are centred second-order differences, periodic where
  flagged and one-sided second-order at non-periodic edges. Velocity axes are
  never periodic.

The difference routines only use slicing, ``roll`` and ``concatenate`` so the
same code runs on numpy arrays and on traced jax arrays.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from . import expr


class GridError(ValueError):
    pass


class StateError(ValueError):
    pass


def _xp(a):
    if type(a).__module__.startswith("jax"):
        import jax.numpy as jnp

        return jnp
    return np


@dataclass(frozen=True)
class SpeciesParams:
    mass: float
    electric_charge: float = 0.0
    magnetic_charge: float = 0.0
    label: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise StateError(f"species {self.label!r}: mass must be positive, got {self.mass}")
        for name in ("electric_charge", "magnetic_charge"):
            if not math.isfinite(getattr(self, name)):
                raise StateError(f"species {self.label!r}: {name} must be finite")

    @property
    def is_neutral(self) -> bool:
        return self.electric_charge == 0 and self.magnetic_charge == 0


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform cell-centred grid on ``x`` (1-3 axes) times ``v`` (1-3 axes)."""

    x_extents: tuple[tuple[float, float], ...]
    x_points: tuple[int, ...]
    v_extents: tuple[tuple[float, float], ...]
    v_points: tuple[int, ...]
    periodic: tuple[bool, ...] | None = None

    def __post_init__(self):
        xe = tuple((float(a), float(b)) for a, b in self.x_extents)
        ve = tuple((float(a), float(b)) for a, b in self.v_extents)
        xp = tuple(int(n) for n in self.x_points)
        vp = tuple(int(n) for n in self.v_points)
        per = (True,) * len(xp) if self.periodic is None else tuple(bool(p) for p in self.periodic)
        object.__setattr__(self, "x_extents", xe)
        object.__setattr__(self, "v_extents", ve)
        object.__setattr__(self, "x_points", xp)
        object.__setattr__(self, "v_points", vp)
        object.__setattr__(self, "periodic", per)
        if not 1 <= len(xp) <= 3 or len(xe) != len(xp) or len(per) != len(xp):
            raise GridError("spatial grid needs 1-3 axes with matching extents/periodic flags")
        if not 1 <= len(vp) <= 3 or len(ve) != len(vp):
            raise GridError("velocity grid needs 1-3 axes with matching extents")
        for n in xp + vp:
            if n < 4:
                raise GridError(f"every axis needs at least 4 points, got {n}")
        for lo, hi in xe + ve:
            if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
                raise GridError(f"extent ({lo}, {hi}) must be finite with hi > lo")

    @property
    def spatial_dims(self) -> int:
        return len(self.x_points)

    @property
    def velocity_dims(self) -> int:
        return len(self.v_points)

    @property
    def dx(self) -> tuple[float, ...]:
        return tuple((hi - lo) / n for (lo, hi), n in zip(self.x_extents, self.x_points))

    @property
    def dv(self) -> tuple[float, ...]:
        return tuple((hi - lo) / n for (lo, hi), n in zip(self.v_extents, self.v_points))

    @property
    def x_shape(self) -> tuple[int, ...]:
        return self.x_points

    @property
    def v_shape(self) -> tuple[int, ...]:
        return self.v_points

    @property
    def phase_shape(self) -> tuple[int, ...]:
        return self.x_points + self.v_points

    @property
    def x_cell_volume(self) -> float:
        return math.prod(self.dx)

    @property
    def v_cell_volume(self) -> float:
        return math.prod(self.dv)

    @property
    def cell_volume(self) -> float:
        return self.x_cell_volume * self.v_cell_volume

    def x_axes(self) -> list[np.ndarray]:
        return [lo + (np.arange(n) + 0.5) * d
                for (lo, _), n, d in zip(self.x_extents, self.x_points, self.dx)]

    def v_axes(self) -> list[np.ndarray]:
        return [lo + (np.arange(n) + 0.5) * d
                for (lo, _), n, d in zip(self.v_extents, self.v_points, self.dv)]

    def x_mesh(self, phase: bool = False) -> list:
        """Spatial coordinates as three sparse arrays (0.0 on inactive axes).

        With ``phase=True`` the arrays broadcast against ``phase_shape``.
        """
        ndim = self.spatial_dims + (self.velocity_dims if phase else 0)
        out = []
        for k in range(3):
            if k < self.spatial_dims:
                shape = [1] * ndim
                shape[k] = self.x_points[k]
                out.append(self.x_axes()[k].reshape(shape))
            else:
                out.append(0.0)
        return out

    def v_mesh(self) -> list:
        """Velocity coordinates as three sparse arrays against ``phase_shape``."""
        ndim = self.spatial_dims + self.velocity_dims
        out = []
        for k in range(3):
            if k < self.velocity_dims:
                shape = [1] * ndim
                shape[self.spatial_dims + k] = self.v_points[k]
                out.append(self.v_axes()[k].reshape(shape))
            else:
                out.append(0.0)
        return out

    def to_dict(self) -> dict:
        return {
            "x_extents": [list(e) for e in self.x_extents],
            "x_points": list(self.x_points),
            "v_extents": [list(e) for e in self.v_extents],
            "v_points": list(self.v_points),
            "periodic": list(self.periodic),
        }


# ---------------------------------------------------------------------------
# sampling helpers


def _phase_env(grid: PhaseSpaceGrid) -> dict:
    xs, vs = grid.x_mesh(phase=True), grid.v_mesh()
    return {**{f"x{k + 1}": xs[k] for k in range(3)}, **{f"v{k + 1}": vs[k] for k in range(3)}}


def _spatial_env(grid: PhaseSpaceGrid) -> dict:
    xs = grid.x_mesh()
    return {f"x{k + 1}": xs[k] for k in range(3)}


def sample_phase(text: str, grid: PhaseSpaceGrid) -> np.ndarray:
    value = expr.evaluate(text, _phase_env(grid))
    return np.array(np.broadcast_to(value, grid.phase_shape), dtype=float)


def sample_spatial(text: str, grid: PhaseSpaceGrid) -> np.ndarray:
    if expr.names(text) & {"v1", "v2", "v3"}:
        raise expr.ExpressionError(f"spatial field {text!r} may not depend on velocity")
    value = expr.evaluate(text, _spatial_env(grid))
    return np.array(np.broadcast_to(value, grid.x_shape), dtype=float)


def sample_vector(texts: Sequence[str], grid: PhaseSpaceGrid) -> np.ndarray:
    if len(texts) != 3:
        raise expr.ExpressionError("vector fields need exactly three component expressions")
    return np.stack([sample_spatial(t, grid) for t in texts])


# ---------------------------------------------------------------------------
# one-dimensional difference operators


def _take(xp, u, axis, start, stop):
    idx = [slice(None)] * u.ndim
    idx[axis] = slice(start, stop)
    return u[tuple(idx)]


def diff(u, axis: int, spacing: float, periodic: bool):
    """Centred second-order first derivative along ``axis``."""
    xp = _xp(u)
    n = u.shape[axis]
    if n < 4:
        raise GridError(f"axis {axis} has {n} points; at least 4 required")
    if periodic:
        return (xp.roll(u, -1, axis) - xp.roll(u, 1, axis)) / (2.0 * spacing)
    interior = _take(xp, u, axis, 2, n) - _take(xp, u, axis, 0, n - 2)
    first = (-3.0 * _take(xp, u, axis, 0, 1) + 4.0 * _take(xp, u, axis, 1, 2)
             - _take(xp, u, axis, 2, 3))
    last = (3.0 * _take(xp, u, axis, n - 1, n) - 4.0 * _take(xp, u, axis, n - 2, n - 1)
            + _take(xp, u, axis, n - 3, n - 2))
    return xp.concatenate([first, interior, last], axis=axis) / (2.0 * spacing)


def diff_adjoint(u, axis: int, spacing: float, periodic: bool):
    """Transpose of :func:`diff` as a matrix acting along ``axis``."""
    xp = _xp(u)
    n = u.shape[axis]
    if n < 4:
        raise GridError(f"axis {axis} has {n} points; at least 4 required")
    if periodic:
        return -diff(u, axis, spacing, True)
    shape = list(u.shape)
    shape[axis] = 2
    zeros2 = xp.zeros(shape, dtype=u.dtype)
    inner = _take(xp, u, axis, 1, n - 1)
    out = xp.concatenate([zeros2, inner], axis=axis) - xp.concatenate([inner, zeros2], axis=axis)
    shape[axis] = n - 3
    zeros_rest = xp.zeros(shape, dtype=u.dtype)
    u0 = _take(xp, u, axis, 0, 1)
    ul = _take(xp, u, axis, n - 1, n)
    out = out + xp.concatenate([-3.0 * u0, 4.0 * u0, -u0, zeros_rest], axis=axis)
    out = out + xp.concatenate([zeros_rest, ul, -4.0 * ul, 3.0 * ul], axis=axis)
    return out / (2.0 * spacing)


# ---------------------------------------------------------------------------
# phase-space and spatial derivatives


def dx_k(u, k: int, grid: PhaseSpaceGrid, adjoint: bool = False):
    """Derivative along spatial axis ``k``; 0.0 for an inactive axis.

    Works for spatial arrays and for phase-space arrays alike because the
    spatial axes always come first.
    """
    if k >= grid.spatial_dims:
        return 0.0
    op = diff_adjoint if adjoint else diff
    return op(u, k, grid.dx[k], grid.periodic[k])


def dv_k(u, k: int, grid: PhaseSpaceGrid, adjoint: bool = False):
    if k >= grid.velocity_dims:
        return 0.0
    op = diff_adjoint if adjoint else diff
    return op(u, grid.spatial_dims + k, grid.dv[k], False)


def grad_x(u, grid: PhaseSpaceGrid) -> list:
    return [dx_k(u, k, grid) for k in range(3)]


def grad_v(u, grid: PhaseSpaceGrid) -> list:
    return [dv_k(u, k, grid) for k in range(3)]


def _components(field_) -> list:
    if len(field_) != 3:
        raise StateError("vector field must have three components")
    return [field_[i] for i in range(3)]


def divergence(field_, grid: PhaseSpaceGrid):
    """Discrete ``div`` of a spatial vector field, shape ``x_points``."""
    a = _components(field_)
    xp = _xp(a[0])
    out = xp.zeros(grid.x_shape) + 0.0 * a[0]
    for k in range(grid.spatial_dims):
        out = out + dx_k(a[k], k, grid)
    return out


def _curl_with(a: list, d, grid: PhaseSpaceGrid):
    xp = _xp(a[0])
    zero = xp.zeros(grid.x_shape)
    c0 = d(a[2], 1) - d(a[1], 2)
    c1 = d(a[0], 2) - d(a[2], 0)
    c2 = d(a[1], 0) - d(a[0], 1)
    return xp.stack([zero + c0, zero + c1, zero + c2])


def curl(field_, grid: PhaseSpaceGrid):
    a = _components(field_)
    return _curl_with(a, lambda u, k: dx_k(u, k, grid), grid)


def curl_adjoint(field_, grid: PhaseSpaceGrid):
    """Matrix transpose of :func:`curl` (equal to ``curl`` on periodic grids)."""
    a = _components(field_)
    return _curl_with(a, lambda u, k: -dx_k(u, k, grid, adjoint=True), grid)


def divergence_adjoint_x(flux: list, grid: PhaseSpaceGrid):
    """Summation-by-parts divergence ``-sum_k D_k^T flux_k`` over spatial axes."""
    out = 0.0
    for k in range(grid.spatial_dims):
        if not np.isscalar(flux[k]):
            out = out - dx_k(flux[k], k, grid, adjoint=True)
    return out


def divergence_adjoint_v(flux: list, grid: PhaseSpaceGrid):
    out = 0.0
    for k in range(grid.velocity_dims):
        if not np.isscalar(flux[k]):
            out = out - dv_k(flux[k], k, grid, adjoint=True)
    return out


def velocity_integral(u, grid: PhaseSpaceGrid):
    axes = tuple(range(grid.spatial_dims, grid.spatial_dims + grid.velocity_dims))
    return _xp(u).sum(u, axis=axes) * grid.v_cell_volume


def spatial_integral(u, grid: PhaseSpaceGrid):
    return _xp(u).sum(u) * grid.x_cell_volume


def phase_integral(u, grid: PhaseSpaceGrid):
    return _xp(u).sum(u) * grid.cell_volume


# ---------------------------------------------------------------------------
# states


def _readonly(a) -> np.ndarray:
    out = np.asarray(a, dtype=float).view()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class FieldState:
    E: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        E, B = _readonly(self.E), _readonly(self.B)
        if E.shape != B.shape or E.ndim < 2 or E.shape[0] != 3:
            raise StateError(f"E and B must both have shape (3, *x_points); got {E.shape}, {B.shape}")
        if not (np.all(np.isfinite(E)) and np.all(np.isfinite(B))):
            raise StateError("field entries must be finite")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "B", B)


@dataclass(frozen=True)
class DistributionState:
    f: tuple[np.ndarray, ...]
    physical: bool = True

    def __post_init__(self):
        arrays = tuple(_readonly(a) for a in self.f)
        for a in arrays:
            if not np.all(np.isfinite(a)):
                raise StateError("distribution entries must be finite")
            if self.physical and np.any(a < 0):
                raise StateError("physical distributions must be non-negative; "
                                 "pass physical=False for verification states")
        object.__setattr__(self, "f", arrays)

    def __len__(self) -> int:
        return len(self.f)

    def __getitem__(self, s: int) -> np.ndarray:
        return self.f[s]


@dataclass(frozen=True)
class StateTangent:
    """A state-shaped increment (time derivative or perturbation direction).

    ``None`` entries stand for identically zero components.
    """

    f: tuple
    E: object = None
    B: object = None

    def norm(self) -> float:
        parts = [np.asarray(a).ravel() for a in (*self.f, self.E, self.B) if a is not None]
        return float(np.sqrt(sum(np.dot(p, p) for p in parts))) if parts else 0.0

    def scaled(self, alpha: float) -> StateTangent:
        def sc(a):
            return None if a is None else alpha * np.asarray(a)

        return StateTangent(tuple(sc(a) for a in self.f), sc(self.E), sc(self.B))

    def max_abs(self) -> float:
        vals = [float(np.max(np.abs(a))) for a in (*self.f, self.E, self.B) if a is not None]
        return max(vals, default=0.0)


@dataclass(frozen=True)
class SystemState:
    grid: PhaseSpaceGrid
    species: tuple[SpeciesParams, ...]
    f: DistributionState
    fields: FieldState
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        if len(self.species) != len(self.f):
            raise StateError(f"{len(self.species)} species but {len(self.f)} distributions")
        for a in self.f.f:
            if a.shape != self.grid.phase_shape:
                raise StateError(f"distribution shape {a.shape} != grid {self.grid.phase_shape}")
        if self.fields.E.shape != (3,) + self.grid.x_shape:
            raise StateError(f"field shape {self.fields.E.shape} != (3, *{self.grid.x_shape})")
        if not (math.isfinite(self.c) and self.c > 0):
            raise StateError("speed of light must be positive")

    @classmethod
    def build(cls, grid: PhaseSpaceGrid, species: Sequence[SpeciesParams], f: Sequence,
              E=None, B=None, c: float = 1.0, physical: bool = True) -> SystemState:
        zero = np.zeros((3,) + grid.x_shape)
        return cls(grid, tuple(species), DistributionState(tuple(f), physical),
                   FieldState(zero if E is None else E, zero if B is None else B), c)

    @property
    def E(self) -> np.ndarray:
        return self.fields.E

    @property
    def B(self) -> np.ndarray:
        return self.fields.B

    @property
    def physical(self) -> bool:
        return self.f.physical

    def with_fields(self, E=None, B=None) -> SystemState:
        return replace(self, fields=FieldState(self.E if E is None else E, self.B if B is None else B))

    def with_species(self, species: Sequence[SpeciesParams]) -> SystemState:
        return replace(self, species=tuple(species))

    def displaced(self, direction: StateTangent, h: float) -> SystemState:
        """``state + h * direction``; the result is flagged as a verification state."""
        f = tuple(a if d is None else a + h * np.asarray(d) for a, d in zip(self.f.f, direction.f))
        E = self.E if direction.E is None else self.E + h * np.asarray(direction.E)
        B = self.B if direction.B is None else self.B + h * np.asarray(direction.B)
        return replace(self, f=DistributionState(f, physical=False), fields=FieldState(E, B))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.f.f] + [self.E.ravel(), self.B.ravel()])

    def from_vector(self, y: np.ndarray) -> SystemState:
        n_f = math.prod(self.grid.phase_shape)
        n_x = 3 * math.prod(self.grid.x_shape)
        f = []
        offset = 0
        for _ in self.species:
            f.append(y[offset:offset + n_f].reshape(self.grid.phase_shape))
            offset += n_f
        E = y[offset:offset + n_x].reshape((3,) + self.grid.x_shape)
        B = y[offset + n_x:offset + 2 * n_x].reshape((3,) + self.grid.x_shape)
        return replace(self, f=DistributionState(tuple(f), physical=False), fields=FieldState(E, B))

    def norm(self) -> float:
        return float(np.linalg.norm(self.to_vector()))


def tangent_to_vector(t: StateTangent, state: SystemState) -> np.ndarray:
    parts = []
    for a in t.f:
        parts.append(np.zeros(math.prod(state.grid.phase_shape)) if a is None else np.ravel(a))
    for a in (t.E, t.B):
        parts.append(np.zeros(3 * math.prod(state.grid.x_shape)) if a is None else np.ravel(a))
    return np.concatenate(parts)


@dataclass(frozen=True)
class Moments:
    rho: np.ndarray
    j_e: np.ndarray
    rho_m: np.ndarray
    j_m: np.ndarray = field(repr=False)


def moments(state: SystemState) -> Moments:
    """Electric and magnetic charge and current densities by midpoint quadrature."""
    grid = state.grid
    vs = grid.v_mesh()
    rho = np.zeros(grid.x_shape)
    rho_m = np.zeros(grid.x_shape)
    j_e = np.zeros((3,) + grid.x_shape)
    j_m = np.zeros((3,) + grid.x_shape)
    for sp, f in zip(state.species, state.f.f):
        if sp.electric_charge == 0 and sp.magnetic_charge == 0:
            continue
        n = velocity_integral(f, grid)
        flux = np.stack([velocity_integral(f * vs[k], grid) if k < grid.velocity_dims
                         else np.zeros(grid.x_shape) for k in range(3)])
        rho += sp.electric_charge * n
        rho_m += sp.magnetic_charge * n
        j_e += sp.electric_charge * flux
        j_m += sp.magnetic_charge * flux
    return Moments(rho, j_e, rho_m, j_m)
