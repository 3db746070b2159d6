"""Duality rotation of fields and charges.

``E' = E cos xi + B sin xi``, ``B' = -E sin xi + B cos xi`` and the same for
``(e, g)``. When every charged species has the same ratio ``g/e`` one angle
removes all magnetic charge.
"""

from __future__ import annotations

import math
from dataclasses import replace
from fractions import Fraction
from numbers import Rational

import numpy as np

from .state import SpeciesParams, SystemState, divergence

RATIO_RTOL = 1e-12
SNAP_RTOL = 1e-14


class DualityError(ValueError):
    pass


def rotate_pair(a, b, xi: float):
    c, s = math.cos(xi), math.sin(xi)
    return a * c + b * s, -a * s + b * c


def rotate(obj, xi: float):
    """Rotate a :class:`SystemState`, species, particle parameters or an
    ``(e, g)`` pair by ``xi``."""
    from .dynamics.particles import ParticleParams

    if isinstance(obj, SystemState):
        E, B = rotate_pair(obj.E, obj.B, xi)
        return replace(obj.with_fields(E, B), species=tuple(rotate(sp, xi) for sp in obj.species))
    if isinstance(obj, SpeciesParams):
        e, g = rotate_pair(obj.electric_charge, obj.magnetic_charge, xi)
        return replace(obj, electric_charge=float(e), magnetic_charge=float(g))
    if isinstance(obj, ParticleParams):
        e, g = rotate_pair(obj.e, obj.g, xi)
        return replace(obj, e=float(e), g=float(g))
    if isinstance(obj, (list, tuple)) and all(isinstance(s, SpeciesParams) for s in obj):
        return type(obj)(rotate(s, xi) for s in obj)
    if isinstance(obj, tuple) and len(obj) == 2:
        return rotate_pair(float(obj[0]), float(obj[1]), xi)
    raise DualityError(f"cannot rotate {type(obj).__name__}")


def _charges(species) -> list[tuple]:
    out = []
    for sp in species:
        if isinstance(sp, SpeciesParams):
            out.append((sp.electric_charge, sp.magnetic_charge))
        else:
            e, g = sp
            out.append((e, g))
    return out


def _angle(e, g) -> float:
    return math.atan2(float(g), float(e)) % math.pi


def uniform_ratio_angle(species) -> float | None:
    """Angle ``xi`` that removes every magnetic charge, or ``None`` when the
    charged species do not share one ratio ``g/e``.

    Exact rationals are compared by cross-multiplication; floats by angle
    ``atan2(g, e) mod pi`` with relative tolerance ``1e-12``. Neutral species
    are ignored; an all-neutral list raises :class:`DualityError`.
    """
    pairs = [(e, g) for e, g in _charges(species) if e != 0 or g != 0]
    if not pairs:
        raise DualityError("no charged species: the duality angle is undefined")
    e0, g0 = pairs[0]
    exact = all(isinstance(q, (int, Rational)) and not isinstance(q, bool)
                for pair in pairs for q in pair)
    if exact:
        if any(Fraction(e) * Fraction(g0) != Fraction(e0) * Fraction(g) for e, g in pairs):
            return None
    else:
        ref = _angle(e0, g0)
        for e, g in pairs[1:]:
            d = abs(_angle(e, g) - ref)
            d = min(d, math.pi - d)
            if d > RATIO_RTOL * max(1.0, ref):
                return None
    return _angle(e0, g0)


def remove_magnetic_charge(state: SystemState) -> tuple[SystemState, float]:
    """Rotate a uniform-ratio state so that every ``g'`` vanishes.

    Residual magnetic charges below ``1e-14`` of the largest charge are set
    to exactly zero.
    """
    xi = uniform_ratio_angle(state.species)
    if xi is None:
        raise DualityError("species do not share a common g/e ratio")
    rotated = rotate(state, xi)
    qmax = max(max(abs(sp.electric_charge), abs(sp.magnetic_charge)) for sp in state.species)
    species = tuple(replace(sp, magnetic_charge=0.0)
                    if abs(sp.magnetic_charge) <= SNAP_RTOL * qmax else sp
                    for sp in rotated.species)
    return replace(rotated, species=species), xi


def duality_report(state: SystemState, xi: float | None = None) -> dict:
    """Angle, rotated charges and divergence norms before and after."""
    uniform = uniform_ratio_angle(state.species)
    if xi is None:
        if uniform is None:
            raise DualityError("species do not share a common g/e ratio; give an explicit angle")
        rotated, xi = remove_magnetic_charge(state)
    else:
        rotated = rotate(state, xi)
    g = state.grid

    def norms(s):
        return {"div_E_max": float(np.max(np.abs(divergence(s.E, g)))),
                "div_B_max": float(np.max(np.abs(divergence(s.B, g))))}

    return {
        "xi": xi,
        "uniform_ratio": uniform is not None,
        "charges_before": [[sp.electric_charge, sp.magnetic_charge] for sp in state.species],
        "charges_after": [[sp.electric_charge, sp.magnetic_charge] for sp in rotated.species],
        "before": norms(state),
        "after": norms(rotated),
    }
