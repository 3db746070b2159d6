"""Save and load grid states as a single JSON document.

Layout::

    {
      "format": "monojac-state", "version": 1,
      "grid": {x_extents, x_points, v_extents, v_points, periodic},
      "species": [{mass, electric_charge, magnetic_charge, label}, ...],
      "c": float, "physical": bool,
      "arrays": {
        "f0": {"shape": [...], "dtype": "<f8", "data": base64},
        ..., "E": {...}, "B": {...}
      }
    }

Array data are the raw little-endian float64 bytes in row-major order.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np

from .state import PhaseSpaceGrid, SpeciesParams, SystemState

FORMAT = "monojac-state"


def _encode(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a, dtype="<f8")
    return {"shape": list(a.shape), "dtype": "<f8", "data": base64.b64encode(a.tobytes()).decode()}


def _decode(d: dict) -> np.ndarray:
    if d.get("dtype") != "<f8":
        raise ValueError(f"unsupported dtype {d.get('dtype')!r}")
    raw = base64.b64decode(d["data"])
    return np.frombuffer(raw, dtype="<f8").reshape(d["shape"]).copy()


def state_to_dict(state: SystemState) -> dict:
    arrays = {f"f{i}": _encode(f) for i, f in enumerate(state.f.f)}
    arrays["E"] = _encode(state.E)
    arrays["B"] = _encode(state.B)
    return {
        "format": FORMAT,
        "version": 1,
        "grid": state.grid.to_dict(),
        "species": [{"mass": s.mass, "electric_charge": s.electric_charge,
                     "magnetic_charge": s.magnetic_charge, "label": s.label}
                    for s in state.species],
        "c": state.c,
        "physical": state.physical,
        "arrays": arrays,
    }


def state_from_dict(d: dict) -> SystemState:
    if d.get("format") != FORMAT:
        raise ValueError("not a monojac state document")
    g = d["grid"]
    grid = PhaseSpaceGrid(tuple(map(tuple, g["x_extents"])), tuple(g["x_points"]),
                          tuple(map(tuple, g["v_extents"])), tuple(g["v_points"]),
                          tuple(g["periodic"]))
    species = [SpeciesParams(**s) for s in d["species"]]
    f = [_decode(d["arrays"][f"f{i}"]) for i in range(len(species))]
    return SystemState.build(grid, species, f, _decode(d["arrays"]["E"]), _decode(d["arrays"]["B"]),
                             c=d["c"], physical=d["physical"])


def save_state(state: SystemState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)))


def load_state(path) -> SystemState:
    return state_from_dict(json.loads(Path(path).read_text()))
