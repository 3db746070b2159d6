"""Experiment configuration documents (JSON) and their validation.

Each command has a dataclass section; unknown keys anywhere are rejected
with a message naming the offending path.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import MISSING, asdict, dataclass, field, fields
from fractions import Fraction

import numpy as np

from . import functionals as fn
from .brackets.kinds import BracketKind
from .polyalg import PolyVec3
from .state import PhaseSpaceGrid, SpeciesParams, SystemState, curl, sample_phase, sample_vector

COMMANDS = ("verify-jacobi", "simulate", "duality", "casimir")


class ConfigError(ValueError):
    pass


def _make(cls, d, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object, got {type(d).__name__}")
    names = {f.name for f in fields(cls)}
    extra = sorted(set(d) - names)
    if extra:
        raise ConfigError(f"{where}: unknown keys {extra}")
    missing = [f.name for f in fields(cls)
               if f.default is MISSING and f.default_factory is MISSING and f.name not in d]
    if missing:
        raise ConfigError(f"{where}: missing keys {missing}")
    try:
        return cls(**d)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _positive(value, name: str, where: str) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool) \
            or not math.isfinite(value) or value <= 0:
        raise ConfigError(f"{where}: {name} must be a positive number, got {value!r}")


# ---------------------------------------------------------------------------
# grid states


@dataclass
class GridConfig:
    x_extents: list
    x_points: list
    v_extents: list
    v_points: list
    periodic: list | None = None

    def build(self) -> PhaseSpaceGrid:
        return PhaseSpaceGrid(tuple(map(tuple, self.x_extents)), tuple(self.x_points),
                              tuple(map(tuple, self.v_extents)), tuple(self.v_points),
                              None if self.periodic is None else tuple(self.periodic))


@dataclass
class SpeciesConfig:
    mass: float
    electric_charge: float = 0.0
    magnetic_charge: float = 0.0
    label: str = ""

    def __post_init__(self):
        _positive(self.mass, "mass", f"species {self.label!r}")

    def build(self) -> SpeciesParams:
        return SpeciesParams(float(self.mass), float(self.electric_charge),
                             float(self.magnetic_charge), self.label)


@dataclass
class StateConfig:
    """Grid state from expressions.

    ``B_potential`` (three expressions) sets ``B`` to the discrete curl of
    that potential, which is divergence-free to round-off.
    """

    grid: dict
    species: list
    f: list
    E: list | None = None
    B: list | None = None
    B_potential: list | None = None
    c: float = 1.0
    physical: bool = True

    def __post_init__(self):
        self.grid_cfg = _make(GridConfig, self.grid, "state.grid")
        self.species_cfg = [_make(SpeciesConfig, s, f"state.species[{i}]")
                            for i, s in enumerate(self.species)]
        if len(self.f) != len(self.species):
            raise ConfigError("state: need one distribution expression per species")
        if self.B is not None and self.B_potential is not None:
            raise ConfigError("state: give B or B_potential, not both")
        _positive(self.c, "c", "state")

    def build(self, points: int | None = None) -> SystemState:
        g = self.grid_cfg
        if points is not None:
            g = GridConfig(g.x_extents, [points] * len(g.x_points), g.v_extents,
                           [points] * len(g.v_points), g.periodic)
        grid = g.build()
        f = [sample_phase(t, grid) for t in self.f]
        E = sample_vector(self.E, grid) if self.E else None
        if self.B_potential:
            B = curl(sample_vector(self.B_potential, grid), grid)
        else:
            B = sample_vector(self.B, grid) if self.B else None
        return SystemState.build(grid, [s.build() for s in self.species_cfg], f, E, B,
                                 c=float(self.c), physical=self.physical)


# ---------------------------------------------------------------------------
# verify-jacobi


@dataclass
class JacobiGridConfig:
    state: dict
    functionals: list
    kind: str = "VlasovMaxwell"
    h: float = 1e-4
    refine: list | None = None
    refine_h: bool = True
    tolerance: float = 1e-3
    min_order: float = 1.8
    route: str = "auto"
    expect_zero_closed_form: bool = False
    reference_B: list | None = None

    def __post_init__(self):
        self.state_cfg = _make(StateConfig, self.state, "grid.state")
        if self.expect_zero_closed_form and self.reference_B is None:
            raise ConfigError("grid: expect_zero_closed_form needs reference_B (a divergent B "
                              "that sets the discrepancy envelope)")
        if self.reference_B is not None:
            ref = {k: v for k, v in self.state.items() if k != "B_potential"}
            self.reference_cfg = _make(StateConfig, dict(ref, B=self.reference_B),
                                       "grid.reference")
        try:
            self.kind_enum = BracketKind(self.kind)
            self.specs = [fn.from_dict(d) for d in self.functionals]
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from None
        if len(self.specs) != 3:
            raise ConfigError("grid: need exactly three functionals")
        _positive(self.h, "h", "grid")
        if self.refine is not None and (len(self.refine) < 2 or any(int(n) < 4 for n in self.refine)):
            raise ConfigError("grid: refine needs at least two resolutions of >= 4 points")
        if self.route not in ("auto", "bracket", "assembled"):
            raise ConfigError(f"grid: unknown route {self.route!r}")


@dataclass
class JacobiExactConfig:
    mode: str = "random"
    trials: int = 120
    particle_counts: list = field(default_factory=lambda: [1, 2])
    degree: int = 3
    field_degree: int = 2
    n_terms: int = 4
    particles: list | None = None
    c: str = "1"
    E: list | None = None
    B: list | None = None
    functionals: list | None = None

    def __post_init__(self):
        if self.mode not in ("random", "vanishing", "explicit"):
            raise ConfigError(f"exact: unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ConfigError("exact: trials must be >= 1")
        if self.mode == "explicit":
            if not self.particles or not self.functionals or len(self.functionals) != 3:
                raise ConfigError("exact: explicit mode needs particles and three functionals")
            for i, p in enumerate(self.particles):
                if Fraction(str(p.get("mass", 0))) <= 0:
                    raise ConfigError(f"exact.particles[{i}]: mass must be positive")
        if Fraction(str(self.c)) <= 0:
            raise ConfigError("exact: c must be positive")

    def build_system(self):
        from .brackets.exact import FIELD_VARS, Particle, ParticleSystem
        from .expr import to_polynomial

        def vec(texts):
            if texts is None:
                return PolyVec3.zero(FIELD_VARS)
            if len(texts) != 3:
                raise ConfigError("exact: fields need three component expressions")
            return PolyVec3(*(to_polynomial(t, FIELD_VARS) for t in texts))

        parts = []
        for i, p in enumerate(self.particles):
            extra = set(p) - {"label", "mass", "electric_charge", "magnetic_charge"}
            if extra:
                raise ConfigError(f"exact.particles[{i}]: unknown keys {sorted(extra)}")
            parts.append(Particle(p["label"], Fraction(str(p["mass"])),
                                  Fraction(str(p.get("electric_charge", 0))),
                                  Fraction(str(p.get("magnetic_charge", 0)))))
        system = ParticleSystem(tuple(parts), vec(self.E), vec(self.B), Fraction(str(self.c)))
        obs = [to_polynomial(t, system.variables) for t in self.functionals]
        return system, obs


@dataclass
class VerifyJacobiConfig:
    tier: str = "exact"
    exact: dict | None = None
    grid: dict | None = None
    mollified: dict | None = None

    def __post_init__(self):
        if self.tier not in ("exact", "grid"):
            raise ConfigError(f"tier must be 'exact' or 'grid', got {self.tier!r}")
        self.exact_cfg = _make(JacobiExactConfig, self.exact or {}, "exact")
        self.grid_cfg = _make(JacobiGridConfig, self.grid, "grid") if self.grid else None
        if self.mollified is not None:
            from .brackets.mollified import MollifiedConfig

            d = dict(self.mollified)
            for k in ("sigmas", "offset"):
                if k in d:
                    d[k] = tuple(d[k])
            self.mollified_cfg = _make(MollifiedConfig, d, "mollified")
        else:
            self.mollified_cfg = None
        if self.tier == "grid" and self.grid_cfg is None and self.mollified_cfg is None:
            raise ConfigError("grid tier needs a 'grid' (or 'mollified') section")


# ---------------------------------------------------------------------------
# simulate / duality / casimir


SIMULATIONS = ("radial_passthrough", "perturbed_aim", "gyration", "free_streaming",
               "eom_oracle", "field")


@dataclass
class SimulateConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    state: dict | None = None
    kind: str = "VlasovMaxwellMonopole"
    evolution: dict | None = None
    tolerance: float | None = None

    def __post_init__(self):
        if self.experiment not in SIMULATIONS:
            raise ConfigError(f"simulate: unknown experiment {self.experiment!r}; "
                              f"choose from {list(SIMULATIONS)}")
        if self.experiment in ("radial_passthrough", "perturbed_aim"):
            from .dynamics.particles import PassthroughConfig

            p = dict(self.params)
            extra = {k: p.pop(k) for k in ("impact", "halvings") if k in p}
            for k in ("X_e", "V_e", "X_m"):
                if k in p:
                    p[k] = tuple(p[k])
            self.passthrough = _make(PassthroughConfig, p, "simulate.params")
            for name in ("m_e", "m_m", "c"):
                _positive(getattr(self.passthrough, name), name, "simulate.params")
            self.extra = extra
        if self.experiment == "field":
            if self.state is None or self.evolution is None:
                raise ConfigError("simulate: field experiment needs 'state' and 'evolution'")
            from .dynamics.field import EvolutionConfig

            self.state_cfg = _make(StateConfig, self.state, "simulate.state")
            self.evolution_cfg = _make(EvolutionConfig, self.evolution, "simulate.evolution")
            try:
                self.kind_enum = BracketKind(self.kind)
            except ValueError as exc:
                raise ConfigError(f"simulate: {exc}") from None


@dataclass
class DualityConfig:
    species: list
    xi: float | None = None
    state: dict | None = None
    tolerance: float = 1e-14

    def __post_init__(self):
        if not self.species:
            raise ConfigError("duality: species list is empty")
        self.charges = []
        for i, s in enumerate(self.species):
            if not (isinstance(s, (list, tuple)) and len(s) == 2):
                raise ConfigError(f"duality.species[{i}]: expected [e, g]")
            self.charges.append(tuple(_charge(q) for q in s))
        self.state_cfg = _make(StateConfig, self.state, "duality.state") if self.state else None


def _charge(q):
    if isinstance(q, str):
        try:
            return Fraction(q)
        except ValueError:
            raise ConfigError(f"bad charge {q!r}") from None
    if isinstance(q, bool) or not isinstance(q, (int, float)):
        raise ConfigError(f"bad charge {q!r}")
    return q


@dataclass
class CasimirConfig:
    mode: str = "drift"
    monopole: bool = False
    dt: float = 0.05
    steps: int = 20
    halvings: int = 2
    h_E: str = "1 + 0.5*cos(x1)"
    h_B: str = "1 + 0.5*sin(x1)"
    h_sweep: list = field(default_factory=lambda: ["1", "cos(x1)", "1 + 2*cos(x1)"])
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.mode not in ("drift", "h_sweep"):
            raise ConfigError(f"casimir: unknown mode {self.mode!r}")
        _positive(self.dt, "dt", "casimir")
        if self.steps < 1 or self.halvings < 1:
            raise ConfigError("casimir: steps and halvings must be >= 1")


SECTIONS = {
    "verify-jacobi": ("verify_jacobi", VerifyJacobiConfig),
    "simulate": ("simulate", SimulateConfig),
    "duality": ("duality", DualityConfig),
    "casimir": ("casimir", CasimirConfig),
}


@dataclass
class ExperimentConfig:
    command: str
    seed: int
    section: object
    raw: dict

    @property
    def hash(self) -> str:
        text = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def parse_config(doc: dict, command: str | None = None) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    cmd = doc.get("command", command)
    if cmd not in SECTIONS:
        raise ConfigError(f"unknown command {cmd!r}; choose from {list(SECTIONS)}")
    if command is not None and cmd != command:
        raise ConfigError(f"config is for {cmd!r}, not {command!r}")
    key, cls = SECTIONS[cmd]
    allowed = {"command", "seed", "description", key}
    extra = sorted(set(doc) - allowed)
    if extra:
        raise ConfigError(f"unknown top-level keys {extra}")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    section = _make(cls, doc.get(key, {}), key)
    raw = dict(doc, command=cmd, seed=seed)
    return ExperimentConfig(cmd, seed, section, raw)


def jsonable(obj):
    """Recursively convert numpy scalars/arrays, Fractions and dataclasses."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return jsonable(obj.item())
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if hasattr(obj, "__dataclass_fields__"):
        return jsonable(asdict(obj))
    return obj
