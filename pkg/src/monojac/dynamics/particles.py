"""Electron and magnetic monopole in prescribed fields, and the radial
pass-through experiment."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np

from .integrate import NonFiniteStateError, integrate, observed_order

FieldFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ParticleParams:
    m_e: float = 1.0
    m_m: float = 1.0
    e: float = 1.0
    g: float = 1.0
    c: float = 1.0
    relativistic: bool = False

    def __post_init__(self):
        for name in ("m_e", "m_m", "c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class ParticleState:
    """Positions and velocities of one electron and one monopole.

    In relativistic mode the ``V`` entries are momenta per unit mass.
    """

    X_e: np.ndarray
    V_e: np.ndarray
    X_m: np.ndarray
    V_m: np.ndarray
    params: ParticleParams = field(default_factory=ParticleParams)

    def __post_init__(self):
        for name in ("X_e", "V_e", "X_m", "V_m"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            object.__setattr__(self, name, a)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.X_e, self.V_e, self.X_m, self.V_m])

    def from_vector(self, y: np.ndarray) -> ParticleState:
        return replace(self, X_e=y[0:3], V_e=y[3:6], X_m=y[6:9], V_m=y[9:12])


@dataclass(frozen=True)
class PrescribedFields:
    """External fields plus, optionally, the Coulomb-like fields of each
    particle acting on the other.

    ``guard``: below this separation the mutual fields are set to zero, the
    radial-limit value of the transverse force.
    """

    E_ext: FieldFn | None = None
    B_ext: FieldFn | None = None
    mutual: bool = True
    guard: float = 1e-9
    fixed_monopole: bool = True


def point_field(charge: float, source: np.ndarray, at: np.ndarray, guard: float) -> np.ndarray:
    """``q r_hat / r^2`` from a point charge; zero inside the guard radius."""
    r = np.asarray(at, float) - np.asarray(source, float)
    d = float(np.linalg.norm(r))
    if d < guard or charge == 0:
        return np.zeros(3)
    return charge * r / d**3


def _gamma(u: np.ndarray, p: ParticleParams) -> float:
    return math.sqrt(1.0 + float(u @ u) / p.c**2) if p.relativistic else 1.0


def fields_at(ps: ParticleState, fields: PrescribedFields):
    """``(E, B)`` at the electron and at the monopole."""
    p = ps.params
    zero = np.zeros(3)
    Ee = fields.E_ext(ps.X_e) if fields.E_ext else zero
    Be = fields.B_ext(ps.X_e) if fields.B_ext else zero
    Em = fields.E_ext(ps.X_m) if fields.E_ext else zero
    Bm = fields.B_ext(ps.X_m) if fields.B_ext else zero
    if fields.mutual:
        Be = Be + point_field(p.g, ps.X_m, ps.X_e, fields.guard)
        Em = Em + point_field(p.e, ps.X_e, ps.X_m, fields.guard)
    return np.asarray(Ee, float), np.asarray(Be, float), np.asarray(Em, float), np.asarray(Bm, float)


def forces(ps: ParticleState, fields: PrescribedFields):
    """``e (E + v x B / c)`` on the electron, ``g (B - v x E / c)`` on the monopole."""
    p = ps.params
    Ee, Be, Em, Bm = fields_at(ps, fields)
    ve = ps.V_e / _gamma(ps.V_e, p)
    vm = ps.V_m / _gamma(ps.V_m, p)
    Fe = p.e * (Ee + np.cross(ve, Be) / p.c)
    Fm = p.g * (Bm - np.cross(vm, Em) / p.c)
    return Fe, Fm


def eom_rhs_particles(ps: ParticleState, fields: PrescribedFields) -> ParticleState:
    p = ps.params
    Fe, Fm = forces(ps, fields)
    dXe = ps.V_e / _gamma(ps.V_e, p)
    dXm = ps.V_m / _gamma(ps.V_m, p)
    dVe = Fe / p.m_e
    dVm = Fm / p.m_m
    if fields.fixed_monopole:
        dXm = np.zeros(3)
        dVm = np.zeros(3)
    return ParticleState(dXe, dVe, dXm, dVm, p)


def simulate_particles(ps: ParticleState, fields: PrescribedFields, dt: float, steps: int,
                       decimate: int = 1):
    """RK4 trajectory; monitors: electron speed, transverse speed, force."""
    def rhs(y):
        return eom_rhs_particles(ps.from_vector(y), fields).to_vector()

    v0 = ps.V_e.copy()
    axis = v0 / np.linalg.norm(v0) if np.any(v0) else np.zeros(3)

    def transverse(y):
        v = y[3:6]
        return float(np.linalg.norm(v - (v @ axis) * axis))

    monitors = {
        "speed_e": lambda y: float(np.linalg.norm(y[3:6])),
        "transverse_speed_e": transverse,
        "force_e": lambda y: float(np.linalg.norm(forces(ps.from_vector(y), fields)[0])),
        "separation": lambda y: float(np.linalg.norm(y[0:3] - y[6:9])),
    }
    return integrate(rhs, ps.to_vector(), dt, steps, monitors, decimate)


def monopole_field(g: float, at=(0.0, 0.0, 0.0), guard: float = 1e-9) -> FieldFn:
    src = np.asarray(at, float)
    return lambda x: point_field(g, src, x, guard)


def uniform_field(vec) -> FieldFn:
    v = np.asarray(vec, float)
    return lambda x: v.copy()


# ---------------------------------------------------------------------------
# experiments


@dataclass
class PassthroughConfig:
    X_e: tuple = (1.0, 0.0, 0.0)
    V_e: tuple = (-1.0, 0.0, 0.0)
    X_m: tuple = (0.0, 0.0, 0.0)
    e: float = 1.0
    g: float = 1.0
    m_e: float = 1.0
    m_m: float = 1.0
    c: float = 1.0
    dt: float = 0.01
    steps: int = 200
    guard: float = 1e-9
    relativistic: bool = False

    def __post_init__(self):
        if not self.dt > 0 or self.steps < 1:
            raise ValueError("dt must be positive and steps >= 1")
        if self.guard < 0:
            raise ValueError("guard must be non-negative")


def _initial(cfg: PassthroughConfig) -> ParticleState:
    params = ParticleParams(cfg.m_e, cfg.m_m, cfg.e, cfg.g, cfg.c, cfg.relativistic)
    return ParticleState(cfg.X_e, cfg.V_e, cfg.X_m, (0.0, 0.0, 0.0), params)


def radial_passthrough_experiment(cfg: PassthroughConfig) -> dict:
    """Electron fired at a fixed monopole; reports transverse velocity, force
    and closest approach."""
    ps = _initial(cfg)
    fields = PrescribedFields(mutual=True, guard=cfg.guard, fixed_monopole=True)
    try:
        traj = simulate_particles(ps, fields, cfg.dt, cfg.steps)
    except NonFiniteStateError as exc:
        return {"aborted": str(exc), "step": exc.step}
    sep = traj.monitors["separation"]
    i = int(np.argmin(sep))
    x0 = np.asarray(cfg.X_e) - np.asarray(cfg.X_m)
    v0 = np.asarray(cfg.V_e, float)
    crossed = bool(np.dot(traj.final[0:3] - np.asarray(cfg.X_m), x0) < 0)
    speed = traj.monitors["speed_e"]
    return {
        "max_transverse_velocity": float(np.max(traj.monitors["transverse_speed_e"])),
        "max_force": float(np.max(traj.monitors["force_e"])),
        "closest_approach": float(sep[i]),
        "closest_approach_time": float(i * cfg.dt),
        "crossed_monopole": crossed,
        "speed_drift": float(np.max(np.abs(speed - np.linalg.norm(v0)))),
        "final_velocity": traj.final[3:6].tolist(),
        "final_position": traj.final[0:3].tolist(),
        "aborted": None,
    }


def perturbed_aim_study(cfg: PassthroughConfig, impact: float = 0.3, halvings: int = 2) -> dict:
    """Offset the electron by ``impact`` transverse to its velocity and
    measure deflection and speed conservation under dt-halving."""
    v = np.asarray(cfg.V_e, float)
    perp = np.cross(v, [0.0, 0.0, 1.0])
    if np.linalg.norm(perp) < 1e-12:
        perp = np.cross(v, [0.0, 1.0, 0.0])
    perp /= np.linalg.norm(perp)
    X = tuple(np.asarray(cfg.X_e) + impact * perp)
    dts, drifts, deflections = [], [], []
    for i in range(halvings + 1):
        run = replace(cfg, X_e=X, dt=cfg.dt / 2**i, steps=cfg.steps * 2**i)
        ps = _initial(run)
        traj = simulate_particles(ps, PrescribedFields(guard=run.guard), run.dt, run.steps,
                                  decimate=run.steps)
        speed = traj.monitors["speed_e"]
        dts.append(run.dt)
        drifts.append(float(np.max(np.abs(speed - np.linalg.norm(v)))))
        vf = traj.final[3:6]
        cosang = float(vf @ v / (np.linalg.norm(vf) * np.linalg.norm(v)))
        deflections.append(math.acos(max(-1.0, min(1.0, cosang))))
    return {
        "impact_parameter": impact,
        "dt": dts,
        "speed_drift": drifts,
        "deflection_angle": deflections,
        "speed_drift_order": observed_order(drifts, dts),
    }


def gyration_study(b: float = 1.0, v_perp: float = 1.0, periods: float = 2.0, dt: float = 0.05,
                   halvings: int = 2, m: float = 1.0, e: float = 1.0, c: float = 1.0) -> dict:
    """Electron in uniform ``B = (0, 0, b)``: energy drift and phase error
    under dt-halving."""
    omega = e * b / (m * c)
    T = 2 * math.pi / abs(omega)
    dts, e_drift, pos_err = [], [], []
    for i in range(halvings + 1):
        h = dt / 2**i
        steps = int(round(periods * T / h))
        ps = ParticleState((0.0, 0.0, 0.0), (v_perp, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0),
                           ParticleParams(m, 1.0, e, 0.0, c))
        fields = PrescribedFields(B_ext=uniform_field((0.0, 0.0, b)), mutual=False)
        traj = simulate_particles(ps, fields, h, steps, decimate=steps)
        t = steps * h
        speed = traj.monitors["speed_e"]
        e_drift.append(float(np.max(np.abs(0.5 * m * speed**2 - 0.5 * m * v_perp**2))))
        # exact orbit: centre at (0, -r sign) with r = v/omega
        r = v_perp / omega
        exact = np.array([r * math.sin(omega * t), r * (math.cos(omega * t) - 1.0), 0.0])
        pos_err.append(float(np.linalg.norm(traj.final[0:3] - exact)))
        dts.append(h)
    return {
        "dt": dts,
        "energy_drift": e_drift,
        "position_error": pos_err,
        "energy_drift_order": observed_order(e_drift, dts),
        "position_error_order": observed_order(pos_err, dts),
    }
