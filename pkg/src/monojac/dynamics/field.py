"""Vlasov-Maxwell time evolution generated from the bracket, a hand-coded
counterpart, Casimir monitors and the field-theory experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import functionals as fn
from ..brackets.grid import check_kind, hamiltonian_flow, hamiltonian_flow_assembled
from ..brackets.kinds import BracketKind
from ..state import (
    StateTangent,
    SystemState,
    curl,
    curl_adjoint,
    divergence,
    dv_k,
    dx_k,
    sample_spatial,
    spatial_integral,
    tangent_to_vector,
    velocity_integral,
)
from .integrate import integrate, observed_order

FOUR_PI = 4.0 * math.pi


def eom_rhs_field(kind: BracketKind, state: SystemState, relativistic: bool = False,
                  route: str = "assembled") -> StateTangent:
    """``d(state)/dt = {state, H}`` from the bracket with the Hamiltonian."""
    H = fn.hamiltonian(relativistic)
    if route == "bracket":
        return hamiltonian_flow(kind, H, state)
    return hamiltonian_flow_assembled(kind, H, state)


def vlasov_maxwell_rhs_hand(state: SystemState, relativistic: bool = False,
                            monopole: bool = True) -> StateTangent:
    """Transport in conservative form plus Maxwell with moment sources.

    ``df/dt = -div_x*(u f) - div_v*(a f)`` with the summation-by-parts
    divergence ``div* = -sum D^T``, ``u`` the particle velocity and
    ``a = (e/m)(E + u x B/c) + (g/m)(B - u x E/c)``; then
    ``dE/dt = c curl B - 4 pi j_e`` and ``dB/dt = -c curl E - 4 pi j_m``
    (with the transposed curl, as required for a skew field block).
    """
    grid = state.grid
    c = state.c
    E, B = state.E, state.B
    nv = grid.velocity_dims
    ns = min(grid.spatial_dims, nv)
    dE = c * curl(B, grid)
    dB = -c * curl_adjoint(E, grid)
    rates = []
    for sp, f in zip(state.species, state.f.f):
        m, e = sp.mass, sp.electric_charge
        g = sp.magnetic_charge if monopole else 0.0
        w = fn.kinetic_weight(grid, m, c, relativistic)
        u = [dv_k(w, k, grid) / m if k < nv else 0.0 for k in range(3)]
        Ep = [E[k].reshape(E[k].shape + (1,) * nv) for k in range(3)]
        Bp = [B[k].reshape(B[k].shape + (1,) * nv) for k in range(3)]
        uxB = [u[1] * Bp[2] - u[2] * Bp[1], u[2] * Bp[0] - u[0] * Bp[2], u[0] * Bp[1] - u[1] * Bp[0]]
        uxE = [u[1] * Ep[2] - u[2] * Ep[1], u[2] * Ep[0] - u[0] * Ep[2], u[0] * Ep[1] - u[1] * Ep[0]]
        a = [(e * (Ep[k] + uxB[k] / c) + g * (Bp[k] - uxE[k] / c)) / m for k in range(3)]
        rate = np.zeros(grid.phase_shape)
        for k in range(ns):
            rate += dx_k(u[k] * f, k, grid, adjoint=True)
        for k in range(nv):
            rate += dv_k(a[k] * f, k, grid, adjoint=True)
        rates.append(rate)
        for k in range(nv):
            j = velocity_integral(f * u[k], grid)
            dE[k] -= FOUR_PI * e * j
            dB[k] -= FOUR_PI * g * j
    return StateTangent(tuple(rates), dE, dB)


def relative_difference(a: StateTangent, b: StateTangent, state: SystemState) -> float:
    """Max-norm difference relative to the max-norm of ``a``."""
    va, vb = tangent_to_vector(a, state), tangent_to_vector(b, state)
    scale = np.max(np.abs(va))
    return float(np.max(np.abs(va - vb)) / scale) if scale > 0 else float(np.max(np.abs(vb)))


# ---------------------------------------------------------------------------
# Casimirs


CASIMIRS = ("C_E", "C_B", "C_B_sourced")


def casimir(which: str, state: SystemState, h_test) -> float:
    """``C_E = int h (div E - 4 pi rho)``; ``C_B = int h div B`` (no source);
    ``C_B_sourced = int h (div B - 4 pi rho_m)``.

    ``h_test`` is an expression string over ``x1..x3`` or a spatial array.
    """
    grid = state.grid
    h = sample_spatial(h_test, grid) if isinstance(h_test, str) else np.asarray(h_test, float)
    if h.shape != grid.x_shape:
        raise ValueError(f"h_test shape {h.shape} != spatial grid {grid.x_shape}")
    if which == "C_E":
        target, charge = state.E, "electric_charge"
    elif which in ("C_B", "C_B_sourced"):
        target, charge = state.B, "magnetic_charge"
    else:
        raise ValueError(f"unknown Casimir {which!r}; choose from {CASIMIRS}")
    density = divergence(target, grid)
    if which != "C_B":
        for sp, f in zip(state.species, state.f.f):
            q = getattr(sp, charge)
            if q:
                density = density - FOUR_PI * q * velocity_integral(f, grid)
    return float(spatial_integral(h * density, grid))


@dataclass
class EvolutionConfig:
    dt: float
    steps: int
    integrator: str = "rk4"
    monitors: list = field(default_factory=lambda: ["energy", "C_E", "C_B"])
    h_E: str = "1"
    h_B: str = "1"
    decimate: int = 1
    relativistic: bool = False

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.integrator != "rk4":
            raise ValueError(f"unknown integrator {self.integrator!r}; only 'rk4' is provided")
        if not math.isfinite(self.dt * self.steps):
            raise ValueError("dt * steps must be finite")
        if self.decimate < 1:
            raise ValueError("decimate must be >= 1")
        for m in self.monitors:
            if isinstance(m, str) and m not in ("energy",) + CASIMIRS:
                raise ValueError(f"unknown monitor {m!r}")


def _monitor(name, state: SystemState, cfg: EvolutionConfig):
    if not isinstance(name, str):
        return lambda y: fn.evaluate(name, state.from_vector(y))
    if name == "energy":
        H = fn.hamiltonian(cfg.relativistic)
        return lambda y: fn.evaluate(H, state.from_vector(y))
    h = cfg.h_E if name == "C_E" else cfg.h_B
    return lambda y: casimir(name, state.from_vector(y), h)


def evolve(kind: BracketKind, state: SystemState, cfg: EvolutionConfig, route: str = "assembled"):
    """Integrate the bracket-generated equations; returns a :class:`Trajectory`."""
    kind = check_kind(kind, state)

    def rhs(y):
        return tangent_to_vector(eom_rhs_field(kind, state.from_vector(y), cfg.relativistic, route),
                                 state)

    monitors = {(m if isinstance(m, str) else m.describe()): _monitor(m, state, cfg)
                for m in cfg.monitors}
    return integrate(rhs, state.to_vector(), cfg.dt, cfg.steps, monitors, cfg.decimate)


def drift(series: np.ndarray) -> float:
    return float(np.max(np.abs(series - series[0])))


def drift_study(kind: BracketKind, state: SystemState, cfg: EvolutionConfig,
                names=("energy", "C_E", "C_B"), halvings: int = 2) -> dict:
    """Monitor drift for ``dt, dt/2, ...`` over the same final time.

    Returns per monitor the drifts, ``K = drift / (dt^4 t)`` for each run and
    the fitted drift order.
    """
    t_end = cfg.dt * cfg.steps
    out = {name: {"dt": [], "drift": [], "K": []} for name in names}
    for i in range(halvings + 1):
        dt = cfg.dt / 2**i
        run_cfg = EvolutionConfig(dt, cfg.steps * 2**i, monitors=list(names), h_E=cfg.h_E,
                                  h_B=cfg.h_B, decimate=cfg.steps * 2**i,
                                  relativistic=cfg.relativistic)
        traj = evolve(kind, state, run_cfg)
        for name in names:
            d = drift(traj.monitors[name])
            out[name]["dt"].append(dt)
            out[name]["drift"].append(d)
            out[name]["K"].append(d / (dt**4 * t_end) if t_end > 0 else 0.0)
    for name in names:
        out[name]["order"] = observed_order(out[name]["drift"], out[name]["dt"])
        out[name]["scale"] = float(np.max(np.abs([m for m in out[name]["drift"]])))
    out["t_end"] = t_end
    return out


# ---------------------------------------------------------------------------
# initial data and experiments


def solve_gauss(rho: np.ndarray, grid) -> np.ndarray:
    """``E = D phi`` with the discrete ``div D phi = 4 pi rho`` on a fully
    periodic grid, solved mode by mode with the symbol of the centred stencil.

    Modes the stencil cannot see (mean, Nyquist) are left out; ``rho`` should
    have no content there.
    """
    if not all(grid.periodic):
        raise ValueError("solve_gauss needs a fully periodic spatial grid")
    nd = grid.spatial_dims
    rhat = np.fft.fftn(FOUR_PI * rho)
    symbols = []
    for k in range(nd):
        n, d = grid.x_points[k], grid.dx[k]
        s = 1j * np.sin(2 * np.pi * np.fft.fftfreq(n)) / d
        shape = [1] * nd
        shape[k] = n
        symbols.append(s.reshape(shape))
    lap = sum(s * s for s in symbols)
    with np.errstate(divide="ignore", invalid="ignore"):
        phat = np.where(np.abs(lap) > 1e-12, rhat / lap, 0.0)
    E = np.zeros((3,) + grid.x_shape)
    for k in range(nd):
        E[k] = np.real(np.fft.ifftn(symbols[k] * phat))
    return E


def maxwellian(grid, drift=(0.0, 0.0, 0.0), vth: float = 1.0) -> np.ndarray:
    vs = grid.v_mesh()
    expo = sum((v - u) ** 2 for v, u in zip(vs, drift) if not np.isscalar(v))
    return np.exp(-expo / (2 * vth**2)) / (2 * np.pi * vth**2) ** (grid.velocity_dims / 2)


def free_streaming_experiment(points=(16, 32, 64), v_points: int = 8, t_end: float = 0.5,
                              dt: float = 0.01, amplitude: float = 0.2) -> dict:
    """Neutral species, no fields: ``f(x, v, t) = f0(x - v t, v)``. Reports the
    L2 error at ``t_end`` for each spatial resolution and the fitted order."""
    from ..state import PhaseSpaceGrid, SpeciesParams

    errors, dxs = [], []
    for n in points:
        grid = PhaseSpaceGrid(((0.0, 2 * np.pi),), (n,), ((-2.0, 2.0),), (v_points,), (True,))
        x = grid.x_mesh(phase=True)[0]
        v = grid.v_mesh()[0]
        f0 = (1.0 + amplitude * np.sin(x)) * np.exp(-v**2)
        state = SystemState.build(grid, [SpeciesParams(1.0, 0.0, 0.0)], [f0])
        steps = int(round(t_end / dt))
        traj = evolve(BracketKind.VLASOV_MAXWELL, state,
                      EvolutionConfig(dt, steps, monitors=[], decimate=steps))
        f = state.from_vector(traj.final).f[0]
        exact = (1.0 + amplitude * np.sin(x - v * steps * dt)) * np.exp(-v**2)
        errors.append(float(np.sqrt(np.sum((f - exact) ** 2) * grid.cell_volume)))
        dxs.append(grid.dx[0])
    return {"points": list(points), "dx": dxs, "l2_error": errors,
            "order": observed_order(errors, dxs)}


def casimir_state(monopole: bool = False, n: int = 16, v_points: int = 8, c: float = 1.0,
                  amplitude: float = 0.1) -> SystemState:
    """Two species on a periodic 1D-3V grid with Gauss-consistent fields.

    Electrons and ions carry different density ripples and drifts. With
    ``monopole=True`` both also carry magnetic charge (``g = -0.7`` and
    ``+0.7``), and ``B`` satisfies the sourced constraint.
    """
    from ..state import PhaseSpaceGrid, SpeciesParams

    grid = PhaseSpaceGrid(((0.0, 2 * np.pi),), (n,), ((-4.0, 4.0),) * 3, (v_points,) * 3, (True,))
    x = grid.x_mesh(phase=True)[0]
    fe = (1.0 + amplitude * np.cos(x)) * maxwellian(grid, (0.3, 0.0, 0.0))
    fi = (1.0 + 0.5 * amplitude * np.sin(x)) * maxwellian(grid, (-0.2, 0.1, 0.0), 0.8)
    ne = velocity_integral(fe, grid)
    ni = velocity_integral(fi, grid)
    # neutralise the means so both Gauss constraints are solvable on a periodic grid
    fi = fi * (np.mean(ne) / np.mean(ni))
    g = 0.7 if monopole else 0.0
    species = [SpeciesParams(1.0, -1.0, -g, "electron"), SpeciesParams(5.0, 1.0, g, "ion")]
    rho = velocity_integral(fi, grid) - ne
    E = solve_gauss(rho, grid)
    B = np.zeros((3,) + grid.x_shape)
    B[2] = 0.5
    B[1] = 0.2 * np.cos(grid.x_mesh()[0])
    B = B + solve_gauss(g * rho, grid)
    return SystemState.build(grid, species, [fe, fi], E, B, c=c)


def casimir_experiment(monopole: bool = False, dt: float = 0.05, steps: int = 20,
                       halvings: int = 2, h_E: str = "1 + 0.5*cos(x1)",
                       h_B: str = "1 + 0.5*sin(x1)") -> dict:
    """Drift of energy and the Casimirs under dt-halving on Gauss-consistent data."""
    state = casimir_state(monopole)
    kind = BracketKind.VLASOV_MAXWELL_MONOPOLE if monopole else BracketKind.VLASOV_MAXWELL
    names = ["energy", "C_E", "C_B"] + (["C_B_sourced"] if monopole else [])
    cfg = EvolutionConfig(dt, steps, monitors=names, h_E=h_E, h_B=h_B)
    study = drift_study(kind, state, cfg, names, halvings)
    study["initial"] = {name: (casimir(name, state, h_B if "B" in name else h_E)
                               if name != "energy" else fn.evaluate(fn.hamiltonian(), state))
                        for name in names}
    study["kind"] = kind.value
    return study
