"""Grid tier: the Vlasov-Maxwell brackets (with and without magnetic charge).

Every bracket term is a midpoint sum over the phase-space or spatial grid,
with the signs and coefficients of the continuum bracket:

* canonical ``(1/m) f (grad_x a . grad_v b - grad_x b . grad_v a)``
* rotation ``(1/(m^2 c)) f (e B - g E) . (grad_v a x grad_v b)``
* coupling ``(4 pi e/m) f (G_E . grad_v a - F_E . grad_v b)`` and the
  magnetic analogue with ``g``, ``F_B``, ``G_B``
* field ``4 pi c (F_E . curl G_B - G_E . curl F_B)``

The bracket is linear in the gradient of its first argument, so the
Hamiltonian vector field of ``H`` is the transpose of ``a -> {F_a, H}``;
:func:`hamiltonian_flow` obtains it by reverse-mode differentiation of
:func:`bracket_gradients` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import functionals as fn
from ..state import (
    StateTangent,
    SystemState,
    _xp,
    curl,
    curl_adjoint,
    divergence,
    dv_k,
    dx_k,
    grad_v,
    velocity_integral,
)
from .kinds import BracketError, BracketKind

FOUR_PI = 4.0 * math.pi


def check_kind(kind: BracketKind, state: SystemState) -> BracketKind:
    kind = BracketKind(kind)
    if not kind.is_field_theory:
        raise BracketError(f"{kind.value} is a particle bracket; use the exact tier")
    if kind is BracketKind.VLASOV_MAXWELL:
        charged = [sp.label or i for i, sp in enumerate(state.species) if sp.magnetic_charge != 0]
        if charged:
            raise BracketError(f"VlasovMaxwell bracket cannot carry magnetic charge (species {charged})")
    return kind


def _on_phase(component, grid):
    """Reshape a spatial array so it broadcasts over the velocity axes."""
    if np.isscalar(component):
        return component
    return component.reshape(component.shape + (1,) * grid.velocity_dims)


def _rotation_field(kind, sp, state):
    """``e B - g E`` (``e B`` for the monopole-free bracket)."""
    K = sp.electric_charge * state.B
    if kind is BracketKind.VLASOV_MAXWELL_MONOPOLE and sp.magnetic_charge:
        K = K - sp.magnetic_charge * state.E
    return K


def bracket_gradients(kind: BracketKind, Fg: fn.FunctionalGradient, Gg: fn.FunctionalGradient,
                      state: SystemState):
    """Bracket value from the two functional gradients.

    Kept free of in-place updates so it can be traced by jax.
    """
    grid = state.grid
    monopole = kind is BracketKind.VLASOV_MAXWELL_MONOPOLE
    total = 0.0
    for s, sp in enumerate(state.species):
        a, b = Fg.f[s], Gg.f[s]
        f = state.f[s]
        m = sp.mass
        acc = 0.0
        da = grad_v(a, grid) if a is not None else None
        db = grad_v(b, grid) if b is not None else None
        if a is not None and b is not None:
            canon = 0.0
            for k in range(3):
                if k < grid.spatial_dims and k < grid.velocity_dims:
                    canon = canon + dx_k(a, k, grid) * db[k] - dx_k(b, k, grid) * da[k]
            acc = acc + canon / m
            K = _rotation_field(kind, sp, state)
            if np.any(K):
                cr = _cross(da, db)
                rot = sum(_on_phase(K[i], grid) * cr[i] for i in range(3) if not np.isscalar(cr[i]))
                acc = acc + rot / (m * m * state.c)
        couple = 0.0
        if sp.electric_charge:
            couple = couple + sp.electric_charge * _coupling(Gg.E, da, Fg.E, db, grid)
        if monopole and sp.magnetic_charge:
            couple = couple + sp.magnetic_charge * _coupling(Gg.B, da, Fg.B, db, grid)
        acc = acc + FOUR_PI * couple / m
        if not np.isscalar(acc):
            total = total + _xp(acc).sum(f * acc) * grid.cell_volume
    field_term = 0.0
    if Fg.E is not None and Gg.B is not None:
        field_term = field_term + _xp(Fg.E).sum(Fg.E * curl(Gg.B, grid))
    if Gg.E is not None and Fg.B is not None:
        field_term = field_term - _xp(Gg.E).sum(Gg.E * curl(Fg.B, grid))
    total = total + FOUR_PI * state.c * field_term * grid.x_cell_volume
    return total


def _cross(p, q):
    return [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]]


def _coupling(GE, da, FE, db, grid):
    """``G_E . grad_v a - F_E . grad_v b`` (phase-space array or 0.0)."""
    out = 0.0
    for k in range(grid.velocity_dims):
        if GE is not None and da is not None:
            out = out + _on_phase(GE[k], grid) * da[k]
        if FE is not None and db is not None:
            out = out - _on_phase(FE[k], grid) * db[k]
    return out


def bracket_field(kind: BracketKind, F, G, state: SystemState) -> float:
    """``{F, G}`` for functional specs (or derived handles) on a grid state."""
    kind = check_kind(kind, state)
    return float(bracket_gradients(kind, _gradient(F, state), _gradient(G, state), state))


def _gradient(F, state: SystemState) -> fn.FunctionalGradient:
    if isinstance(F, fn.FunctionalGradient):
        return F
    if isinstance(F, DerivedFunctional):
        raise BracketError("a derived bracket has no closed-form gradient; "
                           "use derived_gradient_fd or jacobi_direct_grid")
    return fn.gradient(F, state)


# ---------------------------------------------------------------------------
# Hamiltonian vector fields generated from the bracket


def hamiltonian_flow(kind: BracketKind, H, state: SystemState) -> StateTangent:
    """``d(state)/dt = {state, H}`` obtained as the transpose of the bracket.

    Each output entry is ``{point evaluation, H}``: the derivative of
    ``bracket_gradients(., grad H)`` with respect to the first gradient,
    divided by the quadrature weight of that entry.
    """
    import jax

    jax.config.update("jax_enable_x64", True)
    kind = check_kind(kind, state)
    grid = state.grid
    Hg = _gradient(H, state)
    n = len(state.species)

    def pair(fs, E, B):
        return bracket_gradients(kind, fn.FunctionalGradient(tuple(fs), E, B), Hg, state)

    zf = [np.zeros(grid.phase_shape) for _ in range(n)]
    zx = np.zeros((3,) + grid.x_shape)
    _, vjp = jax.vjp(pair, zf, zx, zx)
    gf, gE, gB = vjp(1.0)
    f = tuple(np.asarray(g) / grid.cell_volume for g in gf)
    return StateTangent(f, np.asarray(gE) / grid.x_cell_volume, np.asarray(gB) / grid.x_cell_volume)


def hamiltonian_flow_assembled(kind: BracketKind, H, state: SystemState) -> StateTangent:
    """Same vector field written out term by term with transposed stencils.

    Serves as the memory-light path for large grids and as a second route
    to :func:`hamiltonian_flow`.
    """
    kind = check_kind(kind, state)
    grid = state.grid
    Hg = _gradient(H, state)
    monopole = kind is BracketKind.VLASOV_MAXWELL_MONOPOLE
    out_f = []
    dE = np.zeros((3,) + grid.x_shape)
    dB = np.zeros((3,) + grid.x_shape)
    for s, sp in enumerate(state.species):
        h = Hg.f[s]
        f = state.f[s]
        m = sp.mass
        rate = np.zeros(grid.phase_shape)
        if h is not None:
            dh = grad_v(h, grid)
            for k in range(min(grid.spatial_dims, grid.velocity_dims)):
                rate += dx_k(f * dh[k], k, grid, adjoint=True) / m
                rate -= dv_k(f * dx_k(h, k, grid), k, grid, adjoint=True) / m
            K = _rotation_field(kind, sp, state)
            if np.any(K):
                Kp = [_on_phase(K[i], grid) for i in range(3)]
                # K . (da x dh) = da . (dh x K)
                w = _cross(dh, Kp)
                for k in range(grid.velocity_dims):
                    rate += dv_k(f * w[k], k, grid, adjoint=True) / (m * m * state.c)
            for k in range(grid.velocity_dims):
                j = velocity_integral(f * dh[k], grid)
                dE[k] -= FOUR_PI * sp.electric_charge / m * j
                if monopole:
                    dB[k] -= FOUR_PI * sp.magnetic_charge / m * j
        for k in range(grid.velocity_dims):
            src = 0.0
            if Hg.E is not None and sp.electric_charge:
                src = src + sp.electric_charge * _on_phase(Hg.E[k], grid)
            if monopole and Hg.B is not None and sp.magnetic_charge:
                src = src + sp.magnetic_charge * _on_phase(Hg.B[k], grid)
            if not np.isscalar(src):
                rate += FOUR_PI / m * dv_k(f * src, k, grid, adjoint=True)
        out_f.append(rate)
    if Hg.B is not None:
        dE += FOUR_PI * state.c * curl(Hg.B, grid)
    if Hg.E is not None:
        dB -= FOUR_PI * state.c * curl_adjoint(Hg.E, grid)
    return StateTangent(tuple(out_f), dE, dB)


# ---------------------------------------------------------------------------
# derived functionals {F, G}


@dataclass(frozen=True)
class DerivedFunctional:
    """Handle for ``{F, G}`` viewed as a functional of the state."""

    kind: BracketKind
    F: object
    G: object

    def evaluate(self, state: SystemState) -> float:
        return bracket_field(self.kind, self.F, self.G, state)

    def describe(self) -> str:
        return f"{{{_describe(self.F)}, {_describe(self.G)}}}"


def _describe(F) -> str:
    return F.describe() if hasattr(F, "describe") else repr(F)


def bracket_as_functional(kind: BracketKind, F, G) -> DerivedFunctional:
    return DerivedFunctional(BracketKind(kind), F, G)


def _value(F, state: SystemState) -> float:
    if isinstance(F, DerivedFunctional):
        return F.evaluate(state)
    return fn.evaluate(F, state)


def second_gradient_fd(handle, state: SystemState, directions, h: float) -> list[float]:
    """Centred directional derivatives of a (derived) functional.

    ``h`` is the step along each direction as given; callers normalise the
    directions. Returns one derivative per direction.
    """
    if not h > 0 or not math.isfinite(h):
        raise BracketError("finite-difference step must be positive and finite")
    out = []
    for d in directions:
        plus = _value(handle, state.displaced(d, h))
        minus = _value(handle, state.displaced(d, -h))
        val = (plus - minus) / (2.0 * h)
        if not math.isfinite(val):
            raise BracketError("non-finite result under perturbation")
        out.append(val)
    return out


def derived_gradient_fd(handle, state: SystemState, h: float) -> fn.FunctionalGradient:
    """Full gradient of a derived functional by centred differences along
    every grid basis direction. Cost grows with the square of the grid size;
    intended for small verification grids."""
    grid = state.grid
    n = len(state.species)
    fgrads = []
    for s in range(n):
        g = np.zeros(grid.phase_shape)
        for idx in np.ndindex(*grid.phase_shape):
            e = np.zeros(grid.phase_shape)
            e[idx] = 1.0
            f = [None] * n
            f[s] = e
            g[idx] = second_gradient_fd(handle, state, [StateTangent(tuple(f))], h)[0]
        fgrads.append(g / grid.cell_volume)
    out = {}
    for name in ("E", "B"):
        g = np.zeros((3,) + grid.x_shape)
        for idx in np.ndindex(*g.shape):
            e = np.zeros(g.shape)
            e[idx] = 1.0
            d = StateTangent((None,) * n, e if name == "E" else None, e if name == "B" else None)
            g[idx] = second_gradient_fd(handle, state, [d], h)[0]
        out[name] = g / grid.x_cell_volume
    return fn.FunctionalGradient(tuple(fgrads), out["E"], out["B"])


# ---------------------------------------------------------------------------
# closed forms for the Jacobi residual


def triple_product_density(a, b, h, grid):
    """``grad_v a . (grad_v b x grad_v h)`` on the phase grid."""
    db, dh = grad_v(b, grid), grad_v(h, grid)
    cr = _cross(db, dh)
    del db, dh
    out = 0.0
    for k in range(grid.velocity_dims):
        if not np.isscalar(cr[k]):
            out = out + dv_k(a, k, grid) * cr[k]
    return out


def closed_form_components(kind: BracketKind, F, G, H, state: SystemState) -> dict:
    """Closed-form Jacobi residual for phase-weight functionals, by parts.

    ``single_species``: ``sum_s (1/(m_s^3 c)) int f_s (e_s div B - g_s div E)
    grad_v F . (grad_v G x grad_v H)``; ``interspecies``: the field-mediated
    term that couples two species whose charge ratios differ; ``printed``:
    the single-species integral with the prefactor ``1/m_s^2`` and no ``1/c``
    (or no prefactor at all for the monopole-free bracket), kept for
    comparison.
    """
    kind = check_kind(kind, state)
    grid = state.grid
    grads = [_gradient(X, state) for X in (F, G, H)]
    for g in grads:
        if g.E is not None or g.B is not None:
            raise BracketError("closed-form residual is implemented for phase-weight functionals")
    divB = divergence(state.B, grid)
    divE = divergence(state.E, grid)
    monopole = kind is BracketKind.VLASOV_MAXWELL_MONOPOLE
    single = printed = 0.0
    for s, sp in enumerate(state.species):
        a, b, h = (g.f[s] for g in grads)
        if a is None or b is None or h is None:
            continue
        source = sp.electric_charge * divB
        if monopole:
            source = source - sp.magnetic_charge * divE
        if not np.any(source):
            continue
        integral = float(np.sum(state.f[s] * _on_phase(source, grid)
                                * triple_product_density(a, b, h, grid))) * grid.cell_volume
        single += integral / (sp.mass**3 * state.c)
        if monopole:
            printed += integral / sp.mass**2
        else:
            printed += integral / sp.electric_charge
    inter = 0.0
    if monopole:
        for P, Q, R in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            inter += _interspecies(grads[P], grads[Q], grads[R], state)
    return {"single_species": single, "interspecies": inter, "printed": printed}


def _interspecies(Pg, Qg, Rg, state) -> float:
    grid = state.grid
    total = 0.0
    for s, sp in enumerate(state.species):
        p, q = Pg.f[s], Qg.f[s]
        if p is None or q is None:
            continue
        cr = _cross(grad_v(p, grid), grad_v(q, grid))
        W = [velocity_integral(state.f[s] * cr[k], grid) if not np.isscalar(cr[k]) else 0.0
             for k in range(3)]
        for t, tp in enumerate(state.species):
            r = Rg.f[t]
            if r is None or t == s:
                continue
            coeff = tp.magnetic_charge * sp.electric_charge - tp.electric_charge * sp.magnetic_charge
            if coeff == 0:
                continue
            dr = grad_v(r, grid)
            U = [velocity_integral(state.f[t] * dr[k], grid) if not np.isscalar(dr[k]) else 0.0
                 for k in range(3)]
            dot = sum(np.sum(W[k] * U[k]) for k in range(3)) * grid.x_cell_volume
            total += -FOUR_PI * coeff / (tp.mass * sp.mass**2 * state.c) * float(dot)
    return total


# ---------------------------------------------------------------------------
# Jacobi residuals

# above this many phase-space cells the flow is assembled instead of traced
_TRACE_LIMIT = 2_000_000


def _flow(kind, R, state, route: str) -> StateTangent:
    if route == "auto":
        route = "bracket" if np.prod(state.grid.phase_shape) <= _TRACE_LIMIT else "assembled"
    if route == "bracket":
        return hamiltonian_flow(kind, R, state)
    if route == "assembled":
        return hamiltonian_flow_assembled(kind, R, state)
    raise BracketError(f"unknown flow route {route!r}")


def jacobi_direct_terms(kind: BracketKind, F, G, H, state: SystemState, h: float = 1e-4,
                        route: str = "auto") -> dict:
    """The three nested brackets ``{{F,G},H}``, ``{{G,H},F}``, ``{{H,F},G}``.

    ``{{P,Q},R}`` is the derivative of the derived functional ``{P,Q}``
    along the Hamiltonian vector field of ``R``, taken by centred
    differences with step ``h * |state| / |X_R|`` and repeated at half the
    step for a Richardson estimate.
    """
    kind = check_kind(kind, state)
    scale = state.norm()
    terms, halves, steps = [], [], []
    for P, Q, R in ((F, G, H), (G, H, F), (H, F, G)):
        X = _flow(kind, R, state, route)
        xnorm = X.norm()
        if xnorm == 0:
            terms.append(0.0)
            halves.append(0.0)
            steps.append(0.0)
            continue
        eps = h * (scale if scale > 0 else 1.0) / xnorm
        if not eps > 0 or not math.isfinite(eps):
            raise BracketError("finite-difference step underflowed")
        handle = bracket_as_functional(kind, P, Q)
        d1 = second_gradient_fd(handle, state, [X], eps)[0]
        d2 = second_gradient_fd(handle, state, [X], eps / 2)[0]
        terms.append(d1)
        halves.append(d2)
        steps.append(eps)
    direct = sum(terms)
    richardson = sum((4 * b - a) / 3 for a, b in zip(terms, halves))
    return {"terms": terms, "direct": direct, "half_step_direct": sum(halves),
            "richardson": richardson, "steps": steps}


def jacobi_direct_grid(kind: BracketKind, F, G, H, state: SystemState, h: float = 1e-4,
                       route: str = "auto") -> float:
    return jacobi_direct_terms(kind, F, G, H, state, h, route)["direct"]


def jacobi_closed_form_grid(kind: BracketKind, F, G, H, state: SystemState) -> float:
    parts = closed_form_components(kind, F, G, H, state)
    return parts["single_species"] + parts["interspecies"]


def jacobi_report_grid(kind: BracketKind, F, G, H, state: SystemState, h: float = 1e-4,
                       route: str = "auto", description: str = ""):
    from .report import JacobiReport

    kind = check_kind(kind, state)
    direct = jacobi_direct_terms(kind, F, G, H, state, h, route)
    parts = closed_form_components(kind, F, G, H, state)
    closed = parts["single_species"] + parts["interspecies"]
    meta = {
        "state": description,
        "grid": state.grid.to_dict(),
        "species": [{"label": sp.label, "mass": sp.mass, "electric_charge": sp.electric_charge,
                     "magnetic_charge": sp.magnetic_charge} for sp in state.species],
        "c": state.c,
        "functionals": [_describe(X) for X in (F, G, H)],
        "h_relative": h,
        "fd_steps": direct["steps"],
    }
    components = {
        "nested_terms": direct["terms"],
        "half_step_direct": direct["half_step_direct"],
        "richardson_direct": direct["richardson"],
        "closed_form_single_species": parts["single_species"],
        "closed_form_interspecies": parts["interspecies"],
        "closed_form_printed_prefactor": parts["printed"],
    }
    return JacobiReport("grid", kind.value, direct["direct"], closed, direct["direct"] - closed,
                        components, meta)
