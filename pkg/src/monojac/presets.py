"""Named experiment configurations, one per acceptance scenario."""

from __future__ import annotations

import copy

TWO_PI = "6.283185307179586"

_F_GAUSS = "exp(-(v1^2+v2^2+v3^2)/2)*(1 + 0.5*cos(x1) + 0.3*cos(x2+x3))"

# weights: linear in v plus 0.1-sized nonlinear, position-dependent parts
_WEIGHTS = (
    "v1 + 0.1*sin(x1+2*x2-x3)*v2*v3 + 0.1*cos(x2)*v1^2",
    "v2 + 0.1*cos(x1-x3)*v1*v3 + 0.1*sin(x3+x2)*v2^2*v1",
    "v3 + 0.1*sin(x1)*v1*v2 + 0.1*cos(x1+x2+x3)*v3^2",
)


def _periodic_grid(n: int, v: float = 5.0) -> dict:
    return {"x_extents": [[0.0, 2 * 3.141592653589793]] * 3, "x_points": [n] * 3,
            "v_extents": [[-v, v]] * 3, "v_points": [n] * 3, "periodic": [True] * 3}


def _pw(species: int, w: str) -> dict:
    return {"type": "phase_weight", "species": species, "weight": w}


_DIVERGENT_B = ["0.8*sin(x1) + 0.1*cos(x2)", "0.5*sin(x2+x3)", "0.3*sin(x3) + 0.2*cos(x1)"]
_E = ["0.4*sin(x1)", "-0.2*cos(x2)", "0.7*sin(x3+x1)"]

PRESETS: dict[str, dict] = {
    # -- exact tier ------------------------------------------------------
    "jacobi-exact-random": {
        "command": "verify-jacobi",
        "description": "randomized polynomial trials, one and two particles",
        "verify_jacobi": {"tier": "exact", "exact": {"mode": "random", "trials": 120}},
    },
    "jacobi-exact-vanishing": {
        "command": "verify-jacobi",
        "description": "fields with e div B = g div E give zero residual; generic fields do not",
        "verify_jacobi": {"tier": "exact", "exact": {"mode": "vanishing", "trials": 60}},
    },
    "jacobi-exact-hand": {
        "command": "verify-jacobi",
        "description": "B = (x1, x2, x3), F, G, H = Ve1, Ve2, Ve3 with unit mass, charge and c",
        "verify_jacobi": {"tier": "exact", "exact": {
            "mode": "explicit",
            "particles": [{"label": "e", "mass": 1, "electric_charge": 1}],
            "B": ["x1", "x2", "x3"],
            "functionals": ["Ve1", "Ve2", "Ve3"],
        }},
    },
    "jacobi-exact-solenoidal": {
        "command": "verify-jacobi",
        "description": "divergence-free B = (x2, x3, x1): zero residual",
        "verify_jacobi": {"tier": "exact", "exact": {
            "mode": "explicit",
            "particles": [{"label": "e", "mass": 1, "electric_charge": 1}],
            "B": ["x2", "x3", "x1"],
            "functionals": ["Ve1^2*Ve2", "Ve2*Ve3 + Ve1", "Ve3^3"],
        }},
    },
    # -- grid tier -------------------------------------------------------
    "jacobi-grid-divergent": {
        "command": "verify-jacobi",
        "description": "16^3 x 16^3 periodic grid, divergent B, refinement 8-12-16",
        "verify_jacobi": {"tier": "grid", "grid": {
            "kind": "VlasovMaxwell",
            "state": {"grid": _periodic_grid(16),
                      "species": [{"mass": 1.0, "electric_charge": 1.0, "label": "electron"}],
                      "f": [_F_GAUSS], "E": _E, "B": _DIVERGENT_B},
            "functionals": [_pw(0, w) for w in _WEIGHTS],
            "refine": [8, 12, 16],
        }},
    },
    "jacobi-grid-divergent-small": {
        "command": "verify-jacobi",
        "description": "quick version of jacobi-grid-divergent (8^3 x 8^3, refinement 6-8-12)",
        "verify_jacobi": {"tier": "grid", "grid": {
            "kind": "VlasovMaxwell",
            "state": {"grid": _periodic_grid(8),
                      "species": [{"mass": 1.0, "electric_charge": 1.0, "label": "electron"}],
                      "f": [_F_GAUSS], "E": _E, "B": _DIVERGENT_B},
            "functionals": [_pw(0, w) for w in _WEIGHTS],
            "refine": [6, 8, 12],
        }},
    },
    "jacobi-grid-solenoidal": {
        "command": "verify-jacobi",
        "description": "B as the discrete curl of a potential: closed form zero to round-off",
        "verify_jacobi": {"tier": "grid", "grid": {
            "kind": "VlasovMaxwell",
            "state": {"grid": _periodic_grid(16),
                      "species": [{"mass": 1.0, "electric_charge": 1.0, "label": "electron"}],
                      "f": [_F_GAUSS], "E": _E,
                      "B_potential": ["0.3*cos(x2) + 0.2*sin(x3)", "0.5*sin(x1+x3)",
                                      "0.4*cos(x1-x2)"]},
            "functionals": [_pw(0, w) for w in _WEIGHTS],
            "expect_zero_closed_form": True,
            "reference_B": _DIVERGENT_B,
            "refine": [8, 12, 16],
        }},
    },
    "jacobi-grid-monopole": {
        "command": "verify-jacobi",
        "description": "two dyon species with different g/e, m != 1, c != 1",
        "verify_jacobi": {"tier": "grid", "grid": {
            "kind": "VlasovMaxwellMonopole",
            "state": {"grid": _periodic_grid(8),
                      "species": [{"mass": 1.7, "electric_charge": 1.2, "magnetic_charge": 0.6,
                                   "label": "a"},
                                  {"mass": 0.8, "electric_charge": -0.3,
                                   "magnetic_charge": 0.9, "label": "b"}],
                      "f": [_F_GAUSS, "exp(-(v1^2+v2^2+v3^2)/2)*(1 + 0.4*sin(x1+x2))"],
                      "E": ["0.4*sin(x1) + 0.3*cos(x3)", "-0.2*cos(x2)", "0.7*sin(x3+x1)"],
                      "B": _DIVERGENT_B, "c": 1.3},
            "functionals": [
                {"type": "sum", "terms": [_pw(0, _WEIGHTS[0]), _pw(1, "v2 + 0.1*v1*v3")],
                 "coefficients": [1.0, 1.0]},
                {"type": "sum", "terms": [_pw(0, _WEIGHTS[1]), _pw(1, "v3 - 0.1*v1^2")],
                 "coefficients": [1.0, 1.0]},
                {"type": "sum", "terms": [_pw(0, _WEIGHTS[2]), _pw(1, "v1 + 0.1*sin(x2)*v2")],
                 "coefficients": [1.0, 1.0]},
            ],
            "refine": [6, 8, 12],
        }},
    },
    "mollified-delta": {
        "command": "verify-jacobi",
        "description": "Gaussian-mollified electron on a mollified monopole, widths 0.3, 0.2, 0.15",
        "verify_jacobi": {"tier": "grid", "mollified": {"sigmas": [0.3, 0.2, 0.15]}},
    },
    # -- simulations -------------------------------------------------------
    "radial-passthrough": {
        "command": "simulate",
        "description": "electron fired radially through a fixed monopole",
        "simulate": {"experiment": "radial_passthrough", "tolerance": 1e-12,
                     "params": {"X_e": [1.0, 0.0, 0.0], "V_e": [-1.0, 0.0, 0.0],
                                "dt": 0.01, "steps": 200}},
    },
    "perturbed-aim": {
        "command": "simulate",
        "description": "impact parameter 0.3: deflection with conserved speed, dt-halving",
        "simulate": {"experiment": "perturbed_aim",
                     "params": {"impact": 0.3, "halvings": 2, "dt": 0.01, "steps": 200}},
    },
    "gyration-dt-halving": {
        "command": "simulate",
        "description": "uniform B gyration; global error order by dt-halving",
        "simulate": {"experiment": "gyration", "tolerance": 0.3},
    },
    "free-streaming": {
        "command": "simulate",
        "description": "neutral species, no fields, compared with f0(x - v t, v)",
        "simulate": {"experiment": "free_streaming"},
    },
    "eom-oracle": {
        "command": "simulate",
        "description": "bracket-generated RHS against the hand-coded Vlasov-Maxwell RHS",
        "simulate": {"experiment": "eom_oracle", "params": {"states": 50}, "tolerance": 1e-12},
    },
    # -- duality -----------------------------------------------------------
    "duality-shared-ratio": {
        "command": "duality",
        "description": "(e, g) = (1, 2), (2, 4): xi = arctan 2 removes g",
        "duality": {"species": [[1, 2], [2, 4]]},
    },
    "duality-electron-monopole": {
        "command": "duality",
        "description": "electron plus pure monopole: no common ratio",
        "duality": {"species": [[1, 0], [0, 1]]},
    },
    "duality-pure-monopole": {
        "command": "duality",
        "description": "(0, 3) rotates to (3, 0) at xi = pi/2",
        "duality": {"species": [[0, 3]]},
    },
    "duality-grid": {
        "command": "duality",
        "description": "uniform-ratio grid state with e div B = g div E",
        "duality": {"species": [[1.0, 0.5], [-2.0, -1.0]], "state": {
            "grid": _periodic_grid(8, 4.0),
            "species": [{"mass": 1.0, "electric_charge": 1.0, "magnetic_charge": 0.5},
                        {"mass": 3.0, "electric_charge": -2.0, "magnetic_charge": -1.0}],
            "f": [_F_GAUSS, _F_GAUSS],
            "E": ["sin(x1) + 0.3*cos(x2)", "cos(x2+x3)", "0.5*sin(x3)"],
            "B": ["0.5*sin(x1) + 0.15*cos(x2) + 0.2*sin(x2)", "0.5*cos(x2+x3) + 0.3*cos(x3)",
                  "0.25*sin(x3) + 0.4*sin(x1)"],
        }},
    },
    # -- casimirs ----------------------------------------------------------
    "casimir-vlasov-maxwell": {
        "command": "casimir",
        "description": "Gauss-consistent two-species data; C_E, C_B and energy drift",
        "casimir": {"mode": "drift", "monopole": False},
    },
    "casimir-monopole": {
        "command": "casimir",
        "description": "dyonic species: printed C_B drifts, source-subtracted C_B does not",
        "casimir": {"mode": "drift", "monopole": True},
    },
    "casimir-h-sweep": {
        "command": "casimir",
        "description": "C_E is linear in the test function",
        "casimir": {"mode": "h_sweep"},
    },
}


def get_preset(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(name)
    return copy.deepcopy(PRESETS[name])
