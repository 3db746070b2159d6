import numpy as np
import pytest

from monojac import functionals as fn
from monojac.state import StateTangent

from conftest import small_state

SPECS = [
    fn.PhaseWeight(0, "v1*v2 + sin(x1)*v3^2"),
    fn.PhaseWeight(1, "exp(-v1^2)*cos(x2)"),
    fn.FieldProbe("E", ("sin(x1)", "x2", "1")),
    fn.FieldProbe("B", ("0", "cos(x3)", "x1*x2")),
    fn.KineticEnergy(),
    fn.KineticEnergy(relativistic=True),
    fn.FieldEnergy(),
    fn.hamiltonian(),
]


def random_direction(rng, state):
    return StateTangent(tuple(rng.normal(size=f.shape) for f in state.f.f),
                        rng.normal(size=state.E.shape), rng.normal(size=state.B.shape))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.describe()[:30])
def test_gradient_matches_centred_difference(rng, spec):
    state = small_state(rng)
    check = fn.fd_check(spec, state, random_direction(rng, state), 1e-4)
    assert check.rel_error < 1e-7


def test_linear_and_quadratic_functionals_are_exact(rng):
    state = small_state(rng)
    d = random_direction(rng, state)
    for spec in (SPECS[0], SPECS[2], fn.FieldEnergy()):
        assert fn.fd_check(spec, state, d, 0.5).rel_error < 1e-12


def test_sum_is_linear(rng):
    state = small_state(rng)
    s = fn.Sum((SPECS[0], SPECS[2]), (2.0, -3.0))
    want = 2 * fn.evaluate(SPECS[0], state) - 3 * fn.evaluate(SPECS[2], state)
    assert fn.evaluate(s, state) == pytest.approx(want, rel=1e-14)


def test_relativistic_energy_reduces_to_newtonian_at_large_c(rng):
    # the rest energy is already subtracted
    state = small_state(rng, c=1e4)
    rel = fn.evaluate(fn.KineticEnergy(True), state)
    new = fn.evaluate(fn.KineticEnergy(False), state)
    assert rel == pytest.approx(new, rel=1e-7)
    assert rel < new


def test_field_energy_value():
    from monojac.state import PhaseSpaceGrid, SpeciesParams, SystemState

    grid = PhaseSpaceGrid(((0.0, 2.0),), (4,), ((-1.0, 1.0),), (4,))
    E = np.zeros((3, 4))
    E[0] = 3.0
    state = SystemState.build(grid, [SpeciesParams(1.0)], [np.zeros((4, 4))], E)
    assert fn.evaluate(fn.FieldEnergy(), state) == pytest.approx(9.0 * 2.0 / (8 * np.pi))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.describe()[:30])
def test_json_round_trip(rng, spec):
    state = small_state(rng)
    back = fn.from_dict(fn.to_dict(spec))
    assert fn.evaluate(back, state) == fn.evaluate(spec, state)


@pytest.mark.parametrize("bad", [
    {"type": "phase_weight", "species": 0},
    {"type": "nope"},
    {"type": "field_energy", "extra": 1},
    {"type": "field_probe", "target": "C", "weight": ["0", "0", "0"]},
])
def test_bad_specs_rejected(bad):
    with pytest.raises((fn.FunctionalError, KeyError)):
        fn.from_dict(bad)


def test_species_index_checked(rng):
    state = small_state(rng)
    with pytest.raises(fn.FunctionalError):
        fn.evaluate(fn.PhaseWeight(5, "1"), state)
