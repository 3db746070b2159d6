import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from monojac import functionals as fn
from monojac.brackets.grid import bracket_field
from monojac.brackets.kinds import BracketKind
from monojac.duality import (
    DualityError,
    duality_report,
    remove_magnetic_charge,
    rotate,
    rotate_pair,
    uniform_ratio_angle,
)
from monojac.dynamics.particles import ParticleParams
from monojac.state import SpeciesParams

from conftest import small_state

charges = st.floats(-5, 5).filter(lambda q: abs(q) > 1e-3)


@given(charges, charges, st.floats(-1, 1).filter(lambda k: abs(k) > 1e-3))
def test_uniform_ratio_rotation_removes_magnetic_charge(e, g, k):
    species = [SpeciesParams(1.0, e, g), SpeciesParams(2.0, k * e, k * g)]
    xi = uniform_ratio_angle(species)
    assert xi is not None
    scale = max(abs(e), abs(g))
    for sp in rotate(species, xi):
        assert abs(sp.magnetic_charge) <= 1e-14 * scale


@given(charges, charges, st.floats(0, 2 * math.pi))
def test_rotation_preserves_charge_norm(e, g, xi):
    a, b = rotate_pair(e, g, xi)
    assert math.hypot(a, b) == pytest.approx(math.hypot(e, g), rel=1e-14)
    back = rotate_pair(a, b, -xi)
    assert back == pytest.approx((e, g), abs=1e-12)


def test_exact_rationals_compared_exactly():
    assert uniform_ratio_angle([(Fraction(1), Fraction(2)), (Fraction(3), Fraction(6))]) == \
        pytest.approx(math.atan(2))
    assert uniform_ratio_angle([(Fraction(1), Fraction(2)),
                                (Fraction(3), Fraction(6) + Fraction(1, 10**30))]) is None


def test_named_cases():
    assert uniform_ratio_angle([(1, 0), (0, 1)]) is None
    assert uniform_ratio_angle([(0, 3)]) == pytest.approx(math.pi / 2)
    e, g = rotate_pair(0.0, 3.0, math.pi / 2)
    assert (e, g) == pytest.approx((3.0, 0.0), abs=1e-15)
    # neutral species are ignored
    assert uniform_ratio_angle([(0, 0), (1, 1), (2, 2)]) == pytest.approx(math.pi / 4)
    with pytest.raises(DualityError):
        uniform_ratio_angle([(0, 0)])


def test_field_energy_invariant_and_brackets_coincide(rng):
    species = [SpeciesParams(1.7, 1.0, 0.5), SpeciesParams(0.8, -2.0, -1.0)]
    state = small_state(rng, species=species)
    rotated, xi = remove_magnetic_charge(state)
    assert all(sp.magnetic_charge == 0.0 for sp in rotated.species)
    W0, W1 = fn.evaluate(fn.FieldEnergy(), state), fn.evaluate(fn.FieldEnergy(), rotated)
    assert abs(W1 - W0) <= 1e-14 * W0
    F = fn.Sum((fn.PhaseWeight(0, "v1*v2 + x1*v3"), fn.FieldProbe("B", ("x2", "1", "0"))), (1, 1))
    G = fn.Sum((fn.PhaseWeight(1, "v3^2"), fn.FieldProbe("E", ("0", "x3", "1"))), (1, 1))
    a = bracket_field(BracketKind.VLASOV_MAXWELL_MONOPOLE, F, G, rotated)
    b = bracket_field(BracketKind.VLASOV_MAXWELL, F, G, rotated)
    assert a == b


def test_rotation_by_any_angle_is_a_bracket_symmetry(rng):
    # rotate state and functional weights together: the bracket value is unchanged
    state = small_state(rng)
    xi = 0.7
    aE, aB = np.ones((3,) + state.grid.x_shape), 0.5 * np.ones((3,) + state.grid.x_shape)
    aE[0] *= 2.0
    F = fn.Sum((fn.PhaseWeight(0, "v1*v2"), fn.FieldProbe("E", aE), fn.FieldProbe("B", aB)),
               (1, 1, 1))
    G = fn.PhaseWeight(1, "v3 + x1*v1^2")
    rE, rB = rotate_pair(aE, aB, xi)
    Fr = fn.Sum((fn.PhaseWeight(0, "v1*v2"), fn.FieldProbe("E", rE), fn.FieldProbe("B", rB)),
                (1, 1, 1))
    kind = BracketKind.VLASOV_MAXWELL_MONOPOLE
    assert bracket_field(kind, Fr, G, rotate(state, xi)) == pytest.approx(
        bracket_field(kind, F, G, state), rel=1e-12)


def test_report_and_particle_params(rng):
    state = small_state(rng, species=[SpeciesParams(1.0, 2.0, 2.0)])
    rep = duality_report(state)
    assert rep["uniform_ratio"] and rep["xi"] == pytest.approx(math.pi / 4)
    p = rotate(ParticleParams(e=1.0, g=1.0), math.pi / 4)
    assert p.g == pytest.approx(0.0, abs=1e-15) and p.e == pytest.approx(math.sqrt(2))
    with pytest.raises(DualityError):
        duality_report(small_state(rng))
    with pytest.raises(DualityError):
        rotate("nope", 0.1)
