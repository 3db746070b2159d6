import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from monojac.state import (
    GridError,
    PhaseSpaceGrid,
    SpeciesParams,
    StateError,
    StateTangent,
    SystemState,
    curl,
    curl_adjoint,
    diff,
    diff_adjoint,
    divergence,
    moments,
    phase_integral,
    sample_phase,
    sample_vector,
)
from monojac.stateio import load_state, save_state, state_from_dict, state_to_dict

from conftest import small_state


@given(st.integers(4, 12), st.booleans(), st.integers(0, 2**31))
def test_diff_adjoint_is_the_transpose(n, periodic, seed):
    r = np.random.default_rng(seed)
    u, w = r.normal(size=(n, 3)), r.normal(size=(n, 3))
    lhs = np.sum(diff(u, 0, 0.3, periodic) * w)
    rhs = np.sum(u * diff_adjoint(w, 0, 0.3, periodic))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("periodic", [True, False])
def test_diff_is_second_order(periodic):
    errs = []
    for n in (32, 64, 128):
        L = 2 * np.pi
        x = (np.arange(n) + 0.5) * L / n
        errs.append(np.max(np.abs(diff(np.sin(x), 0, L / n, periodic) - np.cos(x))))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.9)


def test_quadratic_differentiated_exactly_up_to_the_boundary():
    x = (np.arange(7) + 0.5) * 0.25
    np.testing.assert_allclose(diff(x**2, 0, 0.25, False), 2 * x, atol=1e-13)


def test_div_curl_vanishes_discretely(rng):
    state = small_state(rng)
    np.testing.assert_allclose(divergence(curl(state.B, state.grid), state.grid), 0.0, atol=1e-12)


def test_curl_adjoint_is_the_transpose(rng):
    state = small_state(rng)
    a, b = state.E, state.B
    lhs = np.sum(curl(a, state.grid) * b)
    rhs = np.sum(a * curl_adjoint(b, state.grid))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_midpoint_quadrature_of_gaussian():
    grid = PhaseSpaceGrid(((0.0, 1.0),), (4,), ((-8.0, 8.0),) * 3, (40,) * 3)
    f = sample_phase("exp(-(v1^2+v2^2+v3^2)/2)", grid)
    assert phase_integral(f, grid) == pytest.approx((2 * np.pi) ** 1.5, rel=1e-10)


def test_reduced_dimensions_broadcast():
    grid = PhaseSpaceGrid(((0.0, 1.0),), (6,), ((-1.0, 1.0),) * 2, (5, 5), (True,))
    assert grid.phase_shape == (6, 5, 5)
    E = sample_vector(["x1", "1", "0"], grid)
    assert E.shape == (3, 6)
    state = SystemState.build(grid, [SpeciesParams(1.0, 1.0)], [np.ones(grid.phase_shape)], E)
    m = moments(state)
    assert m.j_e.shape == (3, 6)
    np.testing.assert_allclose(m.rho, 4.0)
    np.testing.assert_allclose(m.j_e[2], 0.0)


@pytest.mark.parametrize("kwargs", [
    dict(x_extents=((0, 1),), x_points=(3,), v_extents=((0, 1),), v_points=(4,)),
    dict(x_extents=((1, 0),), x_points=(4,), v_extents=((0, 1),), v_points=(4,)),
    dict(x_extents=((0, 1),) * 4, x_points=(4,) * 4, v_extents=((0, 1),), v_points=(4,)),
    dict(x_extents=((0, 1),), x_points=(4,), v_extents=((0, 1),), v_points=(4,), periodic=(True, True)),
])
def test_bad_grids_rejected(kwargs):
    with pytest.raises(GridError):
        PhaseSpaceGrid(**kwargs)


def test_bad_states_rejected(rng):
    grid = PhaseSpaceGrid(((0.0, 1.0),), (4,), ((-1.0, 1.0),), (4,))
    with pytest.raises(StateError):
        SpeciesParams(0.0, 1.0)
    with pytest.raises(StateError):
        SystemState.build(grid, [SpeciesParams(1.0)], [np.ones((5, 4))])
    with pytest.raises(StateError):
        SystemState.build(grid, [SpeciesParams(1.0)], [np.ones((4, 4))], c=-1.0)


def test_state_arrays_are_read_only(rng):
    state = small_state(rng)
    with pytest.raises(ValueError):
        state.E[0, 0, 0, 0] = 1.0


def test_vector_round_trip(rng):
    state = small_state(rng)
    back = state.from_vector(state.to_vector())
    np.testing.assert_array_equal(back.to_vector(), state.to_vector())


def test_displaced_does_not_mutate(rng):
    state = small_state(rng)
    before = state.to_vector().copy()
    d = StateTangent(tuple(np.ones_like(f) for f in state.f.f), np.ones_like(state.E), None)
    moved = state.displaced(d, 0.5)
    np.testing.assert_array_equal(state.to_vector(), before)
    assert not moved.physical
    np.testing.assert_allclose(moved.E, state.E + 0.5)


def test_stateio_round_trip_is_bit_exact(rng, tmp_path):
    state = small_state(rng)
    path = tmp_path / "s.json"
    save_state(state, path)
    back = load_state(path)
    np.testing.assert_array_equal(back.to_vector(), state.to_vector())
    assert back.species == state.species and back.grid == state.grid and back.c == state.c
    with pytest.raises(ValueError):
        state_from_dict(dict(state_to_dict(state), format="other"))
