import numpy as np
import pytest
from hypothesis import settings

from monojac.state import PhaseSpaceGrid, SpeciesParams, SystemState

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def small_state(rng, x_points=(5, 4, 4), v_points=(4, 4, 4), periodic=(True, False, True),
                species=None, c=1.3):
    """A small random state with generic fields; not physical."""
    nx = len(x_points)
    grid = PhaseSpaceGrid(((0.0, 2.0),) * nx, tuple(x_points), ((-1.5, 1.5),) * len(v_points),
                          tuple(v_points), tuple(periodic))
    if species is None:
        species = [SpeciesParams(1.7, -0.9, 0.4, "a"), SpeciesParams(0.8, 1.1, -0.3, "b")]
    f = [rng.random(grid.phase_shape) + 0.5 for _ in species]
    E = rng.normal(size=(3,) + grid.x_shape)
    B = rng.normal(size=(3,) + grid.x_shape)
    return SystemState.build(grid, species, f, E, B, c=c, physical=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
