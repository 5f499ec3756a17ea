import numpy as np
import pytest

from stac.grid import ScalarVolume, voxel_coordinates
from stac.phantom import generate, make_spec


@pytest.fixture(scope="session")
def sphere():
    """R=20 sphere centered in a 64^3 grid, noise amplitude 10."""
    return generate(make_spec("sphere", dims=(64, 64, 64), radius=20.0, seed=42))


@pytest.fixture(scope="session")
def sphere_center():
    return np.array([31.5, 31.5, 31.5])


@pytest.fixture(scope="session")
def analytic_sphere_sdf(sphere):
    pts = voxel_coordinates(sphere.label.dims)
    return ScalarVolume(sphere.sdf[1](pts), sphere.label.spacing)


@pytest.fixture(scope="session")
def multi_organ():
    return generate(make_spec("multi_organ", seed=7))


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_report(request):
    """Record one status line for an acceptance criterion and fail the test if it is red."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def report(number, name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {name}: {detail}"
        lines.append((number, line))
        print(line)
        assert passed, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
