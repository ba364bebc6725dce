import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from systolic.builder import DiscSpec, build_control_disc, build_disc  # noqa: E402
from systolic.complex import SimplicialComplex  # noqa: E402


def octahedron_complex() -> SimplicialComplex:
    return SimplicialComplex([(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)])


def cycle_complex(n: int) -> SimplicialComplex:
    return SimplicialComplex([(i, (i + 1) % n) for i in range(n)])


@pytest.fixture(scope="session")
def disc7():
    return build_disc(DiscSpec(7, 6))


@pytest.fixture(scope="session")
def disc78():
    return build_disc(DiscSpec(7, 6, seed=1))


@pytest.fixture(scope="session", params=["degree7", "degrees78"])
def any_disc(request, disc7, disc78):
    return disc7 if request.param == "degree7" else disc78


@pytest.fixture(scope="session")
def control6():
    return build_control_disc(6, 15)


@pytest.fixture
def octahedron():
    return octahedron_complex()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
