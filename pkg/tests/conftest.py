from pathlib import Path

import numpy as np
import pytest

from circlepattern import load_complex, triangulate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FIXTURE_NAMES = ("tetrahedron", "torus3x3", "octagon")


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


@pytest.fixture(scope="session")
def tetra():
    return load_complex(fixture_path("tetrahedron"))


@pytest.fixture(scope="session")
def torus():
    return load_complex(fixture_path("torus3x3"))


@pytest.fixture(scope="session")
def octagon():
    return load_complex(fixture_path("octagon"))


@pytest.fixture(scope="session", params=FIXTURE_NAMES)
def any_fixture(request):
    c = load_complex(fixture_path(request.param))
    return request.param, c, triangulate(c)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    """Record one summary line per acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}  ({detail})"
        _ACCEPTANCE[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
