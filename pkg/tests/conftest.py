from pathlib import Path

import pytest

from blimpbench.design import DesignSpec, parse_design
from blimpbench.mapping import PlantWiring

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str) -> DesignSpec:
    return parse_design((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def four_motor() -> DesignSpec:
    return load_fixture("four_motor.toml")


@pytest.fixture(scope="session")
def vectored_tail() -> DesignSpec:
    return load_fixture("vectored_tail.toml")


@pytest.fixture(scope="session")
def twin_forward() -> DesignSpec:
    return load_fixture("twin_forward.toml")


@pytest.fixture(scope="session")
def aligned_quad() -> DesignSpec:
    return load_fixture("aligned_quad.toml")


@pytest.fixture(scope="session")
def single_motor() -> DesignSpec:
    return load_fixture("single_motor.toml")


@pytest.fixture()
def four_motor_wiring() -> PlantWiring:
    # channel 4's motor leads are swapped, so its duty is inverted
    return PlantWiring(polarity={4: -1})
