# Any copyright is dedicated to the public domain.
# http://creativecommons.org/publicdomain/zero/1.0/

from pathlib import Path

import pytest

from fplstat.generators import population_from_descriptor
from fplstat.population import make_population

here = Path(__file__).parent


@pytest.fixture(scope="session")
def datadir():
    return here / "data"


@pytest.fixture
def small_pop():
    """Six distinct, unevenly spaced values."""
    return make_population([0.0, 0.5, 1.5, 2.0, 4.0, 7.0])


@pytest.fixture
def equispaced():
    def inner(N):
        return population_from_descriptor("equispaced", N)

    return inner


@pytest.fixture
def write_lines(tmp_path):
    def inner(name, lines):
        path = tmp_path / name
        path.write_text("".join(f"{line}\n" for line in lines))
        return path

    return inner
