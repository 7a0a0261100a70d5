import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reslab.hermite import HermiteBasis, TripleProductTable
from reslab.transform import Grid


@pytest.fixture(scope="session")
def basis60() -> HermiteBasis:
    return HermiteBasis.build(60)


@pytest.fixture(scope="session")
def table60(basis60) -> TripleProductTable:
    return TripleProductTable(60)


@pytest.fixture(scope="session")
def grid64() -> Grid:
    return Grid(64, 16.0, HermiteBasis.build(8))
