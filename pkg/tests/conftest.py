import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from terraslope import HeightGrid

NODATA = -9999.0


def random_grid(rng, rows, cols, lo=-50.0, hi=50.0, nodata_fraction=0.0):
    """Random grid with optional nodata holes; at least one valid pixel."""
    values = rng.uniform(lo, hi, size=(rows, cols))
    if nodata_fraction > 0:
        holes = rng.random((rows, cols)) < nodata_fraction
        holes.flat[rng.integers(0, rows * cols)] = False
        values[holes] = NODATA
    return HeightGrid(values, nodata=NODATA)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
