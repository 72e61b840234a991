import sys
from pathlib import Path

import numpy as np
import pytest

import viscorod as vr

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def paper_params():
    return vr.MaterialParams(0.045, 0.5)


@pytest.fixture(scope="session")
def paper_poles(paper_params):
    return vr.build_pole_set(400, paper_params)


@pytest.fixture(scope="session")
def solver():
    return vr.SolverConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20250808)
