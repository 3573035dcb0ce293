import os

# Scans fork a process pool by default; keep tests serial and deterministic.
os.environ.setdefault("QET_THREADS", "1")

import numpy as np
import pytest

from qetlab import ProtocolGeometry, gaussian


@pytest.fixture
def unit_gaussians():
    """Unit-width gaussians in roomy regions, L = 10, T = 1."""
    gA = gaussian(-13.0, 1.0)
    gB = gaussian(13.0, 1.0)
    geo = ProtocolGeometry(-21.0, -5.0, 5.0, 21.0, T=1.0)
    return gA, gB, geo


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
