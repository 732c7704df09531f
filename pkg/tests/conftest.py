import numpy as np
import pytest

from bslab.params import BackscatterParams, PhysicalParams


@pytest.fixture
def bp_iso():
    """Isotropic backscatter of the critical-threshold figure: b=2, d=1."""
    return BackscatterParams.isotropic(2.0, 1.0)


@pytest.fixture
def pp_std():
    """f=0.3, g=9.8, H0=0.1 (critical drag 0.1, critical wavenumber 1)."""
    return PhysicalParams(f=0.3, g=9.8, H0=0.1)


@pytest.fixture
def bp_aniso():
    """Anisotropic loci parameters: d1=1, d2=1.04, b1=1.5, b2=2.2."""
    return BackscatterParams(b1=1.5, b2=2.2, d1=1.0, d2=1.04)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
