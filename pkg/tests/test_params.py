import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bslab.params import BackscatterParams, PhysicalParams, WaveVector, perp

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def test_perp_examples():
    assert np.allclose(perp((1, 0)), [0, 1])
    assert np.allclose(perp((0, 0)), [0, 0])
    assert np.allclose(perp((3, -2)), [2, 3])


@given(finite, finite)
def test_perp_perp_is_minus_identity(a1, a2):
    v = np.array([a1, a2])
    assert np.array_equal(perp(perp(v)), -v)


@given(finite, finite)
def test_perp_orthogonal(a1, a2):
    assert float(np.dot(perp((a1, a2)), (a1, a2))) == 0.0


def test_backscatter_params_validation():
    bp = BackscatterParams.isotropic(2.0, 1.0)
    assert bp.is_isotropic and bp.b == 2.0 and bp.d == 1.0
    with pytest.raises(ValueError):
        BackscatterParams(1.0, 1.0, -0.1, 1.0)
    with pytest.raises(ValueError):
        BackscatterParams(float("nan"), 1.0, 1.0, 1.0)
    aniso = BackscatterParams(1.5, 2.2, 1.0, 1.04)
    assert not aniso.is_isotropic
    with pytest.raises(ValueError):
        _ = aniso.b
    # degenerate coefficients for the viscous/inviscid comparison limits
    assert BackscatterParams.isotropic(0.0, 0.0).d == 0.0
    assert BackscatterParams.isotropic(-3.0, 0.0).b == -3.0


def test_physical_params_validation():
    pp = PhysicalParams(f=0.3, g=9.8, H0=0.1)
    assert pp.C == 0.0 and pp.Q == 0.0
    with pytest.raises(ValueError):
        PhysicalParams(g=-1.0)
    with pytest.raises(ValueError):
        PhysicalParams(H0=0.0)
    with pytest.raises(ValueError):
        PhysicalParams(C=-0.5)


def test_wavevector():
    k = WaveVector(3.0, 4.0)
    assert k.k == 5.0
    assert k.k2 == 25.0
    assert np.allclose(k.perp, [-4.0, 3.0])
    kx, ky = k
    assert (kx, ky) == (3.0, 4.0)
