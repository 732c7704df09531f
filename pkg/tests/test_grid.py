import numpy as np
import pytest

from bslab.grid import GridSpec, SpectralField2D, to_physical, to_spectral


def test_gridspec_validation():
    g = GridSpec(64)
    assert g.cutoff == 21
    with pytest.raises(ValueError):
        GridSpec(48)  # not a power of two
    with pytest.raises(ValueError):
        GridSpec(8)  # too small
    with pytest.raises(ValueError):
        GridSpec(64, dealias_fraction=0.0)


def test_single_mode_coefficients():
    # u = cos(y) -> coefficient pair 1/2 at k = (0, +-1)
    n = 32
    X, Y = GridSpec(n).coordinates()
    uhat = to_spectral(np.cos(Y))
    assert abs(uhat[1, 0] - 0.5) < 1e-14
    assert abs(uhat[-1, 0] - 0.5) < 1e-14
    uhat[1, 0] = 0.0
    uhat[-1, 0] = 0.0
    assert np.abs(uhat).max() < 1e-14


def test_round_trip(rng):
    u = rng.standard_normal((64, 64))
    back = to_physical(to_spectral(u))
    assert np.abs(u - back).max() < 1e-12 * np.abs(u).max()


def test_parseval(rng):
    u = rng.standard_normal((64, 64))
    grid_mean = np.mean(u * u)
    coeff_sum = np.sum(np.abs(to_spectral(u)) ** 2)
    assert abs(grid_mean - coeff_sum) < 1e-12 * grid_mean


def test_constructors_enforce_divergence_free(rng):
    u = rng.standard_normal((32, 32))
    v = rng.standard_normal((32, 32))
    fld = SpectralField2D.from_physical(u, v)
    assert fld.max_divergence() < 1e-12
    assert fld.uhat[0, 0] == 0.0 and fld.vhat[0, 0] == 0.0


def test_l2_norm_of_shear_mode():
    # ||cos(y)||_{L2} over [0,2pi]^2 is pi sqrt(2)
    n = 32
    _, Y = GridSpec(n).coordinates()
    fld = SpectralField2D.from_physical(np.cos(Y), np.zeros((n, n)))
    assert abs(fld.l2_norm() - np.pi * np.sqrt(2.0)) < 1e-12


def test_field_algebra(rng):
    a = SpectralField2D.from_physical(rng.standard_normal((32, 32)),
                                      rng.standard_normal((32, 32)))
    two_a = a + a
    assert np.allclose(two_a.uhat, a.scaled(2.0).uhat)
