import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from calabi_soliton.sasaki import (
    ConeAperture,
    LineBundleData,
    aperture_potential,
    bundle_kappa,
    d_homothety,
    from_kappa,
    make_eta_einstein,
    normalize_to_kappa,
)

ms = st.integers(1, 8)
alphas = st.floats(-50, 50)
factors = st.floats(1e-3, 1e3)


@given(ms, alphas)
def test_derived_constants(m, alpha):
    e = make_eta_einstein(m, alpha)
    assert e.alpha + e.beta == pytest.approx(2 * m, abs=1e-13)
    assert e.kappa == alpha + 2.0


@given(ms, alphas, factors, factors)
def test_group_law(m, alpha, f, g):
    e = make_eta_einstein(m, alpha)
    lhs = d_homothety(d_homothety(e, f), g)
    rhs = d_homothety(e, f * g)
    assert lhs.alpha == pytest.approx(rhs.alpha, rel=1e-12, abs=1e-12)
    assert d_homothety(e, 1.0).alpha == pytest.approx(alpha, abs=1e-13)


@given(ms, alphas, factors)
def test_kappa_covariance(m, alpha, f):
    e = make_eta_einstein(m, alpha)
    assert d_homothety(e, f).kappa * f == pytest.approx(e.kappa, rel=1e-12, abs=1e-12)


def test_sasaki_einstein_has_kappa_2m_plus_2():
    e = make_eta_einstein(3, 6.0)
    assert e.is_sasaki_einstein
    assert e.kappa == 8.0


@given(ms, st.floats(0.1, 20), st.floats(0.1, 20))
def test_normalize_same_sign(m, k0, k1):
    factor, e = normalize_to_kappa(from_kappa(m, k0), k1)
    assert e.kappa == pytest.approx(k1, rel=1e-14, abs=1e-14)
    assert factor == pytest.approx(k0 / k1)
    assert d_homothety(from_kappa(m, k0), factor).kappa == pytest.approx(k1, rel=1e-12)


def test_normalize_rejects_sign_flip():
    with pytest.raises(ValueError):
        normalize_to_kappa(from_kappa(1, 4.0), -2.0)
    assert normalize_to_kappa(from_kappa(1, 0.0), 0.0)[0] == 1.0


@pytest.mark.parametrize("p,k,kappa", [(2, 1, 4.0), (1, 2, 1.0), (3, 2, 3.0), (4, 4, 2.0)])
def test_bundle_kappa(p, k, kappa):
    assert bundle_kappa(LineBundleData(p, k)) == kappa
    assert LineBundleData(p, k).kappa() == kappa


@pytest.mark.parametrize("bad", [0, -1, 1.5])
def test_bundle_validation(bad):
    with pytest.raises(ValueError):
        LineBundleData(bad, 1)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        make_eta_einstein(0, 1.0)
    with pytest.raises(ValueError):
        make_eta_einstein(1, math.nan)
    with pytest.raises(ValueError):
        d_homothety(make_eta_einstein(1, 1.0), 0.0)
    with pytest.raises(ValueError):
        ConeAperture(1.0, -0.5)


def test_aperture_potential_is_radial_power():
    c = ConeAperture(2.0, 0.5)
    r = np.geomspace(0.1, 10, 7)
    np.testing.assert_allclose(aperture_potential(c, r), 2.0 * r / 1.0, rtol=1e-15)
    assert c.to_dict() == {"C": 2.0, "q": 0.5}
