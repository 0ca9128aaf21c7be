import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from calabi_soliton.errors import InvalidParameterError
from calabi_soliton.estimators import (
    EternalGluer,
    ExpandingBundleSoliton,
    ExpandingConeSoliton,
    KahlerRicciSoliton,
    ScalarSoliton,
    ShrinkingBundleSoliton,
)


def test_params_roundtrip_and_clone():
    est = KahlerRicciSoliton(m=2, kappa=3.0, mu=-0.5)
    params = est.get_params()
    assert params["m"] == 2 and params["kappa"] == 3.0 and params["nu"] is None
    twin = clone(est).set_params(kappa=5.0)
    assert twin.kappa == 5.0 and est.kappa == 3.0


def test_linear_profile_transform_and_predict():
    est = KahlerRicciSoliton(m=1, kappa=4.0, lam=1, mu=-1.0).fit()
    sig = np.array([[0.5], [1.0], [3.0]])
    np.testing.assert_allclose(est.transform(sig), 2 * sig, rtol=1e-13)
    s = np.array([-1.0, 0.0, 1.5])
    np.testing.assert_allclose(est.predict(s), np.exp(2 * s), rtol=1e-10)
    assert est.transform([1.0, 2.0]).shape == (2, 1)


def test_expanding_cone_aperture():
    est = ExpandingConeSoliton(m=1, kappa=4.0, mu=-1.0).fit()
    assert est.aperture_.amplitude == pytest.approx(1.0, rel=1e-10)
    assert est.aperture_.exponent == 1.0


def test_shrinking_bundle():
    est = ShrinkingBundleSoliton(m=1, p=2, k=1, s_max=30.0, n_samples=3001).fit()
    assert est.mu_certificate_.root == pytest.approx(math.sqrt(2), abs=1e-12)
    assert est.extension_.kind == "smooth_zero_section"
    assert est.left_.kind == "smooth_zero_section"


def test_expanding_bundle():
    est = ExpandingBundleSoliton(m=1, p=1, k=2, s_max=30.0, n_samples=3001).fit()
    assert est.profile_.a == 0.5
    assert est.extension_.kind == "smooth_zero_section"


def test_scalar_soliton():
    est = ScalarSoliton().fit()
    sig = np.geomspace(1.01, 100, 20)
    assert est.transform(sig).shape == (20, 1)
    assert np.max(np.abs(est.predict(sig))) < 1e-8


def test_eternal_gluer():
    est = EternalGluer(s_max=40.0).fit()
    assert est.q_ == pytest.approx(1 / math.sqrt(2))
    X = np.array([[-1e-6, 1.0], [1e-6, 1.0], [0.0, 1.0]])
    vals = est.predict(X)
    assert vals.shape == (3,)
    assert est.transform(X).shape == (3, 1)


def test_validation():
    with pytest.raises(NotFittedError):
        KahlerRicciSoliton().transform([1.0])
    with pytest.raises(InvalidParameterError):
        ShrinkingBundleSoliton(p=1, k=2).fit()
    with pytest.raises(InvalidParameterError):
        ExpandingBundleSoliton(p=1, k=2, mu=1.0).fit()
    with pytest.raises(InvalidParameterError):
        KahlerRicciSoliton(s_min=1.0, s_max=0.0).fit()
    est = KahlerRicciSoliton().fit()
    with pytest.raises(InvalidParameterError):
        est.transform(np.ones((3, 2)))
    with pytest.raises(ValueError):
        est.transform([np.nan])
    with pytest.raises(InvalidParameterError):
        EternalGluer().fit().predict(np.ones((2, 3)))
