"""scikit-learn style wrappers around the functional core.

Each estimator stores its construction parameters unchanged in ``__init__``
(so ``get_params``/``set_params``/``clone`` work), builds the soliton in
``fit`` and exposes

* ``transform(sigma)`` -> ``phi(sigma)`` as a column,
* ``predict(s)`` -> ``sigma(s)`` from the radial reconstruction.

``X`` is ignored by ``fit``; the soliton is determined by the parameters.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import classify, flow, scalar
from .errors import InvalidParameterError
from .mu_solver import solve_mu
from .profile import SolitonProfile, nu_boundary, phi_closed
from .radial import asymptotic_coefficient, integrate_sigma
from .sasaki import ConeAperture, LineBundleData


def _column(X, name="X"):
    arr = check_array(X, ensure_2d=False, dtype=np.float64, input_name=name)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise InvalidParameterError(f"{name} must have a single column, got shape {arr.shape}")
        arr = arr[:, 0]
    return arr


class _RadialSolitonBase(TransformerMixin, BaseEstimator):
    """Shared fit/transform/predict for Kahler-Ricci profiles."""

    def _build_profile(self) -> SolitonProfile:
        raise NotImplementedError

    def _default_sigma0(self, pr: SolitonProfile) -> float:
        return pr.a + 1.0 if pr.a > 0 else 1.0

    def _check_window(self):
        if not (self.s_min < self.s_max):
            raise InvalidParameterError(f"need s_min < s_max, got {self.s_min}, {self.s_max}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise InvalidParameterError(f"n_samples must be an integer >= 2, got {self.n_samples}")

    def fit(self, X=None, y=None):
        self._check_window()
        pr = self._build_profile()
        sigma0 = self._default_sigma0(pr) if self.sigma0 is None else float(self.sigma0)
        self.profile_ = pr
        self.solution_ = integrate_sigma(pr, sigma0, self.s_min, self.s_max, int(self.n_samples))
        self.left_, self.right_ = classify.completeness_report(pr)
        self._fit_extra()
        return self

    def _fit_extra(self):
        pass

    def transform(self, X):
        """``phi`` at the ``sigma`` values in ``X`` (one column)."""
        check_is_fitted(self, "profile_")
        sig = _column(X)
        return np.asarray(phi_closed(self.profile_, sig)).reshape(-1, 1)

    def predict(self, X):
        """``sigma(s)`` at the ``s`` values in ``X``."""
        check_is_fitted(self, "solution_")
        return np.asarray(self.solution_.sigma_at(_column(X)))


class KahlerRicciSoliton(_RadialSolitonBase):
    """General profile with explicit ``(m, kappa, lam, mu, a)``.

    ``nu=None`` takes the boundary constant making ``phi(a) = 0``.
    """

    def __init__(self, m=1, kappa=4.0, lam=1, mu=-1.0, nu=None, a=0.0, sigma0=None,
                 s_min=-5.0, s_max=5.0, n_samples=1001):
        self.m = m
        self.kappa = kappa
        self.lam = lam
        self.mu = mu
        self.nu = nu
        self.a = a
        self.sigma0 = sigma0
        self.s_min = s_min
        self.s_max = s_max
        self.n_samples = n_samples

    def _build_profile(self):
        nu = nu_boundary(self.m, self.kappa, self.lam, self.mu, self.a) if self.nu is None else float(self.nu)
        return SolitonProfile(int(self.m), float(self.kappa), int(self.lam), float(self.mu), nu, float(self.a))


class ExpandingConeSoliton(_RadialSolitonBase):
    """Expanding soliton on the cone (``lam = 1``, ``a = 0``, ``mu < 0``).

    ``aperture_`` holds the ``t -> 0`` cone with amplitude ``E(0)`` and
    exponent ``q = -1/mu``.
    """

    def __init__(self, m=1, kappa=4.0, mu=-1.0, sigma0=None, s_min=-6.0, s_max=40.0, n_samples=4601):
        self.m = m
        self.kappa = kappa
        self.mu = mu
        self.sigma0 = sigma0
        self.s_min = s_min
        self.s_max = s_max
        self.n_samples = n_samples

    def _build_profile(self):
        if not (self.kappa > 0 and self.mu < 0):
            raise InvalidParameterError(f"need kappa > 0 and mu < 0, got kappa={self.kappa}, mu={self.mu}")
        return SolitonProfile.expanding_cone(int(self.m), float(self.kappa), float(self.mu))

    def _fit_extra(self):
        amp, err = asymptotic_coefficient(self.solution_, self.profile_.mu, return_error=True)
        self.aperture_ = ConeAperture(amplitude=amp, exponent=-1.0 / self.profile_.mu)
        self.aperture_error_ = err


class ShrinkingBundleSoliton(_RadialSolitonBase):
    """Shrinking soliton on ``L^{-k}`` with ``K = L^{-p}`` and ``0 < k < p``.

    ``mu`` is the certified root of the boundary condition at ``a = p/k - 1``.
    """

    def __init__(self, m=1, p=2, k=1, sigma0=None, s_min=-6.0, s_max=40.0, n_samples=4601):
        self.m = m
        self.p = p
        self.k = k
        self.sigma0 = sigma0
        self.s_min = s_min
        self.s_max = s_max
        self.n_samples = n_samples

    def _build_profile(self):
        self.bundle_ = classify.bundle_admissibility(self.p, self.k, -1)
        if not self.bundle_.admissible:
            raise InvalidParameterError(f"shrinking bundle solitons need 0 < k < p, got p={self.p}, k={self.k}")
        kappa = LineBundleData(self.p, self.k).kappa()
        a = self.bundle_.a_required
        self.mu_certificate_ = solve_mu(int(self.m), kappa, a)
        return SolitonProfile(int(self.m), kappa, -1, self.mu_certificate_.root, 0.0, a)

    def _fit_extra(self):
        amp, err = asymptotic_coefficient(self.solution_, self.profile_.mu, return_error=True)
        self.aperture_ = ConeAperture(amplitude=amp, exponent=1.0 / self.profile_.mu)
        self.aperture_error_ = err
        self.extension_ = classify.extension_check(self.profile_)


class ExpandingBundleSoliton(_RadialSolitonBase):
    """Expanding soliton on ``L^{-k}`` with ``k > p``; ``a = 1 - p/k`` and any ``mu < 0``."""

    def __init__(self, m=1, p=1, k=2, mu=-1.0, sigma0=None, s_min=-6.0, s_max=40.0, n_samples=4601):
        self.m = m
        self.p = p
        self.k = k
        self.mu = mu
        self.sigma0 = sigma0
        self.s_min = s_min
        self.s_max = s_max
        self.n_samples = n_samples

    def _build_profile(self):
        self.bundle_ = classify.bundle_admissibility(self.p, self.k, 1)
        if not self.bundle_.admissible:
            raise InvalidParameterError(f"expanding bundle solitons need k > p, got p={self.p}, k={self.k}")
        if not self.mu < 0:
            raise InvalidParameterError(f"expanding solitons need mu < 0, got {self.mu}")
        kappa = LineBundleData(self.p, self.k).kappa()
        return SolitonProfile.with_boundary(int(self.m), kappa, 1, float(self.mu), self.bundle_.a_required)

    def _fit_extra(self):
        amp, err = asymptotic_coefficient(self.solution_, self.profile_.mu, return_error=True)
        self.aperture_ = ConeAperture(amplitude=amp, exponent=-1.0 / self.profile_.mu)
        self.aperture_error_ = err
        self.extension_ = classify.extension_check(self.profile_)


class ScalarSoliton(TransformerMixin, BaseEstimator):
    """Gradient scalar soliton on ``(1, inf)`` with a double zero at 1."""

    def __init__(self, m=1, kappa=-2.0, c=-4.0, mu=-1.0):
        self.m = m
        self.kappa = kappa
        self.c = c
        self.mu = mu

    def fit(self, X=None, y=None):
        self.profile_ = scalar.ScalarSolitonProfile.build(int(self.m), float(self.kappa), float(self.c),
                                                          float(self.mu))
        return self

    def transform(self, X):
        check_is_fitted(self, "profile_")
        return np.asarray(scalar.phi_scalar(self.profile_, _column(X))).reshape(-1, 1)

    def predict(self, X):
        """Residual of the scalar soliton equation at the ``sigma`` in ``X``."""
        check_is_fitted(self, "profile_")
        return np.asarray(scalar.scalar_ode_residual(self.profile_, _column(X)))


class EternalGluer(BaseEstimator):
    """Shrinking soliton for ``t < 0`` glued to the expanding cone soliton for ``t > 0``."""

    def __init__(self, m=1, p=2, k=1, s_min=-6.0, s_max=40.0, n_samples=4601):
        self.m = m
        self.p = p
        self.k = k
        self.s_min = s_min
        self.s_max = s_max
        self.n_samples = n_samples

    def fit(self, X=None, y=None):
        self.eternal_ = flow.glue_eternal(int(self.m), self.p, self.k, self.s_min, self.s_max,
                                          int(self.n_samples))
        return self

    def predict(self, X):
        """Potential at rows ``(t, r)`` of ``X``."""
        check_is_fitted(self, "eternal_")
        arr = check_array(X, dtype=np.float64)
        if arr.shape[1] != 2:
            raise InvalidParameterError("X must have two columns (t, r)")
        out = np.empty(arr.shape[0])
        for t in np.unique(arr[:, 0]):
            rows = arr[:, 0] == t
            out[rows] = self.eternal_.potential(float(t), arr[rows, 1])
        return out

    def transform(self, X):
        return self.predict(X).reshape(-1, 1)

    @property
    def q_(self) -> float:
        check_is_fitted(self, "eternal_")
        return self.eternal_.q


__all__ = [
    "KahlerRicciSoliton",
    "ExpandingConeSoliton",
    "ShrinkingBundleSoliton",
    "ExpandingBundleSoliton",
    "ScalarSoliton",
    "EternalGluer",
]
