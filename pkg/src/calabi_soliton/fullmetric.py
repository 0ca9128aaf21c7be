"""Full-metric check of the soliton identity on the m = 1 model.

For ``S = S^3`` the cone is ``C^2 \\ {0}`` and a radial Kahler potential
``P(u)``, ``u = |z|^2 = r^2``, gives a U(2)-invariant metric with

    det g = P'(u) (P'(u) + u P''(u)).

The Ricci form is ``-i ddbar log det g``, so the soliton equation
``rho + 2 lam omega = -i ddbar(mu sigma + c)`` holds exactly when

    Psi(u) = -log det g + 2 lam P + mu sigma

is constant, where ``sigma = dP/ds`` and ``s = log r``.  Nothing here uses
the profile ODE: ``P`` is sampled from the radial reconstruction and all
derivatives are finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .profile import SolitonProfile, nu_zero
from .radial import integrate_sigma

LD = np.longdouble
EDGE = 3  # grid points excluded at each end
DEFAULT_U = (math.exp(-6.0), math.exp(6.0))
DEFAULT_H = 1e-3


_D5 = np.array([1, -8, 0, 8, -1], dtype=LD) / 12


def _gauss_legendre_ld(n: int = 8):
    """Gauss-Legendre rule on [-1, 1] polished to long double precision."""
    x, _ = np.polynomial.legendre.leggauss(n)
    x = x.astype(LD)
    for _ in range(3):
        p0, p1 = np.ones_like(x), x.copy()
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = n * (x * p1 - p0) / (x * x - 1)
        x = x - p1 / dp
    p0, p1 = np.ones_like(x), x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    w = 2 / ((1 - x * x) * dp * dp)
    return x, w


_GL_X, _GL_W = _gauss_legendre_ld()


def _phi_ld(pr: SolitonProfile, x):
    """Closed-form profile for ``m = 1`` in long double.

    The exponential series is used below ``|mu x| = 1`` where the
    polynomial form cancels.
    """
    kappa, lam, mu, nu = LD(pr.kappa), LD(pr.lam), LD(pr.mu), LD(pr.nu)
    x = np.asarray(x, dtype=LD)
    bracket = 2 * lam + kappa * mu / 2
    direct = -2 * lam * x / mu - bracket / mu**3 * (2 / x + 2 * mu)
    if nu != 0:
        direct = direct + nu * np.exp(mu * x) / x
    near = np.abs(mu * x) < 1
    if not np.any(near):
        return direct
    xn = x[near]
    nu0 = LD(nu_zero(1, pr.kappa, pr.lam, pr.mu))
    term = mu**3 * xn**2 / 6
    tail = np.zeros_like(xn)
    j = 2
    while np.any(np.abs(term) > LD(1e-22) * np.abs(tail)) or j == 2:
        tail += term
        term = term * mu * xn / (j + 2)
        j += 1
    series = kappa * xn / 2 + nu0 * tail + (nu - nu0) * np.exp(mu * xn) / xn
    out = direct.copy()
    out[near] = series
    return out


def _gl_cumulative(f, nodes, i0):
    """``int_{nodes[i0]}^{nodes[i]} f`` for every ``i`` by panel-wise Gauss-Legendre."""
    lo, hi = nodes[:-1], nodes[1:]
    half, mid = (hi - lo) / 2, (hi + lo) / 2
    pts = mid[:, None] + half[:, None] * _GL_X[None, :]
    panels = half * (f(pts) @ _GL_W)
    cum = np.concatenate([np.zeros(1, dtype=LD), np.cumsum(panels)])
    return cum - cum[i0]


def sample_potential(pr: SolitonProfile, s_min: float, s_max: float, h: float,
                     sigma0: float | None = None, newton_steps: int = 4):
    """Potential ``P = s + F`` on the uniform grid ``s = h Z`` in long double.

    ``sigma(s)`` starts from the adaptive integration and is corrected by
    Newton steps on ``int_{sigma0}^{sigma} dx/phi = s``; ``F`` is then the
    quadrature of ``(x - 1)/phi``.  Returns ``(s, sigma, P)``.
    """
    if pr.m != 1:
        raise InvalidParameterError("the coordinate model exists for m = 1 only")
    if not (h > 0 and s_min < 0 < s_max):
        raise InvalidParameterError("need h > 0 and s_min < 0 < s_max")
    sigma0 = (pr.a + 1.0 if pr.a > 0 else 1.0) if sigma0 is None else float(sigma0)
    i_lo, i_hi = math.floor(s_min / h), math.ceil(s_max / h)
    idx = np.arange(i_lo, i_hi + 1)
    s = idx.astype(LD) * LD(h)
    i0 = int(-i_lo)
    sol = integrate_sigma(pr, sigma0, float(s[0]), float(s[-1]), len(s))
    if sol.clipped:
        raise InvalidParameterError("sigma leaves (a, b) inside the requested s-window")
    sig = np.asarray(np.interp(idx * h, sol.s, sol.sigma), dtype=LD)
    sig[i0] = LD(sigma0)

    def inv_phi(x):
        return 1 / _phi_ld(pr, x)

    for _ in range(newton_steps):
        S = _gl_cumulative(inv_phi, sig, i0)
        sig = sig + _phi_ld(pr, sig) * (s - S)
        sig[i0] = LD(sigma0)
    F = _gl_cumulative(lambda x: (x - 1) / _phi_ld(pr, x), sig, i0)
    return s, sig, s + F


@dataclass(frozen=True)
class RadialMetricModel:
    """Radial potential ``P(u)`` sampled on a log-uniform grid in ``u``."""

    u: np.ndarray
    potential: np.ndarray
    lam: int
    mu: float
    kappa: float = 4.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=LD)
        P = np.asarray(self.potential, dtype=LD)
        if u.shape != P.shape or u.ndim != 1 or u.size < 2 * EDGE + 3:
            raise InvalidParameterError("u and potential must be 1-d arrays of equal length >= 9")
        if np.any(~(u > 0)) or np.any(np.diff(u) <= 0):
            raise InvalidParameterError("u must be positive and strictly increasing")
        ds = np.diff(np.log(u)) / 2
        if np.max(np.abs(ds - ds.mean())) > 1e-9 * ds.mean():
            raise InvalidParameterError("u must be log-uniform")
        if self.kappa != 4.0:
            raise InvalidParameterError("the S^3 model has kappa = 4")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "potential", P)
        d1, d2 = _s_derivatives(P, ds.mean())
        # P' = P_s / 2u and P' + u P'' = P_ss / 4u
        for name, vals, cut in (("P'", d1, 2), ("P' + u P''", d2, 1)):
            bad = np.flatnonzero(~(vals[cut:-cut] > 0))
            if bad.size:
                raise InvalidParameterError(
                    f"metric not positive: {name} <= 0 at u = {float(u[cut + bad[0]]):.6g}")

    @property
    def h(self) -> LD:
        """Grid step in ``s = log(u)/2``."""
        return (np.log(self.u[-1]) - np.log(self.u[0])) / (2 * (self.u.size - 1))

    @property
    def s(self) -> np.ndarray:
        return np.log(self.u) / 2

    @classmethod
    def from_profile(cls, pr: SolitonProfile, u_range=DEFAULT_U, h: float = DEFAULT_H,
                     sigma0: float | None = None) -> "RadialMetricModel":
        s, _, P = sample_potential(pr, 0.5 * math.log(u_range[0]), 0.5 * math.log(u_range[1]), h, sigma0)
        return cls(np.exp(2 * s), P, pr.lam, pr.mu, pr.kappa)

    @classmethod
    def from_potential(cls, func, u_range=DEFAULT_U, n: int = 2001, lam: int = 1,
                       mu: float = -1.0) -> "RadialMetricModel":
        """Model from a callable ``P(u)`` evaluated in long double."""
        u = np.exp(np.linspace(LD(math.log(u_range[0])), LD(math.log(u_range[1])), n))
        return cls(u, np.asarray(func(u), dtype=LD), lam, mu)


def _s_derivatives(P, h):
    """``dP/ds`` and ``d2P/ds2`` on the uniform ``s`` grid; NaN where undefined.

    The first derivative is the five-point central difference.  The second
    uses the three-point stencil over ``sinh(h)^2`` instead of ``h^2``, which
    keeps second order and is exact on ``1``, ``s`` and ``e^{2s}``, so flat
    potentials ``c_0 + c_1 s + c_2 u`` give an exact determinant.
    """
    h = np.asarray(h, dtype=LD)
    d1 = np.full(P.shape, np.nan, dtype=LD)
    d2 = np.full(P.shape, np.nan, dtype=LD)
    stack = np.stack([P[k: P.size - 4 + k] for k in range(5)], axis=-1)
    d1[2:-2] = stack @ _D5 / h
    d2[1:-1] = (P[2:] - 2 * P[1:-1] + P[:-2]) / np.sinh(h) ** 2
    return d1, d2


def _grid_index(model: RadialMetricModel, u):
    u = np.atleast_1d(np.asarray(u, dtype=float))
    lu = np.log(np.asarray(model.u, dtype=float))
    i = np.clip(np.searchsorted(lu, np.log(u)), 0, lu.size - 1)
    j = np.where(np.abs(lu[i - 1] - np.log(u)) < np.abs(lu[i] - np.log(u)), i - 1, i)
    if np.any(np.abs(lu[j] - np.log(u)) > 1e-9):
        raise InvalidParameterError("u must be a grid point of the model")
    if np.any((j < 2) | (j > lu.size - 3)):
        raise InvalidParameterError("u too close to the grid edge for differencing")
    return j


def metric_determinant(model: RadialMetricModel, u=None):
    """``det g = P'(P' + u P'') = P_s P_ss / 8u^2``, on the grid or at given grid points."""
    d1, d2 = _s_derivatives(model.potential, model.h)
    det = d1 * d2 / (8 * model.u**2)
    if u is None:
        return det
    out = det[_grid_index(model, u)].astype(float)
    return float(out[0]) if np.ndim(u) == 0 else out


def sigma_from_potential(model: RadialMetricModel) -> np.ndarray:
    """``sigma = dP/ds`` by the five-point central difference; NaN at the ends."""
    return _s_derivatives(model.potential, model.h)[0]


def identity_profile(model: RadialMetricModel, mu: float | None = None) -> np.ndarray:
    """``Psi(u) = -log det g + 2 lam P + mu sigma`` with edges set to NaN."""
    mu = model.mu if mu is None else mu
    det = metric_determinant(model)
    psi = -np.log(det) + 2 * model.lam * model.potential + LD(mu) * sigma_from_potential(model)
    psi[:EDGE] = np.nan
    psi[-EDGE:] = np.nan
    return psi


def soliton_identity_residual(model: RadialMetricModel, mu: float | None = None) -> float:
    """``max |Psi - mean Psi|`` over the grid without ``EDGE`` points at each end.

    ``mu`` overrides the model's soliton coefficient, which is how a wrong
    vector field is tested against a correct metric.
    """
    psi = identity_profile(model, mu)[EDGE:-EDGE]
    return float(np.max(np.abs(psi - psi.mean())))


@dataclass(frozen=True)
class FullMetricReport:
    grid: tuple[float, float, int]
    max_identity_residual: float
    convergence_order_estimate: float
    coarse_residual: float

    def to_dict(self) -> dict:
        return {
            "grid": list(self.grid),
            "max_identity_residual": self.max_identity_residual,
            "convergence_order_estimate": self.convergence_order_estimate,
        }


def convergence_study(pr: SolitonProfile, u_range=DEFAULT_U, h: float = DEFAULT_H,
                      sigma0: float | None = None) -> FullMetricReport:
    """Residual at step ``h`` and the observed order from steps ``2h`` and ``h``."""
    fine = RadialMetricModel.from_profile(pr, u_range, h, sigma0)
    coarse = RadialMetricModel.from_profile(pr, u_range, 2 * h, sigma0)
    rf = soliton_identity_residual(fine)
    rc = soliton_identity_residual(coarse)
    order = math.log2(rc / rf) if rf > 0 and rc > 0 else math.inf
    grid = (float(fine.u[0]), float(fine.u[-1]), int(fine.u.size))
    return FullMetricReport(grid, rf, order, rc)
