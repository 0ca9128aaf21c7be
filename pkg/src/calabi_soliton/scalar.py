"""Gradient scalar solitons of the radial ansatz on ``(1, inf)``.

The metric with profile ``phi`` has scalar curvature
``S = kappa m / sigma - sigma^{-m} (sigma^m phi)''`` and the scalar soliton
equation ``S + Delta(-mu sigma) = c`` reads

    (sigma^m phi)'' - mu (sigma^m phi)' = m kappa sigma^{m-1} - c sigma^m.

Completeness at ``sigma = 1`` requires ``phi(1) = phi'(1) = 0``, which
fixes both integration constants of the explicit solution

    phi = -(kappa - c/mu) sum_{j<=m} m!/(m-j)! sigma^{-j} / mu^{j+1}
          + c sigma / (mu (m+1)) - (c1/mu) sigma^{-m} + c2 e^{mu sigma} sigma^{-m}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConvergenceError, DegenerateSolitonError, InvalidParameterError
from .profile import MAX_M, SolitonProfile, central_derivative, phi_closed, phi_prime

TAYLOR_REACH = 2.0  # |mu| (sigma - 1) below which the series at 1 is used
TAYLOR_TERMS = 48
_FD8_2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
_FD8_OFFSETS = np.arange(-4, 5)


def _falling(m, j):
    """m! / (m - j)!"""
    return math.perm(m, j)


def constants_c1_c2(m: int, kappa: float, c: float, mu: float) -> tuple[float, float]:
    """Integration constants fixed by ``phi'(1) = 0`` and ``phi(1) = 0``."""
    c1 = -kappa + c / (m + 1)
    c2 = math.exp(-mu) * _c2_bracket(m, kappa, c, mu) if -mu < 700 else math.inf
    return c1, c2


def _c2_bracket(m, kappa, c, mu):
    if mu == 0:
        raise DegenerateSolitonError("mu = 0 leaves no soliton field")
    s1 = sum(_falling(m, j) * mu ** (-(j + 1)) for j in range(1, m + 1))
    s2 = sum(_falling(m, j) * mu ** (-(j + 2)) for j in range(0, m + 1))
    # the forcing -c x^{m+1}/(m+1) contributes +c/mu to the particular
    # solution, hence the minus sign in front of c here
    return kappa * s1 - c * s2


@dataclass(frozen=True)
class ScalarSolitonProfile:
    """Scalar soliton profile with the double zero ``phi(1) = phi'(1) = 0``.

    ``c2_scaled = c2 e^{mu}`` is what the evaluation uses, so that large
    ``|mu|`` never overflows.
    """

    m: int
    kappa: float
    c: float
    mu: float
    c1: float
    c2: float
    c2_scaled: float

    @classmethod
    def build(cls, m: int, kappa: float, c: float, mu: float) -> "ScalarSolitonProfile":
        if int(m) != m or not 1 <= m <= MAX_M:
            raise InvalidParameterError(f"m must be an integer in [1, {MAX_M}], got {m!r}")
        if mu == 0:
            raise DegenerateSolitonError("mu = 0 leaves no soliton field")
        c1, c2 = constants_c1_c2(m, kappa, c, mu)
        return cls(int(m), float(kappa), float(c), float(mu), c1, c2, _c2_bracket(m, kappa, c, mu))

    @property
    def admissible(self) -> bool:
        """Hypotheses of the completeness theorem."""
        return self.kappa - self.c / (self.m + 1) >= 0 and self.c < 0 and self.mu < 0

    def to_dict(self) -> dict:
        return {"m": self.m, "kappa": self.kappa, "c": self.c, "mu": self.mu,
                "c1": self.c1, "c2": self.c2 if math.isfinite(self.c2) else None}

    def __call__(self, sigma):
        return phi_scalar(self, sigma)

    # derivatives of y = sigma^m phi at sigma = 1
    def y_taylor(self, order: int = TAYLOR_TERMS) -> np.ndarray:
        """Coefficients ``y^(n)(1) / n!`` of ``y = sigma^m phi`` at ``sigma = 1``."""
        m, mu, kappa, c = self.m, self.mu, self.kappa, self.c
        # y' = mu y + g with g = kappa s^m - c s^{m+1}/(m+1) + c1
        gder = [0.0] * (order + 1)
        for n in range(order + 1):
            v = kappa * _falling(m, n) if n <= m else 0.0
            v -= c * _falling(m + 1, n) / (m + 1) if n <= m + 1 else 0.0
            gder[n] = v
        gder[0] += self.c1
        d = [0.0] * (order + 1)
        for n in range(order):
            d[n + 1] = mu * d[n] + gder[n]
        return np.array([d[n] / math.factorial(n) for n in range(order + 1)])


def _closed(pr: ScalarSolitonProfile, sig):
    m, kappa, c, mu, c1 = pr.m, pr.kappa, pr.c, pr.mu, pr.c1
    lead = -(kappa - c / mu)
    poly = sum(_falling(m, j) * sig ** (-j) / mu ** (j + 1) for j in range(m + 1))
    with np.errstate(over="ignore"):
        hom = pr.c2_scaled * np.exp(mu * (sig - 1.0)) * sig ** (-m)
    return lead * poly + c * sig / (mu * (m + 1)) - c1 / mu * sig ** (-m) + hom


def phi_scalar(pr: ScalarSolitonProfile, sigma):
    """Closed-form scalar soliton profile for ``sigma >= 1``.

    Close to ``sigma = 1`` the closed form cancels to ``O((sigma-1)^2)``
    and the Taylor series of ``sigma^m phi`` at 1 is used instead.
    """
    sig = np.asarray(sigma, dtype=float)
    if np.any(~(sig >= 1)):
        raise InvalidParameterError("the scalar soliton profile lives on sigma >= 1")
    s1 = np.atleast_1d(sig)
    out = _closed(pr, s1)
    tau = s1 - 1.0
    win = abs(pr.mu) * tau <= TAYLOR_REACH
    if np.any(win):
        coef = pr.y_taylor()
        out[win] = np.polyval(coef[::-1], tau[win]) / s1[win] ** pr.m
    return float(out[0]) if sig.ndim == 0 else out


def dphi_scalar(pr: ScalarSolitonProfile, sigma):
    """``phi'`` from the first integral ``y' = mu y + g`` (no differencing)."""
    sig = np.asarray(sigma, dtype=float)
    m = pr.m
    phi = phi_scalar(pr, sig)
    g = pr.kappa * sig**m - pr.c * sig ** (m + 1) / (m + 1) + pr.c1
    # y' = m s^{m-1} phi + s^m phi'
    return (pr.mu * phi + g / sig**m) - m * phi / sig


def d2phi_scalar(pr: ScalarSolitonProfile, sigma):
    sig = np.asarray(sigma, dtype=float)
    m = pr.m
    phi = phi_scalar(pr, sig)
    dphi = dphi_scalar(pr, sig)
    # y'' = mu y' + g' and y'' = m(m-1) s^{m-2} phi + 2 m s^{m-1} phi' + s^m phi''
    yp = sig**m * dphi + m * sig ** (m - 1) * phi
    gp = pr.kappa * m * sig ** (m - 1) - pr.c * sig**m
    ypp = pr.mu * yp + gp
    return (ypp - m * (m - 1) * sig ** (m - 2) * phi - 2 * m * sig ** (m - 1) * dphi) / sig**m


def _fd_step(pr, sig):
    # keep the stencil inside [1, inf)
    return np.minimum.reduce([0.01 * sig, (sig - 1.0) / 5.0, np.full_like(sig, 0.05 / abs(pr.mu))])


def scalar_ode_residual(pr: ScalarSolitonProfile, sigma):
    """Residual of the scalar soliton equation divided by ``sigma^m``.

    Derivatives are eighth-order central differences of :func:`phi_scalar`:

        phi'' + 2m phi'/sigma + m(m-1) phi/sigma^2 - mu (phi' + m phi/sigma)
              - m kappa / sigma + c.
    """
    sig = np.asarray(sigma, dtype=float)
    if np.any(~(sig > 1)):
        raise InvalidParameterError("residual is evaluated on sigma > 1")
    s1 = np.atleast_1d(sig)
    h = _fd_step(pr, s1)
    m = pr.m
    f = lambda x: phi_scalar(pr, x)  # noqa: E731
    d1 = central_derivative(f, s1, h)
    pts = s1[:, None] + _FD8_OFFSETS * h[:, None]
    d2 = f(pts.ravel()).reshape(pts.shape) @ _FD8_2 / h**2
    phi = f(s1)
    res = (d2 + 2 * m * d1 / s1 + m * (m - 1) * phi / s1**2
           - pr.mu * (d1 + m * phi / s1) - m * pr.kappa / s1 + pr.c)
    return float(res[0]) if sig.ndim == 0 else res


def first_integral_residual(pr: ScalarSolitonProfile, sigma):
    """``[(s^m phi)' - mu s^m phi - (kappa s^m - c s^{m+1}/(m+1) + c1)] / s^m`` by differencing."""
    sig = np.asarray(sigma, dtype=float)
    s1 = np.atleast_1d(sig)
    m = pr.m
    h = _fd_step(pr, s1)
    y = lambda x: x**m * phi_scalar(pr, x)  # noqa: E731
    dy = central_derivative(y, s1, h)
    g = pr.kappa * s1**m - pr.c * s1 ** (m + 1) / (m + 1) + pr.c1
    res = (dy - pr.mu * y(s1) - g) / s1**m
    return float(res[0]) if sig.ndim == 0 else res


def _phi_pair(pr, sig):
    if isinstance(pr, ScalarSolitonProfile):
        return phi_scalar(pr, sig), dphi_scalar(pr, sig), d2phi_scalar(pr, sig)
    if isinstance(pr, SolitonProfile):
        phi = phi_closed(pr, sig)
        dphi = phi_prime(pr, sig)
        # differentiate phi' = (mu - m/s) phi + kappa + 2 lam s
        d2 = (pr.mu - pr.m / sig) * dphi + pr.m / sig**2 * phi + 2 * pr.lam
        return phi, dphi, d2
    raise InvalidParameterError(f"unsupported profile type {type(pr).__name__}")


def laplacian_radial(pr, u, sigma, du=None, d2u=None):
    """Laplacian ``(m/sigma) u' phi + (u' phi)'`` of a function of ``sigma``.

    ``u`` is a vectorized callable; its derivatives default to eighth-order
    central differences.
    """
    sig = np.asarray(sigma, dtype=float)
    lo = getattr(pr, "a", 1.0)
    if np.any(~(sig > lo)):
        raise InvalidParameterError(f"sigma must exceed the left endpoint {lo}")
    s1 = np.atleast_1d(sig)
    h = np.minimum(1e-3 * s1, 0.1 * (s1 - lo))
    up = du(s1) if du is not None else central_derivative(u, s1, h)
    if d2u is not None:
        upp = d2u(s1)
    else:
        pts = s1[:, None] + _FD8_OFFSETS * h[:, None]
        upp = u(pts.ravel()).reshape(pts.shape) @ _FD8_2 / h**2
    phi, dphi, _ = _phi_pair(pr, s1)
    out = pr.m / s1 * up * phi + upp * phi + up * dphi
    return float(out[0]) if sig.ndim == 0 else out


def scalar_curvature(pr, m: int, kappa: float, sigma):
    """``S = kappa m / sigma - sigma^{-m} (sigma^m phi)''`` with analytic derivatives."""
    sig = np.asarray(sigma, dtype=float)
    if np.any(~(sig > 0)):
        raise InvalidParameterError("sigma must be positive")
    s1 = np.atleast_1d(sig)
    phi, dphi, d2 = _phi_pair(pr, s1)
    out = kappa * m / s1 - (m * (m - 1) * phi / s1**2 + 2 * m * dphi / s1 + d2)
    return float(out[0]) if sig.ndim == 0 else out


def positivity_certificate(pr: ScalarSolitonProfile, sigma_max: float, n: int = 4000) -> bool:
    """Check ``phi > 0`` on ``(1, sigma_max]`` together with the differential inequality.

    At each sample ``(s^m phi)' - mu s^m phi >= -c (s - 1)/(m+1) > 0`` is
    verified, which is what forces positivity in the completeness proof.
    """
    if not pr.admissible:
        raise InvalidParameterError(
            "positivity needs kappa - c/(m+1) >= 0, c < 0 and mu < 0; "
            f"got kappa={pr.kappa}, c={pr.c}, mu={pr.mu}"
        )
    if not sigma_max > 1:
        raise InvalidParameterError("sigma_max must exceed 1")
    sig = 1.0 + np.geomspace(1e-6, sigma_max - 1.0, n)
    m = pr.m
    phi = phi_scalar(pr, sig)
    dphi = dphi_scalar(pr, sig)
    lhs = (sig**m * dphi + m * sig ** (m - 1) * phi - pr.mu * sig**m * phi) / sig**m
    rhs = -pr.c * (sig - 1.0) / (m + 1) / sig**m
    tol = 1e-9 * (abs(pr.kappa) + abs(pr.c) * sig)
    return bool(np.all(phi > 0) and np.all(rhs > 0) and np.all(lhs - rhs >= -tol))


def ricci_specialize(m: int, kappa: float) -> tuple[float, int, bool]:
    """Scalar constant and soliton type for which a scalar soliton is Ricci.

    Returns ``(c, lam, compatible)`` with ``c = (m+1) kappa`` and
    ``lam = -kappa / 2``; ``compatible`` marks the expanding case
    ``kappa < 0`` covered by the completeness theorem.
    """
    if kappa not in (-2, 2):
        raise InvalidParameterError(f"kappa must be -2 or 2 (kappa = -2 lam), got {kappa}")
    lam = int(-kappa // 2)
    return float((m + 1) * kappa), lam, kappa < 0


def ricci_profile(m: int, mu: float) -> SolitonProfile:
    """Ricci-soliton profile (``lam = 1``, ``kappa = -2``, ``a = 1``) matching the scalar case."""
    return SolitonProfile.with_boundary(m, -2.0, 1, mu, 1.0)


def oracle_integrate_scalar(pr: ScalarSolitonProfile, sigma_end, rtol: float = 1e-12):
    """``phi(sigma_end)`` by integrating the first integral for ``y = sigma^m phi``.

    The forcing is expanded in ``tau = sigma - 1`` with its constant term
    dropped (it vanishes by the choice of ``c1``), so the cancellation near
    ``sigma = 1`` never enters the integrator.
    """
    ends = np.atleast_1d(np.asarray(sigma_end, dtype=float))
    if np.any(~(ends >= 1)):
        raise InvalidParameterError("sigma_end must be >= 1")
    m = pr.m
    coef = [0.0] + [pr.kappa * math.comb(m, n) - pr.c * math.comb(m + 1, n) / (m + 1) for n in range(1, m + 2)]
    gpoly = np.polynomial.Polynomial(coef)

    def rhs(t, y):
        return pr.mu * y + gpoly(t)

    def jac(t, y):
        return np.array([[pr.mu]])

    order = np.argsort(ends)
    sol = solve_ivp(rhs, (0.0, float(ends.max()) - 1.0), [0.0], method="LSODA", rtol=rtol,
                    atol=1e-30, jac=jac, t_eval=ends[order] - 1.0)
    if sol.status != 0:
        raise ConvergenceError(sol.message)
    out = np.empty_like(ends)
    out[order] = sol.y[0] / ends[order] ** m
    return out if np.ndim(sigma_end) else float(out[0])
