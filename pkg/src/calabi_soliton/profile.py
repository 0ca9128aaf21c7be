"""Gradient Kahler-Ricci soliton profiles of the Calabi ansatz.

A profile is the function ``phi(sigma)`` solving the linear first order
equation

    phi' + (m / sigma - mu) phi = kappa + 2 lam sigma,

whose general solution is

    phi = nu e^{mu sigma} / sigma^m - 2 lam sigma / mu
          - nu0 sigma^{-m} sum_{j<=m} (mu sigma)^j / j!,

with ``nu0 = (m+1)! (2 lam + kappa mu / (m+1)) / mu^{m+2}``.

Evaluation never uses the displayed sum naively where it cancels:

* the ``a = 0`` cone solution ``phi_cone`` (``nu = nu0``) is summed as an
  entire series for ``|mu sigma| < 1`` and as ``e^x`` minus its Taylor
  polynomial otherwise;
* a profile whose ``nu`` is the boundary constant of ``a > 0`` is written
  as ``phi_cone(sigma) - phi_cone(a) e^{mu (sigma - a)} (a / sigma)^m``;
* close to a positive endpoint ``a`` the Taylor series generated by the
  ODE is used, which keeps relative accuracy where ``phi`` vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DegenerateSolitonError, InvalidParameterError

MAX_M = 30
SERIES_SWITCH = 1.0  # |mu sigma| below which the cone series is used
TAYLOR_RADIUS = 0.02  # relative distance to a inside which the Taylor branch is used
TAYLOR_ORDER = 28
ENDPOINT_ATOL = 1e-10  # |phi(a)| below which a is treated as a zero
_FD8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_FD8_OFFSETS = np.arange(-4, 5)


def _check_common(m, lam=None, mu=None):
    if int(m) != m or not 1 <= m <= MAX_M:
        raise InvalidParameterError(f"m must be an integer in [1, {MAX_M}], got {m!r}")
    if lam is not None and lam not in (-1, 0, 1):
        raise InvalidParameterError(f"lambda must be -1, 0 or 1, got {lam!r}")
    if mu is not None:
        if mu == 0:
            raise DegenerateSolitonError(
                "mu = 0 makes the soliton potential constant; no gradient soliton field"
            )
        if not math.isfinite(mu):
            raise InvalidParameterError(f"mu must be finite, got {mu!r}")


def _bracket(m, kappa, lam, mu):
    """(m+1)! (2 lam + kappa mu / (m+1)) = nu0 mu^{m+2}.

    Evaluated in exact rational arithmetic and rounded once: near the
    shrinking root the two terms cancel to many digits.
    """
    exact = math.factorial(m) * (2 * lam * (m + 1) + Fraction(kappa) * Fraction(mu))
    return float(exact)


def nu_zero(m: int, kappa: float, lam: int, mu: float) -> float:
    _check_common(m, lam, mu)
    return _bracket(m, kappa, lam, mu) / mu ** (m + 2)


def nu_boundary(m: int, kappa: float, lam: int, mu: float, a: float) -> float:
    """Integration constant ``nu`` for which ``phi(a) = 0``.

    The factor ``a^m`` is multiplied into the sum so that ``a = 0`` is
    regular and reproduces :func:`nu_zero`.
    """
    _check_common(m, lam, mu)
    if a < 0:
        raise InvalidParameterError(f"a must be nonnegative, got {a}")
    fm1 = math.factorial(m + 1)
    coef = (2.0 * lam + kappa * mu / (m + 1)) / mu ** (m + 2)
    total = sum(fm1 / math.factorial(j) * mu**j * a**j for j in range(m + 1))
    return math.exp(-mu * a) * (2.0 * lam / mu * a ** (m + 1) + coef * total)


def _exact_nu0_free(m, kappa, lam, mu, sigma) -> float:
    """The ``nu = 0`` closed form at one point, in rational arithmetic.

    Without the ``e^{mu sigma}`` mode the profile is rational in
    ``(sigma, mu, kappa)``, so the cancellation at a zero costs nothing.
    """
    s, u = Fraction(sigma), Fraction(mu)
    A = math.factorial(m) * (2 * lam * (m + 1) + Fraction(kappa) * u)
    x = u * s
    tail = sum(x ** (j - m) / math.factorial(j) for j in range(m + 1))
    return float(-2 * lam * s / u - A / u**2 * tail)


def _partial_exp(x, m):
    """sum_{j<=m} x^j / j! for array x."""
    out = np.ones_like(x)
    term = np.ones_like(x)
    for j in range(1, m + 1):
        term = term * x / j
        out = out + term
    return out


def _series_tail(m, x, A, sigma, truncation=None):
    """A sum_{j>=2} mu^{j-2} sigma^j / (j+m)!, returning (value, last index)."""
    term = A * sigma**2 / math.factorial(m + 2)
    total = np.array(term, copy=True)
    growth = np.exp(np.abs(x))
    limit = truncation if truncation is not None else 400
    j = 2
    while True:
        nxt = term * x / (j + 1 + m)
        bound = np.abs(nxt) * growth
        if truncation is None and np.all(bound <= 1e-17 * (1.0 + np.abs(total))):
            return total, j
        if j >= limit:
            break
        j += 1
        term = nxt
        total = total + term
    if np.any(bound >= 1e-15 * (1.0 + np.abs(total))):
        raise InvalidParameterError(f"truncation {j} leaves a tail bound above 1e-15 relative")
    return total, j


def phi_cone_series(m, kappa, lam, mu, sigma, truncation=None):
    """Entire-series form of the ``a = 0``, ``nu = nu0`` profile.

    ``phi = kappa sigma / (m+1) + nu0 sum_{j>=2} mu^{j+m} sigma^j / (j+m)!``.
    The series is summed until the tail bound ``|next term| e^{|mu sigma|}``
    drops below 1e-17 relative, or with exactly ``truncation`` terms (index
    of the last term kept), in which case a bound above 1e-15 is an error.
    """
    _check_common(m, lam, mu)
    sig = np.asarray(sigma, dtype=float)
    if np.any(sig < 0):
        raise InvalidParameterError("sigma must be nonnegative")
    A = _bracket(m, kappa, lam, mu)
    x = mu * sig
    # terms: A sigma^2/(m+2)! * prod_{i=3..j} (mu sigma)/(i+m)
    tail, _ = _series_tail(m, x, A, sig, truncation)
    out = kappa * sig / (m + 1) + tail
    return out if out.ndim else float(out)


def phi_cone(m, kappa, lam, mu, sigma):
    """Profile of the expanding-cone family (``a = 0``, ``nu = nu0``)."""
    _check_common(m, lam, mu)
    sig = np.asarray(sigma, dtype=float)
    x = mu * sig
    out = np.empty_like(sig)
    small = np.abs(x) < SERIES_SWITCH
    if np.any(small):
        out[small] = phi_cone_series(m, kappa, lam, mu, sig[small])
    big = ~small
    if np.any(big):
        xb = x[big]
        A = _bracket(m, kappa, lam, mu)
        with np.errstate(over="ignore"):
            em = np.exp(xb) - _partial_exp(xb, m)
            out[big] = A / mu**2 * em / xb**m - 2.0 * lam * sig[big] / mu
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SolitonProfile:
    """Gradient Kahler-Ricci soliton profile ``phi`` on ``(a, b)``.

    Parameters
    ----------
    m : int
        Complex dimension of the transverse Kahler-Einstein space.
    kappa : float
        Transverse Einstein constant.
    lam : {-1, 0, 1}
        Soliton type (shrinking, steady, expanding) in the convention
        ``rho + 2 lam omega = -i ddbar Q``.
    mu : float
        Coefficient of the soliton field ``grad Q = mu r d/dr``.
    nu : float
        Integration constant of the closed form.
    a, b : float
        Endpoints of the interval of positivity; ``b`` may be ``inf``.
    """

    m: int
    kappa: float
    lam: int
    mu: float
    nu: float
    a: float = 0.0
    b: float = math.inf
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_common(self.m, self.lam, self.mu)
        if not (self.a >= 0 and self.b > self.a):
            raise InvalidParameterError(f"need 0 <= a < b, got a={self.a}, b={self.b}")
        if not math.isfinite(self.nu):
            raise InvalidParameterError("nu must be finite")

    @classmethod
    def with_boundary(cls, m, kappa, lam, mu, a, b=math.inf):
        """Profile with ``nu`` fixed by ``phi(a) = 0``."""
        return cls(m, float(kappa), int(lam), float(mu), nu_boundary(m, kappa, lam, mu, a), float(a), b)

    @classmethod
    def expanding_cone(cls, m, kappa, mu):
        return cls(m, float(kappa), 1, float(mu), nu_zero(m, kappa, 1, mu), 0.0)

    @property
    def nu0(self) -> float:
        return nu_zero(self.m, self.kappa, self.lam, self.mu)

    @cached_property
    def anchored(self) -> bool:
        """True when ``nu`` is the boundary constant of ``a`` (to rounding)."""
        if self.a == 0:
            return self.nu == self.nu0 or abs(self.nu - self.nu0) <= 1e-13 * abs(self.nu0)
        nb = nu_boundary(self.m, self.kappa, self.lam, self.mu, self.a)
        scale = max(abs(nb), abs(self.nu0), 1e-300)
        return abs(self.nu - nb) <= 1e-13 * scale

    def replace(self, **kw) -> "SolitonProfile":
        d = dict(m=self.m, kappa=self.kappa, lam=self.lam, mu=self.mu, nu=self.nu, a=self.a, b=self.b)
        d.update(kw)
        return SolitonProfile(**d)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "kappa": self.kappa,
            "lambda": self.lam,
            "mu": self.mu,
            "nu": self.nu,
            "a": self.a,
            "b": None if math.isinf(self.b) else self.b,
        }

    @classmethod
    def from_dict(cls, d) -> "SolitonProfile":
        b = d.get("b")
        return cls(int(d["m"]), float(d["kappa"]), int(d["lambda"]), float(d["mu"]),
                   float(d["nu"]), float(d.get("a", 0.0)), math.inf if b is None else float(b))

    # -- evaluation -------------------------------------------------------

    def _decaying(self, sig):
        """The ``nu = 0`` solution for ``mu > 0`` (no ``e^{mu sigma}`` mode)."""
        m, kappa, lam, mu = self.m, self.kappa, self.lam, self.mu
        x = mu * sig
        A = _bracket(m, kappa, lam, mu)
        with np.errstate(over="ignore", invalid="ignore"):
            direct = -2.0 * lam * sig / mu - A / mu**2 * _partial_exp(x, m) / x**m
            near = np.abs(x) < SERIES_SWITCH
            if not np.any(near):
                return direct
            # the polynomial form cancels to O(x^{m+2}) for small x
            split = np.zeros_like(sig)
            split[near] = phi_cone(m, kappa, lam, mu, sig[near]) - self.nu0 * np.exp(x[near]) / sig[near] ** m
        return np.where(near, split, direct)

    def _global(self, sig):
        """Closed-form value away from the Taylor window."""
        m, kappa, lam, mu, nu = self.m, self.kappa, self.lam, self.mu, self.nu
        x = mu * sig
        with np.errstate(over="ignore", invalid="ignore"):
            if mu > 0 and self.anchored and self.a > 0 and nu != 0:
                # referencing the nu = 0 solution keeps the growing mode at the
                # size of phi_0(a) instead of a difference of two nu0 terms
                a = self.a
                pa = _exact_nu0_free(m, kappa, lam, mu, a)
                return self._decaying(sig) - pa * np.exp(mu * (sig - a)) * (a / sig) ** m
            if mu > 0 and (nu == 0 or not self.anchored):
                out = self._decaying(sig)
                return out + nu * np.exp(x) / sig**m if nu != 0 else out
            base = phi_cone(m, kappa, lam, mu, sig)
            if self.anchored and self.a > 0:
                a = self.a
                pa = phi_cone(m, kappa, lam, mu, a)
                return base - pa * np.exp(mu * (sig - a)) * (a / sig) ** m
            if self.anchored:
                return base
            return base + (nu - self.nu0) * np.exp(x) / sig**m

    def phi_at_a(self) -> float:
        """Value of the closed form at the left endpoint (``0`` for cones)."""
        if self.a == 0:
            return 0.0 if self.anchored else math.nan
        if self.nu == 0:
            return _exact_nu0_free(self.m, self.kappa, self.lam, self.mu, self.a)
        return float(self._global(np.array([self.a]))[0])

    def taylor_coefficients(self, phi_a=None, order=TAYLOR_ORDER):
        """Coefficients ``c_n = phi^(n)(a)/n!`` generated by the ODE at ``a > 0``."""
        if self.a <= 0:
            raise InvalidParameterError("Taylor expansion needs a > 0")
        key = ("taylor", phi_a, order)
        if key in self._cache:
            return self._cache[key]
        a, m, mu, kappa, lam = self.a, self.m, self.mu, self.kappa, self.lam
        r = [kappa * a + 2 * lam * a * a, kappa + 4 * lam * a, 4.0 * lam]
        c = [self.phi_at_a() if phi_a is None else float(phi_a)]
        prev = 0.0
        for n in range(order):
            rn = r[n] / math.factorial(n) if n < 3 else 0.0
            nxt = ((mu * a - m - n) * c[n] + mu * prev + rn) / ((n + 1) * a)
            prev = c[n]
            c.append(nxt)
        coeffs = np.array(c)
        self._cache[key] = coeffs
        return coeffs

    def phi_tau(self, tau, phi_a=None):
        """``phi(a + tau)`` by the Taylor series at ``a``; accurate for small ``tau``."""
        c = self.taylor_coefficients(phi_a)
        return np.polyval(c[::-1], np.asarray(tau, dtype=float))

    @cached_property
    def pinned(self) -> bool:
        """True when ``phi`` is taken to vanish at ``a > 0``.

        That holds for profiles built from the boundary condition and for
        any profile whose closed-form value at ``a`` is below
        ``1e-10 (1 + |kappa|)``.
        """
        if self.a <= 0:
            return False
        return self.anchored or abs(self.phi_at_a()) <= ENDPOINT_ATOL * (1 + abs(self.kappa))

    def phi_from_a(self, tau):
        """``phi(a + tau)`` for ``tau >= 0``, exactly zero at ``tau = 0`` when pinned."""
        tau = np.asarray(tau, dtype=float)
        if self.a == 0:
            return phi_closed(self, np.maximum(tau, np.finfo(float).tiny))
        out = np.array(phi_closed(self, self.a + tau), dtype=float, ndmin=1)
        t1 = np.atleast_1d(tau)
        win = np.abs(t1) <= TAYLOR_RADIUS * self.a
        if self.pinned and np.any(win):
            out[win] = self.phi_tau(t1[win], phi_a=0.0)
        return out if tau.ndim else float(out[0])

    def ratio_from_a(self, tau):
        """``phi(a + tau) / tau``, finite at ``tau = 0`` for pinned profiles."""
        t1 = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.empty_like(t1)
        win = np.abs(t1) <= TAYLOR_RADIUS * self.a if self.a > 0 else np.zeros(t1.shape, bool)
        if self.pinned and np.any(win):
            c = self.taylor_coefficients(0.0)
            out[win] = np.polyval(c[1:][::-1], t1[win])
        rest = ~win if self.pinned else np.ones(t1.shape, bool)
        if np.any(rest):
            out[rest] = phi_closed(self, self.a + t1[rest]) / t1[rest]
        return out if np.ndim(tau) else float(out[0])

    def __call__(self, sigma):
        return phi_closed(self, sigma)


def phi_closed(pr: SolitonProfile, sigma):
    """Evaluate the closed-form profile at ``sigma > 0`` (scalar or array)."""
    sig = np.asarray(sigma, dtype=float)
    if np.any(~(sig > 0)):
        raise InvalidParameterError("phi is defined for sigma > 0 only")
    scalar = sig.ndim == 0
    sig = np.atleast_1d(sig)
    out = pr._global(sig)
    if pr.a > 0:
        tau = sig - pr.a
        win = np.abs(tau) <= TAYLOR_RADIUS * pr.a
        if np.any(win):
            out = np.array(out, dtype=float, copy=True)
            out[win] = pr.phi_tau(tau[win])
    return float(out[0]) if scalar else out


def phi_prime(pr: SolitonProfile, sigma):
    """``phi'`` from the ODE identity (no differencing)."""
    sig = np.asarray(sigma, dtype=float)
    if np.any(~(sig > 0)):
        raise InvalidParameterError("phi' is defined for sigma > 0 only")
    val = (pr.mu - pr.m / sig) * phi_closed(pr, sig) + pr.kappa + 2 * pr.lam * sig
    return float(val) if np.ndim(val) == 0 else val


def fd_step(pr: SolitonProfile, sig):
    """Finite-difference step used by the residual oracles."""
    h = 0.01 * sig
    return np.minimum(h, 0.05 / abs(pr.mu) + 0.0 * sig)


def central_derivative(f, x, h):
    """Eighth-order central first derivative of a vectorized ``f``."""
    x = np.asarray(x, dtype=float)
    pts = x[..., None] + _FD8_OFFSETS * np.asarray(h)[..., None]
    vals = f(pts.ravel()).reshape(pts.shape)
    return vals @ _FD8 / h


def ode_residual(pr: SolitonProfile, sigma):
    """Residual ``phi' + (m/sigma - mu) phi - (kappa + 2 lam sigma)``.

    ``phi'`` is an eighth-order central difference of :func:`phi_closed`,
    so the check does not reuse the ODE identity behind :func:`phi_prime`.
    """
    sig = np.asarray(sigma, dtype=float)
    if np.any(~(sig > 0)):
        raise InvalidParameterError("residual is defined for sigma > 0 only")
    s1 = np.atleast_1d(sig)
    h = fd_step(pr, s1)
    dphi = central_derivative(lambda x: phi_closed(pr, x), s1, h)
    res = dphi + (pr.m / s1 - pr.mu) * phi_closed(pr, s1) - (pr.kappa + 2 * pr.lam * s1)
    return float(res[0]) if sig.ndim == 0 else res


def zero_slope(kappa: float, lam: int, sigma0: float) -> float:
    """Slope ``kappa + 2 lam sigma0`` forced at any zero of a profile."""
    return kappa + 2 * lam * sigma0
