"""Reconstruction of the radial data ``sigma(s)``, ``F(s)`` and the potential.

With ``s = log r`` the moment coordinate solves ``d sigma / ds = phi(sigma)``
with ``sigma(0) = sigma0``, the function ``F`` solves ``dF/ds = sigma - 1``
with ``F(0) = 0`` and the Kahler potential is ``P = s + F``.

The integration variable is ``y = log(sigma - a)``.  It turns the approach
to an endpoint zero of ``phi`` into a non-stiff drift, and ``dy/ds`` is
evaluated through ``phi(a + tau) / tau`` which stays finite at ``tau = 0``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp, tanhsinh

from .classify import ORDER_TOL, growth_exponent, vanishing_order
from .errors import ConvergenceError, InvalidParameterError
from .profile import SolitonProfile, ode_residual, phi_closed

RTOL = 1e-13
ATOL = 1e-14
SIGMA_CAP = 1e250
CSV_HEADER = ("s", "sigma", "phi", "F", "potential", "length", "residual")
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class RadialSolution:
    """Samples of ``sigma(s)`` and derived columns on ``[s_min, s_max]``.

    ``clipped`` is ``None`` when the full requested window was integrated,
    otherwise the pair of s-values actually reached.
    """

    s: np.ndarray
    sigma: np.ndarray
    phi: np.ndarray
    F: np.ndarray
    potential: np.ndarray
    length: np.ndarray
    sigma0: float
    profile: SolitonProfile
    clipped: tuple | None = None
    span: tuple = (0.0, 0.0)
    _dense: tuple = field(default=(), repr=False, compare=False)

    def __len__(self):
        return len(self.s)

    @property
    def window(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])

    def records(self):
        for row in zip(self.s, self.sigma, self.phi, self.F, self.potential, self.length):
            yield dict(zip(CSV_HEADER[:6], map(float, row)))

    def _state(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        lo, hi = self.span
        if np.any((s < lo - 1e-12 * max(1.0, abs(lo))) | (s > hi + 1e-12 * max(1.0, abs(hi)))):
            raise InvalidParameterError(f"s outside the integrated window [{lo}, {hi}]")
        if not self._dense:
            raise InvalidParameterError("solution carries no dense output")
        back, fwd = self._dense
        out = np.empty((3, s.size))
        neg = s < 0
        if np.any(neg):
            out[:, neg] = back(s[neg])
        if np.any(~neg):
            out[:, ~neg] = fwd(s[~neg])
        return out

    def sigma_at(self, s):
        """``sigma`` at arbitrary ``s`` inside the window (dense output)."""
        y = self._state(s)[0]
        val = self.profile.a + np.exp(y)
        return val if np.ndim(s) else float(val[0])

    def F_at(self, s):
        val = self._state(s)[1]
        return val if np.ndim(s) else float(val[0])

    def potential_at(self, s):
        """Kahler potential ``P(s) = s + F(s)``."""
        val = np.asarray(s, dtype=float) + self.F_at(s)
        return val if np.ndim(s) else float(val)


def _rhs_factory(pr: SolitonProfile):
    a = pr.a

    def rhs(_s, state):
        y = state[0]
        tau = math.exp(y)
        if a > 0:
            ratio = pr.ratio_from_a(tau)
        else:
            ratio = phi_closed(pr, tau) / tau
        sigma = a + tau
        ph = ratio * tau
        return [ratio, sigma - 1.0, math.sqrt(max(ph, 0.0))]

    return rhs


def _leg(rhs, y0, s_end, a, b):
    def leave_low(_s, st):
        return st[0] + 700.0

    def leave_high(_s, st):
        return math.log(min(b, SIGMA_CAP)) - math.log1p(a / math.exp(st[0])) - st[0] if a > 0 else math.log(min(b, SIGMA_CAP)) - st[0]

    leave_low.terminal = True
    leave_high.terminal = True
    sol = solve_ivp(rhs, (0.0, s_end), y0, method="DOP853", rtol=RTOL, atol=ATOL,
                    dense_output=True, events=(leave_low, leave_high))
    if sol.status < 0:
        last = sol.t[-1] if sol.t.size else 0.0
        raise ConvergenceError(f"integration failed at s = {last}: {sol.message}")
    return sol


def integrate_sigma(pr: SolitonProfile, sigma0: float, s_min: float, s_max: float, n: int) -> RadialSolution:
    """Integrate ``d sigma/ds = phi(sigma)`` from ``sigma(0) = sigma0``.

    Parameters
    ----------
    pr : SolitonProfile
        Profile, positive on ``(a, b)``.
    sigma0 : float
        Normalization ``sigma(0)``; must lie in ``(a, b)``.
    s_min, s_max : float
        Sampled window, ``s_min < s_max``.
    n : int
        Number of uniformly spaced samples.

    Returns
    -------
    RadialSolution
        Samples in the part of the window where ``sigma`` stays inside
        ``(a, b)``; ``clipped`` records the reached range otherwise.
    """
    if not (pr.a < sigma0 < pr.b):
        raise InvalidParameterError(f"sigma0 = {sigma0} is outside ({pr.a}, {pr.b})")
    if int(n) != n or n < 2:
        raise InvalidParameterError(f"need n >= 2 samples, got {n}")
    if not s_min < s_max:
        raise InvalidParameterError(f"need s_min < s_max, got {s_min}, {s_max}")
    if not phi_closed(pr, sigma0) > 0:
        raise InvalidParameterError(f"phi(sigma0) = {phi_closed(pr, sigma0)} is not positive")
    rhs = _rhs_factory(pr)
    y0 = [math.log(sigma0 - pr.a), 0.0, 0.0]
    back = _leg(rhs, y0, min(s_min, 0.0), pr.a, pr.b) if s_min < 0 else None
    fwd = _leg(rhs, y0, max(s_max, 0.0), pr.a, pr.b) if s_max > 0 else None

    lo = back.t[-1] if back is not None else 0.0
    hi = fwd.t[-1] if fwd is not None else 0.0
    s_all = np.linspace(s_min, s_max, int(n))
    keep = (s_all >= lo) & (s_all <= hi)
    s = s_all[keep]
    if s.size < 2:
        raise ConvergenceError(f"solution leaves ({pr.a}, {pr.b}) within s in [{lo}, {hi}]")

    def ev(part, t):
        if part is None:
            return np.tile(np.array(y0)[:, None], (1, np.size(t)))
        return part.sol(t)

    dense = (lambda t: ev(back, t), lambda t: ev(fwd, t))
    state = np.empty((3, s.size))
    neg = s < 0
    state[:, neg] = dense[0](s[neg]) if np.any(neg) else state[:, neg]
    state[:, ~neg] = dense[1](s[~neg]) if np.any(~neg) else state[:, ~neg]
    sigma = pr.a + np.exp(state[0])
    # sigma - a can drop below the resolution of sigma itself, so
    # monotonicity is checked on y = log(sigma - a)
    if not np.all(np.diff(state[0]) > 0):
        raise ConvergenceError("sigma(s) is not strictly increasing on the sampled window")
    phi = np.exp(state[0]) * (pr.ratio_from_a(np.exp(state[0])) if pr.a > 0 else phi_closed(pr, sigma) / sigma)
    F = state[1]
    clipped = None if keep.all() else (float(lo), float(hi))
    return RadialSolution(
        s=s, sigma=sigma, phi=phi, F=F, potential=s + F, length=state[2],
        sigma0=float(sigma0), profile=pr, clipped=clipped,
        span=(float(lo), float(hi)), _dense=dense,
    )


def reconstruct_F(sol: RadialSolution) -> RadialSolution:
    """Recompute ``F`` and the potential by quadrature of ``sigma - 1`` in ``s``.

    Each sample interval is integrated with 8-point Gauss-Legendre on the
    dense ``sigma(s)``, independently of the ``F`` carried by the integrator.
    """
    s = sol.s
    ds = (s[-1] - s[0]) / max(len(s) - 1, 1)
    # the normalization point s = 0 may lie outside the sampled window
    gap = np.linspace(0.0, s[0] if s[0] > 0 else s[-1], int(abs(s[0] if s[0] > 0 else min(s[-1], 0.0)) / ds) + 2)
    knots = np.union1d(s, gap)
    cum = np.concatenate([[0.0], np.cumsum(_gl_pieces(sol, knots))])
    cum = cum - cum[int(np.searchsorted(knots, 0.0))]
    F = cum[np.searchsorted(knots, s)]
    return replace(sol, F=F, potential=s + F)


def _gl_pieces(sol, knots):
    mid = 0.5 * (knots[1:] + knots[:-1])
    half = 0.5 * (knots[1:] - knots[:-1])
    nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = sol.sigma_at(nodes.ravel()).reshape(nodes.shape) - 1.0
    return (vals @ _GL_W) * half


def geodesic_length(pr: SolitonProfile, tau_from: float, tau_to: float) -> float:
    """Length ``int dtau / sqrt(phi(a + tau))`` of a radial segment.

    An endpoint where ``phi`` vanishes to order at least two, or the end at
    infinity when ``phi`` grows at most quadratically, makes the integral
    diverge and ``inf`` is returned.  Otherwise the integral is evaluated by
    tanh-sinh quadrature, which absorbs the ``tau^{-1/2}`` endpoint
    singularity of a simple zero.
    """
    if not (0 <= tau_from < tau_to) or pr.a + tau_to > pr.b:
        raise InvalidParameterError(f"invalid range [{tau_from}, {tau_to}] for ({pr.a}, {pr.b})")
    if tau_from == 0 and (pr.pinned or pr.a == 0):
        if vanishing_order(pr, "left_a") >= 2 - ORDER_TOL:
            return math.inf
    if math.isinf(tau_to):
        if math.isinf(pr.b) and growth_exponent(pr) <= 2 + ORDER_TOL:
            return math.inf
    elif pr.a + tau_to == pr.b and vanishing_order(pr, "right_b") >= 2 - ORDER_TOL:
        return math.inf

    def integrand(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / np.sqrt(pr.phi_from_a(t))

    res = tanhsinh(integrand, tau_from, tau_to, rtol=1e-12)
    if res.status != 0 or not np.isfinite(res.integral):
        raise ConvergenceError(f"length quadrature failed (status {res.status})")
    return float(res.integral)


def asymptotic_coefficient(sol: RadialSolution, mu: float, max_points: int = 8,
                           rtol: float = 1e-6, return_error: bool = False):
    """Limit of ``sigma(s) e^{2 s / mu}`` (``mu < 0``) or ``sigma(s) e^{-2 s / mu}`` (``mu > 0``).

    The rescaled function is analytic in ``w = e^{-2 s / |mu|}``, so the tail
    samples are extrapolated to ``w = 0`` by Neville's scheme; the error
    estimate is the difference of the two highest-order extrapolants.
    """
    if mu == 0:
        raise InvalidParameterError("mu must be nonzero")
    s = sol.s
    rate = 2.0 / abs(mu)
    w = np.exp(-rate * s)
    g = sol.sigma * w
    ds = s[1] - s[0]
    stride = max(1, int(round(math.log(2.0) / (rate * ds))))
    idx = np.arange(len(s) - 1, -1, -stride)[:max_points][::-1]
    if idx.size < 3 or w[idx[0]] > 0.5:
        raise ConvergenceError("insufficient tail data for extrapolation")
    x = w[idx]
    p = g[idx].copy()
    n = len(x)
    second = math.nan
    # Neville at w = 0: after pass k, p[i] interpolates points i..i+k
    for k in range(1, n):
        p[: n - k] = (x[k:] * p[: n - k] - x[: n - k] * p[1 : n - k + 1]) / (x[k:] - x[: n - k])
        if k == n - 2:
            second = p[1]
    est = float(p[0])
    err = abs(est - float(second))
    if not (est > 0 and err <= rtol * est):
        raise ConvergenceError(f"tail extrapolation did not converge: estimate {est}, error {err}")
    return (est, err) if return_error else est


def oracle_integrate_linear(m, kappa, lam, mu, sigma_start, phi_start, sigma_end, rtol=1e-12) -> float:
    """Integrate ``phi' = (mu - m/sigma) phi + kappa + 2 lam sigma`` directly in ``sigma``.

    LSODA with the exact Jacobian is used: for ``mu < 0`` the equation turns
    stiff at large ``sigma`` and an explicit method would crawl.  Either
    direction is allowed; for ``mu > 0`` integrating towards smaller
    ``sigma`` is the stable one.
    """
    if not (sigma_start > 0 and sigma_end > 0):
        raise InvalidParameterError("the linear ODE is singular at sigma = 0; keep both ends positive")
    if sigma_end == sigma_start:
        return float(phi_start)

    def rhs(x, p):
        return (mu - m / x) * p + kappa + 2 * lam * x

    def jac(x, p):
        return np.array([[mu - m / x]])

    sol = solve_ivp(rhs, (sigma_start, sigma_end), [phi_start], method="LSODA",
                    rtol=rtol, atol=1e-30, jac=jac)
    if sol.status != 0:
        raise ConvergenceError(sol.message)
    return float(sol.y[0, -1])


def oracle_profile(pr: SolitonProfile, sigma, rtol=1e-12):
    """Direct integration of the profile ODE at several ``sigma``.

    Errors are transported by the homogeneous solution ``e^{mu x} x^{-m}``,
    which has its minimum at ``x* = m/mu`` when ``mu > 0``.  Integration
    therefore runs towards ``x*`` where possible: a forward leg from the left end
    and, for ``mu > 0``, a backward leg seeded at the largest requested
    ``sigma``.  Profiles whose ``nu`` comes from the boundary condition are
    seeded with ``phi(a) = 0``; others at the smallest requested ``sigma``.
    """
    sig = np.atleast_1d(np.asarray(sigma, dtype=float))
    if np.any(~(sig > pr.a)) or np.any(~(sig > 0)):
        raise InvalidParameterError("oracle points must lie to the right of a")
    m, kappa, lam, mu = pr.m, pr.kappa, pr.lam, pr.mu

    def rhs(x, p):
        return (mu - m / x) * p + kappa + 2 * lam * x

    def jac(x, p):
        return np.array([[mu - m / x]])

    def leg(x0, p0, pts):
        if pts.size == 0:
            return pts
        if pts[-1] == x0:
            return np.full(pts.shape, p0)
        sol = solve_ivp(rhs, (x0, float(pts[-1])), [p0], method="LSODA", rtol=rtol,
                        atol=1e-30, jac=jac, t_eval=pts)
        if sol.status != 0:
            raise ConvergenceError(sol.message)
        return sol.y[0]

    # near a zero of phi only a forward leg keeps relative accuracy, so the
    # forward leg always covers a stretch of length 2/mu
    split = max(m / mu, float(sig.min()) + 2.0 / mu) if mu > 0 else math.inf
    out = np.empty_like(sig)
    low = np.flatnonzero(sig <= split)
    low = low[np.argsort(sig[low])]
    x0 = float(sig.min())
    if pr.a > 0 and pr.anchored:
        # LSODA cannot start on phi = 0 at tight rtol; an explicit step takes
        # the seed off the zero first
        first = solve_ivp(rhs, (pr.a, x0), [0.0], method="DOP853", rtol=rtol, atol=1e-30)
        if first.status != 0:
            raise ConvergenceError(first.message)
        p0 = float(first.y[0, -1])
    else:
        p0 = float(phi_closed(pr, x0))
    out[low] = leg(x0, p0, sig[low])
    high = np.flatnonzero(sig > split)
    high = high[np.argsort(sig[high])[::-1]]
    if high.size:
        top = float(sig[high[0]])
        out[high] = leg(top, float(phi_closed(pr, top)), sig[high])
    return out


def add_residual(sol: RadialSolution) -> np.ndarray:
    """ODE residual of the profile at each sampled ``sigma``."""
    return ode_residual(sol.profile, sol.sigma)


def write_csv(sol: RadialSolution, path=None) -> str:
    """Emit the samples as CSV (17 significant digits, LF endings)."""
    res = add_residual(sol)
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    cols = (sol.s, sol.sigma, sol.phi, sol.F, sol.potential, sol.length, res)
    for row in zip(*cols):
        buf.write(",".join(f"{float(v):.17g}" for v in row) + "\n")
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
