"""Endpoint classification of soliton profiles.

At a finite endpoint the metric is complete when ``phi`` vanishes to order
at least two, closes up smoothly over the zero section of a line bundle
when ``phi`` has a simple zero with slope exactly 2, and otherwise ends at
finite distance.  At ``sigma = inf`` the end is complete when ``phi`` grows
at most quadratically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidParameterError
from .profile import ENDPOINT_ATOL, SolitonProfile, central_derivative, phi_closed, phi_prime, zero_slope

ORDER_TAU = (1e-8, 1e-2)
GROWTH_SIGMA = (1e3, 1e5)
ORDER_TOL = 1e-2
SLOPE_TOL = 1e-8

KINDS = ("complete_end", "smooth_zero_section", "finite_distance_singular", "unbounded_complete")


@dataclass(frozen=True)
class EndpointVerdict:
    """Classification of one end of the interval ``(a, b)``."""

    endpoint: str
    kind: str
    vanishing_order: float
    slope: float | None = None

    def __post_init__(self):
        if self.endpoint not in ("left_a", "right_b"):
            raise ValueError(f"unknown endpoint {self.endpoint!r}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")

    def to_dict(self) -> dict:
        order = self.vanishing_order
        return {
            "endpoint": self.endpoint,
            "kind": self.kind,
            "vanishing_order": order if math.isfinite(order) else str(order),
            "slope": self.slope,
        }


@dataclass(frozen=True)
class BundleAdmissibility:
    p: int
    k: int
    lam: int
    a_required: float
    admissible: bool

    def to_dict(self) -> dict:
        return {"p": self.p, "k": self.k, "lambda": self.lam,
                "a_required": self.a_required, "admissible": self.admissible}


class ProfileZero(NamedTuple):
    zero: float
    slope: float
    fd_slope: float


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log|y|`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    ok = (y > 0) & np.isfinite(y)
    if ok.sum() < 2:
        return math.inf
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def vanishing_order(pr: SolitonProfile, endpoint: str = "left_a") -> float:
    """Order to which ``phi`` vanishes at an endpoint, fitted over ``tau`` in [1e-8, 1e-2]."""
    tau = np.geomspace(*ORDER_TAU, 31)
    if endpoint == "left_a":
        vals = pr.phi_from_a(tau)
    elif endpoint == "right_b":
        if math.isinf(pr.b):
            raise InvalidParameterError("b = inf has no vanishing order; use growth_exponent")
        vals = phi_closed(pr, pr.b - tau)
    else:
        raise InvalidParameterError(f"unknown endpoint {endpoint!r}")
    return loglog_slope(tau, vals)


def growth_exponent(pr: SolitonProfile, fit: bool = False) -> float:
    """Power-law growth of ``phi`` at infinity.

    The dominant term of the closed form gives the answer directly: an
    exponential for ``mu > 0`` with ``nu != 0``, ``-2 lam sigma / mu`` for
    ``lam != 0`` and a constant for steady profiles.  With ``fit=True`` the
    log-log slope over [1e3, 1e5] is returned instead, as a cross-check.
    """
    if fit:
        sig = np.geomspace(*GROWTH_SIGMA, 21)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = phi_closed(pr, sig)
        if not np.all(np.isfinite(vals)):
            return math.inf
        return loglog_slope(sig, vals)
    if pr.mu > 0 and pr.nu != 0:
        return math.inf
    return 1.0 if pr.lam != 0 else 0.0


def _left_verdict(pr: SolitonProfile) -> EndpointVerdict:
    order = vanishing_order(pr, "left_a")
    vanishes = pr.pinned or (pr.a == 0 and order > 0.5)
    slope = zero_slope(pr.kappa, pr.lam, pr.a) if vanishes else None
    if order >= 2 - ORDER_TOL:
        kind = "complete_end"
    elif (
        pr.a > 0
        and abs(pr.phi_at_a()) <= ENDPOINT_ATOL
        and abs(slope - 2) <= SLOPE_TOL
        and growth_exponent(pr) <= 2 + ORDER_TOL
    ):
        kind = "smooth_zero_section"
    else:
        kind = "finite_distance_singular"
    return EndpointVerdict("left_a", kind, order, slope)


def _right_verdict(pr: SolitonProfile) -> EndpointVerdict:
    if math.isinf(pr.b):
        g = growth_exponent(pr)
        kind = "unbounded_complete" if g <= 2 + ORDER_TOL else "finite_distance_singular"
        # a growth rate is reported with the sign convention of an order
        return EndpointVerdict("right_b", kind, -g, None)
    order = vanishing_order(pr, "right_b")
    kind = "complete_end" if order >= 2 - ORDER_TOL else "finite_distance_singular"
    return EndpointVerdict("right_b", kind, order, zero_slope(pr.kappa, pr.lam, pr.b))


INTERIOR_SCAN = 1e4


def interior_zeros(pr: SolitonProfile, sigma_max: float = INTERIOR_SCAN) -> list[float]:
    """Zeros of ``phi`` strictly inside ``(a, min(b, sigma_max))``."""
    hi = min(pr.b, max(sigma_max, 10.0 * (pr.a + 1.0)))
    zs = [z.zero for z in zero_structure(pr, hi)]
    tol = 1e-9
    return [z for z in zs
            if z > pr.a * (1 + tol) + (tol if pr.a == 0 else 0.0) and z < hi * (1 - tol)]


def completeness_report(pr: SolitonProfile) -> tuple[EndpointVerdict, EndpointVerdict]:
    """Verdicts for the left endpoint ``a`` and the right endpoint ``b``.

    Raises
    ------
    InvalidParameterError
        If ``phi`` vanishes inside ``(a, b)``; such a profile does not define
        a metric on the whole interval.
    """
    inner = interior_zeros(pr)
    if inner:
        raise InvalidParameterError(
            f"phi vanishes inside (a, b) at sigma = {inner[0]:.12g}; restrict b to the first zero")
    return _left_verdict(pr), _right_verdict(pr)


def zero_bound_check(pr: SolitonProfile, sigma_max: float = 1e6) -> dict:
    """Positive zeros of an expanding profile and whether at most one lies in ``(0, 1)``.

    The bound is recorded, not assumed: profiles violating it are reported
    with ``bound_holds = False``.
    """
    if pr.lam != 1:
        raise InvalidParameterError(f"the zero bound concerns lambda = 1, got {pr.lam}")
    zs = [z.zero for z in zero_structure(pr, sigma_max)]
    return {"zeros": zs, "count": len(zs), "bound_holds": len(zs) <= 1 and all(0 < z < 1 for z in zs)}


def extension_check(pr: SolitonProfile) -> EndpointVerdict:
    """Left-end verdict; ``smooth_zero_section`` only for ``a > 0`` with slope 2."""
    return _left_verdict(pr)


def zero_structure(pr: SolitonProfile, sigma_max: float, n: int = 6000) -> list[ProfileZero]:
    """Zeros of the closed form on ``(0, sigma_max]`` with their slopes.

    Sign changes on a log grid are refined by Brent's method.  Tangential
    zeros do not change sign, so local extrema of ``phi`` (sign changes of
    ``phi'``) are refined as well and kept when ``phi`` is negligible there.
    """
    if not sigma_max > pr.a:
        raise InvalidParameterError(f"sigma_max must exceed a = {pr.a}")
    lo = min(1e-8, 1e-4 * pr.a) if pr.a > 0 else 1e-8
    grid = np.geomspace(lo, sigma_max, n)
    if pr.a > 0 and pr.a < sigma_max:
        grid = np.union1d(grid, [pr.a])
    with np.errstate(over="ignore", invalid="ignore"):
        vals = phi_closed(pr, grid)
        dvals = phi_prime(pr, grid)

    def f(x):
        return phi_closed(pr, x)

    def df(x):
        return phi_prime(pr, x)

    found = []
    scale = 1 + abs(pr.kappa)
    for i in range(len(grid) - 1):
        x0, x1 = grid[i], grid[i + 1]
        v0, v1 = vals[i], vals[i + 1]
        if not (np.isfinite(v0) and np.isfinite(v1)):
            continue
        if v0 == 0:
            found.append(x0)
        elif np.sign(v0) * np.sign(v1) < 0:
            found.append(brentq(f, x0, x1, xtol=1e-15 * x1, rtol=1e-15))
        d0, d1 = dvals[i], dvals[i + 1]
        if np.isfinite(d0) and np.isfinite(d1) and np.sign(d0) * np.sign(d1) < 0 and np.sign(v0) * np.sign(v1) > 0:
            x = brentq(df, x0, x1, xtol=1e-15 * x1, rtol=1e-15)
            if abs(f(x)) <= 1e-9 * scale * max(1.0, x):
                found.append(x)
    if vals[-1] == 0:
        found.append(grid[-1])
    if pr.pinned and pr.a <= sigma_max:
        found.append(pr.a)
    found.sort()
    zeros = []
    for x in found:
        if zeros and abs(x - zeros[-1]) <= 1e-8 * max(1.0, x):
            continue
        zeros.append(x)
    out = []
    for x in zeros:
        h = min(1e-3 * x, 0.05 / abs(pr.mu))
        fd = float(central_derivative(lambda t: phi_closed(pr, t), np.array([x]), np.array([h]))[0])
        out.append(ProfileZero(float(x), zero_slope(pr.kappa, pr.lam, x), fd))
    return out


def bundle_admissibility(p: int, k: int, lam: int) -> BundleAdmissibility:
    """Whether ``L^{-k}`` with ``K = L^{-p}`` carries a smooth soliton of type ``lam``.

    The zero section closes up smoothly at ``a = lam (1 - p/k)``, which has
    to be positive.
    """
    for name, v in (("p", p), ("k", k)):
        if int(v) != v or v < 1:
            raise InvalidParameterError(f"{name} must be a positive integer, got {v!r}")
    if lam == 0:
        raise InvalidParameterError("steady solitons (lambda = 0) have no extension statement")
    if lam not in (-1, 1):
        raise InvalidParameterError(f"lambda must be -1 or 1, got {lam!r}")
    a = lam * (1 - Fraction(p, k))
    admissible = (lam == -1 and k < p) or (lam == 1 and k > p)
    return BundleAdmissibility(int(p), int(k), int(lam), float(a), bool(admissible))
