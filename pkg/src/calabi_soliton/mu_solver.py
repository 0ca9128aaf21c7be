"""Shrinking-soliton parameter ``mu`` from the boundary condition ``phi(a) = 0``.

With ``lam = -1`` and ``nu = 0`` the condition ``phi(a) = 0`` is the
vanishing of

    f(a, mu) = (m+1)! / (a^m mu^{m+2}) * sum_{j=0}^{m+1} c_j mu^j,
    c_j = (2a - kappa j / (m+1)) a^{j-1} / j!,

a polynomial in ``mu`` up to a positive factor.  For ``0 < a < kappa/2``
the coefficients change sign exactly once, so Descartes' rule gives at most
one positive root; ``f(a, 2(m+1)/kappa) = kappa a / (m+1) > 0`` and
``f -> 0^-`` as ``mu -> inf`` give existence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, InvalidParameterError


@dataclass(frozen=True)
class MuRootCertificate:
    root: float
    lower_bracket: float
    sign_changes: int
    residual: float

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "lower_bracket": self.lower_bracket,
            "sign_changes": self.sign_changes,
            "residual": self.residual,
        }


def _check(m, kappa, a):
    if int(m) != m or m < 1:
        raise InvalidParameterError(f"m must be a positive integer, got {m!r}")
    if not (kappa > 0 and a > 0):
        raise InvalidParameterError(f"need kappa > 0 and a > 0, got kappa={kappa}, a={a}")


def coefficients(m: int, kappa: float, a: float) -> np.ndarray:
    """Polynomial coefficients ``c_0 .. c_{m+1}`` in ascending powers of ``mu``."""
    _check(m, kappa, a)
    j = np.arange(m + 2)
    fact = np.array([math.factorial(i) for i in j], dtype=float)
    return (2 * a - kappa * j / (m + 1)) * a ** (j - 1.0) / fact


def _poly_and_derivative(c, mu):
    p = 0.0
    dp = 0.0
    for cj in c[::-1]:
        dp = dp * mu + p
        p = p * mu + cj
    return p, dp


def _exact_coefficients(m, kappa, a):
    ka, aa = Fraction(kappa), Fraction(a)
    return [(2 * aa - ka * j / (m + 1)) * aa ** (j - 1) / math.factorial(j) for j in range(m + 2)]


def _sign(c, cx, mu):
    """Sign of the polynomial at ``mu``, exact when rounding could decide it."""
    p = 0.0
    bound = 0.0
    for cj in c[::-1]:
        p = p * mu + cj
        bound = bound * abs(mu) + abs(p)
    if abs(p) > 4 * np.finfo(float).eps * bound:
        return 1 if p > 0 else -1
    fm = Fraction(mu)
    v = Fraction(0)
    for cj in cx[::-1]:
        v = v * fm + cj
    return (v > 0) - (v < 0)


def _exact_value(cx, m, a, mu) -> Fraction:
    fm = Fraction(mu)
    v = Fraction(0)
    for cj in cx[::-1]:
        v = v * fm + cj
    return math.factorial(m + 1) / (Fraction(a) ** m * fm ** (m + 2)) * v


def _prefactor(m, a, mu):
    return math.factorial(m + 1) / (a**m * mu ** (m + 2))


def f_eval(m: int, kappa: float, a: float, mu: float) -> float:
    """``f(a, mu)``, equal to ``phi(a)`` for the ``lam=-1``, ``nu=0`` profile."""
    _check(m, kappa, a)
    if not mu > 0:
        raise InvalidParameterError(f"mu must be positive, got {mu}")
    p, _ = _poly_and_derivative(coefficients(m, kappa, a), mu)
    return _prefactor(m, a, mu) * p


def coefficient_signs(m: int, kappa: float, a: float) -> list[int]:
    """Signs of ``c_j``; exact zeros (``2a = kappa j/(m+1)``) give 0."""
    _check(m, kappa, a)
    out = []
    for j in range(m + 2):
        # sign decided on the exact factor so rounding cannot flip a zero
        lead = 2 * a * (m + 1) - kappa * j
        out.append(0 if lead == 0 else (1 if lead > 0 else -1))
    return out


def sign_changes(signs) -> int:
    nz = [s for s in signs if s != 0]
    return sum(1 for u, v in zip(nz, nz[1:]) if u != v)


def solve_mu(m: int, kappa: float, a: float, max_exponent: int = 60) -> MuRootCertificate:
    """Unique positive root of ``f(a, .)`` for ``0 < a < kappa/2``.

    The root is bracketed by ``[2(m+1)/kappa, U]`` with ``U`` doubled until
    the polynomial turns negative, narrowed by bisection and polished with
    Newton steps that fall back to bisection whenever they leave the bracket.
    """
    _check(m, kappa, a)
    if not a < kappa / 2:
        raise InvalidParameterError(
            f"need 0 < a < kappa/2 for a unique shrinking root, got a={a}, kappa/2={kappa / 2}"
        )
    c = coefficients(m, kappa, a)
    cx = _exact_coefficients(m, kappa, a)
    signs = coefficient_signs(m, kappa, a)
    lo = 2.0 * (m + 1) / kappa
    if _sign(c, cx, lo) <= 0:
        # rounding of 2(m+1)/kappa can land on the far side of a root that
        # sits within an ulp of the bracket
        lo = float(np.nextafter(lo, 0.0))
        if _sign(c, cx, lo) <= 0:
            raise ConvergenceError("f(a, 2(m+1)/kappa) is not positive")
    hi = 2.0 * lo
    while _sign(c, cx, hi) >= 0:
        hi *= 2.0
        if hi > 2.0**max_exponent:
            raise ConvergenceError("bracket expansion exceeded 2**60; inconsistent inputs")

    # bisection to width 1e-3 relative
    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if _sign(c, cx, mid) > 0:
            lo = mid
        else:
            hi = mid

    # safeguarded Newton; the bracket [lo, hi] always keeps f(lo) > 0 >= f(hi)
    mu = 0.5 * (lo + hi)
    for _ in range(400):
        sg = _sign(c, cx, mu)
        if sg == 0:
            lo = hi = mu
            break
        if sg > 0:
            lo = mu
        else:
            hi = mu
        if np.nextafter(lo, math.inf) >= hi:
            break
        p, dp = _poly_and_derivative(c, mu)
        cand = mu - p / dp if dp != 0 else math.nan
        if not (lo < cand < hi) or cand == mu:
            cand = 0.5 * (lo + hi)
        mu = cand
    else:
        raise ConvergenceError("mu refinement did not converge")
    # the bracket ends are compared on the exact |f|
    floor = 2.0 * (m + 1) / kappa
    exact_floor = Fraction(2 * (m + 1)) / Fraction(kappa)
    cands = [x for x in (lo, hi) if Fraction(x) > exact_floor] or [hi]
    best = min(cands, key=lambda x: abs(_exact_value(cx, m, a, x)))
    residual = abs(f_eval(m, kappa, a, best))
    return MuRootCertificate(
        root=float(best),
        lower_bracket=2.0 * (m + 1) / kappa,
        sign_changes=sign_changes(signs),
        residual=float(residual),
    )


def count_roots_above(m: int, kappa: float, a: float, lower: float, upper: float, n: int = 4096) -> int:
    """Sign changes of ``f(a, .)`` sampled on a log grid in ``[lower, upper]``."""
    c = coefficients(m, kappa, a)
    grid = np.geomspace(lower, upper, n)
    vals = np.polynomial.polynomial.polyval(grid, c)
    s = np.sign(vals)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))
