"""Random parameter families and high-precision oracles shared by the tests.

The oracles use mpmath quadrature of the integrating-factor form of each
ODE, so they share no code path with the package.
"""

import math

import mpmath as mp
import numpy as np

from calabi_soliton.mu_solver import solve_mu
from calabi_soliton.profile import SolitonProfile
from calabi_soliton.scalar import ScalarSolitonProfile

ACCEPTANCE_LINES = {}


def record(criterion, passed, detail):
    line = f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)
    return line


# -- random families ------------------------------------------------------

def expanding_cone(rng, m=None):
    m = int(rng.integers(1, 6)) if m is None else m
    return SolitonProfile.expanding_cone(m, rng.uniform(0.2, 12), -rng.uniform(0.05, 5))


def shrinking_bundle(rng, m=None):
    m = int(rng.integers(1, 6)) if m is None else m
    kappa = rng.uniform(0.2, 12)
    a = rng.uniform(0.02, 0.98) * kappa / 2
    return SolitonProfile(m, kappa, -1, solve_mu(m, kappa, a).root, 0.0, a)


def expanding_bundle(rng, m=None):
    m = int(rng.integers(1, 6)) if m is None else m
    return SolitonProfile.with_boundary(m, rng.uniform(0.2, 12), 1, -rng.uniform(0.05, 5), rng.uniform(0.01, 5))


def steady_anchored(rng, m=None):
    m = int(rng.integers(1, 6)) if m is None else m
    return SolitonProfile.with_boundary(m, rng.uniform(0.2, 12), 0, -rng.uniform(0.05, 5), rng.uniform(0.01, 5))


FAMILIES = (expanding_cone, shrinking_bundle, expanding_bundle)


def random_profile(rng, i, steady=False):
    fams = FAMILIES + ((steady_anchored,) if steady else ())
    return fams[i % len(fams)](rng)


def scalar_admissible(rng):
    m = int(rng.integers(1, 6))
    c = -rng.uniform(0.1, 10)
    kappa = c / (m + 1) + rng.uniform(0, 5)
    return ScalarSolitonProfile.build(m, kappa, c, -rng.uniform(0.1, 3))


# -- oracles --------------------------------------------------------------

def mp_phi_from_left(m, kappa, lam, mu, a, sigma, dps=40):
    """Profile with ``phi(a) = 0`` (``a = 0``: the solution regular at the apex)."""
    with mp.workdps(dps):
        m_, k_, l_, u_ = mp.mpf(m), mp.mpf(kappa), mp.mpf(lam), mp.mpf(mu)
        x = mp.mpf(sigma)
        integral = mp.quad(lambda t: t**m_ * mp.exp(-u_ * t) * (k_ + 2 * l_ * t), [mp.mpf(a), x])
        return float(integral * mp.exp(u_ * x) / x**m_)


def mp_phi_decaying(m, kappa, lam, mu, sigma, dps=40):
    """Profile without the ``e^{mu sigma}`` mode for ``mu > 0`` (``nu = 0``)."""
    with mp.workdps(dps):
        m_, k_, l_, u_ = mp.mpf(m), mp.mpf(kappa), mp.mpf(lam), mp.mpf(mu)
        x = mp.mpf(sigma)
        tail = mp.quad(lambda t: t**m_ * mp.exp(-u_ * (t - x)) * (k_ + 2 * l_ * t), [x, mp.inf])
        return float(-tail / x**m_)


def mp_phi(pr, sigma, dps=40):
    if pr.mu > 0 and pr.nu == 0.0:
        return mp_phi_decaying(pr.m, pr.kappa, pr.lam, pr.mu, sigma, dps)
    return mp_phi_from_left(pr.m, pr.kappa, pr.lam, pr.mu, pr.a, sigma, dps)


def mp_mu_root(m, kappa, a, guess, dps=40):
    """Root of ``int_a^inf t^m e^{-mu t} (kappa - 2t) dt``, i.e. ``phi(a) = 0`` with ``nu = 0``."""
    with mp.workdps(dps):
        def g(mu):
            return mp.quad(lambda t: t**m * mp.exp(-mu * (t - a)) * (kappa - 2 * t), [a, mp.inf])
        return float(mp.findroot(g, mp.mpf(guess)))


def mp_f(m, kappa, a, mu, dps=40):
    """``phi(a)`` of the ``nu = 0`` shrinking profile by quadrature."""
    return mp_phi_decaying(m, kappa, -1, mu, a, dps)


def mp_phi_scalar(m, kappa, c, mu, sigma, dps=40):
    """``sigma^{-m} y`` with ``y = int_1^sigma (e^{mu(sigma-t)} - 1)/mu g(t) dt``."""
    with mp.workdps(dps):
        u_ = mp.mpf(mu)
        x = mp.mpf(sigma)

        def integrand(t):
            g = m * kappa * t ** (m - 1) - c * t**m
            return mp.expm1(u_ * (x - t)) / u_ * g

        return float(mp.quad(integrand, [1, x]) / x**m)


def rel_err(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def sqrt2():
    return math.sqrt(2.0)
