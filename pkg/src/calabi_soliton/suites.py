"""Verification suites run by ``calabi-soliton verify``.

Each suite is a quick, seeded version of the invariants exercised by the
test-suite and returns a list of :class:`~calabi_soliton.report.Check`.
``tol`` applies to the residual-type checks; the rest keep their own
fixed tolerances.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .classify import zero_structure
from .fullmetric import RadialMetricModel, soliton_identity_residual
from .mu_solver import solve_mu
from .profile import SolitonProfile, phi_closed
from .radial import asymptotic_coefficient, geodesic_length, integrate_sigma
from .report import (
    Check,
    expand_bundle_case,
    fullmetric_block,
    glue_case,
    max_scaled_residual,
    shrink_bundle_case,
)
from .sasaki import d_homothety, make_eta_einstein
from .scalar import ScalarSolitonProfile, phi_scalar, scalar_ode_residual

SEED = 20240607


def _rng():
    return np.random.default_rng(SEED)


def sasaki_suite(tol):
    rng = _rng()
    law = cov = 0.0
    for _ in range(1000):
        e = make_eta_einstein(int(rng.integers(1, 6)), rng.uniform(-10, 10))
        f = float(np.exp(rng.uniform(-3, 3)))
        g = d_homothety(e, f)
        law = max(law, abs(d_homothety(g, 1.0 / f).alpha - e.alpha))
        cov = max(cov, abs(g.kappa - e.kappa / f))
    return [Check.below("d_homothety_group_law", law, 1e-12), Check.below("kappa_covariance", cov, 1e-12)]


def _random_profile(rng, i):
    m = int(rng.integers(1, 6))
    kappa = rng.uniform(0.2, 12)
    fam = i % 3
    if fam == 0:
        return SolitonProfile.expanding_cone(m, kappa, -rng.uniform(0.05, 5))
    if fam == 1:
        a = rng.uniform(0.02, 0.98) * kappa / 2
        return SolitonProfile(m, kappa, -1, solve_mu(m, kappa, a).root, 0.0, a)
    return SolitonProfile.with_boundary(m, kappa, 1, -rng.uniform(0.05, 5), rng.uniform(0.01, 5))


def profile_suite(tol):
    rng = _rng()
    worst = max(max_scaled_residual(_random_profile(rng, i), n=200) for i in range(60))
    lin = SolitonProfile.expanding_cone(1, 4.0, -1.0)
    sig = np.geomspace(0.1, 50, 100)
    lin_err = float(np.max(np.abs(phi_closed(lin, sig) / (2 * sig) - 1)))
    return [Check.below("ode_residual", worst, tol), Check.below("linear_solution", lin_err, 1e-12)]


def mu_suite(tol):
    rng = _rng()
    inst = solve_mu(1, 4.0, 1.0)
    bad = 0
    for _ in range(500):
        m = int(rng.integers(1, 6))
        kappa = rng.uniform(0.1, 20)
        a = rng.uniform(1e-6, 1) * kappa / 2
        c = solve_mu(m, kappa, a)
        bad += not (c.sign_changes == 1 and Fraction(c.root) > Fraction(2 * (m + 1)) / Fraction(kappa))
    return [
        Check.below("sqrt2_instance", abs(inst.root - math.sqrt(2)), 1e-12),
        Check.flag("certificates", bad == 0),
    ]


def radial_suite(tol):
    lin = SolitonProfile.expanding_cone(1, 4.0, -1.0)
    sol = integrate_sigma(lin, 1.0, -5.0, 5.0, 1001)
    err = float(np.max(np.abs(sol.sigma / np.exp(2 * sol.s) - 1)))
    e0 = asymptotic_coefficient(integrate_sigma(lin, 1.0, -2.0, 30.0, 3201), -1.0)
    length = geodesic_length(lin, 1.0, 4.0)
    return [
        Check.below("linear_sigma", err, 1e-9),
        Check.below("linear_E0", abs(e0 - 1.0), 1e-6),
        Check.below("linear_length", abs(length - math.sqrt(2)), 1e-10),
    ]


def classify_suite(tol):
    checks = [c for c in shrink_bundle_case(tol=tol).checks + expand_bundle_case(tol=tol).checks
              if c.name in ("phi_at_a", "slope_at_a_minus_2", "smooth_zero_section")]
    rng = _rng()
    worst = 0.0
    for i in range(20):
        m = int(rng.integers(1, 6))
        kappa = rng.uniform(0.5, 8)
        pr = SolitonProfile.with_boundary(m, kappa, -1, -rng.uniform(0.2, 3), rng.uniform(0.05, 0.95) * kappa / 2)
        for z in zero_structure(pr, 50.0):
            worst = max(worst, abs(z.fd_slope - z.slope))
    return checks + [Check.below("zero_slope_law", worst, 1e-6)]


def flow_suite(tol):
    return glue_case(tol=tol).checks


def scalar_suite(tol):
    rng = _rng()
    res = bnd = 0.0
    sig = np.geomspace(1.01, 1e3, 200)
    for _ in range(40):
        m = int(rng.integers(1, 6))
        c = -rng.uniform(0.1, 10)
        kappa = c / (m + 1) + rng.uniform(0, 5)
        pr = ScalarSolitonProfile.build(m, kappa, c, -rng.uniform(0.1, 3))
        res = max(res, float(np.max(np.abs(scalar_ode_residual(pr, sig)))))
        bnd = max(bnd, abs(float(phi_scalar(pr, 1.0))))
    return [Check.below("scalar_residual", res, tol), Check.below("scalar_boundary", bnd, 1e-10)]


def fullmetric_suite(tol):
    shrink = SolitonProfile(1, 4.0, -1, solve_mu(1, 4.0, 1.0).root, 0.0, 1.0)
    _, checks = fullmetric_block(shrink)
    lin = RadialMetricModel.from_profile(SolitonProfile.expanding_cone(1, 4.0, -1.0))
    return checks + [Check.below("flat_identity_residual", soliton_identity_residual(lin), 1e-9)]


SUITES = {
    "sasaki": sasaki_suite,
    "profile": profile_suite,
    "mu": mu_suite,
    "radial": radial_suite,
    "classify": classify_suite,
    "flow": flow_suite,
    "scalar": scalar_suite,
    "fullmetric": fullmetric_suite,
}


def run_suites(names, tol):
    """``{suite: [Check, ...]}`` for the requested suites (``all`` expands)."""
    if "all" in names:
        names = list(SUITES)
    out = {}
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
        out[name] = SUITES[name](tol)
    return out
