import math

import numpy as np
import pytest

from _support import mp_phi, rel_err, shrinking_bundle
from calabi_soliton.errors import ConvergenceError, InvalidParameterError
from calabi_soliton.mu_solver import solve_mu
from calabi_soliton.profile import SolitonProfile, phi_closed
from calabi_soliton.radial import (
    CSV_HEADER,
    asymptotic_coefficient,
    geodesic_length,
    integrate_sigma,
    oracle_integrate_linear,
    oracle_profile,
    reconstruct_F,
    write_csv,
)

LIN = SolitonProfile.expanding_cone(1, 4.0, -1.0)


@pytest.fixture(scope="module")
def lin_solution():
    return integrate_sigma(LIN, 1.0, -5.0, 5.0, 1001)


def test_linear_profile_columns(lin_solution):
    # phi = 2 sigma: sigma = e^{2s}, F = (e^{2s} - 1)/2 - s, length = sqrt2 (e^s - 1)
    s = lin_solution.s
    np.testing.assert_allclose(lin_solution.sigma, np.exp(2 * s), rtol=1e-10)
    np.testing.assert_allclose(lin_solution.F, np.expm1(2 * s) / 2 - s, rtol=1e-9, atol=1e-11)
    np.testing.assert_allclose(lin_solution.length, math.sqrt(2) * np.expm1(s), rtol=1e-9, atol=1e-11)
    np.testing.assert_allclose(lin_solution.potential, lin_solution.s + lin_solution.F)


def test_dense_output_and_window(lin_solution):
    assert lin_solution.sigma_at(0.0) == pytest.approx(1.0, rel=1e-14)
    assert lin_solution.sigma_at(0.37) == pytest.approx(math.exp(0.74), rel=1e-10)
    with pytest.raises(InvalidParameterError):
        lin_solution.sigma_at(6.0)


def test_reconstruct_F_by_quadrature(lin_solution):
    again = reconstruct_F(lin_solution)
    np.testing.assert_allclose(again.F, lin_solution.F, rtol=1e-9, atol=1e-10)


def test_linear_E0_and_length():
    sol = integrate_sigma(LIN, 1.0, -2.0, 30.0, 3201)
    assert asymptotic_coefficient(sol, -1.0) == pytest.approx(1.0, rel=1e-10)
    assert geodesic_length(LIN, 1.0, 4.0) == pytest.approx(math.sqrt(2), rel=1e-11)


def test_amplitude_scales_with_normalization():
    # shifting s by d multiplies the tail amplitude by e^{-2d/mu}... in reverse
    pr = SolitonProfile.expanding_cone(2, 3.0, -0.8)
    base = integrate_sigma(pr, 1.0, -4.0, 40.0, 4401)
    shifted = integrate_sigma(pr, base.sigma_at(0.5), -4.0, 40.0, 4401)
    e0 = asymptotic_coefficient(base, pr.mu)
    e1 = asymptotic_coefficient(shifted, pr.mu)
    assert e1 / e0 == pytest.approx(math.exp(2 * 0.5 / 0.8), rel=1e-8)


def test_smooth_zero_section_reaches_finite_length():
    pr = SolitonProfile(1, 4.0, -1, solve_mu(1, 4.0, 1.0).root, 0.0, 1.0)
    assert math.isfinite(geodesic_length(pr, 0.0, 1.0))
    double = SolitonProfile.with_boundary(1, -2.0, 1, -1.0, 1.0)
    assert geodesic_length(double, 0.0, 1.0) == math.inf
    assert geodesic_length(LIN, 1.0, math.inf) == math.inf


def test_oracle_matches_quadrature():
    rng = np.random.default_rng(9)
    for pr in (shrinking_bundle(rng), SolitonProfile.with_boundary(3, 2.0, 1, -0.7, 0.5), LIN):
        sig = np.array([pr.a + 0.5, pr.a + 3.0, pr.a + 40.0])
        expect = [mp_phi(pr, x) for x in sig]
        assert rel_err(oracle_profile(pr, sig), expect) < 1e-9
    val = oracle_integrate_linear(1, 4.0, 1, -1.0, 1.0, 2.0, 10.0)
    assert val == pytest.approx(20.0, rel=1e-10)


def test_csv_output(lin_solution, tmp_path):
    path = tmp_path / "p.csv"
    text = write_csv(lin_solution, path)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == len(lin_solution) + 1
    assert path.read_text() == text
    assert write_csv(lin_solution) == text


def test_clipping_at_finite_endpoint():
    pr = SolitonProfile.with_boundary(1, 4.0, -1, -1.0, 1.0, b=2.0)
    sol = integrate_sigma(pr, 1.5, -3.0, 3.0, 61)
    assert np.all((sol.sigma > 1.0) & (sol.sigma < 2.0))


def test_errors():
    with pytest.raises(InvalidParameterError):
        integrate_sigma(LIN, -1.0, -1.0, 1.0, 11)
    with pytest.raises(InvalidParameterError):
        integrate_sigma(LIN, 1.0, 1.0, -1.0, 11)
    with pytest.raises(InvalidParameterError):
        integrate_sigma(LIN, 1.0, -1.0, 1.0, 1)
    with pytest.raises(ConvergenceError):
        asymptotic_coefficient(integrate_sigma(LIN, 1.0, -1.0, 0.1, 11), -1.0)
    with pytest.raises(InvalidParameterError):
        oracle_profile(LIN, [-1.0])
    assert phi_closed(LIN, 1.0) == 2.0
