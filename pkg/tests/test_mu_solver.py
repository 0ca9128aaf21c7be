import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _support import mp_f, mp_mu_root
from calabi_soliton.errors import InvalidParameterError
from calabi_soliton.mu_solver import (
    coefficient_signs,
    count_roots_above,
    f_eval,
    sign_changes,
    solve_mu,
)


def test_f_examples():
    assert f_eval(1, 4.0, 1.0, 1.0) == pytest.approx(2.0, rel=1e-15)
    assert abs(f_eval(1, 4.0, 1.0, math.sqrt(2))) < 1e-15


def test_sqrt2_instance():
    c = solve_mu(1, 4.0, 1.0)
    assert abs(c.root - math.sqrt(2)) <= 1e-12
    assert c.sign_changes == 1
    assert c.root > c.lower_bracket == 1.0


@pytest.mark.parametrize("m,kappa,a,expect", [(1, 4.0, 1.0, [1, 0, -1]), (2, 6.0, 1.0, [1, 0, -1, -1])])
def test_coefficient_signs(m, kappa, a, expect):
    assert coefficient_signs(m, kappa, a) == expect
    assert sign_changes(expect) == 1


def test_f_matches_quadrature():
    rng = np.random.default_rng(5)
    for _ in range(8):
        m = int(rng.integers(1, 6))
        kappa = rng.uniform(0.5, 10)
        a = rng.uniform(0.1, 0.9) * kappa / 2
        mu = rng.uniform(0.3, 5)
        assert f_eval(m, kappa, a, mu) == pytest.approx(mp_f(m, kappa, a, mu), rel=1e-9, abs=1e-12)


def test_root_matches_quadrature_root():
    rng = np.random.default_rng(6)
    for _ in range(6):
        m = int(rng.integers(1, 6))
        kappa = rng.uniform(0.5, 10)
        a = rng.uniform(0.1, 0.9) * kappa / 2
        c = solve_mu(m, kappa, a)
        assert c.root == pytest.approx(mp_mu_root(m, kappa, a, c.root), rel=1e-12)


@given(st.integers(1, 5), st.floats(0.1, 20), st.floats(0.001, 0.999))
def test_uniqueness_certificate(m, kappa, frac):
    a = frac * kappa / 2
    c = solve_mu(m, kappa, a)
    assert c.sign_changes == 1
    assert Fraction(c.root) > Fraction(2 * (m + 1)) / Fraction(kappa)
    assert count_roots_above(m, kappa, a, c.lower_bracket, 2.0**20) <= 1


@given(st.integers(1, 5), st.floats(0.1, 20), st.floats(0.01, 0.99))
def test_value_at_lower_bracket(m, kappa, frac):
    a = frac * kappa / 2
    k, x = Fraction(kappa), Fraction(a)
    mu_star = 2 * (m + 1) / k
    poly = sum((2 * x - k * j / (m + 1)) * x ** (j - 1) / math.factorial(j) * mu_star**j for j in range(m + 2))
    assert math.factorial(m + 1) / (x**m * mu_star ** (m + 2)) * poly == k * x / (m + 1)
    assert f_eval(m, kappa, a, 2 * (m + 1) / kappa) > 0


@given(st.integers(1, 5), st.floats(0.1, 20), st.floats(0.01, 0.99))
def test_negative_for_large_mu(m, kappa, frac):
    assert f_eval(m, kappa, frac * kappa / 2, 1e6) < 0


def test_errors():
    with pytest.raises(InvalidParameterError):
        solve_mu(1, 4.0, 2.0)
    with pytest.raises(InvalidParameterError):
        solve_mu(1, -4.0, 1.0)
    with pytest.raises(InvalidParameterError):
        f_eval(1, 4.0, 1.0, -1.0)
    with pytest.raises(InvalidParameterError):
        f_eval(1, 4.0, 0.0, 1.0)
