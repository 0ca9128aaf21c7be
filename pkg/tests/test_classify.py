import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from calabi_soliton.classify import (
    KINDS,
    bundle_admissibility,
    completeness_report,
    extension_check,
    growth_exponent,
    interior_zeros,
    vanishing_order,
    zero_bound_check,
    zero_structure,
)
from _support import mp_phi_from_left
from calabi_soliton.profile import phi_closed
from calabi_soliton.errors import InvalidParameterError
from calabi_soliton.mu_solver import solve_mu
from calabi_soliton.profile import SolitonProfile

SHRINK = SolitonProfile(1, 4.0, -1, solve_mu(1, 4.0, 1.0).root, 0.0, 1.0)
EXPAND = SolitonProfile.with_boundary(1, 1.0, 1, -1.0, 0.5)


@pytest.mark.parametrize("pr", [SHRINK, EXPAND], ids=["shrinking", "expanding"])
def test_extension_instances(pr):
    left, right = completeness_report(pr)
    assert left.kind == "smooth_zero_section"
    assert left.slope == pytest.approx(2.0, abs=1e-12)
    assert right.kind == "unbounded_complete"
    assert extension_check(pr) == left


def test_double_zero_is_complete_end():
    pr = SolitonProfile.with_boundary(1, -2.0, 1, -1.0, 1.0)
    assert vanishing_order(pr) == pytest.approx(2.0, abs=1e-2)
    assert completeness_report(pr)[0].kind == "complete_end"


def test_wrong_slope_is_singular():
    pr = SolitonProfile.with_boundary(1, 4.0, 1, -1.0, 1.0)
    left = completeness_report(pr)[0]
    assert left.kind == "finite_distance_singular"
    assert left.slope == 6.0


def test_finite_right_endpoint():
    pr = SolitonProfile.with_boundary(1, 4.0, -1, -1.0, 1.0, b=2.0)
    assert completeness_report(pr)[1].kind in KINDS


def test_growth_exponent_cross_check():
    for pr in (SHRINK, EXPAND):
        assert growth_exponent(pr) == 1.0
        assert growth_exponent(pr, fit=True) == pytest.approx(1.0, abs=1e-2)


@pytest.mark.parametrize("p,k,lam,a,ok", [
    (2, 1, -1, 1.0, True), (1, 2, 1, 0.5, True), (3, 2, -1, 0.5, True),
    (1, 2, -1, -0.5, False), (2, 1, 1, -1.0, False), (2, 2, 1, 0.0, False),
])
def test_bundle_admissibility(p, k, lam, a, ok):
    b = bundle_admissibility(p, k, lam)
    assert b.a_required == pytest.approx(a)
    assert b.admissible is ok


def test_bundle_errors():
    with pytest.raises(InvalidParameterError):
        bundle_admissibility(2, 1, 0)
    with pytest.raises(InvalidParameterError):
        bundle_admissibility(0, 1, 1)


@given(st.integers(1, 5), st.floats(0.5, 8), st.floats(0.2, 3), st.floats(0.05, 0.95))
def test_zero_slope_law(m, kappa, abs_mu, frac):
    pr = SolitonProfile.with_boundary(m, kappa, -1, -abs_mu, frac * kappa / 2)
    zeros = zero_structure(pr, 50.0)
    assert zeros
    for z in zeros:
        assert abs(z.fd_slope - z.slope) <= 1e-6


def test_expanding_cone_has_no_positive_zero():
    pr = SolitonProfile.expanding_cone(2, 4.0, -0.5)
    assert zero_structure(pr, 1e6) == []


def test_zero_structure_rejects_short_range():
    with pytest.raises(InvalidParameterError):
        zero_structure(SHRINK, 0.5)
    assert np.isfinite(vanishing_order(SHRINK))


def test_shrinking_double_zero_at_half_kappa():
    # phi'' = -2 at a double zero with lambda = -1, so the zero is a local maximum
    pr = SolitonProfile.with_boundary(2, 4.0, -1, 1.3, 2.0)
    zeros = zero_structure(pr, 50.0)
    assert len(zeros) == 1
    assert zeros[0].zero == pytest.approx(2.0) and zeros[0].slope == 0.0
    assert completeness_report(pr)[0].kind == "complete_end"
    assert phi_closed(pr, 3.0) == pytest.approx(mp_phi_from_left(2, 4.0, -1, 1.3, 2.0, 3.0), rel=1e-10)


@given(st.integers(1, 5), st.floats(0.5, 8), st.floats(0.2, 3), st.floats(0.05, 0.95))
def test_shrinking_zeros_split_at_half_kappa(m, kappa, abs_mu, frac):
    pr = SolitonProfile.with_boundary(m, kappa, -1, -abs_mu, frac * kappa / 2)
    zs = [z.zero for z in zero_structure(pr, 200.0)]
    assert len(zs) <= 2
    assert sum(z <= kappa / 2 * (1 + 1e-12) for z in zs) <= 1
    assert sum(z >= kappa / 2 * (1 - 1e-12) for z in zs) <= 1


def test_interior_zero_is_rejected():
    pr = SolitonProfile.with_boundary(1, 4.0, -1, -1.0, 1.0)
    assert interior_zeros(pr)
    with pytest.raises(InvalidParameterError):
        completeness_report(pr)
    assert interior_zeros(pr.replace(b=2.0)) == []


def test_expanding_zero_bound_is_recorded():
    assert zero_bound_check(SolitonProfile.with_boundary(1, -1.0, 1, -1.0, 0.5))["bound_holds"]
    # the double zero at a = 1 sits on the bound itself
    rec = zero_bound_check(SolitonProfile.with_boundary(1, -2.0, 1, -1.0, 1.0))
    assert rec["count"] == 1 and not rec["bound_holds"]
    with pytest.raises(InvalidParameterError):
        zero_bound_check(SHRINK)


def test_not_smooth_for_other_a():
    pr = SolitonProfile(1, 4.0, -1, solve_mu(1, 4.0, 0.5).root, 0.0, 0.5)
    assert completeness_report(pr)[0].kind == "finite_distance_singular"
