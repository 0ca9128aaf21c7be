import json

import pytest

from calabi_soliton import __version__
from calabi_soliton.errors import InvalidParameterError
from calabi_soliton.report import (
    SCHEMA,
    Check,
    dumps,
    expand_bundle_case,
    rebuild,
    scalar_case,
    shrink_bundle_case,
)
from calabi_soliton.suites import SUITES, run_suites


@pytest.fixture(scope="module")
def shrink():
    return shrink_bundle_case(s_max=30.0, samples=3001)


def test_case_blocks(shrink):
    doc = json.loads(dumps(shrink))
    assert doc["schema"] == SCHEMA
    assert doc["meta"] == {"package": "calabi_soliton", "version": __version__}
    assert doc["passed"] is True
    assert doc["mu_certificate"]["sign_changes"] == 1
    assert doc["classification"]["left"]["kind"] == "smooth_zero_section"
    assert doc["profile"]["a"] == 1.0


def test_dumps_is_deterministic(shrink):
    assert dumps(shrink) == dumps(shrink_bundle_case(s_max=30.0, samples=3001))


def test_rebuild_reproduces_verdicts(shrink):
    again = rebuild(json.loads(dumps(shrink)))
    assert again.verdicts() == shrink.verdicts()


def test_rebuild_rejects_unknown():
    with pytest.raises(InvalidParameterError):
        rebuild({"schema": 99, "command": "glue", "params": {}})
    with pytest.raises(InvalidParameterError):
        rebuild({"schema": SCHEMA, "command": "sweep", "params": {}})


def test_check_constructors():
    assert Check.below("x", 1e-9, 1e-8).passed
    assert not Check.below("x", float("nan"), 1e-8).passed
    assert Check.flag("y", True).to_dict()["passed"] is True


def test_scalar_case_ricci_bridge():
    case = scalar_case(m=2, kappa=-2.0, c=-6.0, mu=-1.0)
    assert case.passed
    assert case.blocks["scalar"]["ricci_specialization"] is True
    assert case.blocks["scalar"]["positivity_up_to"] == 1e4


def test_expand_bundle_tolerance_failure():
    case = expand_bundle_case(s_max=30.0, samples=3001, tol=1e-30)
    assert not case.passed
    assert [c.name for c in case.checks if not c.passed] == ["ode_residual"]


@pytest.mark.parametrize("name", ["sasaki", "profile", "mu", "radial", "scalar", "fullmetric"])
def test_quick_suites_pass(name):
    checks = run_suites([name], 1e-8)[name]
    assert checks and all(c.passed for c in checks)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suites(["nope"], 1e-8)
    assert "classify" in SUITES
