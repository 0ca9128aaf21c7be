import json

import pytest

from calabi_soliton.cli import EXIT_CONVERGENCE, EXIT_INVALID, EXIT_OK, EXIT_VERIFY, main

FAST = ["--s-max", "30", "--samples", "3001"]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_shrink_bundle_outputs(tmp_path, capsys):
    code, _, _ = run(["shrink-bundle", "--p", "2", "--k", "1", "--out", str(tmp_path), *FAST], capsys)
    assert code == EXIT_OK
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["mu_certificate"]["root"] == pytest.approx(2**0.5, abs=1e-12)
    header = (tmp_path / "profile.csv").read_text().splitlines()[0]
    assert header == "s,sigma,phi,F,potential,length,residual"


def test_outputs_are_deterministic(tmp_path, capsys):
    argv = ["expand-bundle", "--p", "1", "--k", "2", *FAST]
    for d in ("a", "b"):
        assert run([*argv, "--out", str(tmp_path / d)], capsys)[0] == EXIT_OK
    for name in ("report.json", "profile.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_from_report_roundtrip(tmp_path, capsys):
    assert run(["glue", "--p", "2", "--k", "1", "--out", str(tmp_path)], capsys)[0] == EXIT_OK
    assert (tmp_path / "eternal_slices.csv").read_text().startswith("t,r,potential\n")
    code, out, _ = run(["verify", "--from-report", str(tmp_path / "report.json")], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["match"] is True and doc["differences"] == []


def test_changed_verdict_is_reported(tmp_path, capsys):
    assert run(["scalar", "--out", str(tmp_path)], capsys)[0] == EXIT_OK
    path = tmp_path / "report.json"
    doc = json.loads(path.read_text())
    doc["verdicts"]["scalar_residual"] = False
    path.write_text(json.dumps(doc))
    code, _, err = run(["verify", "--from-report", str(path)], capsys)
    assert code == EXIT_VERIFY
    assert "scalar_residual" in err


def test_expand_cone_q_flag(capsys):
    code, out, _ = run(["expand-cone", "--q", "2", "--kappa", "4"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["profile"]["mu"] == -0.5
    assert doc["sasaki"]["aperture"]["q"] == 2.0


def test_exit_codes(capsys):
    assert run(["expand-bundle", "--p", "2", "--k", "1"], capsys)[0] == EXIT_INVALID
    assert run(["scalar", "--mu", "0"], capsys)[0] == EXIT_INVALID
    code, _, err = run(["expand-cone", "--s-min", "-1", "--s-max", "0.1", "--samples", "11"], capsys)
    assert code == EXIT_CONVERGENCE and "did not converge" in err
    code, _, err = run(["expand-cone", "--tol", "1e-30"], capsys)
    assert code == EXIT_VERIFY and "ode_residual" in err


@pytest.mark.parametrize("argv", [
    ["expand-cone", "--samples", "1"],
    ["shrink-bundle", "--p", "x", "--k", "1"],
    ["expand-cone", "--mu", "-1", "--q", "2"],
    ["scalar", "--tol", "nan"],
])
def test_argparse_errors_exit_invalid(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_INVALID
    assert "error" in capsys.readouterr().err


def test_verify_suites(capsys):
    code, out, _ = run(["verify", "--suite", "sasaki", "--suite", "mu"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert set(doc["suites"]) == {"sasaki", "mu"} and doc["passed"]


def test_sweep(capsys):
    code, out, _ = run(["sweep", "--p-max", "2", "--k-max", "2", "--workers", "2", *FAST], capsys)
    assert code == EXIT_OK
    rows = json.loads(out)["sweep"]
    assert [(r["p"], r["k"], r["kind"]) for r in rows] == [(1, 2, "expand"), (2, 1, "shrink")]
