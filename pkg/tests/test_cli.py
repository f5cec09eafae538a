import json
import subprocess
import sys

import numpy as np
import pytest

from liftgeo.cli import main
from liftgeo.definitions import BUILTINS, builtin
from liftgeo.errors import UnknownCheck, ValidationError
from liftgeo.harness import REGISTRY, RunConfig, exit_code, run_check
from liftgeo.report import FAIL, PASS


def _check(tmp_path, *args, name="out.json"):
    out = tmp_path / name
    code = main(["check", *args, "--json", str(out)])
    return code, (out.read_bytes() if out.exists() else None)


def test_list_commands(capsys):
    assert main(["list-checks"]) == 0
    names = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
    assert names == list(REGISTRY)
    assert main(["list-builtins"]) == 0
    assert capsys.readouterr().out.split() == list(BUILTINS)


def test_describe(capsys):
    assert main(["describe", "--manifold", "builtin:sphere2"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["metric"][1][1] == "sin(x0)^2" and d["connection"] == "levi-civita"


def test_one_stein_complete_lift_on_euclidean2_passes(tmp_path):
    code, raw = _check(tmp_path, "one-stein", "--manifold", "builtin:euclidean2", "--tm-connection", "complete",
                       "--samples", "4")
    assert code == 0
    rep = json.loads(raw)
    assert set(rep) >= {"check", "verdict", "max_residual", "tolerance", "seed", "samples", "worst_cases",
                        "interpretation_flags"}
    assert rep["verdict"] == PASS


def test_statistical_twisted_complete_on_sphere_fails(tmp_path):
    code, raw = _check(tmp_path, "statistical-tm", "--manifold", "builtin:sphere2", "--tm-metric", "twisted:f,h",
                       "--tm-connection", "complete", "--samples", "4")
    assert code == 1 and json.loads(raw)["verdict"] == FAIL


def test_flagged_exit_status(tmp_path):
    code, raw = _check(tmp_path, "cubic-paper-formulas", "--manifold", "builtin:euclidean2", "--samples", "3")
    assert code == 2 and json.loads(raw)["verdict"] == "flagged"


def test_error_exit_status(tmp_path, capsys):
    assert main(["check", "no-such-check", "--manifold", "builtin:euclidean2"]) == 3
    assert main(["check", "one-stein", "--manifold", "builtin:nowhere"]) == 3
    assert main(["check", "one-stein", "--manifold", "builtin:euclidean2", "--tm-metric", "twisted:f"]) == 3
    assert main(["check", "one-stein", "--manifold", "builtin:euclidean2", "--samples", "0"]) == 3
    assert "error:" in capsys.readouterr().err


def test_same_invocation_is_byte_identical(tmp_path):
    args = ["osserman", "--manifold", "builtin:sphere2", "--tm-connection", "complete", "--samples", "3",
            "--seed", "17"]
    _, a = _check(tmp_path, *args, name="a.json")
    _, b = _check(tmp_path, *args, name="b.json")
    assert a == b and json.loads(a)["seed"] == 17
    _, c = _check(tmp_path, *args[:-1], "18", name="c.json")
    assert c != a


def test_seed_defaults_to_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("LIFTGEO_SEED", "5")
    _, raw = _check(tmp_path, "codazzi-base", "--manifold", "builtin:polar2", "--samples", "2")
    assert json.loads(raw)["seed"] == 5
    monkeypatch.setenv("LIFTGEO_SEED", "x")
    assert main(["check", "codazzi-base", "--manifold", "builtin:polar2"]) == 3


def test_stdout_json_when_no_output_file(capsys):
    assert main(["check", "codazzi-base", "--manifold", "builtin:euclidean3", "--samples", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["check"] == "codazzi-base"


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.json"
    proc = subprocess.run([sys.executable, "-m", "liftgeo", "check", "lc-oracle-agreement", "--manifold",
                           "builtin:polar2", "--tm-metric", "gradient:f", "--samples", "3", "--json", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "lc-oracle-agreement: PASS" in proc.stdout


@pytest.mark.parametrize("check", list(REGISTRY))
def test_exit_status_contract_for_every_check(check):
    cfg = RunConfig(seed=1, samples=2, directions=2, pairs=2, tm_metric="twisted:f,h")
    rep = run_check(builtin("euclidean2"), check, cfg)
    assert exit_code(rep) == {"pass": 0, "fail": 1, "flagged": 2}[rep.verdict]
    assert rep.to_json() == run_check(builtin("euclidean2"), check, cfg).to_json()


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_every_builtin_passes_codazzi_with_levi_civita(name):
    rep = run_check(builtin(name), "codazzi-base", RunConfig(samples=10, base_connection="levi-civita"))
    assert rep.verdict == PASS


def test_run_config_validation():
    with pytest.raises(ValidationError):
        RunConfig(samples=0)
    with pytest.raises(ValidationError):
        RunConfig(tolerances={"osserman": -1.0})
    with pytest.raises(ValidationError):
        RunConfig(curvature_sign=2)
    with pytest.raises(UnknownCheck):
        run_check(builtin("euclidean2"), "nope")
    assert RunConfig(tol=1e-3).tolerance("osserman") == 1e-3
    assert RunConfig(tolerances={"osserman": 1e-4}).tolerance("osserman") == 1e-4


def test_weights_accept_inline_expressions():
    rep = run_check(builtin("sphere2"), "lc-oracle-agreement",
                    RunConfig(samples=2, tm_metric="twisted:x0 + 1, exp(0.1*x1)"))
    assert rep.verdict == PASS and rep.parameters["metric"] == "twisted:x0 + 1,exp(0.1*x1)"


def test_curvature_sign_flag_keeps_bracket_identities():
    rep = run_check(builtin("sphere2"), "bracket-identities", RunConfig(samples=3, curvature_sign=-1))
    assert rep.verdict == PASS and rep.parameters["curvature_sign"] == -1
