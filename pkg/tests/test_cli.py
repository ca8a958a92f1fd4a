# tests/test_cli.py
import json

import pytest

from icregions.cli import main, parse_assignment
from icregions.exceptions import ParseError


@pytest.fixture
def instance(write_json, trivial_crng, noiseless):
    return write_json(
        "instance.json", {"input": trivial_crng.to_json(), "channel": noiseless.to_json()}
    )


@pytest.fixture
def code_params(write_json, trivial_crng, noiseless):
    return write_json(
        "code.json",
        {
            "n": 2,
            "input": trivial_crng.to_json(),
            "channel": noiseless.to_json(),
            "rates": {"11": {"l_f": 0, "l_g": 1}, "22": {"l_f": 0, "l_g": 1}},
        },
    )


def _json(capsys):
    return json.loads(capsys.readouterr().out)


# ============================================================================
# Regions
# ============================================================================


def test_build_prints_the_inequality_count(instance, capsys):
    assert main(["region", "build", "--input", instance, "--variant", "crng-base"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "37 inequalities"


def test_build_accepts_short_variant_names(instance, capsys):
    assert main(["region", "build", "--input", instance, "--variant", "tilde", "--format", "json"]) == 0
    assert _json(capsys)["vars"] == ["R0", "R1", "R2"]


def test_member_verdicts(instance, capsys):
    args = ["region", "member", "--input", instance, "--variant", "crng-tilde", "--format", "json"]
    assert main(args + ["--point", "0,1,1"]) == 0
    assert _json(capsys)["verdict"] == "ACCEPT"
    assert main(args + ["--point", "R0=0,R1=1.1,R2=1"]) == 0
    report = _json(capsys)
    assert report["verdict"] == "REJECT"
    assert report["violated"]


def test_member_over_binning_rates(instance, capsys):
    args = ["region", "member", "--input", instance, "--variant", "crng-base", "--slice", "00"]
    assert main(args + ["--point", "1,1", "--format", "json"]) == 0
    assert _json(capsys)["verdict"] == "ACCEPT"


def test_support(instance, capsys):
    args = ["region", "support", "--input", instance, "--variant", "crng-tilde"]
    assert main(args + ["--direction", "R1=1", "--format", "json"]) == 0
    assert _json(capsys)["support"] == pytest.approx(1.0)


def test_project_removes_binning_rates(instance, capsys):
    args = ["region", "project", "--input", instance, "--variant", "crng-base", "--slice", "0"]
    assert main(args + ["--format", "json"]) == 0
    assert _json(capsys)["aux"] == []


def test_compare_closed_form_with_base(instance, capsys):
    args = [
        "region", "compare", "--input", instance, "--variant", "crng-eliminated0",
        "--against", "crng-base", "--slice", "0", "--dirs", "6", "--points", "20",
        "--seed", "4", "--format", "json",
    ]
    assert main(args) == 0
    report = _json(capsys)
    assert report["seed"] == 4
    assert report["max_support_gap"] < 1e-6


def test_sweep_csv(instance, capsys):
    args = ["sweep", "--input", instance, "--variant", "crng-tilde", "--angles", "3"]
    assert main(args + ["--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "variant,theta,support,R1,R2"
    assert len(lines) == 4


def test_output_file(instance, tmp_path, capsys):
    target = tmp_path / "region.csv"
    args = ["region", "build", "--input", instance, "--variant", "crng-tilde"]
    assert main(args + ["--format", "csv", "--output", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert target.read_text().startswith("R0,R1,R2,sense,bound,tag")


# ============================================================================
# Errors
# ============================================================================


def test_malformed_json_exits_with_parse_code(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["region", "build", "--input", str(broken), "--variant", "cmg"]) == 2


def test_missing_channel(write_json, trivial_crng):
    path = write_json("partial.json", {"input": trivial_crng.to_json()})
    assert main(["region", "build", "--input", path, "--variant", "crng-base"]) == 2


def test_undefined_slice(instance):
    args = ["region", "build", "--input", instance, "--variant", "crng-tilde", "--slice", "000"]
    assert main(args) == 3


def test_unknown_variant_is_a_usage_error(instance):
    with pytest.raises(SystemExit) as excinfo:
        main(["region", "build", "--input", instance, "--variant", "mac"])
    assert excinfo.value.code == 2


def test_parse_assignment():
    assert parse_assignment("R1=1, R2=-0.5") == {"R1": 1.0, "R2": -0.5}
    with pytest.raises(ParseError):
        parse_assignment("R1")


# ============================================================================
# Codes
# ============================================================================


def test_simulate_is_reproducible(code_params, capsys):
    args = ["codec", "simulate", "--input", code_params, "--trials", "50", "--seed", "5"]
    assert main(args + ["--format", "json"]) == 0
    first = _json(capsys)
    assert main(args + ["--format", "json", "--workers", "2"]) == 0
    second = _json(capsys)
    assert first == second
    assert first["seed"] == 5 and first["code_seed"] == 5
    assert first["R11"] == pytest.approx(0.5)


@pytest.mark.parametrize(
    "args",
    [
        ["codec", "simulate", "--input", "code.json", "--trials", "0"],
        ["codec", "hash-check", "--samples", "-1"],
    ],
)
def test_counts_must_be_positive(args):
    with pytest.raises(SystemExit) as excinfo:
        main(args)
    assert excinfo.value.code == 2


def test_exact_error_and_conditions(code_params, capsys):
    args = ["codec", "exact", "--input", code_params, "--seed", "2", "--format", "json"]
    assert main(args) == 0
    assert 0.0 <= _json(capsys)["error"] <= 1.0
    assert main(args + ["--conditions"]) == 0
    rows = _json(capsys)
    assert {row["kind"] for row in rows} == {"S0", "S", "D"}


def test_exact_cap(code_params):
    assert main(["codec", "exact", "--input", code_params, "--exact-cap", "1"]) == 4


def test_hash_check(capsys):
    args = ["codec", "hash-check", "--n", "3", "--l", "2", "--exact", "--seed", "1"]
    assert main(args + ["--format", "json"]) == 0
    report = _json(capsys)
    assert report["alpha_hat"] == pytest.approx(1.0)
    assert report["seed"] == 1
