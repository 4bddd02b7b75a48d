import json

import pytest
from click.testing import CliRunner

from app import cli


@pytest.fixture
def runner():
    return CliRunner()


@pytest.mark.parametrize("args", [["--p", "4", "--pprime", "2"], ["--p", "4"], ["--max-weight=-2"]])
def test_config_errors_exit_2(runner, tmp_path, args):
    result = runner.invoke(cli, ["verify", *args, "--cache-dir", str(tmp_path / "c"), "--out", str(tmp_path / "r.json")])
    assert result.exit_code == 2


def test_basis_command(runner, tmp_path):
    result = runner.invoke(cli, ["basis", "--max-weight", "1", "--cache-dir", str(tmp_path)])
    assert result.exit_code == 0
    assert "V(3,2)" in result.output


def test_kernel_dims_command(runner, tmp_path):
    result = runner.invoke(cli, ["kernel-dims", "--coset", "VL", "--max-weight", "2", "--cache-dir", str(tmp_path)])
    assert result.exit_code == 0


def test_subsingular_command(runner, tmp_path):
    result = runner.invoke(cli, ["subsingular", "--cache-dir", str(tmp_path)])
    assert result.exit_code == 0
    assert "weight: 5" in result.output


def _verify(runner, tmp_path, name, jobs):
    out = tmp_path / name
    result = runner.invoke(cli, [
        "verify", "--p", "5", "--pprime", "2", "--max-weight", "3", "--module", "VL",
        "--jobs", str(jobs), "--cache-dir", str(tmp_path / "cache"), "--out", str(out),
    ])
    return result, out


def test_verify_vl_passes_and_is_deterministic(runner, tmp_path):
    first, out1 = _verify(runner, tmp_path, "one.json", 1)
    second, out2 = _verify(runner, tmp_path, "two.json", 2)
    assert first.exit_code == 0, first.output
    assert second.exit_code == 0
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    assert report["summary"]["fail"] == 0
    assert any(c["witness"].get("c") == "-22/5" for c in report["checks"])
    assert {c["suite"] for c in report["checks"]} == {"central_charge", "screening_kernel"}
