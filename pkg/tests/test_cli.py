import json
import subprocess
import sys
from pathlib import Path

import pytest

from kernelforge import cli

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_err(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(list(argv))
    return exc.value.code, capsys.readouterr().err


def assert_no_floats(obj):
    if isinstance(obj, float):
        raise AssertionError(f"float {obj!r} in exact output")
    if isinstance(obj, dict):
        for v in obj.values():
            assert_no_floats(v)
    if isinstance(obj, list):
        for v in obj:
            assert_no_floats(v)


@pytest.mark.parametrize(
    "golden, argv",
    [
        ("invariants_I_2_3.json", ["invariants", "I:2,3"]),
        ("invariants_VI.json", ["invariants", "VI"]),
        ("chi_IV_3_expanded.json", ["chi", "IV:3", "--expanded"]),
        ("chi_V.json", ["chi", "V"]),
        ("hua_I_1_2_s1.json", ["hua", "I:1,2", "--s", "1"]),
        ("vk_I_1_1_mu1.json", ["vk", "I:1,1", "--mu", "1", "--coeffs"]),
        ("vk_III_2_mu_half.csv", ["vk", "III:2", "--mu", "1/2", "--format", "csv"]),
    ],
)
def test_golden(capsys, golden, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()
    if golden.endswith(".json"):
        rec = json.loads(out)
        assert rec["provenance"] == "exact"
        assert_no_floats(rec["result"])


def test_golden_values():
    assert json.loads((GOLDEN / "invariants_I_2_3.json").read_text())["result"] == {
        "r": 2, "a": 2, "b": 1, "g": 5, "n": 6}
    assert json.loads((GOLDEN / "chi_V.json").read_text())["result"]["factored"] == "(s+1)_8 (s+4)_8"
    assert json.loads((GOLDEN / "hua_I_1_2_s1.json").read_text())["result"] == "1/3"
    assert json.loads((GOLDEN / "vk_I_1_1_mu1.json").read_text())["result"]["c"] == ["0", "1"]


def test_chi_disc(capsys):
    _, out, _ = run(capsys, "chi", "I:1,1")
    assert json.loads(out)["result"]["factored"] == "(s+1)_1"


def test_chi_latex_and_csv(capsys):
    _, out, _ = run(capsys, "chi", "IV:3", "--latex", "--factored")
    res = json.loads(out)["result"]
    assert res["factored"] == "(s+1)_2 (s+3/2)_1"
    assert res["latex"].startswith(r"\left(s+1\right)_{2}")
    _, out, _ = run(capsys, "chi", "IV:3", "--expanded", "--format", "csv")
    assert out.splitlines() == ["power,coefficient", "0,3", "1,13/2", "2,9/2", "3,1"]


def test_vk_eval(capsys):
    code, out, _ = run(capsys, "vk", "I:1,1", "--mu", "1", "--eval", "0.5", "1")
    rec = json.loads(out)
    assert code == 0 and rec["provenance"] == "float"
    assert rec["result"]["value"] == [16.0, 0.0]


def test_kernel_ball(capsys):
    _, out, _ = run(capsys, "kernel", "I:1,1", "--mu", "1", "--m", "1", "--point", "0.3",
                    "--fiber", "0.2i")
    val = json.loads(out)["result"]["value"]
    assert val[0] == pytest.approx(2 * (1 - 0.09 - 0.04) ** -3, rel=1e-13)


def test_kernel_accepts_independent_coordinates(capsys):
    rows = "0,0.1,0.2i,0,-0.1,0,0,0.1,-0.2i,0,0,0.3,0,-0.1,-0.3,0"
    _, full, _ = run(capsys, "kernel", "II:4", f"--point={rows}")
    _, packed, _ = run(capsys, "kernel", "II:4", "--point", "0.1,0.2i,0,0,0.1,0.3")
    assert json.loads(full)["result"] == json.loads(packed)["result"]


def test_parse_complex():
    assert cli.parse_complex("1+2i") == 1 + 2j
    assert cli.parse_complex("-i") == -1j
    assert cli.parse_complex(" 0.5 ") == 0.5
    with pytest.raises(cli.UsageError):
        cli.parse_complex("x")


@pytest.mark.parametrize(
    "argv, message",
    [
        (["invariants", "IV:2"], "TypeIV requires n≥3"),
        (["invariants", "VIII"], "unknown domain type"),
        (["hua", "I:1,1", "--s", "-1"], "s > -1"),
        (["chi", "I:1,1", "--format", "csv"], "--expanded"),
        (["kernel", "V", "--point", "0"], "no concrete realization"),
        (["kernel", "I:1,1", "--point", "1.5"], "outside"),
        (["kernel", "I:2,2", "--point", "0,0,0"], "expects 4 entries"),
        (["vk", "I:1,1", "--mu", "1", "--eval", "1.5", "0"], ">= 1"),
        (["verify", "mc-hua", "--samples", "0"], "positive"),
    ],
)
def test_usage_errors_exit_2(capsys, argv, message):
    code, err = run_err(capsys, *argv)
    assert code == 2
    assert message in err


def test_argparse_errors_exit_2(capsys):
    assert run_err(capsys, "hua", "I:1,1")[0] == 2
    assert run_err(capsys, "frobnicate")[0] == 2
    assert run_err(capsys, "hua", "I:1,1", "--s", "abc")[0] == 2


def test_verify_inflation_ball(capsys):
    code, out, _ = run(capsys, "verify", "inflation-ball", "--n", "1", "--m", "1")
    rec = json.loads(out)
    assert code == 0
    assert rec["result"]["pass"] is True
    assert rec["result"]["reports"][0]["expected"].startswith("2(1-s)^-3")


def test_verify_failure_exits_1(capsys):
    code, out, _ = run(capsys, "verify", "series", "--convention", "uncorrected")
    assert code == 1
    assert json.loads(out)["result"]["pass"] is False


def test_verify_mc_is_byte_identical(capsys, monkeypatch):
    argv = ["verify", "mc-hua", "--domain", "III:2", "--s", "1/2", "--samples", "5000"]
    _, a, _ = run(capsys, *argv, "--seed", "7")
    monkeypatch.setenv("KERNELFORGE_SEED", "7")
    _, b, _ = run(capsys, *argv)
    assert a == b
    rec = json.loads(a)
    assert rec["provenance"] == "monte-carlo"
    assert rec["params"]["seed"] == 7


def test_bad_seed_env(capsys, monkeypatch):
    monkeypatch.setenv("KERNELFORGE_SEED", "nope")
    assert run_err(capsys, "verify", "selberg")[0] == 2


@pytest.mark.parametrize("suite", ["chi-tables", "overlaps", "selberg", "reproducing-disk"])
def test_verify_suites_pass(capsys, suite):
    code, out, _ = run(capsys, "verify", suite)
    assert code == 0 and json.loads(out)["result"]["pass"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kernelforge", "hua", "I:1,1", "--s", "1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["result"] == "1/2"
    bad = subprocess.run([sys.executable, "-m", "kernelforge", "invariants", "IV:2"],
                         capture_output=True, text=True)
    assert bad.returncode == 2
