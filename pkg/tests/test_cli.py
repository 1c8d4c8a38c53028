import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

import bajlab.cli as cli
from bajlab.cli import load_config, run_command

REPO_ROOT = Path(__file__).resolve().parent.parent
SCHEMA = json.loads((REPO_ROOT / "report.schema.json").read_text())


def run(capsys, *argv):
    code = run_command(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return code, doc


def test_eval_prints_two(capsys):
    code, out, _ = run(capsys, "eval", "--f", "x", "--g", "1",
                       "--domain", "0", "10", "--x", "1", "--y", "3")
    assert code == 0
    assert out.strip() == "2"


def test_eval_json_schema(capsys):
    code, doc = run_json(capsys, "eval", "--f", "sin(x)", "--g", "cos(x)",
                         "--domain", "-1.3", "1.3", "--x", "0.3", "--y", "0.7")
    assert code == 0
    assert doc["kind"] == "eval"
    assert doc["mean"] == pytest.approx(0.5, abs=1e-12)


def test_validate_failure_exits_one(capsys):
    code, doc = run_json(capsys, "validate", "--f", "x^2", "--g", "1",
                         "--domain", "-1", "1")
    assert code == 1
    assert doc["report"]["ok"] is False


def test_validate_success(capsys):
    code, doc = run_json(capsys, "validate", "--f", "x", "--g", "1",
                         "--domain", "0", "1")
    assert code == 0
    assert doc["report"]["ok"] is True


def test_classify_common_quasiarithmetic(capsys):
    code, doc = run_json(capsys, "classify", "--f", "sin(x)", "--g", "cos(x)",
                         "--h", "sinh(x)", "--k", "cosh(x)",
                         "--domain", "-1.3", "1.3")
    assert code == 0
    cls = doc["classification"]
    assert cls["tag"] == "CommonQuasiarithmetic"
    assert cls["gamma"]["constants"]["value"] == pytest.approx(1.0, abs=1e-7)
    for key in ("ii", "iii", "iv", "v", "vi", "vii"):
        assert cls["evidence"][key]["passed"] is True


def test_classify_not_equal(capsys):
    code, doc = run_json(capsys, "classify", "--f", "x", "--g", "1",
                         "--h", "x^2", "--k", "x", "--domain", "0.5", "4")
    assert code == 0
    assert doc["classification"]["tag"] == "NotEqual"
    assert doc["classification"]["evidence"] is None


def test_classify_json_deterministic(capsys):
    argv = ["classify", "--f", "sin(x)", "--g", "cos(x)", "--h", "sinh(x)",
            "--k", "cosh(x)", "--domain", "-1.3", "1.3", "--format", "json"]
    assert run_command(argv) == 0
    first = capsys.readouterr().out
    assert run_command(argv) == 0
    second = capsys.readouterr().out
    assert first == second


def test_classify_inconclusive_exit_code(capsys, monkeypatch, sin_cos, sinh_cosh):
    from bajlab.decide import Classification, EqualityVerdict

    fake = Classification("Inconclusive", EqualityVerdict(True, 0.0, 21, 1e-9))
    monkeypatch.setattr(cli, "classify_equality", lambda *a, **k: fake)
    code, _, _ = run(capsys, "classify", "--f", "sin(x)", "--g", "cos(x)",
                     "--h", "sinh(x)", "--k", "cosh(x)", "--domain", "-1.3", "1.3")
    assert code == 3


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        run_command(["classify", "--f", "x"])  # missing required arguments
    assert exc.value.code == 2
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        run_command(["classify", "--f", "x", "--g", "1", "--h", "x", "--k", "1",
                     "--domain", "0", "1", "--grid", "3"])
    assert exc.value.code == 2
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        run_command(["bogus"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_reduce_csv_and_json(capsys):
    code, out, _ = run(capsys, "reduce", "--f", "x", "--g", "1", "--h", "sin(x)",
                       "--k", "cos(x)", "--domain", "-1.3", "1.3",
                       "--format", "csv", "--nodes", "21")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,p,q,phi,psi"
    assert len(lines) == 22
    code, doc = run_json(capsys, "reduce", "--f", "x", "--g", "1",
                         "--h", "sin(x)", "--k", "cos(x)",
                         "--domain", "-1.3", "1.3")
    assert code == 0
    assert doc["substitution_residuals"]["qp"] <= 1e-9
    assert doc["validation"]["qp"]["ok"] is True


def test_family_emits_sources_and_table(capsys):
    code, doc = run_json(capsys, "family", "--alpha", "-1", "--w", "x",
                         "--domain", "-1.5", "1.5")
    assert code == 0
    assert doc["f"] == "sin(x)"
    assert doc["g"] == "cos(x)"
    code, out, _ = run(capsys, "family", "--alpha", "-1", "--w", "x",
                       "--domain", "-1.5", "1.5", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "x,value"


def test_family_window_violation_exits_one(capsys):
    code, _, err = run(capsys, "family", "--alpha", "-1", "--w", "x",
                       "--domain", "-3", "3")
    assert code == 1
    assert "validation failure" in err


def test_verify_reports_assertions(capsys):
    code, doc = run_json(capsys, "verify", "--f", "sin(x)", "--g", "cos(x)",
                         "--h", "sinh(x)", "--k", "cosh(x)",
                         "--domain", "-1.3", "1.3")
    assert code == 0
    assert doc["tag"] == "CommonQuasiarithmetic"
    assert all(doc["evidence"][k]["passed"] for k in ("ii", "iii", "iv", "v", "vi", "vii"))


def test_verify_not_equal_has_no_evidence(capsys):
    code, doc = run_json(capsys, "verify", "--f", "x", "--g", "1",
                         "--h", "x^2", "--k", "x", "--domain", "0.5", "4")
    assert code == 0
    assert doc["tag"] == "NotEqual"
    assert doc["evidence"] is None


def test_recover_weight_json_and_bundle(tmp_path, capsys):
    out_dir = tmp_path / "rw"
    code, doc = run_json(capsys, "recover-weight", "--f", "sin(x)", "--g", "cos(x)",
                         "--h", "sin(x)", "--k", "cos(x)", "--domain", "-1.3", "1.3",
                         "--nodes", "11", "--out", str(out_dir))
    assert code == 0
    assert doc["kind"] == "recover_weight"
    assert doc["p_v0"] == pytest.approx(1.0, abs=1e-9)  # 1/sqrt(1+0^2) at the midpoint
    assert (out_dir / "recovered_weight.csv").exists()
    assert (out_dir / "recovered_weight.png").stat().st_size > 0


def test_eval_outside_core_exits_one(capsys):
    code, _, err = run(capsys, "eval", "--f", "x", "--g", "1",
                       "--domain", "0", "10", "--x", "0.0001", "--y", "3")
    assert code == 1
    assert "core subinterval" in err


def test_recover_weight_csv(capsys):
    code, out, _ = run(capsys, "recover-weight", "--f", "sin(x)", "--g", "cos(x)",
                       "--h", "sin(x)", "--k", "cos(x)", "--domain", "-1.3", "1.3",
                       "--nodes", "11", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,value"
    # recovered weight of the self-reduced pair is 1/sqrt(1+u^2)
    for line in lines[1:]:
        u, p = map(float, line.split(","))
        assert p == pytest.approx((1 + u * u) ** -0.5, abs=1e-9)


def test_out_bundle_contains_report_tables_figures(tmp_path, capsys):
    out_dir = tmp_path / "bundle"
    code, _, _ = run(capsys, "classify", "--f", "sin(x)", "--g", "cos(x)",
                     "--h", "sinh(x)", "--k", "cosh(x)", "--domain", "-1.3", "1.3",
                     "--out", str(out_dir))
    assert code == 0
    doc = json.loads((out_dir / "report.json").read_text())
    jsonschema.validate(doc, SCHEMA)
    grid = (out_dir / "grid.csv").read_text().splitlines()
    assert grid[0] == "x,y,meanA,meanB,diff"
    assert (out_dir / "deviation.png").stat().st_size > 0
    assert (out_dir / "canonical_w.csv").exists()
    assert (out_dir / "canonical_w.png").stat().st_size > 0


def test_reduce_bundle_files(tmp_path, capsys):
    out_dir = tmp_path / "red"
    code, _, _ = run(capsys, "reduce", "--f", "x", "--g", "1", "--h", "sin(x)",
                     "--k", "cos(x)", "--domain", "-1.3", "1.3",
                     "--out", str(out_dir), "--nodes", "21")
    assert code == 0
    for name in ("report.json", "p.csv", "q.csv", "phi.csv", "psi.csv",
                 "reduced_functions.png"):
        assert (out_dir / name).exists(), name
    assert (out_dir / "p.csv").read_text().splitlines()[0] == "x,value"


def test_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text(
        "# equality run\n"
        "f = sin(x)\n"
        "g = cos(x)\n"
        "h = sinh(x)\n"
        "k = cosh(x)\n"
        "domain = -1.3 1.3\n"
        "grid = 9\n")
    code, doc = run_json(capsys, "classify", "--config", str(config))
    assert code == 0
    assert doc["grid"] == 9
    assert doc["classification"]["tag"] == "CommonQuasiarithmetic"
    # flags override the file
    code, doc = run_json(capsys, "classify", "--config", str(config), "--grid", "7")
    assert code == 0
    assert doc["grid"] == 7


def test_config_rejects_unknown_keys(tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("wobble = 3\n")
    with pytest.raises(ValueError):
        load_config(str(config))


def test_config_quoted_values_and_bracketed_domain(tmp_path, capsys):
    config = tmp_path / "quoted.cfg"
    config.write_text(
        'f = "x"\n'
        'g = "1"\n'
        "domain = [0, 10]\n"
        "x = 1\n"
        "y = 3\n")
    code, out, _ = run(capsys, "eval", "--config", str(config))
    assert code == 0
    assert out.strip() == "2"


def test_tolerance_flags(capsys):
    # an absurdly tight equality tolerance flips the verdict to NotEqual
    code, doc = run_json(capsys, "classify", "--f", "sin(x)", "--g", "cos(x)",
                         "--h", "sinh(x)", "--k", "cosh(x)",
                         "--domain", "-1.3", "1.3", "--eq-tol", "1e-16")
    assert code == 0
    assert doc["classification"]["tag"] == "NotEqual"
    with pytest.raises(SystemExit) as exc:
        run_command(["classify", "--f", "x", "--g", "1", "--h", "x", "--k", "1",
                     "--domain", "0", "1", "--fit-tol", "-1"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_console_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "bajlab.cli", "eval", "--f", "x", "--g", "1",
         "--domain", "0", "10", "--x", "1", "--y", "3"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "2"
