import csv
import io
import json
import math

import numpy as np
import pytest

from sdbounds import cli
from sdbounds.dataset import OPERATOR_DIGITS, PSI1_DIGITS, PSI2_DIGITS, builtin_operator
from sdbounds.errors import DimensionMismatch, NonNormalizedState, NotHermitian, ParseError
from sdbounds.io import (
    csv_text,
    fmt,
    load_density,
    load_operator,
    load_state,
    operator_to_dict,
    state_to_dict,
    write_atomic,
)

from conftest import gue, haar_state


def dump(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    """Built-in operator and states on disk, exactly as printed."""
    return {
        "op": dump(tmp_path / "A.json", {"dim": 4, "re": [list(r) for r in OPERATOR_DIGITS]}),
        "psi1": dump(tmp_path / "psi1.json", {"re": list(PSI1_DIGITS)}),
        "psi2": dump(tmp_path / "psi2.json", {"re": list(PSI2_DIGITS)}),
        "sz": dump(tmp_path / "sz.json", {"re": [[1, 0], [0, -1]]}),
        "sx": dump(tmp_path / "sx.json", {"re": [[0, 1], [1, 0]]}),
        "e1": dump(tmp_path / "e1.json", {"re": [1, 0], "im": [0, 0]}),
        "plus": dump(tmp_path / "plus.json", {"re": [2**-0.5, 2**-0.5]}),
    }


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_dataset_digits_verbatim():
    assert PSI1_DIGITS == (0.5506, 0.3628, 0.6016, 0.4509)
    assert PSI2_DIGITS == (0.3511, 0.4912, 0.5296, 0.5958)
    assert math.fsum(x * x for x in PSI1_DIGITS) == pytest.approx(1.00001757, abs=1e-12)
    assert math.fsum(x * x for x in PSI2_DIGITS) == pytest.approx(1.00000245, abs=1e-12)
    assert builtin_operator()[0, 0] == -1.3343


def test_operator_real_file(files):
    a = load_operator(files["op"])
    assert np.array_equal(a, builtin_operator())


def test_operator_errors(tmp_path):
    with pytest.raises(NotHermitian):
        load_operator(dump(tmp_path / "a.json", {"re": [[0, 1], [0, 0]]}))
    with pytest.raises(DimensionMismatch):
        load_operator(dump(tmp_path / "b.json", {"dim": 3, "re": [[0, 1], [1, 0]]}))
    with pytest.raises(DimensionMismatch):
        load_operator(dump(tmp_path / "c.json", {"re": [[0, 1], [1, 0]], "im": [[0]]}))
    with pytest.raises(ParseError):
        load_operator(dump(tmp_path / "d.json", {"im": [[0]]}))
    with pytest.raises(ParseError):
        load_operator(dump(tmp_path / "e.json", {"re": [[0, "x"], [1, 0]]}))


def test_parse_error_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"re": [1,\n 2,, 3]}')
    with pytest.raises(ParseError, match=r"bad.json:2:"):
        load_state(p)
    with pytest.raises(ParseError):
        load_state(tmp_path / "missing.json")


def test_state_window(tmp_path, files):
    with pytest.raises(NonNormalizedState):
        load_state(dump(tmp_path / "s.json", {"re": [0.9, 0.0]}))
    v = load_state(dump(tmp_path / "s.json", {"re": [0.9, 0.0]}), renormalize=True)
    assert np.allclose(v, [1, 0])
    v = load_state(dump(tmp_path / "t.json", {"re": [1 + 5e-7, 0.0]}))
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(NonNormalizedState):
        load_state(dump(tmp_path / "z.json", {"re": [0.0, 0.0]}), renormalize=True)


def test_printed_states_need_renormalize_from_file(files):
    # norm deviations 8.8e-6 and 1.2e-6 are both outside the 1e-6 file window
    for key in ("psi1", "psi2"):
        with pytest.raises(NonNormalizedState):
            load_state(files[key])
        assert abs(np.linalg.norm(load_state(files[key], renormalize=True)) - 1) <= 1e-15


def test_json_round_trip(tmp_path, rng):
    for d in (2, 5, 8):
        h = gue(rng, d)
        h = (h + h.conj().T) / 2
        back = load_operator(dump(tmp_path / "h.json", operator_to_dict(h)))
        assert np.max(np.abs(back - h)) <= 1e-12
        psi = haar_state(rng, d)
        back = load_state(dump(tmp_path / "s.json", state_to_dict(psi)))
        assert np.max(np.abs(back - psi)) <= 1e-12


def test_load_density(tmp_path):
    rho = np.diag([0.75, 0.25])
    assert np.array_equal(load_density(dump(tmp_path / "r.json", operator_to_dict(rho))), rho)


def test_fmt_and_csv():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(True) == "true" and fmt(np.False_) == "false"
    assert fmt(float("nan")) == "nan" and fmt(7) == "7"
    assert csv_text(["a", "b"], []) == "a,b\n"
    assert csv_text(["a", "b"], [[1.0, "x"]]) == "a,b\n1,x\n"


def test_write_atomic(tmp_path):
    p = write_atomic(tmp_path / "sub" / "f.txt", "hello")
    assert p.read_text() == "hello"
    assert [q.name for q in p.parent.iterdir()] == ["f.txt"]


def test_cli_sd(files, tmp_path, capsys):
    code, out, _ = run(["sd", "--state", files["plus"], "--op", files["sz"], "--out", str(tmp_path)], capsys)
    assert code == 0
    header, row = out.splitlines()
    assert header == "mean,second_moment,variance,sd"
    assert [float(x) for x in row.split(",")] == pytest.approx([0, 1, 1, 1], abs=1e-15)
    manifest = json.loads((tmp_path / "sd.manifest.json").read_text())
    assert manifest["command"] == "sd" and manifest["outputs"] == ["sd.csv"]
    assert manifest["timestamp"].endswith("Z")
    assert set(manifest) >= {"argv", "config", "master_seed", "tool_version", "tolerances"}


def test_cli_sd_json(files, tmp_path, capsys):
    code, out, _ = run(["sd", "--state", files["e1"], "--op", files["sx"], "--format", "json",
                        "--out", str(tmp_path)], capsys)
    assert code == 0 and json.loads(out)["variance"] == 1.0


def test_cli_coherence_incompat(files, tmp_path, capsys):
    rho = dump(tmp_path / "rho.json", {"re": [[0.75, 0], [0, 0.25]]})
    code, out, _ = run(["coherence", "--rho", rho, "--op", files["sx"], "--out", str(tmp_path)], capsys)
    assert code == 0 and float(out.splitlines()[1]) == pytest.approx(1 - math.sqrt(3) / 2, abs=1e-12)
    sy = dump(tmp_path / "sy.json", {"re": [[0, 0], [0, 0]], "im": [[0, -1], [1, 0]]})
    code, out, _ = run(["incompat", "--state", files["e1"], "--opA", files["sx"], "--opB", sy,
                        "--out", str(tmp_path)], capsys)
    assert code == 0 and out.splitlines() == ["U", "2"]


def test_cli_bounds_builtin_point(files, tmp_path, capsys):
    argv = ["bounds", "--alpha", f"0.6,{math.sqrt(1 - 0.36)}", "--states", files["psi1"], files["psi2"],
            "--op", files["op"], "--variant", "both", "--renormalize", "--out", str(tmp_path)]
    code, out, _ = run(argv, capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["variant"] for r in rows] == ["corrected", "printed"]
    assert rows[0]["lower_satisfied"] == rows[0]["upper_satisfied"] == "true"
    assert float(rows[0]["exact"]) == pytest.approx(6.297153241977869, rel=1e-11)
    assert list(rows[0]) == cli.BOUNDS_COLUMNS


def test_cli_bounds_without_renormalize_fails(files, tmp_path, capsys):
    code, _, err = run(["bounds", "--alpha", "0.6,0.8", "--states", files["psi1"], files["psi2"],
                        "--op", files["op"], "--out", str(tmp_path)], capsys)
    assert code == 1
    assert json.loads(err)["error"] == "NonNormalizedState"


def test_cli_incompat_bounds(files, tmp_path, capsys):
    code, out, _ = run(["incompat-bounds", "--alpha=0.6,-0.8i", "--states", files["e1"], files["plus"],
                        "--opA", files["sx"], "--opB", files["sz"], "--format", "json",
                        "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["F_tilde"] >= rep["F_sum"] - 1e-12 and rep["lower_satisfied"]


def test_cli_sweep_grid5(tmp_path, capsys):
    code, out, _ = run(["sweep-paper", "--sign", "plus", "--grid", "5", "--out", str(tmp_path)], capsys)
    assert code == 0 and "5 rows" in out
    rows = read_csv(tmp_path / "sweep_plus.csv")
    assert [float(r["x"]) for r in rows] == [0, 0.25, 0.5, 0.75, 1]
    for r in (rows[0], rows[-1]):
        assert float(r["B_L_corrected"]) == pytest.approx(float(r["exact"]), abs=1e-9)
        assert float(r["B_U_corrected"]) == pytest.approx(float(r["exact"]), abs=1e-9)
    assert not (tmp_path / "sweep_minus.csv").exists()
    assert json.loads((tmp_path / "sweep-paper.manifest.json").read_text())["outputs"] == ["sweep_plus.csv"]


def test_cli_fuzz_zero_trials(tmp_path, capsys):
    code, _, _ = run(["fuzz", "--trials", "0", "--dim", "3", "--components", "2", "--seed", "5",
                      "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "fuzz_report.json").read_text())
    assert rep["trials"] == 0 and rep["config"]["master_seed"] == 5
    assert (tmp_path / "fuzz_violations.csv").read_text() == "index,variant,side,margin\n"


def test_cli_fuzz_seed_env_and_determinism(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SDBOUNDS_SEED", "0x2a")
    base = ["fuzz", "--trials", "300", "--dim", "4", "--components", "3"]
    assert run(base + ["--out", str(tmp_path / "a")], capsys)[0] == 0
    assert run(base + ["--out", str(tmp_path / "b")], capsys)[0] == 0
    monkeypatch.delenv("SDBOUNDS_SEED")
    assert run(base + ["--seed", "42", "--out", str(tmp_path / "c")], capsys)[0] == 0
    texts = {k: (tmp_path / k / "fuzz_report.json").read_bytes() for k in "abc"}
    assert texts["a"] == texts["b"] == texts["c"]
    assert (tmp_path / "a" / "fuzz_violations.csv").read_bytes() == (tmp_path / "c" / "fuzz_violations.csv").read_bytes()
    assert json.loads((tmp_path / "a" / "fuzz.manifest.json").read_text())["master_seed"] == 42


def test_cli_fuzz_config_file(tmp_path, capsys):
    cfg = dump(tmp_path / "cfg.json", {"dim": 3, "n_components": 2, "master_seed": 9,
                                        "operator_scheme": "diagonal"})
    code, _, _ = run(["fuzz", "--config", cfg, "--trials", "10", "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "fuzz_report.json").read_text())
    assert rep["config"]["master_seed"] == 9 and rep["config"]["operator_scheme"] == "diagonal"


def test_cli_double_slit(tmp_path, capsys):
    code, out, _ = run(["double-slit", "--out", str(tmp_path)], capsys)
    assert code == 0 and out.startswith("quantity,variant,value\n")
    assert (tmp_path / "double-slit.csv").read_text() == out
    cfg = dump(tmp_path / "slit.json", {"amplitudes": [1, 0]})
    assert run(["double-slit", "--config", cfg, "--out", str(tmp_path)], capsys)[0] == 0


def test_cli_csv_byte_identical(tmp_path, capsys):
    for d in ("a", "b"):
        run(["sweep-paper", "--grid", "21", "--out", str(tmp_path / d)], capsys)
    for name in ("sweep_plus.csv", "sweep_minus.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.parametrize("argv", [
    [], ["nope"], ["sd", "--state", "x"], ["fuzz", "--trials", "-1"],
    ["sweep-paper", "--grid", "1"], ["fuzz", "--trials", "3", "--ops", "wishart"],
])
def test_cli_usage_errors(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(argv, capsys)[0] == 2


@pytest.mark.parametrize("make", [
    lambda t, f: ["sd", "--state", str(t / "missing.json"), "--op", f["sz"]],
    lambda t, f: ["sd", "--state", f["psi1"], "--op", f["sz"]],
    lambda t, f: ["fuzz", "--trials", "1", "--dim", "1"],
    lambda t, f: ["double-slit", "--config", dump(t / "s.json", {"packet_width": -1})],
])
def test_cli_validation_errors(make, files, tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, err = run(make(tmp_path, files), capsys)
    assert code == 1
    payload = json.loads(err)
    assert set(payload) >= {"error", "message"}


def test_cli_help_lists_columns(capsys):
    assert cli.main(["--help"]) == 0
    assert ",".join(cli.SWEEP_COLUMNS) in capsys.readouterr().out


def test_cli_bad_seed_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SDBOUNDS_SEED", "abc")
    code, _, err = run(["fuzz", "--trials", "1", "--out", str(tmp_path)], capsys)
    assert code == 1 and "SDBOUNDS_SEED" in err


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "sdbounds", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "sweep-paper" in res.stdout
