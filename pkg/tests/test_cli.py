import csv
import io
import math
import subprocess
import sys

import pytest

from photon_monitor.cli import fmt, main


def run(argv, capsys):
    status = main(argv)
    return status, capsys.readouterr()


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def meta(text):
    pairs = [ln[2:].split(": ", 1) for ln in text.splitlines() if ln.startswith("# ") and ": " in ln]
    return dict(pairs)


def test_fmt():
    assert fmt(3, 6) == "3"
    assert fmt(-0.0, 6) == "0"
    assert fmt(1 / 3, 4) == "0.3333"
    assert fmt(float("nan"), 4) == "nan"


def test_unitary_rows_and_peak(capsys):
    status, out = run(["unitary", "--n", "2", "--t-max", "6.2832", "--dt", "0.01"], capsys)
    assert status == 0
    rows = table(out.out)
    assert len(rows) == 629
    assert float(rows[0]["t"]) == 0.0
    assert max(float(r["p_e"]) for r in rows) == pytest.approx(0.5, abs=1e-4)
    assert meta(out.out)["n"] == "2"


@pytest.mark.parametrize(
    "argv",
    [
        ["unitary", "--dt", "0"],
        ["unitary", "--n", "0"],
        ["monitor", "--tau", "-1"],
        ["jc", "--mode", "sideways"],
        ["jc", "--nmax", "3", "--n-init", "5"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_unwritable_output_exit_4(tmp_path, capsys):
    target = tmp_path / "missing" / "out.csv"
    status, out = run(["unitary", "--t-max", "0.1", "-o", str(target)], capsys)
    assert status == 4 and "cannot write" in out.err


def test_monitor_first_step_equals_unitary(capsys):
    _, mon = run(["monitor", "--n", "4", "--tau", "0.5", "--steps", "1"], capsys)
    _, uni = run(["unitary", "--n", "4", "--t-max", "0.5", "--dt", "0.5"], capsys)
    m, u = table(mon.out)[0], table(uni.out)[-1]
    assert float(u["t"]) == 0.5
    assert float(m["return_prob_unnorm"]) == pytest.approx(float(u["abs_c0"]) ** 2, abs=1e-10)
    assert float(m["transition_prob_unnorm"]) == pytest.approx(float(u["abs_cN"]) ** 2, abs=1e-10)
    for key in ("fidelity_phi0", "delta", "renyi2"):
        assert float(m[key]) == pytest.approx(float(u[key]), abs=1e-10)
    assert float(m["survival_norm"]) == pytest.approx(1.0, abs=1e-12)


def test_monitor_columns_are_consistent(capsys):
    _, out = run(["monitor", "--n", "6", "--tau", "1.0", "--steps", "50"], capsys)
    rows = table(out.out)
    assert [int(r["m"]) for r in rows] == list(range(1, 51))
    surv = [float(r["survival_norm"]) for r in rows]
    assert all(b <= a + 1e-12 for a, b in zip(surv, surv[1:]))
    for r in rows:
        s = float(r["survival_norm"])
        assert float(r["return_prob_norm"]) * s == pytest.approx(float(r["return_prob_unnorm"]), rel=1e-9, abs=1e-15)


def test_jc_metadata_and_rows(tmp_path, capsys):
    path = tmp_path / "jc.csv"
    status, _ = run(["jc", "--t-max", "2", "--dt", "0.5", "-o", str(path)], capsys)
    assert status == 0
    text = path.read_text()
    info = meta(text)
    for key in ("convention", "block_pairing", "photon_levels", "initial_state", "omega_a_note"):
        assert key in info
    rows = table(text)
    assert len(rows) == 5
    assert float(rows[0]["renyi2"]) == pytest.approx(math.log2(15), abs=1e-10)
    assert all(r["mode"] == "unitary" for r in rows)


def test_jc_monitored_mode(capsys):
    status, out = run(["jc", "--mode", "monitored", "--steps", "20", "--projector", "per_member"], capsys)
    assert status == 0
    rows = table(out.out)
    assert [int(r["step_or_time"]) for r in rows] == list(range(1, 21))
    assert all(abs(float(r["trace_check"]) - 1) < 1e-10 for r in rows)


def test_extinction_exit_3(capsys):
    # |down,1> is stationary, so projecting it out leaves nothing
    status, out = run(["jc", "--mode", "monitored", "--n-init", "1", "--steps", "5"], capsys)
    assert status == 3
    assert "# EXTINCT m=2" in out.out
    assert len(table(out.out)) == 1


def test_repeated_runs_are_byte_identical(tmp_path):
    argv = [sys.executable, "-m", "photon_monitor", "monitor", "--n", "10", "--tau", "0.5", "--steps", "40"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and len(first) > 0
