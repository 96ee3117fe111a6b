import csv
import io
import json

import pytest
from hypothesis import given, strategies as st

from ibm_exit.cli import RunSpec, TGrid, main, parse_t
from ibm_exit.compose import QuadConfig
from ibm_exit.montecarlo import SimConfig


def _run(capsys, argv):
    status = main(argv)
    return status, capsys.readouterr()


def _csv_rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_tail_grid_is_monotone(capsys):
    status, out = _run(capsys, ["tail", "--domain", "interval:0,1", "--z", "0.5", "--process", "ibm",
                                "--t", "1e3:1e6:20", "--rel-tol", "1e-6"])
    assert status == 0
    header = [line for line in out.out.splitlines() if line.startswith("#")]
    assert any("config_hash" in h for h in header) and any("seed" in h for h in header)
    rows = _csv_rows(out.out)
    assert len(rows) == 20
    assert list(rows[0]) == ["t", "log_p", "p", "err_est", "method", "process"]
    logs = [float(r["log_p"]) for r in rows]
    assert all(b < a for a, b in zip(logs, logs[1:]))


def test_asymptotic_constant(capsys):
    status, out = _run(capsys, ["asymptotic", "--constant", "C_z", "--domain", "interval:0,1", "--z", "0.5"])
    payload = json.loads(out.out)
    assert status == 0
    assert payload["value"] == pytest.approx(11.58, abs=0.01)
    assert payload["source"]


def test_spectral_and_survival(capsys):
    status, out = _run(capsys, ["spectral", "--domain", "rectangle:1,1", "--K", "4"])
    rows = _csv_rows(out.out)
    assert status == 0 and len(rows) == 4 and list(rows[0]) == ["k", "lambda", "coeff_at_z"]
    status, out = _run(capsys, ["survival", "--t", "0.5,1,2", "--format", "json"])
    rows = json.loads(out.out)["rows"]
    assert [r["process"] for r in rows] == ["BM"] * 3


def test_simulate_columns(capsys):
    status, out = _run(capsys, ["simulate", "--process", "btbm", "--t", "0.5", "--n-paths", "2000", "--seed", "5"])
    rows = _csv_rows(out.out)
    assert status == 0
    assert list(rows[0]) == ["t", "p_hat", "std_err", "n_paths", "estimator", "dt", "seed"]
    assert rows[0]["seed"] == "5" and "# seed: 5" in out.out


def test_compare_report(capsys, tmp_path):
    target = tmp_path / "cmp.json"
    status, _ = _run(capsys, ["compare", "--t", "1,10", "--rel-tol", "1e-6", "--output", str(target)])
    report = json.loads(target.read_text())
    assert status == 0 and report["holds"] and len(report["margin"]) == 2


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"domain": {"type": "interval", "a": 0, "b": 2}, "z": 0.5, "K": 3}))
    _, out = _run(capsys, ["spectral", "--config", str(cfg)])
    rows = _csv_rows(out.out)
    assert len(rows) == 3 and float(rows[0]["lambda"]) == pytest.approx(3.14159**2 / 8, rel=1e-4)
    _, out = _run(capsys, ["spectral", "--config", str(cfg), "--K", "2", "--domain", "interval:0,1"])
    rows = _csv_rows(out.out)
    assert len(rows) == 2 and float(rows[0]["lambda"]) == pytest.approx(3.14159**2 / 2, rel=1e-4)


@pytest.mark.parametrize("argv", [
    ["tail", "--t", "0:1:3"],
    ["tail", "--t", "5,1"],
    ["tail", "--domain", "interval:1,0"],
    ["tail", "--z", "2"],
    ["simulate", "--n-paths", "10"],
    ["tail", "--rel-tol", "0.5"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2
    assert ":" in capsys.readouterr().err


def test_verify_subset(capsys):
    status, out = _run(capsys, ["verify", "--quick", "--only", "8,9,C"])
    report = json.loads(out.out)
    assert status == 0 and report["all_passed"]
    assert [c["id"] for c in report["criteria"]] == ["8", "9", "C"]
    assert "PASS [8]" in out.err


def test_parse_t():
    assert parse_t("1e3:1e6:4").points() == pytest.approx([1e3, 1e4, 1e5, 1e6])
    assert parse_t("2").points() == [2.0]


spec_strategy = st.builds(
    RunSpec,
    command=st.sampled_from(["tail", "simulate", "compare", "verify"]),
    z=st.one_of(st.none(), st.floats(0.01, 0.99)),
    t_grid=st.builds(TGrid, t_min=st.floats(0.1, 10), t_max=st.floats(10, 1e6), count=st.integers(1, 50)),
    process=st.sampled_from(["ibm", "btbm"]),
    quad=st.builds(QuadConfig, rel_tol=st.floats(1e-12, 1e-3)),
    sim=st.builds(SimConfig, n_paths=st.integers(1000, 10**7), seed=st.integers(0, 2**63),
                  dt=st.floats(1e-6, 1e-3)),
    K=st.one_of(st.none(), st.integers(1, 500)),
    quick=st.booleans(),
)


@given(spec_strategy)
def test_runspec_json_round_trip(spec):
    again = RunSpec.from_json(spec.to_json())
    assert again == spec
    assert again.config_hash() == spec.config_hash()
