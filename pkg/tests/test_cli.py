import json

import numpy as np
import pytest

from ewsearch import cli
from ewsearch.ingest import (BoundViolation, DuplicateLabel, EmptyRecords, MalformedInput,
                             UnknownLabel, ingest, records_from_state)
from ewsearch.states import werner


def write(tmp_path, data, name="in.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def rec(label, value, error=0.0):
    return {"label": label, "value": value, "error": error}


W09 = {"schema": 1, "dims": [2, 2], "records": [rec([1, 1], 0.45), rec([2, 2], -0.45)]}


# --- ingest --------------------------------------------------------------------

def test_ingest_two_observables():
    p = ingest(W09)
    assert p.indices.tolist() == [5, 10]
    assert np.allclose(p.values, [0.45, -0.45])
    assert p.dims == (2, 2) and p.error_radius == 0.0


def test_ingest_label_forms_and_sorting():
    data = {"dims": [2, 2], "records": [rec(10, -0.1, 0.03), rec("1,1", 0.2, 0.04), rec("15", 0)]}
    p = ingest(data, delta=0.02)
    assert p.indices.tolist() == [5, 10, 15]
    assert p.error_radius == pytest.approx(0.05)
    assert p.delta == 0.02


def test_ingest_from_file_object(tmp_path):
    with open(write(tmp_path, W09)) as fh:
        assert len(ingest(fh).coords) == 2


@pytest.mark.parametrize("data,exc", [
    ({"dims": [2, 2], "records": []}, EmptyRecords),
    ({"dims": [2, 2], "records": [rec([1, 1], 0.1), rec(5, 0.1)]}, DuplicateLabel),
    ({"dims": [2, 2], "records": [rec([0, 0], 0.5)]}, UnknownLabel),
    ({"dims": [2, 2], "records": [rec([4, 1], 0.1)]}, UnknownLabel),
    ({"dims": [2, 2], "records": [rec("sx", 0.1)]}, UnknownLabel),
    ({"dims": [2, 2], "records": [rec([1, 1], 1.2, 0.1)]}, BoundViolation),
    ({"dims": [2, 2], "records": [rec([1, 1], 0.1, -0.1)]}, MalformedInput),
    ({"dims": [2, 2], "records": [{"label": [1, 1]}]}, MalformedInput),
    ({"dims": [1, 2], "records": [rec(1, 0.1)]}, MalformedInput),
    ({"records": [rec(1, 0.1)]}, MalformedInput),
    ({"schema": 2, "dims": [2, 2], "records": [rec(1, 0.1)]}, MalformedInput),
    ([1, 2], MalformedInput),
])
def test_ingest_errors(data, exc):
    with pytest.raises(exc):
        ingest(data)


def test_bound_allows_error_bar():
    p = ingest({"dims": [2, 2], "records": [rec([1, 1], 1.05, 0.1)]})
    assert p.values[0] == 1.05


def test_records_from_state_roundtrip():
    data = records_from_state(werner(0.9), [5, 10])
    assert data["records"][0]["label"] == [1, 1]
    assert np.allclose(ingest(data).values, [0.45, -0.45])


# --- exit codes ----------------------------------------------------------------

def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_exit_witness(tmp_path, capsys):
    code, out, _ = run(capsys, "wsep", "--input", write(tmp_path, W09), "--delta", 0.005, "--json")
    assert code == 0
    d = json.loads(out)
    assert d["outcome"] == "witness" and d["schema"] == 1
    c = np.array(d["witness"]["coefficients"])
    assert np.allclose(c / np.linalg.norm(c), [2 ** -0.5, -2 ** -0.5], atol=1e-6)
    assert "σ1⊗σ1" in d["witness"]["expression"]


def test_exit_member(tmp_path, capsys):
    data = records_from_state(werner(0.2), None)
    code, out, _ = run(capsys, "wsep", "--input", write(tmp_path, data))
    assert code == 1
    assert out.startswith("outcome: member")


def test_exit_unverified(tmp_path, capsys, monkeypatch):
    from ewsearch.separation import SeparationVerdict
    monkeypatch.setattr(cli, "wsep", lambda p, b, c: SeparationVerdict("unverified", reason="x"))
    code, out, _ = run(capsys, "wsep", "--input", write(tmp_path, W09), "--json")
    assert code == 2 and json.loads(out)["reason"] == "x"


@pytest.mark.parametrize("argv", [
    [],
    ["wsep"],
    ["wsep", "--input", "x.json", "--engine", "simplex"],
    ["wsep", "--input", "x.json", "--delta", "abc"],
    ["frobnicate"],
    ["demo", "nope"],
])
def test_exit_usage(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 3 and "usage error" in err


def test_exit_usage_bad_values(tmp_path, capsys):
    path = write(tmp_path, W09)
    for extra in (["--delta", "0"], ["--seeds", "0"], ["--tol", "-1"], ["--seed", "-2"]):
        code, _, _ = run(capsys, "wsep", "--input", path, *extra)
        assert code == 3


@pytest.mark.parametrize("data,code", [
    ("{not json", 4),
    ({"dims": [2, 2], "records": []}, 5),
    ({"dims": [2, 2], "records": [rec([7, 1], 0.1)]}, 6),
    ({"dims": [2, 2], "records": [rec(5, 0.1), rec(5, 0.2)]}, 7),
    ({"dims": [2, 2], "records": [rec(5, 3.0)]}, 8),
])
def test_exit_input_errors(tmp_path, capsys, data, code):
    got, _, err = run(capsys, "wsep", "--input", write(tmp_path, data))
    assert got == code and "input error" in err


def test_missing_file(tmp_path, capsys):
    code, _, _ = run(capsys, "wsep", "--input", tmp_path / "absent.json")
    assert code == 4


def test_json_is_deterministic(tmp_path, capsys):
    path = write(tmp_path, records_from_state(werner(0.6), None))
    outs = [run(capsys, "wsep", "--input", path, "--json", "--seed", 3)[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["wall_time"] is None
    timed = json.loads(run(capsys, "wsep", "--input", path, "--json", "--timing")[1])
    assert timed["wall_time"] > 0


def test_seed_count_from_environment(tmp_path, capsys, monkeypatch):
    path = write(tmp_path, W09)
    monkeypatch.setenv(cli.SEEDS_ENV, "7")
    d = json.loads(run(capsys, "wsep", "--input", path, "--json")[1])
    assert d["config"]["seeds"] == 7
    d = json.loads(run(capsys, "wsep", "--input", path, "--json", "--seeds", 9)[1])
    assert d["config"]["seeds"] == 9
    monkeypatch.setenv(cli.SEEDS_ENV, "many")
    assert run(capsys, "wsep", "--input", path)[0] == 3


def test_accp_engine_flag(tmp_path, capsys):
    code, out, _ = run(capsys, "wsep", "--input", write(tmp_path, W09), "--engine", "accp", "--json")
    assert code == 0 and json.loads(out)["engine"] == "accp"


def test_run_config_mirrors_flags():
    cfg = cli.RunConfig(dims=(2, 2), delta=0.02, seeds=12, tol=1e-9, max_iter=100,
                        engine="accp", seed=5)
    s = cfg.solver()
    assert s.engine == "accp" and s.opt.starts == 12 and s.opt.seed == 5
    assert s.opt.tol == 1e-9 and s.opt.max_iter == 100
    with pytest.raises(cli.UsageError):
        cli.RunConfig(dims=(1, 2))


# --- demos ---------------------------------------------------------------------

def test_demo_bell_sandwich(tmp_path, capsys):
    code, out, _ = run(capsys, "demo", "bell-sandwich", "--out", tmp_path)
    assert code == 0
    assert "a* = -0.500000" in out and "b* = +0.500000" in out
    for ext in ("csv", "json", "png"):
        assert (tmp_path / f"bell_sandwich.{ext}").stat().st_size > 0


def test_demo_werner_sweep(tmp_path, capsys):
    code, out, _ = run(capsys, "demo", "werner-sweep", "--json", "--out", tmp_path)
    assert code == 0
    d = json.loads(out)
    assert 0.5 < d["onset_partial"] <= 0.6
    assert 1 / 3 < d["onset_full"] <= 0.4
    assert (tmp_path / "werner_sweep.png").exists()
    for row in d["rows"]:
        if row["partial"] == "witness" or row["full"] == "witness":
            assert not row["ppt"]


def test_demo_tiles(capsys):
    code, out, _ = run(capsys, "demo", "tiles-upb")
    assert code == 0 and "witness detects; PPT passes" in out
