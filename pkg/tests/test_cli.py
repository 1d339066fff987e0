import csv
import json
import os

import pytest

from protolife.cli import main
from protolife.config import ExperimentConfig, OdeConfig, SweepConfig, from_dict, to_dict
from protolife.errors import ConfigError

ALCHEMY = {
    "seed": 1, "max_steps": 200, "chemistry": "lambda",
    "chemistry_params": {"max_steps": 300, "max_nodes": 1500},
    "initial_population": {"random": {"count": 30}},
    "track_instances": True, "sample_every": 50,
}


def write(path, obj):
    path.write_text(json.dumps(obj, ensure_ascii=False), encoding="utf-8")
    return str(path)


def outputs(tmp_path, stem="run"):
    return {"event_log": str(tmp_path / f"{stem}.jsonl"),
            "timeseries": str(tmp_path / f"{stem}.csv"),
            "report": str(tmp_path / f"{stem}.json")}


# -- config schema -----------------------------------------------------------


def test_unknown_key_named():
    with pytest.raises(ConfigError, match="outflow.rate"):
        from_dict(ExperimentConfig, {"outflow": {"rate": 0.1}})


def test_type_errors_named():
    with pytest.raises(ConfigError, match="max_steps"):
        from_dict(ExperimentConfig, {"max_steps": "10"})
    with pytest.raises(ConfigError, match="seed"):
        from_dict(ExperimentConfig, {"seed": True})


def test_distinct_output_paths():
    with pytest.raises(ConfigError, match="distinct"):
        from_dict(ExperimentConfig, {"outputs": {"event_log": "x", "timeseries": "x"}})


def test_defaults_round_trip():
    c = from_dict(ExperimentConfig, ALCHEMY)
    assert from_dict(ExperimentConfig, to_dict(c)) == c
    assert c.resolved_outflow() == "constant_population"
    assert from_dict(ExperimentConfig, {"chemistry": "tile"}).resolved_outflow() == "none"


def test_sweep_and_ode_configs():
    assert from_dict(SweepConfig, {}).seed == 20261016
    with pytest.raises(ConfigError):
        from_dict(OdeConfig, {"x0": [1.0], "W": [[0.0]], "t_end": 1.0})


# -- run ---------------------------------------------------------------------


def test_run_writes_outputs(tmp_path, capsys):
    out = outputs(tmp_path)
    assert main(["run", write(tmp_path / "c.json", {**ALCHEMY, "outputs": out})]) == 0
    assert os.path.getsize(out["event_log"]) > 0
    summary = capsys.readouterr().out
    assert "steps=200" in summary and "final_population=30" in summary
    assert "final_entropy_bits=" in summary
    report = json.loads(open(out["report"], encoding="utf-8").read())
    assert report["config"]["seed"] == 1
    assert report["config"]["outflow"] == {"policy": "default", "p": 0.0}
    assert report["summary"]["steps"] == 200


def test_run_seed_override(tmp_path):
    a, b = outputs(tmp_path, "a"), outputs(tmp_path, "b")
    main(["run", write(tmp_path / "a.json", {**ALCHEMY, "outputs": a}), "--seed", "9"])
    main(["run", write(tmp_path / "b.json", {**ALCHEMY, "seed": 9, "outputs": b})])
    assert open(a["event_log"]).read() == open(b["event_log"]).read()


def test_unknown_chemistry_exit_1(tmp_path, capsys):
    assert main(["run", write(tmp_path / "c.json", {"chemistry": "foo"})]) == 1
    assert "chemistry" in capsys.readouterr().err


def test_unknown_key_exit_1(tmp_path, capsys):
    assert main(["run", write(tmp_path / "c.json", {"sead": 1})]) == 1
    assert "sead" in capsys.readouterr().err


def test_bad_molecule_exit_1(tmp_path):
    c = {"initial_population": {"molecules": [{"molecule": "λx"}]}}
    assert main(["run", write(tmp_path / "c.json", c)]) == 1


def test_unwritable_output_exit_2(tmp_path):
    c = {**ALCHEMY, "outputs": {"event_log": str(tmp_path / "missing" / "dir" / "e.jsonl")}}
    assert main(["run", write(tmp_path / "c.json", c)]) == 2


def test_missing_config_exit_1(tmp_path):
    assert main(["run", str(tmp_path / "nope.json")]) == 1


# -- sweep -------------------------------------------------------------------


def test_sweep_rows_and_determinism(tmp_path):
    c = {"grid": [0, 0.5, 1], "runs_per_point": 10}
    p1 = write(tmp_path / "s1.json", {**c, "output": str(tmp_path / "o1.csv")})
    p2 = write(tmp_path / "s2.json", {**c, "output": str(tmp_path / "o2.csv")})
    assert main(["sweep", p1]) == 0 and main(["sweep", p2]) == 0
    text = (tmp_path / "o1.csv").read_bytes()
    assert text == (tmp_path / "o2.csv").read_bytes()
    assert len(text.decode().splitlines()) == 4


def test_sweep_empty_grid(tmp_path):
    assert main(["sweep", write(tmp_path / "s.json", {"grid": []})]) == 1


# -- ode ---------------------------------------------------------------------


def test_ode_zero_fitness_rows_equal_x0(tmp_path):
    out = tmp_path / "ode.csv"
    c = {"x0": [0.25, 0.75], "W": [[0, 0], [0, 0]], "t_end": 1.0, "dt": 0.25, "output": str(out)}
    assert main(["ode", write(tmp_path / "o.json", c)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "x_0", "x_1"]
    assert [r[0] for r in rows[1:]] == ["0", "0.25", "0.5", "0.75", "1"]
    assert all(r[1:] == ["0.25", "0.75"] for r in rows[1:])


def test_ode_stdout(tmp_path, capsys):
    c = {"x0": [1.0], "W": [[2.0]], "t_end": 0.5, "dt": 0.5}
    assert main(["ode", write(tmp_path / "o.json", c)]) == 0
    assert capsys.readouterr().out == "t,x_0\n0,1\n0.5,1\n"


def test_ode_bad_shape_exit_1(tmp_path):
    c = {"x0": [0.5, 0.5], "W": [[0.0]], "t_end": 1.0, "dt": 0.1}
    assert main(["ode", write(tmp_path / "o.json", c)]) == 1


def test_ode_blow_up_exit_2(tmp_path):
    c = {"x0": [0.5, 0.5], "W": [[1e308, 1e308], [0, 0]], "t_end": 1.0, "dt": 0.5}
    with pytest.warns(RuntimeWarning):
        assert main(["ode", write(tmp_path / "o.json", c)]) == 2


# -- analyze -----------------------------------------------------------------


def test_analyze_empty_log(tmp_path):
    log = tmp_path / "e.jsonl"
    log.write_text("")
    rep = tmp_path / "r.json"
    assert main(["analyze", str(log), "--eq", "exact", "--max-period", "3",
                 "--report", str(rep)]) == 0
    data = json.loads(rep.read_text())
    assert data["organizations"] == {"level0": [], "level1": [], "level2": []}
    assert data["replicators"] == [] and data["hypercycles"] == []


def test_analyze_functional_on_tiles_exit_1(tmp_path):
    out = outputs(tmp_path)
    c = {"chemistry": "tile", "max_steps": 20, "seed": 2,
         "initial_population": {"random": {"count": 40}}, "outputs": out}
    assert main(["run", write(tmp_path / "c.json", c)]) == 0
    assert main(["analyze", out["event_log"], "--eq", "functional",
                 "--report", str(tmp_path / "r.json")]) == 1


def test_analyze_malformed_log_exit_1(tmp_path, capsys):
    log = tmp_path / "bad.jsonl"
    log.write_text('{"t":0}\n')
    assert main(["analyze", str(log), "--report", str(tmp_path / "r.json")]) == 1
    assert "line 1" in capsys.readouterr().err


def test_analyze_full_pipeline(tmp_path):
    out = outputs(tmp_path)
    assert main(["run", write(tmp_path / "c.json", {**ALCHEMY, "outputs": out})]) == 0
    rep = tmp_path / "analysis.json"
    ent = tmp_path / "entropy.csv"
    assert main(["analyze", out["event_log"], "--eq", "exact", "--max-period", "5",
                 "--report", str(rep), "--timeseries", out["timeseries"],
                 "--entropy-out", str(ent)]) == 0
    data = json.loads(rep.read_text(encoding="utf-8"))
    assert set(data) >= {"organizations", "replicators", "hypercycles", "entropy_series_file"}
    assert data["entropy_series_file"] == str(ent)
    rows = list(csv.reader(ent.open()))
    assert rows[0] == ["t", "H_bits"] and [r[0] for r in rows[1:]] == ["0", "50", "100", "150", "200"]


def test_analyze_without_instance_ids_still_reports(tmp_path):
    out = outputs(tmp_path)
    c = {**ALCHEMY, "track_instances": False, "outputs": out}
    assert main(["run", write(tmp_path / "c.json", c)]) == 0
    rep = tmp_path / "r.json"
    assert main(["analyze", out["event_log"], "--report", str(rep)]) == 0
    data = json.loads(rep.read_text(encoding="utf-8"))
    assert data["replicators"] == [] and "replicators_skipped" in data
