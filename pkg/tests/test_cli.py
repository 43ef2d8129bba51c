"""Command-line pipeline: exit codes, file contracts, digest checks."""

import json

import pytest

from cutm import cli, sim
from cutm.scenarios import random_scenario


@pytest.fixture(scope="module")
def small_city(tmp_path_factory):
    path = tmp_path_factory.mktemp("land") / "city.json"
    doc = {
        "extent": [20.0, 20.0],
        "grid": [21, 21],
        "floors": {"count": 2, "spacing_m": 12.5},
        "psi": {"min": 0.0, "max": 1.0},
        "obstacles": [
            {
                "id": "block",
                "footprint": [[8.3, 8.3], [12.6, 8.3], [12.6, 12.6], [8.3, 12.6]],
                "height_m": 30.0,
            }
        ],
    }
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture(scope="module")
def generated(small_city, tmp_path_factory):
    out = tmp_path_factory.mktemp("gen")
    code = cli.main(["generate", "--landscape", str(small_city), "--out", str(out), "--levels", "4"])
    assert code == 0
    return out


def test_generate_writes_expected_files(generated):
    assert (generated / "graph.json").exists()
    report = json.loads((generated / "generation_report.json").read_text())
    assert report["reachability"]["strongly_connected"]
    assert len(report["floors"]) == 2
    for h in (1, 2):
        psi_csv = (generated / f"floor_{h}_psi.csv").read_text()
        assert psi_csv.startswith("# landscape_digest=")
        lines = (generated / f"floor_{h}_streamlines.csv").read_text().splitlines()
        assert lines[0].startswith("# landscape_digest=")
        assert "skyroad,iso_value,direction,vertex,x,y" in lines[2]


def test_generate_embeds_config_and_digest(generated, small_city):
    from cutm.ioutil import sha256_file

    graph_doc = json.loads((generated / "graph.json").read_text())
    assert graph_doc["meta"]["landscape_digest"] == sha256_file(small_city)
    assert graph_doc["meta"]["config"]["skyroads"]["n_s"] == 4


def test_generate_unreadable_path_exits_2(tmp_path, capsys):
    code = cli.main(["generate", "--landscape", str(tmp_path / "missing.json"), "--out", str(tmp_path)])
    assert code == 2
    assert "ParseError" in capsys.readouterr().err


def test_simulate_pipeline(generated, tmp_path):
    scenario_path = tmp_path / "scn.json"
    sim.save_scenario(random_scenario(seed=4, horizon=60, n_uas=4), scenario_path)
    out = tmp_path / "simout"
    code = cli.main(["simulate", "--graph", str(generated / "graph.json"), "--scenario", str(scenario_path), "--out", str(out)])
    assert code == 0
    assert (out / "trace.jsonl").exists()
    summary = (out / "summary.csv").read_text()
    assert "uas,t_request,t_max,t_check,arrived" in summary
    assert "# graph_digest=" in summary
    verdict = (out / "verification.txt").read_text()
    assert "PASS" in verdict
    trace = sim.read_trace(out / "trace.jsonl")
    assert trace.header["graph_digest"]
    assert len(trace.steps) == 60


def test_simulate_corrupted_graph_exits_2(generated, tmp_path, capsys):
    doc = json.loads((generated / "graph.json").read_text())
    doc["edges"].append([0, 10**9])  # dangling edge
    bad = tmp_path / "bad_graph.json"
    bad.write_text(json.dumps(doc))
    scenario_path = tmp_path / "scn.json"
    sim.save_scenario(random_scenario(seed=4, horizon=10, n_uas=1), scenario_path)
    code = cli.main(["simulate", "--graph", str(bad), "--scenario", str(scenario_path), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "ValidationError" in capsys.readouterr().err


def test_simulate_safety_failure_exits_3(generated, tmp_path, monkeypatch):
    scenario_path = tmp_path / "scn.json"
    sim.save_scenario(random_scenario(seed=4, horizon=20, n_uas=2), scenario_path)

    def broken_verify(trace, graph):
        return sim.VerificationReport(passed=False, checked_steps=0, failures=["planted"])

    monkeypatch.setattr(cli.sim, "verify_trace", broken_verify)
    code = cli.main(["simulate", "--graph", str(generated / "graph.json"), "--scenario", str(scenario_path), "--out", str(tmp_path / "o3")])
    assert code == 3


@pytest.fixture(scope="module")
def simulated(generated, tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    scenario_path = out / "scn.json"
    sim.save_scenario(random_scenario(seed=8, horizon=50, n_uas=3), scenario_path)
    code = cli.main(["simulate", "--graph", str(generated / "graph.json"), "--scenario", str(scenario_path), "--out", str(out)])
    assert code == 0
    return out


def test_export_plots(generated, simulated, tmp_path):
    out = tmp_path / "plots"
    code = cli.main(
        [
            "export-plots",
            "--trace",
            str(simulated / "trace.jsonl"),
            "--graph",
            str(generated / "graph.json"),
            "--steps",
            "0,20",
            "--floors",
            "1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    for s in (0, 20):
        paths_csv = (out / f"step_{s}_floor_1_paths.csv").read_text()
        assert "uas,kind,status,run,point,x,y" in paths_csv
        positions_csv = (out / f"step_{s}_floor_1_positions.csv").read_text()
        assert "uas,status,segment,x,y,z" in positions_csv
    # step 0 predates every submit: nothing is positioned yet
    positions_csv = (out / "step_0_floor_1_positions.csv").read_text().splitlines()
    assert len(positions_csv) == 2  # header comment + column header only


def test_export_plots_step_beyond_horizon(generated, simulated, tmp_path, capsys):
    code = cli.main(
        [
            "export-plots",
            "--trace",
            str(simulated / "trace.jsonl"),
            "--graph",
            str(generated / "graph.json"),
            "--steps",
            "5000",
            "--out",
            str(tmp_path / "p"),
        ]
    )
    assert code == 2
    assert "RangeError" in capsys.readouterr().err


def test_export_plots_digest_mismatch(generated, simulated, tmp_path, capsys):
    doc = json.loads((generated / "graph.json").read_text())
    doc["meta"]["note"] = "tampered"
    other = tmp_path / "other_graph.json"
    other.write_text(json.dumps(doc))
    code = cli.main(
        ["export-plots", "--trace", str(simulated / "trace.jsonl"), "--graph", str(other), "--out", str(tmp_path / "p")]
    )
    assert code == 2
    assert "DigestMismatchError" in capsys.readouterr().err


def test_make_scenario_random(tmp_path):
    out = tmp_path / "scn.json"
    code = cli.main(["make-scenario", "--out", str(out), "--seed", "3", "--horizon", "40", "--uas", "5"])
    assert code == 0
    scenario = sim.load_scenario(out)
    assert scenario.random_endpoints and len(scenario.requests) == 5


def test_generate_demo_scale_eight_floors(tmp_path):
    from cutm.citygen import demo_city_dict

    land = tmp_path / "city.json"
    land.write_text(json.dumps(demo_city_dict()))
    out = tmp_path / "gen"
    code = cli.main(["generate", "--landscape", str(land), "--out", str(out)])
    assert code == 0
    for h in range(1, 9):
        assert (out / f"floor_{h}_streamlines.csv").exists()
        assert (out / f"floor_{h}_psi.csv").exists()
    assert (out / "graph.json").exists()
    report = json.loads((out / "generation_report.json").read_text())
    assert report["reachability"]["strongly_connected"]
