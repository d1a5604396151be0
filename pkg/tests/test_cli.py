import json

import pandas as pd
import pytest

from app.main import EXIT_FAILED, EXIT_OK, EXIT_PARSE, main
from app.models.scenario import parse_scenario
from app.services.fixtures import get_fixture
from app.services.reporting import state_coords
from tests.conftest import write_scenario


def test_fixture_prints_parseable_json(capsys):
    assert main(["fixture", "paper-s5"]) == EXIT_OK
    out = capsys.readouterr().out
    assert parse_scenario(out) == get_fixture("paper-s5")


def test_verify_benchmark(s5_file, capsys):
    assert main(["verify", str(s5_file)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["checks"] == {
        "connected": True,
        "stabilizable": True,
        "riccati": True,
        "alpha": True,
        "condition1": True,
    }
    assert report["are_residual"] <= 1e-8
    assert report["alpha"] == 0.8019
    assert len(report["certificate"]["q_per_agent"]) == 5


def test_verify_edgeless_graph(tmp_path, capsys):
    raw = json.loads(get_fixture("two-agent").to_json())
    raw["graph"] = {"weights": [[0.0, 0.0], [0.0, 0.0]]}
    path = tmp_path / "edgeless.json"
    path.write_text(json.dumps(raw))
    assert main(["verify", str(path)]) == EXIT_FAILED
    assert json.loads(capsys.readouterr().out)["checks"] == {"connected": False}


def test_verify_non_stabilizable(tmp_path, capsys):
    raw = json.loads(get_fixture("two-agent").to_json())
    raw["dynamics"]["A"] = [[0.0]]
    raw["dynamics"]["B"] = [[0.0]]
    path = tmp_path / "zero.json"
    path.write_text(json.dumps(raw))
    assert main(["verify", str(path)]) == EXIT_FAILED
    assert json.loads(capsys.readouterr().out)["checks"]["stabilizable"] is False


def test_verify_reports_shape_mismatch(tmp_path, capsys):
    raw = json.loads(get_fixture("two-agent").to_json())
    raw["parameters"]["x_init"] = [[-100.0, 0.0], [100.0, 0.0]]
    path = tmp_path / "shape.json"
    path.write_text(json.dumps(raw))
    assert main(["verify", str(path)]) == EXIT_FAILED
    report = json.loads(capsys.readouterr().out)
    assert report["checks"] == {"scenario": False}
    assert any("x_init" in line for line in report["messages"])


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"graph": ')
    assert main(["verify", str(path)]) == EXIT_PARSE


def test_unknown_field(tmp_path):
    raw = json.loads(get_fixture("two-agent").to_json())
    raw["integrator"]["method"] = "euler"
    path = tmp_path / "extra.json"
    path.write_text(json.dumps(raw))
    assert main(["run", str(path), "--out", str(tmp_path / "out")]) == EXIT_PARSE


def test_run_writes_outputs(two_agent_file, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", str(two_agent_file), "--out", str(out), "--coords", "1"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    names = {p.split("/")[-1] for p in report["outputs"]}
    assert names == {"trajectory.csv", "consensus_error.svg", "theta.svg", "state_coord.svg"}
    for name in names:
        assert (out / name).stat().st_size > 0

    frame = pd.read_csv(out / "trajectory.csv")
    assert list(frame.columns) == ["t", "consensus_error", "V", "bound", "theta_hat_1", "theta_hat_2", "x_1", "x_2"]
    assert len(frame) == 1 + int(10.0 / (1e-3 * 10))
    assert (out / "consensus_error.svg").read_text().lstrip().startswith("<?xml")


def test_run_default_coords_on_scalar_agents(two_agent_file, tmp_path, capsys):
    out = tmp_path / "scalar"
    assert main(["run", str(two_agent_file), "--out", str(out)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert len(report["outputs"]) == 4
    assert (out / "state_coord.svg").stat().st_size > 0


def test_run_rejects_missing_coord_before_writing(two_agent_file, tmp_path):
    out = tmp_path / "coords"
    assert main(["run", str(two_agent_file), "--out", str(out), "--coords", "1,3"]) == EXIT_FAILED
    assert list(out.iterdir()) == []


@pytest.mark.parametrize(
    "p, coords, expected",
    [(1, None, [1]), (2, None, [1]), (4, None, [1, 3]), (3, [3, 2], [3, 2])],
)
def test_state_coords(p, coords, expected):
    assert state_coords(p, coords) == expected


@pytest.mark.parametrize("coords", [[0], [5], []])
def test_state_coords_out_of_range(coords):
    with pytest.raises(ValueError):
        state_coords(4, coords)


def test_run_is_byte_identical(two_agent_file, tmp_path):
    assert main(["run", str(two_agent_file), "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["run", str(two_agent_file), "--out", str(tmp_path / "b")]) == EXIT_OK
    first = (tmp_path / "a" / "trajectory.csv").read_bytes()
    assert first == (tmp_path / "b" / "trajectory.csv").read_bytes()


def test_run_benchmark_has_monotone_v(s5_file, tmp_path):
    assert main(["run", str(s5_file), "--out", str(tmp_path / "s5")]) == EXIT_OK
    frame = pd.read_csv(tmp_path / "s5" / "trajectory.csv")
    assert frame.shape == (401, 4 + 5 + 20)
    assert (frame["V"].diff().dropna() <= 1e-12 * frame["V"].iloc[0]).all()


def test_run_into_unwritable_location(two_agent_file, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", str(two_agent_file), "--out", str(blocker / "out")]) == EXIT_FAILED


def test_run_refuses_low_alpha_without_force(tmp_path, capsys):
    spec = get_fixture("two-agent")
    spec = spec.model_copy(update={"parameters": spec.parameters.model_copy(update={"alpha": 0.1})})
    path = write_scenario(tmp_path, spec)
    assert main(["run", str(path), "--out", str(tmp_path / "low")]) == EXIT_FAILED
    assert not (tmp_path / "low" / "trajectory.csv").exists()
    capsys.readouterr()
    main(["run", str(path), "--out", str(tmp_path / "forced"), "--force"])
    assert (tmp_path / "forced" / "trajectory.csv").exists()


def test_sweep(two_agent_file, tmp_path, capsys):
    out = tmp_path / "sweep"
    assert main(["sweep", str(two_agent_file), "--sigma", "0,5,10,15", "--out", str(out)]) == EXIT_OK
    capsys.readouterr()
    frame = pd.read_csv(out / "sweep.csv")
    assert list(frame.columns) == ["sigma", "steady_state_consensus_error", "steady_state_V", "theorem2_offset"]
    assert list(frame["sigma"]) == [0.0, 5.0, 10.0, 15.0]
    assert frame["steady_state_consensus_error"].is_monotonic_increasing
    assert frame["steady_state_consensus_error"].iloc[0] <= 1e-6 * 80_000.0
    assert (out / "sweep_consensus_error.svg").exists()


def test_sweep_repeated_sigma_gives_identical_rows(two_agent_file, tmp_path, capsys):
    out = tmp_path / "repeat"
    assert main(["sweep", str(two_agent_file), "--sigma", "5,5", "--out", str(out)]) == EXIT_OK
    capsys.readouterr()
    frame = pd.read_csv(out / "sweep.csv")
    assert frame.iloc[0].equals(frame.iloc[1])


@pytest.mark.parametrize("sigmas", ["-1", "a,b", ""])
def test_sweep_rejects_bad_sigma(two_agent_file, tmp_path, sigmas):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", str(two_agent_file), "--sigma", sigmas, "--out", str(tmp_path)])
    assert exc.value.code == 2
