import json
import math

import pytest

from ringbot.cli import main
from ringbot.synth import TRUTH_CURVES, gamma_sweep
from ringbot.tracks import write_track_csv


@pytest.fixture()
def sweep_files(tmp_path):
    """Noiseless synthetic tracks at gamma = 60..300 deg step 60."""
    specs = []
    for gamma, track in gamma_sweep():
        deg = round(math.degrees(gamma))
        path = tmp_path / f"g{deg:03d}.csv"
        write_track_csv(path, track)
        specs.append(f"{deg}:{path}:12")
    return specs


@pytest.fixture()
def curves_file(tmp_path):
    path = tmp_path / "curves.json"
    TRUTH_CURVES.save(path)
    return path


class TestFit:
    def test_sweep_fits_with_tiny_residuals(self, tmp_path, sweep_files, capsys):
        out = tmp_path / "curves.json"
        assert main(["fit", *sweep_files, "-o", str(out)]) == 0
        data = json.loads(out.read_text())
        for name in ("delta_phi", "delta_x", "period_T", "beta"):
            assert data[name]["residual"] < 1e-6
        table = capsys.readouterr().out
        assert "gamma" in table and "180.0" in table

    def test_repeats_per_gamma(self, tmp_path):
        specs = []
        for gamma, track in gamma_sweep(repeats=3):
            deg = round(math.degrees(gamma))
            path = tmp_path / f"g{deg:03d}_{len(specs)}.csv"
            write_track_csv(path, track)
            specs.append(f"{deg}:{path}:12")
        assert len(specs) == 15
        out = tmp_path / "curves.json"
        assert main(["fit", *specs, "-o", str(out)]) == 0

    def test_two_tracks_insufficient(self, tmp_path, sweep_files):
        out = tmp_path / "curves.json"
        assert main(["fit", *sweep_files[:2], "-o", str(out)]) == 2

    def test_missing_file_is_bad_input(self, tmp_path, capsys):
        out = tmp_path / "curves.json"
        assert main(["fit", "60:/nonexistent.csv:12", "-o", str(out)]) == 2
        assert "error" in capsys.readouterr().err


class TestPredict:
    def test_straight_line_reports_infinite_radius(self, tmp_path, curves_file,
                                                   capsys):
        # truth curves give delta_phi ~ 0 at gamma = 180 deg
        out = tmp_path / "traj.csv"
        code = main(["predict", "--gamma", "180", "--curves", str(curves_file),
                     "--periods", "10", "-o", str(out)])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["orbit_radius_exact"] == "inf"
        rows = [l for l in out.read_text().splitlines()
                if l and not l.startswith("#")]
        assert len(rows) == 1 + 11  # header + k=0..10

    def test_zero_periods_single_row(self, tmp_path, curves_file):
        out = tmp_path / "traj.csv"
        main(["predict", "--gamma", "120", "--curves", str(curves_file),
              "--periods", "0", "-o", str(out)])
        rows = [l for l in out.read_text().splitlines()
                if l and not l.startswith("#")]
        assert rows[0] == "k,t,x,y,heading"
        assert len(rows) == 2

    def test_total_time_converts_to_periods(self, tmp_path, curves_file,
                                            capsys):
        main(["predict", "--gamma", "90", "--curves", str(curves_file),
              "--total-time", "25", "-o", str(tmp_path / "t.csv")])
        summary = json.loads(capsys.readouterr().out)
        # period at gamma=90 deg is 2.2 + 0.5*sin(0) = 2.2 s
        assert summary["periods"] == math.floor(25 / 2.2)

    def test_byte_identical_reruns(self, tmp_path, curves_file):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["predict", "--gamma", "120", "--curves", str(curves_file),
                "--periods", "40"]
        assert main([*argv, "-o", str(a)]) == 0
        assert main([*argv, "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert b"# ringbot" in a.read_bytes()
        assert b"# config" in a.read_bytes()
        assert b"# seed" in a.read_bytes()

    def test_missing_curves_file(self, tmp_path):
        assert main(["predict", "--gamma", "10", "--curves",
                     str(tmp_path / "nope.json"), "--periods", "1"]) == 2


class TestAnalyze:
    def test_extracts_parameters(self, tmp_path, capsys):
        from ringbot.synth import make_track
        track = make_track(math.radians(120), num_periods=12)
        path = tmp_path / "t.csv"
        write_track_csv(path, track)
        assert main(["analyze", str(path), "--periods", "12"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["delta_phi_deg"] == pytest.approx(
            math.degrees(0.45 * math.sin(math.radians(120) + math.pi)),
            abs=1e-6)
        assert out["circle"]["radius"] > 0


class TestSimulate:
    def test_boundary_lap_success_exit_zero(self, tmp_path):
        out = tmp_path / "sim.csv"
        code = main(["simulate", "--scenario", "boundary_lap",
                     "--delta-phi", "-10", "--delta-x", "0.06",
                     "--period", "2.5", "-o", str(out)])
        assert code == 0
        header = out.read_text().splitlines()
        assert header[0].startswith("# ringbot")
        assert "k,t,x,y,heading,gamma,contact_wall" in header

    def test_failed_verdict_exit_three(self, capsys):
        # a tiny orbit never reaches the walls -> no lap
        code = main(["simulate", "--scenario", "boundary_lap",
                     "--delta-phi", "-30", "--delta-x", "0.01",
                     "--period", "2.5", "--max-periods", "200"])
        assert code == 3
        verdict = json.loads(capsys.readouterr().out)
        assert not verdict["ok"]

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["simulate", "--scenario", "boundary_lap", "--delta-phi",
                "-10", "--delta-x", "0.06", "--period", "2.5"]
        assert main([*argv, "-o", str(a)]) == 0
        assert main([*argv, "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_curves_with_gamma(self, tmp_path, curves_file):
        out = tmp_path / "sim.csv"
        code = main(["simulate", "--scenario", "free", "--curves",
                     str(curves_file), "--gamma", "60",
                     "--max-periods", "30", "-o", str(out)])
        assert code == 0

    def test_missing_params_bad_input(self):
        assert main(["simulate", "--scenario", "free"]) == 2

    def test_unknown_scenario_bad_input(self):
        assert main(["simulate", "--scenario", "maze", "--delta-phi", "-10",
                     "--delta-x", "0.06", "--period", "2.5"]) == 2
