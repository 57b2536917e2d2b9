import pytest

from ringbot.config import RunConfig, load_run_config


def test_defaults_resolve():
    cfg = load_run_config()
    assert cfg.robot.contact_radius == 0.133
    assert cfg.scenario.square_side == 0.6
    assert cfg.families["beta"] == "affine"
    assert cfg.seed == 0


def test_file_and_overrides(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        "seed = 7\n"
        "[robot]\n"
        "mu = 0.41\n"
        "[scenario]\n"
        "square_side = 0.8\n"
        "[families]\n"
        "delta_x = \"constant\"\n"
    )
    cfg = load_run_config(path, overrides={"scenario.square_side": 1.0})
    assert cfg.seed == 7
    assert cfg.robot.mu == 0.41
    assert cfg.scenario.square_side == 1.0  # flag wins over file
    assert cfg.families["delta_x"] == "constant"


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("[scenario]\nsquare_sides = 0.8\n")
    with pytest.raises(ValueError):
        load_run_config(path)
    path.write_text("[robo]\nmu = 0.3\n")
    with pytest.raises(ValueError):
        load_run_config(path)
    path.write_text("[families]\ndelta_x = \"quartic\"\n")
    with pytest.raises(ValueError):
        load_run_config(path)


def test_hash_tracks_content():
    a = RunConfig()
    b = load_run_config(None, {"seed": 1})
    assert a.config_hash != b.config_hash
    assert a.config_hash == RunConfig().config_hash
    assert len(a.config_hash) == 16


def test_header_lines_carry_version_hash_seed():
    cfg = RunConfig()
    lines = cfg.header_lines()
    assert lines[0].startswith("ringbot ")
    assert lines[1] == f"config {cfg.config_hash}"
    assert lines[2] == "seed 0"
