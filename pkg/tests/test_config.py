from pathlib import Path

import pytest

from pass_patterns.config import RunConfig, build_run_config, coerce, load_config


def _toml(tmp_path, text: str) -> Path:
    path = tmp_path / "run.toml"
    path.write_text(text)
    return path


def test_defaults():
    cfg = build_run_config()
    assert cfg == RunConfig()
    assert cfg.match.local_threshold == 2.0
    assert cfg.match.min_positions == 41
    assert cfg.segmentation.max_gap_seconds == 15.0
    assert (cfg.field.length_m, cfg.field.width_m) == (105.0, 68.0)
    assert cfg.out == Path("out")


def test_tables_and_dotted_keys_agree(tmp_path):
    nested = load_config(_toml(tmp_path, "[match]\nmin_positions = 30\n[field]\nlength_m = 100\n"))
    dotted = load_config(_toml(tmp_path, 'match.min_positions = 30\nfield.length_m = 100\n'))
    assert nested == dotted == {"match.min_positions": 30, "field.length_m": 100.0}


def test_file_values_reach_the_config(tmp_path):
    flips = tmp_path / "flips.csv"
    flips.write_text("game_id,team_id,period\nG001,A,2\n")
    values = load_config(
        _toml(
            tmp_path,
            f'input.paths = ["a.csv", "b.json"]\n'
            f'field.flip_rules = "{flips.as_posix()}"\n'
            "segment.use_possession_id = false\n"
            "segment.max_gap_seconds = 10\n"
            "densify.step = 1.5\n"
            "synth.jitter = 0.25\n"
            "run.seed = 7\n",
        )
    )
    cfg = build_run_config(values)
    assert cfg.input_paths == (Path("a.csv"), Path("b.json"))
    assert cfg.field.flips("G001", "A", 2)
    assert cfg.segmentation.use_provided_possession_id is False
    assert cfg.segmentation.max_gap_seconds == 10.0
    assert cfg.densify_step == 1.5
    assert cfg.synth.jitter == 0.25
    assert cfg.synth.seed == 7


def test_command_line_wins(tmp_path):
    values = load_config(_toml(tmp_path, "run.jobs = 2\nmatch.local_threshold = 1.5\nrun.out = 'from-file'\n"))
    cfg = build_run_config(values, {"run.jobs": 4, "run.out": None, "match.local_threshold": None})
    assert cfg.jobs == 4
    assert cfg.out == Path("from-file")
    assert cfg.match.local_threshold == 1.5


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ValueError, match="match.local_treshold"):
        load_config(_toml(tmp_path, "match.local_treshold = 3\n"))


@pytest.mark.parametrize(
    "values",
    [
        {"run.per_occurrence": "yes"},
        {"input.format": "xml"},
        {"match.min_positions": "many"},
    ],
)
def test_bad_values_rejected(values):
    with pytest.raises(ValueError):
        coerce(values, "test")


@pytest.mark.parametrize(
    "values",
    [{"run.jobs": 0}, {"densify.step": 0.0}, {"match.local_threshold": 20.0}],
)
def test_invalid_settings_rejected(values):
    with pytest.raises(ValueError):
        build_run_config(values)


def test_require_inputs():
    with pytest.raises(ValueError, match="no input"):
        RunConfig().require_inputs()
