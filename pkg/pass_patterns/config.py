"""Run configuration: defaults, TOML file and command-line overrides."""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from pass_patterns.discovery.model import MatchParams
from pass_patterns.events import SegmentationPolicy
from pass_patterns.preprocess import FieldSpec, load_flip_rules
from pass_patterns.synth import SynthConfig


def _bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    raise ValueError(f"expected true or false, got {value!r}")


def _optional_bool(value: Any) -> bool | None:
    return None if value in (None, "auto") else _bool(value)


def _optional_int(value: Any) -> int | None:
    return None if value in (None, "auto") else int(value)


def _paths(value: Any) -> tuple[str, ...]:
    if isinstance(value, str):
        return (value,)
    return tuple(str(v) for v in value)


def _format(value: Any) -> str | None:
    if value in (None, "auto"):
        return None
    if value not in ("csv", "json"):
        raise ValueError(f"input.format must be csv or json, got {value!r}")
    return value


KEYS: dict[str, Callable[[Any], Any]] = {
    "input.paths": _paths,
    "input.format": _format,
    "field.length_m": float,
    "field.width_m": float,
    "field.flip_rules": str,
    "densify.step": float,
    "segment.max_gap_seconds": float,
    "segment.break_on_period": _bool,
    "segment.use_possession_id": _optional_bool,
    "match.local_threshold": float,
    "match.global_threshold": float,
    "match.min_positions": int,
    "match.max_outlier_run": int,
    "match.max_outlier_fraction": float,
    "match.max_stall": int,
    "match.self_exclusion_band": _optional_int,
    "match.dedupe_overlap": float,
    "run.out": str,
    "run.jobs": int,
    "run.team": str,
    "run.seed": int,
    "run.per_occurrence": _bool,
    "run.png": _bool,
    "synth.teams": int,
    "synth.games": int,
    "synth.possessions": int,
    "synth.plants": int,
    "synth.template_passes": int,
    "synth.jitter": float,
    "synth.null": _bool,
}


def _flatten(table: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    flat = {}
    for key, value in table.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def coerce(values: dict[str, Any], source: str) -> dict[str, Any]:
    unknown = sorted(set(values) - set(KEYS))
    if unknown:
        raise ValueError(f"{source}: unknown key(s): {', '.join(unknown)}")
    coerced = {}
    for key, value in values.items():
        try:
            coerced[key] = KEYS[key](value)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{source}: {key}: {exc}") from None
    return coerced


def load_config(path: Path) -> dict[str, Any]:
    """Flat dotted-key view of a TOML config file, values coerced to their types."""
    with path.open("rb") as fh:
        return coerce(_flatten(tomllib.load(fh)), str(path))


@dataclass(frozen=True)
class RunConfig:
    input_paths: tuple[Path, ...] = ()
    input_format: str | None = None
    field: FieldSpec = FieldSpec()
    segmentation: SegmentationPolicy = SegmentationPolicy()
    densify_step: float = 2.0
    match: MatchParams = MatchParams()
    out: Path = Path("out")
    jobs: int = 1
    team: str | None = None
    seed: int = 42
    per_occurrence: bool = False
    png: bool = False
    synth: SynthConfig = SynthConfig()

    def __post_init__(self) -> None:
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        if not self.densify_step > 0:
            raise ValueError(f"densify.step must be > 0, got {self.densify_step}")

    def require_inputs(self) -> tuple[Path, ...]:
        if not self.input_paths:
            raise ValueError("no input paths given (positional INPUT or input.paths in the config)")
        return self.input_paths


def build_run_config(file_values: dict[str, Any] | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Merge defaults < config file < command line into a RunConfig."""
    values = dict(file_values or {})
    given = {k: v for k, v in (overrides or {}).items() if v is not None}
    values.update(coerce(given, "command line"))

    def pick(prefix: str) -> dict[str, Any]:
        return {k[len(prefix) :]: v for k, v in values.items() if k.startswith(prefix)}

    flip_path = values.get("field.flip_rules")
    field_spec = FieldSpec(
        length_m=values.get("field.length_m", 105.0),
        width_m=values.get("field.width_m", 68.0),
        flip_rules=load_flip_rules(Path(flip_path)) if flip_path else frozenset(),
    )
    segment = pick("segment.")
    if "use_possession_id" in segment:
        segment["use_provided_possession_id"] = segment.pop("use_possession_id")
    seed = values.get("run.seed", 42)

    return RunConfig(
        input_paths=tuple(Path(p) for p in values.get("input.paths", ())),
        input_format=values.get("input.format"),
        field=field_spec,
        segmentation=SegmentationPolicy(**segment),
        densify_step=values.get("densify.step", 2.0),
        match=MatchParams(**pick("match.")),
        out=Path(values.get("run.out", "out")),
        jobs=values.get("run.jobs", 1),
        team=values.get("run.team"),
        seed=seed,
        per_occurrence=values.get("run.per_occurrence", False),
        png=values.get("run.png", False),
        synth=SynthConfig(seed=seed, **pick("synth.")),
    )
