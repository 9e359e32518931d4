"""Match parameters, matches and per-team discovery results."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any


@dataclass(frozen=True)
class MatchParams:
    local_threshold: float = 2.0
    global_threshold: float = 10.0
    min_positions: int = 41
    max_outlier_run: int = 2
    max_outlier_fraction: float = 0.10
    max_stall: int = 3
    # None: same as min_positions
    self_exclusion_band: int | None = None
    dedupe_overlap: float = 0.8

    def __post_init__(self) -> None:
        if not 0 < self.local_threshold <= self.global_threshold:
            raise ValueError(
                f"need 0 < local_threshold <= global_threshold, got "
                f"{self.local_threshold} / {self.global_threshold}"
            )
        if self.min_positions < 2:
            raise ValueError(f"min_positions must be >= 2, got {self.min_positions}")
        if not 0 <= self.max_outlier_fraction < 1:
            raise ValueError(f"max_outlier_fraction must be in [0, 1), got {self.max_outlier_fraction}")
        if self.max_outlier_run < 0 or self.max_stall < 0:
            raise ValueError("max_outlier_run and max_stall must be >= 0")
        if self.self_exclusion_band is not None and self.self_exclusion_band < 1:
            raise ValueError(f"self_exclusion_band must be >= 1, got {self.self_exclusion_band}")
        if not 0 < self.dedupe_overlap <= 1:
            raise ValueError(f"dedupe_overlap must be in (0, 1], got {self.dedupe_overlap}")

    @property
    def band(self) -> int:
        return self.min_positions if self.self_exclusion_band is None else self.self_exclusion_band

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, order=True)
class Segment:
    seq_id: str
    start_idx: int
    end_idx: int

    def __len__(self) -> int:
        return self.end_idx - self.start_idx + 1

    def overlap(self, other: Segment) -> int:
        """Number of shared positions (0 for different sequences)."""
        if self.seq_id != other.seq_id:
            return 0
        return max(0, min(self.end_idx, other.end_idx) - max(self.start_idx, other.start_idx) + 1)

    def to_dict(self) -> dict[str, Any]:
        return {"seq_id": self.seq_id, "start_idx": self.start_idx, "end_idx": self.end_idx}


def safe_name(text: str) -> str:
    """File-name safe rendering of an identifier."""
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", text)


def team_dir(root: Path, team_id: str) -> Path:
    """Output directory of one team; every team lives under <root>/teams/."""
    return root / "teams" / safe_name(team_id)


Track = tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class PatternMatch:
    team_id: str
    reference: Segment
    found: Segment
    path: tuple[tuple[int, int], ...]
    pair_distances: tuple[float, ...]
    outlier_mask: tuple[bool, ...]
    mean_distance: float
    complete_passes_ref: tuple[int, ...]
    complete_passes_found: tuple[int, ...]
    # (x, y, t) of every position of each segment
    ref_track: Track = ()
    found_track: Track = ()
    players_ref: tuple[str, ...] = ()
    players_found: tuple[str, ...] = ()

    @property
    def coverage(self) -> int:
        return len(self.reference) + len(self.found)

    @property
    def n_outliers(self) -> int:
        return sum(self.outlier_mask)

    @property
    def match_id(self) -> str:
        ref, found = self.reference, self.found
        return safe_name(
            f"{ref.seq_id}_{ref.start_idx}-{ref.end_idx}__{found.seq_id}_{found.start_idx}-{found.end_idx}"
        )

    def sort_key(self) -> tuple:
        return (
            self.reference.seq_id,
            self.reference.start_idx,
            self.found.seq_id,
            self.found.start_idx,
            self.reference.end_idx,
            self.found.end_idx,
        )

    def transposed(self) -> PatternMatch:
        """The same match with the reference and found roles swapped."""
        return PatternMatch(
            team_id=self.team_id,
            reference=self.found,
            found=self.reference,
            path=tuple((j, i) for i, j in self.path),
            pair_distances=self.pair_distances,
            outlier_mask=self.outlier_mask,
            mean_distance=self.mean_distance,
            complete_passes_ref=self.complete_passes_found,
            complete_passes_found=self.complete_passes_ref,
            ref_track=self.found_track,
            found_track=self.ref_track,
            players_ref=self.players_found,
            players_found=self.players_ref,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "team_id": self.team_id,
            "reference": self.reference.to_dict(),
            "found": self.found.to_dict(),
            "path": [list(p) for p in self.path],
            "pair_distances": list(self.pair_distances),
            "outlier_mask": list(self.outlier_mask),
            "mean_distance": self.mean_distance,
            "complete_passes_ref": list(self.complete_passes_ref),
            "complete_passes_found": list(self.complete_passes_found),
            "ref_track": [list(p) for p in self.ref_track],
            "found_track": [list(p) for p in self.found_track],
            "players_ref": list(self.players_ref),
            "players_found": list(self.players_found),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PatternMatch:
        return cls(
            team_id=data["team_id"],
            reference=Segment(**data["reference"]),
            found=Segment(**data["found"]),
            path=tuple((int(i), int(j)) for i, j in data["path"]),
            pair_distances=tuple(float(d) for d in data["pair_distances"]),
            outlier_mask=tuple(bool(o) for o in data["outlier_mask"]),
            mean_distance=float(data["mean_distance"]),
            complete_passes_ref=tuple(data["complete_passes_ref"]),
            complete_passes_found=tuple(data["complete_passes_found"]),
            ref_track=tuple(tuple(p) for p in data["ref_track"]),
            found_track=tuple(tuple(p) for p in data["found_track"]),
            players_ref=tuple(data["players_ref"]),
            players_found=tuple(data["players_found"]),
        )


SCHEMA_VERSION = 1


@dataclass(frozen=True)
class DiscoveryResult:
    team_id: str
    matches: tuple[PatternMatch, ...]
    params: MatchParams
    provenance: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "team_id": self.team_id,
            "params": self.params.to_dict(),
            "provenance": dict(self.provenance),
            "matches": [m.to_dict() for m in self.matches],
        }
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> DiscoveryResult:
        payload = json.loads(text)
        if payload.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported discovery schema: {payload.get('schema_version')!r}")
        return cls(
            team_id=payload["team_id"],
            matches=tuple(PatternMatch.from_dict(m) for m in payload["matches"]),
            params=MatchParams(**payload["params"]),
            provenance=dict(payload["provenance"]),
        )
