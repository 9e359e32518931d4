"""Pass-event parsing and possession segmentation."""

from __future__ import annotations

import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any, Iterable

import pandas as pd

from pass_patterns.errors import EventRecordError, SchemaError

logger = logging.getLogger(__name__)

COLUMNS = (
    "game_id",
    "team_id",
    "period",
    "t_start",
    "t_end",
    "x_start",
    "y_start",
    "x_end",
    "y_end",
    "passer_id",
    "receiver_id",
    "possession_id",
    "completed",
)

_TRUE = {"true", "1", "yes", "t"}
_FALSE = {"false", "0", "no", "f"}


@dataclass(frozen=True)
class PassEvent:
    game_id: str
    team_id: str
    period: int
    t_start: float
    t_end: float
    x_start: float
    y_start: float
    x_end: float
    y_end: float
    passer_id: str
    receiver_id: str | None
    possession_id: str | None
    completed: bool


@dataclass(frozen=True)
class PossessionSequence:
    """Consecutive completed passes of one team, in time order."""

    seq_id: str
    game_id: str
    team_id: str
    passes: tuple[PassEvent, ...]

    def __len__(self) -> int:
        return len(self.passes)


@dataclass(frozen=True)
class SegmentationPolicy:
    max_gap_seconds: float = 15.0
    break_on_period: bool = True
    # None: use the provider's possession id whenever both passes carry one
    use_provided_possession_id: bool | None = None

    def __post_init__(self) -> None:
        if not self.max_gap_seconds > 0:
            raise ValueError(f"max_gap_seconds must be > 0, got {self.max_gap_seconds}")


def make_seq_id(game_id: str, team_id: str, ordinal: int) -> str:
    return f"{game_id}:{team_id}:{ordinal:04d}"


# ── Parsing ───────────────────────────────────────────────────────────────────


def _text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and math.isnan(value):
        return ""
    return str(value)


def _number(row: dict[str, str], key: str, record: int, line: int | None) -> float:
    raw = row[key].strip()
    try:
        value = float(raw)
    except ValueError:
        raise EventRecordError(f"{key}={raw!r} is not a number", record, line) from None
    if not math.isfinite(value):
        raise EventRecordError(f"{key}={raw!r} is not finite", record, line)
    return value


def _to_event(row: dict[str, str], record: int, line: int | None) -> PassEvent:
    game_id = row["game_id"].strip()
    team_id = row["team_id"].strip()
    passer_id = row["passer_id"].strip()
    if not game_id or not team_id or not passer_id:
        raise EventRecordError("game_id, team_id and passer_id are required", record, line)

    try:
        period_value = float(row["period"].strip())
    except ValueError:
        period_value = math.nan
    if not period_value.is_integer():
        raise EventRecordError(f"period={row['period']!r} is not an integer", record, line)
    period = int(period_value)

    t_start = _number(row, "t_start", record, line)
    t_end = _number(row, "t_end", record, line)
    if t_start < 0:
        raise EventRecordError(f"t_start={t_start} is negative", record, line)
    if t_end < t_start:
        raise EventRecordError(f"t_end={t_end} is before t_start={t_start}", record, line)

    flag = row["completed"].strip().lower()
    if flag in _TRUE:
        completed = True
    elif flag in _FALSE:
        completed = False
    else:
        raise EventRecordError(f"completed={row['completed']!r} is not a boolean", record, line)

    receiver_id = row["receiver_id"].strip() or None
    if not completed and receiver_id is not None:
        logger.debug("record %d: dropping receiver of an incomplete pass", record)
        receiver_id = None

    return PassEvent(
        game_id=game_id,
        team_id=team_id,
        period=period,
        t_start=t_start,
        t_end=t_end,
        x_start=_number(row, "x_start", record, line),
        y_start=_number(row, "y_start", record, line),
        x_end=_number(row, "x_end", record, line),
        y_end=_number(row, "y_end", record, line),
        passer_id=passer_id,
        receiver_id=receiver_id,
        possession_id=row["possession_id"].strip() or None,
        completed=completed,
    )


def _read_csv(stream: IO[bytes]) -> list[PassEvent]:
    try:
        # blank lines stay in as empty rows so row positions map to file lines
        frame = pd.read_csv(stream, dtype=str, keep_default_na=False, na_filter=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        return []
    missing = [c for c in COLUMNS if c not in frame.columns]
    if missing:
        raise SchemaError(f"missing column(s): {', '.join(missing)}")
    frame = frame[list(COLUMNS)].fillna("")
    blank = (frame == "").all(axis=1)
    events = []
    for position, row in zip(frame.index[~blank], frame[~blank].to_dict("records")):
        # header is line 1
        events.append(_to_event(row, len(events), int(position) + 2))
    return events


def _read_json(stream: IO[bytes]) -> list[PassEvent]:
    raw = stream.read()
    if not raw.strip():
        return []
    data = json.loads(raw)
    if not isinstance(data, list):
        raise SchemaError("JSON input must be an array of pass objects")
    events = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict):
            raise SchemaError(f"record {i} is not an object", record=i)
        missing = [c for c in COLUMNS if c not in obj]
        if missing:
            raise SchemaError(f"record {i}: missing key(s): {', '.join(missing)}", record=i)
        events.append(_to_event({c: _text(obj[c]) for c in COLUMNS}, i, None))
    return events


def parse_events(stream: IO[bytes], format: str = "csv") -> list[PassEvent]:
    """Parse a pass-event log. One PassEvent per record, in file order."""
    if format == "csv":
        return _read_csv(stream)
    if format == "json":
        return _read_json(stream)
    raise ValueError(f"unknown event format: {format!r}")


def format_for(path: Path) -> str:
    return "json" if path.suffix.lower() == ".json" else "csv"


def read_events(path: Path, format: str | None = None) -> list[PassEvent]:
    with path.open("rb") as fh:
        events = parse_events(fh, format or format_for(path))
    logger.info("read %d pass events from %s", len(events), path)
    return events


def _canonical_row(ev: PassEvent) -> dict[str, str]:
    return {
        "game_id": ev.game_id,
        "team_id": ev.team_id,
        "period": str(ev.period),
        "t_start": repr(ev.t_start),
        "t_end": repr(ev.t_end),
        "x_start": repr(ev.x_start),
        "y_start": repr(ev.y_start),
        "x_end": repr(ev.x_end),
        "y_end": repr(ev.y_end),
        "passer_id": ev.passer_id,
        "receiver_id": ev.receiver_id or "",
        "possession_id": ev.possession_id or "",
        "completed": "true" if ev.completed else "false",
    }


def serialize_events(events: Iterable[PassEvent], format: str = "csv") -> bytes:
    """Canonical encoding; parse_events of the output re-serializes to the same bytes."""
    events = list(events)
    if format == "csv":
        frame = pd.DataFrame([_canonical_row(ev) for ev in events], columns=list(COLUMNS))
        return frame.to_csv(index=False, lineterminator="\n").encode()
    if format == "json":
        records = [
            {
                **_canonical_row(ev),
                "period": ev.period,
                "t_start": ev.t_start,
                "t_end": ev.t_end,
                "x_start": ev.x_start,
                "y_start": ev.y_start,
                "x_end": ev.x_end,
                "y_end": ev.y_end,
                "receiver_id": ev.receiver_id,
                "possession_id": ev.possession_id,
                "completed": ev.completed,
            }
            for ev in events
        ]
        return (json.dumps(records, indent=2) + "\n").encode()
    raise ValueError(f"unknown event format: {format!r}")


# ── Possessions ───────────────────────────────────────────────────────────────


def _breaks(prev: PassEvent, nxt: PassEvent, policy: SegmentationPolicy) -> bool:
    if nxt.team_id != prev.team_id:
        return True
    if policy.break_on_period and nxt.period != prev.period:
        return True
    if policy.use_provided_possession_id is not False:
        if prev.possession_id is not None and nxt.possession_id is not None:
            if prev.possession_id != nxt.possession_id:
                return True
    if nxt.t_start - prev.t_end > policy.max_gap_seconds:
        return True
    # passes of one possession never overlap in time
    return nxt.t_start < prev.t_end


def build_possessions(
    events: Iterable[PassEvent], policy: SegmentationPolicy | None = None
) -> list[PossessionSequence]:
    """Split completed passes into per-team possessions; incomplete passes end a possession."""
    policy = policy or SegmentationPolicy()

    by_game: dict[str, list[tuple[int, PassEvent]]] = defaultdict(list)
    for idx, ev in enumerate(events):
        by_game[ev.game_id].append((idx, ev))

    sequences: list[PossessionSequence] = []
    for game_id, indexed in by_game.items():
        indexed.sort(key=lambda p: (p[1].period, p[1].t_start, p[0]))
        ordinal = 0
        current: list[PassEvent] = []

        def flush() -> None:
            nonlocal ordinal, current
            if current:
                team_id = current[0].team_id
                sequences.append(
                    PossessionSequence(
                        seq_id=make_seq_id(game_id, team_id, ordinal),
                        game_id=game_id,
                        team_id=team_id,
                        passes=tuple(current),
                    )
                )
                ordinal += 1
                current = []

        for _, ev in indexed:
            if not ev.completed:
                flush()
                continue
            if current and _breaks(current[-1], ev, policy):
                flush()
            current.append(ev)
        flush()

    logger.info("built %d possessions from %d games", len(sequences), len(by_game))
    return sequences


def team_pass_totals(events: Iterable[PassEvent]) -> dict[str, dict[str, int]]:
    """Season pass attempts and games played per team."""
    passes: dict[str, int] = defaultdict(int)
    games: dict[str, set[str]] = defaultdict(set)
    for ev in events:
        passes[ev.team_id] += 1
        games[ev.team_id].add(ev.game_id)
    return {
        team: {"passes": passes[team], "games": len(games[team])}
        for team in sorted(passes)
    }
