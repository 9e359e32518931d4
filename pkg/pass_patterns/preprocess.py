"""Coordinate normalization and densification of possession sequences."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np
import pandas as pd

from pass_patterns.errors import OutOfFieldError
from pass_patterns.events import PassEvent, PossessionSequence

logger = logging.getLogger(__name__)

# normalized units of slack before an off-pitch coordinate becomes an error
FIELD_TOLERANCE = 1.0


class PointKind(str, Enum):
    ORIGINAL = "original"
    VIRTUAL = "virtual"


class EndpointRole(str, Enum):
    EMISSION = "emission"
    RECEPTION = "reception"


@dataclass(frozen=True)
class FieldSpec:
    length_m: float = 105.0
    width_m: float = 68.0
    flip_rules: frozenset[tuple[str, str, int]] = frozenset()

    def __post_init__(self) -> None:
        if not (self.length_m > 0 and self.width_m > 0):
            raise ValueError(f"field dimensions must be positive, got {self.length_m}x{self.width_m}")

    def flips(self, game_id: str, team_id: str, period: int) -> bool:
        return (game_id, team_id, period) in self.flip_rules


@dataclass(frozen=True)
class SeqPoint:
    x: float
    y: float
    t: float
    kind: PointKind
    source_pass: int
    endpoint_role: EndpointRole | None
    players: tuple[str, str]

    @property
    def is_original(self) -> bool:
        return self.kind is PointKind.ORIGINAL


@dataclass(frozen=True)
class DensifiedSequence:
    seq_id: str
    game_id: str
    team_id: str
    points: tuple[SeqPoint, ...]
    n_passes: int

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def coords(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p in self.points], dtype=np.float64).reshape(-1, 2)

    @cached_property
    def pass_bounds(self) -> np.ndarray:
        """(n_passes, 2) array of emission and reception point indices."""
        bounds = np.full((self.n_passes, 2), -1, dtype=np.int64)
        for idx, p in enumerate(self.points):
            if p.endpoint_role is EndpointRole.EMISSION:
                bounds[p.source_pass, 0] = idx
            elif p.endpoint_role is EndpointRole.RECEPTION:
                bounds[p.source_pass, 1] = idx
        return bounds

    @cached_property
    def first_complete_end(self) -> np.ndarray:
        """For each start index s, the smallest reception index of a pass emitted at or after s.

        A segment [s, e] holds a complete pass iff first_complete_end[s] <= e.
        Positions with no such pass hold len(self).
        """
        n = len(self.points)
        best = np.full(n + 1, n, dtype=np.int64)
        for emission, reception in self.pass_bounds:
            best[emission] = min(best[emission], reception)
        # suffix minimum
        return np.minimum.accumulate(best[::-1])[::-1][:n].copy()

    def complete_passes(self, start: int, end: int) -> list[int]:
        """Indices of source passes whose emission and reception both lie in [start, end]."""
        bounds = self.pass_bounds
        inside = (bounds[:, 0] >= start) & (bounds[:, 1] <= end)
        return [int(k) for k in np.flatnonzero(inside)]

    def players_of(self, passes: Iterable[int]) -> set[str]:
        bounds = self.pass_bounds
        players: set[str] = set()
        for k in passes:
            passer, receiver = self.points[bounds[k, 0]].players
            players.add(passer)
            if receiver:
                players.add(receiver)
        return players


# ── Normalization ─────────────────────────────────────────────────────────────


def _scale(value: float, extent: float, axis: str, seq_id: str) -> float:
    scaled = value * 100.0 / extent
    if scaled < -FIELD_TOLERANCE or scaled > 100.0 + FIELD_TOLERANCE:
        raise OutOfFieldError(
            f"{seq_id}: {axis}={value} is outside the {extent} m field beyond tolerance"
        )
    return min(100.0, max(0.0, scaled))


def normalize(seq: PossessionSequence, field: FieldSpec) -> PossessionSequence:
    """Scale to [0,100]x[0,100] and mirror so the team attacks toward x=100."""
    passes = []
    for ev in seq.passes:
        xs = _scale(ev.x_start, field.length_m, "x", seq.seq_id)
        ys = _scale(ev.y_start, field.width_m, "y", seq.seq_id)
        xe = _scale(ev.x_end, field.length_m, "x", seq.seq_id)
        ye = _scale(ev.y_end, field.width_m, "y", seq.seq_id)
        if field.flips(ev.game_id, ev.team_id, ev.period):
            xs, ys, xe, ye = 100.0 - xs, 100.0 - ys, 100.0 - xe, 100.0 - ye
        passes.append(replace(ev, x_start=xs, y_start=ys, x_end=xe, y_end=ye))
    return replace(seq, passes=tuple(passes))


def load_flip_rules(path: Path) -> frozenset[tuple[str, str, int]]:
    """Read a `game_id,team_id,period` CSV of possessions to mirror."""
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = {"game_id", "team_id", "period"} - set(frame.columns)
    if missing:
        raise ValueError(f"{path}: flip-rule table lacks {', '.join(sorted(missing))}")
    return frozenset(
        (row.game_id.strip(), row.team_id.strip(), int(row.period))
        for row in frame.itertuples(index=False)
    )


# ── Densification ─────────────────────────────────────────────────────────────


def _between(
    x0: float,
    y0: float,
    t0: float,
    x1: float,
    y1: float,
    t1: float,
    step: float,
    source_pass: int,
    players: tuple[str, str],
) -> list[SeqPoint]:
    """Equally spaced virtual points strictly between two positions, gaps < step."""
    dx, dy, dt = x1 - x0, y1 - y0, t1 - t0
    d = math.sqrt(dx * dx + dy * dy)
    n = math.floor(d / step) + 1 if d > 0 else 1
    lo_x, hi_x = min(x0, x1), max(x0, x1)
    lo_y, hi_y = min(y0, y1), max(y0, y1)
    points = []
    for q in range(1, n):
        points.append(
            SeqPoint(
                x=min(hi_x, max(lo_x, x0 + dx * q / n)),
                y=min(hi_y, max(lo_y, y0 + dy * q / n)),
                t=t0 + dt * q / n,
                kind=PointKind.VIRTUAL,
                source_pass=source_pass,
                endpoint_role=None,
                players=players,
            )
        )
    return points


def _endpoint(ev: PassEvent, k: int, role: EndpointRole) -> SeqPoint:
    emission = role is EndpointRole.EMISSION
    return SeqPoint(
        x=ev.x_start if emission else ev.x_end,
        y=ev.y_start if emission else ev.y_end,
        t=ev.t_start if emission else ev.t_end,
        kind=PointKind.ORIGINAL,
        source_pass=k,
        endpoint_role=role,
        players=(ev.passer_id, ev.receiver_id or ""),
    )


def densify(seq: PossessionSequence, step: float = 2.0) -> DensifiedSequence:
    """Insert virtual points along passes and carries so consecutive points are < step apart."""
    if not step > 0:
        raise ValueError(f"densify step must be > 0, got {step}")
    points: list[SeqPoint] = []
    for k, ev in enumerate(seq.passes):
        if k > 0:
            prev = seq.passes[k - 1]
            carrier = ev.passer_id
            points.extend(
                _between(
                    prev.x_end, prev.y_end, prev.t_end,
                    ev.x_start, ev.y_start, ev.t_start,
                    step, k, (carrier, carrier),
                )
            )
        emission = _endpoint(ev, k, EndpointRole.EMISSION)
        reception = _endpoint(ev, k, EndpointRole.RECEPTION)
        points.append(emission)
        points.extend(
            _between(
                ev.x_start, ev.y_start, ev.t_start,
                ev.x_end, ev.y_end, ev.t_end,
                step, k, emission.players,
            )
        )
        points.append(reception)
    return DensifiedSequence(
        seq_id=seq.seq_id,
        game_id=seq.game_id,
        team_id=seq.team_id,
        points=tuple(points),
        n_passes=len(seq.passes),
    )


def redensify(seq: DensifiedSequence, step: float = 2.0) -> DensifiedSequence:
    """Apply the gap rule to an already densified sequence; a no-op when gaps are < step."""
    if not seq.points:
        return seq
    points = [seq.points[0]]
    for prev, cur in zip(seq.points, seq.points[1:]):
        points.extend(
            _between(prev.x, prev.y, prev.t, cur.x, cur.y, cur.t, step, cur.source_pass, cur.players)
        )
        points.append(cur)
    return replace(seq, points=tuple(points))


def strip_virtual(seq: DensifiedSequence) -> list[SeqPoint]:
    return [p for p in seq.points if p.is_original]


def prepare_sequences(
    possessions: Iterable[PossessionSequence], field: FieldSpec, step: float = 2.0
) -> list[DensifiedSequence]:
    prepared = [densify(normalize(seq, field), step) for seq in possessions]
    logger.info("densified %d sequences (%d points)", len(prepared), sum(len(s) for s in prepared))
    return prepared


# ── Artifact I/O ──────────────────────────────────────────────────────────────

_ROLE_CODES = {None: "", EndpointRole.EMISSION: "e", EndpointRole.RECEPTION: "r"}
_ROLES = {code: role for role, code in _ROLE_CODES.items()}


def sequences_to_json(seqs: Iterable[DensifiedSequence]) -> str:
    payload = [
        {
            "seq_id": s.seq_id,
            "game_id": s.game_id,
            "team_id": s.team_id,
            "n_passes": s.n_passes,
            "points": [
                [p.x, p.y, p.t, p.source_pass, _ROLE_CODES[p.endpoint_role], p.players[0], p.players[1]]
                for p in s.points
            ],
        }
        for s in seqs
    ]
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def sequences_from_json(text: str) -> list[DensifiedSequence]:
    seqs = []
    for item in json.loads(text):
        points = tuple(
            SeqPoint(
                x=float(x),
                y=float(y),
                t=float(t),
                kind=PointKind.ORIGINAL if role else PointKind.VIRTUAL,
                source_pass=int(source),
                endpoint_role=_ROLES[role],
                players=(passer, receiver),
            )
            for x, y, t, source, role, passer, receiver in item["points"]
        )
        seqs.append(
            DensifiedSequence(
                seq_id=item["seq_id"],
                game_id=item["game_id"],
                team_id=item["team_id"],
                points=points,
                n_passes=int(item["n_passes"]),
            )
        )
    return seqs
