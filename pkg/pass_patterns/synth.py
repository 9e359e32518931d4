"""Seeded synthetic seasons with planted pass patterns, for verification."""

from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from pass_patterns.discovery.model import DiscoveryResult
from pass_patterns.events import PassEvent, make_seq_id
from pass_patterns.preprocess import DensifiedSequence, FieldSpec

logger = logging.getLogger(__name__)

PLAYERS_PER_TEAM = 11
LANE_SPACING = 13.0
LANE_WIDTH = 1.0
NULL_PASSES = 12
LANES = 8
# longer than the default segmentation gap, so possessions never merge
POSSESSION_GAP_S = 16.0


@dataclass(frozen=True)
class SynthConfig:
    teams: int = 2
    games: int = 4
    # per team per game
    possessions: int = 5
    plants: int = 5
    template_passes: int = 10
    jitter: float = 0.5
    null: bool = False
    seed: int = 42

    def __post_init__(self) -> None:
        if self.teams < 1 or self.games < 1 or self.possessions < 1:
            raise ValueError("teams, games and possessions must be >= 1")
        if self.jitter < 0:
            raise ValueError(f"jitter must be >= 0, got {self.jitter}")
        if self.template_passes < 1:
            raise ValueError("template_passes must be >= 1")
        if not self.null and not 0 <= self.plants <= self.games * self.possessions:
            raise ValueError(f"cannot plant into {self.plants} of {self.games * self.possessions} possessions")
        if self.null and self.games * self.possessions > 4 * LANES:
            raise ValueError(f"the null season has room for {4 * LANES} possessions per team")


@dataclass(frozen=True)
class Plant:
    team_id: str
    seq_id: str
    # pass indices within the possession, inclusive
    first_pass: int
    last_pass: int


@dataclass(frozen=True)
class GroundTruth:
    plants: tuple[Plant, ...]
    config: SynthConfig

    def pairs(self) -> list[tuple[Plant, Plant]]:
        """Every unordered pair of planted copies within one team."""
        by_team: dict[str, list[Plant]] = {}
        for p in self.plants:
            by_team.setdefault(p.team_id, []).append(p)
        return [pair for team in sorted(by_team) for pair in itertools.combinations(by_team[team], 2)]

    def to_json(self) -> str:
        payload = {"config": asdict(self.config), "plants": [asdict(p) for p in self.plants]}
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> GroundTruth:
        payload = json.loads(text)
        return cls(
            plants=tuple(Plant(**p) for p in payload["plants"]),
            config=SynthConfig(**payload["config"]),
        )


# ── Geometry ──────────────────────────────────────────────────────────────────


def _walk(
    rng: np.random.Generator,
    start: tuple[float, float],
    heading: float,
    n: int,
    lengths: tuple[float, float],
    turn: float,
    lo: float = 2.0,
    hi: float = 98.0,
) -> list[tuple[float, float]]:
    """n steps from start, each turning by at most `turn` radians, reflected at the borders."""
    points = [start]
    x, y = start
    for _ in range(n):
        heading += rng.uniform(-turn, turn)
        step = rng.uniform(*lengths)
        nx, ny = x + step * math.cos(heading), y + step * math.sin(heading)
        if not lo <= nx <= hi:
            heading = math.pi - heading
            nx = x + step * math.cos(heading)
        if not lo <= ny <= hi:
            heading = -heading
            ny = y + step * math.sin(heading)
        x, y = min(hi, max(lo, nx)), min(hi, max(lo, ny))
        points.append((x, y))
    return points


def _template(rng: np.random.Generator, n_passes: int) -> list[tuple[float, float]]:
    start = (rng.uniform(20.0, 40.0), rng.uniform(25.0, 75.0))
    return _walk(rng, start, rng.uniform(-0.6, 0.6), n_passes, (6.5, 7.5), 0.5, lo=4.0, hi=96.0)


def _jittered(rng: np.random.Generator, vertices: list[tuple[float, float]], jitter: float) -> list[tuple[float, float]]:
    # per coordinate within +-j/sqrt(2), so every point moves at most j
    bound = jitter / math.sqrt(2.0)
    return [(x + rng.uniform(-bound, bound), y + rng.uniform(-bound, bound)) for x, y in vertices]


def _null_walk(rng: np.random.Generator, k: int) -> list[tuple[float, float]]:
    """Random walk k of the null season, confined to one of 8 bands and run in one of 4 orientations.

    Bands are LANE_WIDTH wide with centers LANE_SPACING apart, so points of
    different bands are always more than 12 units apart. Orientations 0 and 1
    run along y-bands in opposite directions, 2 and 3 along x-bands.
    """
    centre = 2.0 + LANE_WIDTH / 2 + LANE_SPACING * (k % LANES)
    along = 5.0 + np.concatenate(([0.0], np.cumsum(rng.uniform(6.5, 7.5, size=NULL_PASSES))))
    across = centre + rng.uniform(-LANE_WIDTH / 2, LANE_WIDTH / 2, size=NULL_PASSES + 1)
    orientation = (k // LANES) % 4
    if orientation % 2:
        along = along[::-1]
    if orientation >= 2:
        return [(float(c), float(a)) for a, c in zip(along, across)]
    return [(float(a), float(c)) for a, c in zip(along, across)]


# ── Events ────────────────────────────────────────────────────────────────────


class _Clock:
    def __init__(self) -> None:
        self.t = 0.0

    def span(self, distance_m: float, speed: float, floor: float) -> tuple[float, float]:
        start = round(self.t, 2)
        self.t = round(start + floor + distance_m / speed, 2)
        return start, self.t


def _emit(
    legs: list[tuple[tuple[float, float], tuple[float, float]]],
    game_id: str,
    team_id: str,
    possession_id: str,
    field: FieldSpec,
    clock: _Clock,
    rng: np.random.Generator,
    lose_ball: bool,
) -> list[PassEvent]:
    """Passes along the given (start, end) legs in normalized units; gaps between legs are carries."""
    sx, sy = field.length_m / 100.0, field.width_m / 100.0
    players = [f"{team_id}-p{k:02d}" for k in range(1, PLAYERS_PER_TEAM + 1)]
    holder = players[int(rng.integers(len(players)))]
    events = []
    prev_end = None
    for (x0, y0), (x1, y1) in legs:
        if prev_end is not None:
            carry = math.hypot((x0 - prev_end[0]) * sx, (y0 - prev_end[1]) * sy)
            clock.span(carry, 5.0, 0.3)
        receiver = holder
        while receiver == holder:
            receiver = players[int(rng.integers(len(players)))]
        length = math.hypot((x1 - x0) * sx, (y1 - y0) * sy)
        t0, t1 = clock.span(length, 15.0, 0.2)
        events.append(
            PassEvent(
                game_id=game_id,
                team_id=team_id,
                period=1,
                t_start=t0,
                t_end=t1,
                x_start=round(x0 * sx, 3),
                y_start=round(y0 * sy, 3),
                x_end=round(x1 * sx, 3),
                y_end=round(y1 * sy, 3),
                passer_id=holder,
                receiver_id=receiver,
                possession_id=possession_id,
                completed=True,
            )
        )
        holder = receiver
        prev_end = (x1, y1)
    if lose_ball and prev_end is not None:
        x0, y0 = prev_end
        x1 = min(98.0, x0 + rng.uniform(5.0, 20.0))
        y1 = min(98.0, max(2.0, y0 + rng.uniform(-15.0, 15.0)))
        t0, t1 = clock.span(math.hypot((x1 - x0) * sx, (y1 - y0) * sy), 15.0, 0.2)
        events.append(
            PassEvent(
                game_id=game_id,
                team_id=team_id,
                period=1,
                t_start=t0,
                t_end=t1,
                x_start=round(x0 * sx, 3),
                y_start=round(y0 * sy, 3),
                x_end=round(x1 * sx, 3),
                y_end=round(y1 * sy, 3),
                passer_id=holder,
                receiver_id=None,
                possession_id=possession_id,
                completed=False,
            )
        )
    return events


def _legs(vertices: list[tuple[float, float]]) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    return list(zip(vertices, vertices[1:]))


def _background(rng: np.random.Generator, n_passes: int, start=None) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Random-walk passes with short carries between them."""
    if start is None:
        start = (rng.uniform(10.0, 90.0), rng.uniform(10.0, 90.0))
    legs = []
    heading = rng.uniform(-math.pi, math.pi)
    x, y = start
    for _ in range(n_passes):
        (x0, y0), (x1, y1) = _walk(rng, (x, y), heading, 1, (8.0, 20.0), 1.0)
        legs.append(((x0, y0), (x1, y1)))
        heading = math.atan2(y1 - y0, x1 - x0)
        x, y = _walk(rng, (x1, y1), heading, 1, (0.0, 3.0), 1.0)[-1]
    return legs


def generate_season(config: SynthConfig | None = None, field: FieldSpec | None = None) -> tuple[list[PassEvent], GroundTruth]:
    """Events of a whole synthetic season plus the planted-pattern ground truth.

    Every game interleaves possessions of all teams. Planted possessions carry
    the team's template between a random-walk prefix and suffix.
    """
    config = config or SynthConfig()
    field = field or FieldSpec()
    rng = np.random.default_rng(config.seed)
    teams = [f"T{k + 1:02d}" for k in range(config.teams)]
    per_team = config.games * config.possessions

    templates = {team: _template(rng, config.template_passes) for team in teams}
    planted_at = {
        team: set(rng.choice(per_team, size=config.plants, replace=False).tolist()) if not config.null else set()
        for team in teams
    }

    events: list[PassEvent] = []
    plants: list[Plant] = []
    for g in range(config.games):
        game_id = f"G{g + 1:03d}"
        clock = _Clock()
        ordinal = 0
        for p in range(config.possessions):
            for team in teams:
                k = g * config.possessions + p
                possession_id = f"{game_id}-{ordinal:04d}"
                if config.null:
                    legs = _legs(_null_walk(rng, k))
                    lose_ball = False
                elif k in planted_at[team]:
                    body = _legs(_jittered(rng, templates[team], config.jitter))
                    # walked backwards from the template start so the prefix ends on it
                    lead = _background(rng, int(rng.integers(2, 4)), start=body[0][0])
                    prefix = [(b, a) for a, b in reversed(lead)]
                    suffix = _background(rng, int(rng.integers(1, 3)), start=body[-1][1])
                    legs = prefix + body + suffix
                    plants.append(
                        Plant(
                            team_id=team,
                            seq_id=make_seq_id(game_id, team, ordinal),
                            first_pass=len(prefix),
                            last_pass=len(prefix) + len(body) - 1,
                        )
                    )
                    lose_ball = bool(rng.random() < 0.5)
                else:
                    legs = _background(rng, int(rng.integers(9, 13)))
                    lose_ball = bool(rng.random() < 0.5)
                events.extend(_emit(legs, game_id, team, possession_id, field, clock, rng, lose_ball))
                clock.t = round(clock.t + POSSESSION_GAP_S, 2)
                ordinal += 1

    logger.info("synthesized %d events, %d planted copies", len(events), len(plants))
    return events, GroundTruth(plants=tuple(plants), config=config)


# ── Scoring ───────────────────────────────────────────────────────────────────


def _planted_range(seq: DensifiedSequence, plant: Plant) -> tuple[int, int]:
    bounds = seq.pass_bounds
    return int(bounds[plant.first_pass, 0]), int(bounds[plant.last_pass, 1])


def evaluate_recall(
    results: Iterable[DiscoveryResult],
    truth: GroundTruth,
    sequences: Iterable[DensifiedSequence],
    min_share: float = 0.5,
) -> dict[str, float]:
    """Share of planted pairs recovered by a match covering >= min_share of both planted ranges."""
    seqs = {s.seq_id: s for s in sequences}
    matches = [m for r in results for m in r.matches]
    ranges = {p.seq_id: _planted_range(seqs[p.seq_id], p) for p in truth.plants}

    def covers(seg, seq_id) -> bool:
        if seg.seq_id != seq_id:
            return False
        lo, hi = ranges[seq_id]
        shared = max(0, min(hi, seg.end_idx) - max(lo, seg.start_idx) + 1)
        return shared >= min_share * (hi - lo + 1)

    pairs = truth.pairs()
    recovered = 0
    for a, b in pairs:
        if any(
            (covers(m.reference, a.seq_id) and covers(m.found, b.seq_id))
            or (covers(m.reference, b.seq_id) and covers(m.found, a.seq_id))
            for m in matches
        ):
            recovered += 1

    planted_ids = set(ranges)
    spurious = sum(
        1 for m in matches if m.reference.seq_id not in planted_ids or m.found.seq_id not in planted_ids
    )
    return {
        "pairs": len(pairs),
        "recovered": recovered,
        "recall": recovered / len(pairs) if pairs else 1.0,
        "matches": len(matches),
        "spurious": spurious,
    }
