"""Builders for possessions, densified sequences and hand-made matches."""

from __future__ import annotations

import numpy as np
import pytest

from pass_patterns.discovery.model import DiscoveryResult, MatchParams, PatternMatch, Segment
from pass_patterns.events import PassEvent, PossessionSequence
from pass_patterns.preprocess import DensifiedSequence, EndpointRole, PointKind, SeqPoint, densify

Leg = tuple[tuple[float, float], tuple[float, float]]

# densify to 10 and 12 points; pass bounds of the latter are [0, 3], [4, 7], [8, 11]
TEN_POINTS = [((0, 0), (4.5, 0)), ((6, 0), (10.5, 0)), ((12, 0), (13.5, 0))]
THREE_PASSES = [((0, 0), (4.5, 0)), ((6, 0), (10.5, 0)), ((12, 0), (16.5, 0))]


def make_pass(
    x0: float,
    y0: float,
    x1: float,
    y1: float,
    t0: float = 0.0,
    t1: float | None = None,
    game: str = "G001",
    team: str = "A",
    period: int = 1,
    passer: str = "p1",
    receiver: str | None = "p2",
    possession: str | None = None,
    completed: bool = True,
) -> PassEvent:
    return PassEvent(
        game_id=game,
        team_id=team,
        period=period,
        t_start=t0,
        t_end=t0 + 1.0 if t1 is None else t1,
        x_start=x0,
        y_start=y0,
        x_end=x1,
        y_end=y1,
        passer_id=passer,
        receiver_id=receiver if completed else None,
        possession_id=possession,
        completed=completed,
    )


def possession(legs: list[Leg], seq_id: str = "G001:A:0000", team: str = "A") -> PossessionSequence:
    """One completed pass per leg, 2 s apart, players p0 -> p1 -> p2 ..."""
    game = seq_id.split(":")[0]
    passes = tuple(
        make_pass(
            x0, y0, x1, y1,
            t0=2.0 * k,
            game=game,
            team=team,
            passer=f"p{k}",
            receiver=f"p{k + 1}",
        )
        for k, ((x0, y0), (x1, y1)) in enumerate(legs)
    )
    return PossessionSequence(seq_id=seq_id, game_id=game, team_id=team, passes=passes)


def densified(legs: list[Leg], seq_id: str = "G001:A:0000", team: str = "A", step: float = 2.0) -> DensifiedSequence:
    return densify(possession(legs, seq_id, team), step)


def paired(coords: list[tuple[float, float]], seq_id: str = "G001:A:0000", team: str = "A") -> DensifiedSequence:
    """Original points only, points 2k and 2k + 1 being the two ends of pass k."""
    points = tuple(
        SeqPoint(
            float(x),
            float(y),
            float(k),
            PointKind.ORIGINAL,
            k // 2,
            EndpointRole.RECEPTION if k % 2 else EndpointRole.EMISSION,
            (f"p{k // 2}", f"p{k // 2 + 1}"),
        )
        for k, (x, y) in enumerate(coords)
    )
    return DensifiedSequence(seq_id, seq_id.split(":")[0], team, points, len(coords) // 2)


def line_legs(x: float, y0: float = 10.0) -> list[Leg]:
    """A straight run up the pitch that densifies to 50 points 1.5 units apart.

    Twelve 4.5-unit passes with 1.5-unit carries between them, then a final
    1.5-unit pass, so point k sits at (x, y0 + 1.5 k).
    """
    legs = [((x, y0 + 6.0 * k), (x, y0 + 6.0 * k + 4.5)) for k in range(12)]
    legs.append(((x, y0 + 72.0), (x, y0 + 73.5)))
    return legs


def random_legs(rng: np.random.Generator, n_passes: int, start: tuple[float, float] | None = None,
                pass_len: tuple[float, float] = (2.0, 4.0), carry_max: float = 1.5) -> list[Leg]:
    """Short random walk inside the pitch."""
    x, y = start if start is not None else (float(rng.uniform(20, 80)), float(rng.uniform(20, 80)))
    legs = []
    for k in range(n_passes):
        if k:
            angle = rng.uniform(0, 2 * np.pi)
            r = rng.uniform(0, carry_max)
            x = float(np.clip(x + r * np.cos(angle), 0, 100))
            y = float(np.clip(y + r * np.sin(angle), 0, 100))
        angle = rng.uniform(0, 2 * np.pi)
        r = rng.uniform(*pass_len)
        x1 = float(np.clip(x + r * np.cos(angle), 0, 100))
        y1 = float(np.clip(y + r * np.sin(angle), 0, 100))
        legs.append(((x, y), (x1, y1)))
        x, y = x1, y1
    return legs


def jittered_legs(rng: np.random.Generator, legs: list[Leg], amount: float) -> list[Leg]:
    def move(p):
        return (
            float(np.clip(p[0] + rng.uniform(-amount, amount), 0, 100)),
            float(np.clip(p[1] + rng.uniform(-amount, amount), 0, 100)),
        )

    return [(move(a), move(b)) for a, b in legs]


# ── Hand-made matches ─────────────────────────────────────────────────────────


def _staircase(ref: Segment, found: Segment) -> tuple[tuple[int, int], ...]:
    i, j = ref.start_idx, found.start_idx
    path = [(i, j)]
    while (i, j) != (ref.end_idx, found.end_idx):
        i = min(i + 1, ref.end_idx)
        j = min(j + 1, found.end_idx)
        path.append((i, j))
    return tuple(path)


def _track(seg: Segment, start: tuple[float, float], end: tuple[float, float], duration: float):
    n = len(seg)
    return tuple(
        (
            start[0] + (end[0] - start[0]) * k / (n - 1),
            start[1] + (end[1] - start[1]) * k / (n - 1),
            duration * k / (n - 1),
        )
        for k in range(n)
    )


def make_match(
    ref: tuple[str, int, int],
    found: tuple[str, int, int],
    team: str = "A",
    ref_xy: tuple[tuple[float, float], tuple[float, float]] = ((40.0, 50.0), (50.0, 50.0)),
    found_xy: tuple[tuple[float, float], tuple[float, float]] | None = None,
    n_passes: int = 1,
    players_ref: tuple[str, ...] = ("p1", "p2"),
    players_found: tuple[str, ...] = ("p1", "p2"),
    duration: float = 4.0,
) -> PatternMatch:
    ref_seg, found_seg = Segment(*ref), Segment(*found)
    path = _staircase(ref_seg, found_seg)
    return PatternMatch(
        team_id=team,
        reference=ref_seg,
        found=found_seg,
        path=path,
        pair_distances=tuple(0.5 for _ in path),
        outlier_mask=tuple(False for _ in path),
        mean_distance=0.5,
        complete_passes_ref=tuple(range(n_passes)),
        complete_passes_found=tuple(range(n_passes)),
        ref_track=_track(ref_seg, *ref_xy, duration),
        found_track=_track(found_seg, *(found_xy or ref_xy), duration),
        players_ref=tuple(sorted(players_ref)),
        players_found=tuple(sorted(players_found)),
    )


def make_result(team: str, matches: list[PatternMatch], params: MatchParams | None = None) -> DiscoveryResult:
    return DiscoveryResult(team_id=team, matches=tuple(matches), params=params or MatchParams())


@pytest.fixture
def small_params() -> MatchParams:
    return MatchParams(min_positions=5)


@pytest.fixture
def line_pair() -> tuple[DensifiedSequence, DensifiedSequence]:
    return densified(line_legs(10.0), "G001:A:0000"), densified(line_legs(10.5), "G001:A:0001")
