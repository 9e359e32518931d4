"""Season statistics over discovered matches.

Every function here reads only DiscoveryResult / PatternMatch data, so the
tables can be recomputed from the serialized discovery output alone.
Single-match measures use the reference segment unless told otherwise.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import stats as sps
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from pass_patterns.discovery.model import DiscoveryResult, PatternMatch, Segment, Track
from pass_patterns.errors import DegenerateInput, InvariantViolation
from pass_patterns.preprocess import FieldSpec

logger = logging.getLogger(__name__)

FINAL_THIRD_X = 66.0
SIDES = ("reference", "found")


# ── Single-match measures ─────────────────────────────────────────────────────


def _track(match: PatternMatch, side: str) -> Track:
    if side == "reference":
        track = match.ref_track
    elif side == "found":
        track = match.found_track
    else:
        raise ValueError(f"side must be 'reference' or 'found', got {side!r}")
    if len(track) < 2:
        raise InvariantViolation(f"{match.match_id}: {side} track has {len(track)} point(s)")
    return track


def count_passes_in(match: PatternMatch, side: str = "reference") -> int:
    """Complete original passes inside one segment of the match."""
    _track(match, side)
    return len(match.complete_passes_ref if side == "reference" else match.complete_passes_found)


def is_final_third_entry(match: PatternMatch, side: str = "reference") -> bool:
    track = _track(match, side)
    return track[0][0] < FINAL_THIRD_X and track[-1][0] >= FINAL_THIRD_X


def spatial_spread(match: PatternMatch, side: str = "reference") -> tuple[float, float]:
    """(x_last - x_first, |y_last - y_first|) of one segment."""
    track = _track(match, side)
    return track[-1][0] - track[0][0], abs(track[-1][1] - track[0][1])


def duration_seconds(match: PatternMatch, side: str = "reference") -> float:
    track = _track(match, side)
    return track[-1][2] - track[0][2]


def path_length_units(match: PatternMatch, side: str = "reference") -> float:
    xy = np.asarray(_track(match, side), dtype=np.float64)[:, :2]
    steps = np.diff(xy, axis=0)
    return float(np.hypot(steps[:, 0], steps[:, 1]).sum())


def to_meters(length_units: float, field: FieldSpec) -> float:
    """Convert a length measured along x from normalized units to meters."""
    return length_units * field.length_m / 100.0


def path_length_meters(match: PatternMatch, field: FieldSpec, side: str = "reference") -> float:
    """Path length with x and y gaps scaled by their own field dimension."""
    xy = np.asarray(_track(match, side), dtype=np.float64)[:, :2]
    steps = np.diff(xy, axis=0) * np.array([field.length_m / 100.0, field.width_m / 100.0])
    return float(np.hypot(steps[:, 0], steps[:, 1]).sum())


# ── Player involvement ────────────────────────────────────────────────────────


@dataclass(frozen=True)
class PlayerOverlapRecord:
    match_id: str
    n_involved: int
    n_overlap: int

    def __post_init__(self) -> None:
        if not 0 <= self.n_overlap <= self.n_involved:
            raise ValueError(f"{self.match_id}: need 0 <= n_overlap <= n_involved")


def player_overlap(match: PatternMatch) -> PlayerOverlapRecord:
    ref, found = set(match.players_ref), set(match.players_found)
    return PlayerOverlapRecord(
        match_id=match.match_id,
        n_involved=max(len(ref), len(found)),
        n_overlap=len(ref & found),
    )


# ── Occurrence clusters ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class PatternCluster:
    cluster_id: str
    team_id: str
    segments: tuple[Segment, ...]
    # merged, non-overlapping position ranges; one per occurrence
    ranges: tuple[Segment, ...]
    overlap_profile: dict[int, float]
    match_ids: tuple[str, ...] = ()

    @property
    def occurrences(self) -> int:
        return len(self.ranges)

    @property
    def overlap_fraction(self) -> float:
        """Share of positions linked to every other occurrence of the cluster."""
        return self.overlap_profile.get(self.occurrences, 0.0)

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "team_id": self.team_id,
            "occurrences": self.occurrences,
            "overlap_fraction": self.overlap_fraction,
            "overlap_profile": {str(k): v for k, v in sorted(self.overlap_profile.items())},
            "ranges": [r.to_dict() for r in self.ranges],
            "segments": [s.to_dict() for s in self.segments],
            "match_ids": list(self.match_ids),
        }


def _merge_ranges(segments: Iterable[Segment]) -> list[Segment]:
    merged: list[Segment] = []
    for seg in sorted(segments):
        last = merged[-1] if merged else None
        if last is not None and last.seq_id == seg.seq_id and seg.start_idx <= last.end_idx:
            merged[-1] = Segment(last.seq_id, last.start_idx, max(last.end_idx, seg.end_idx))
        else:
            merged.append(seg)
    return merged


def cluster_occurrences(result: DiscoveryResult) -> list[PatternCluster]:
    """Group match segments that recur together into occurrence clusters.

    Segments are joined when they belong to the same match or share a position
    of the same sequence. For every covered position, multiplicity k counts its
    own occurrence plus the distinct other occurrences it is matched to.
    """
    matches = result.matches
    if not matches:
        return []
    nodes = [seg for m in matches for seg in (m.reference, m.found)]
    rows, cols = [], []
    for k in range(len(matches)):
        rows.append(2 * k)
        cols.append(2 * k + 1)
    by_seq: dict[str, list[int]] = defaultdict(list)
    for idx, seg in enumerate(nodes):
        by_seq[seg.seq_id].append(idx)
    for members in by_seq.values():
        for pos, u in enumerate(members):
            for v in members[pos + 1 :]:
                if nodes[u].overlap(nodes[v]) > 0:
                    rows.append(u)
                    cols.append(v)

    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    n_components, labels = connected_components(graph, directed=False)

    clusters: list[PatternCluster] = []
    for comp in range(n_components):
        members = [idx for idx in range(len(nodes)) if labels[idx] == comp]
        ranges = _merge_ranges(nodes[idx] for idx in members)
        occ_of = {}
        for idx in members:
            seg = nodes[idx]
            occ_of[idx] = next(
                o for o, r in enumerate(ranges) if r.seq_id == seg.seq_id and r.start_idx <= seg.start_idx <= r.end_idx
            )

        links = [np.zeros((len(r), len(ranges)), dtype=np.bool_) for r in ranges]
        for idx in members:
            partner = idx ^ 1
            own, other = occ_of[idx], occ_of[partner]
            if own == other:
                continue
            seg, base = nodes[idx], ranges[own].start_idx
            links[own][seg.start_idx - base : seg.end_idx - base + 1, other] = True

        counts: Counter[int] = Counter()
        for grid in links:
            counts.update((1 + grid.sum(axis=1)).tolist())
        total = sum(counts.values())
        clusters.append(
            PatternCluster(
                cluster_id="",
                team_id=result.team_id,
                segments=tuple(sorted(set(nodes[idx] for idx in members))),
                ranges=tuple(ranges),
                overlap_profile={k: counts[k] / total for k in sorted(counts)},
                match_ids=tuple(sorted({matches[idx // 2].match_id for idx in members})),
            )
        )

    clusters.sort(key=lambda c: c.ranges[0])
    return [
        PatternCluster(
            cluster_id=f"{result.team_id}-c{n:03d}",
            team_id=c.team_id,
            segments=c.segments,
            ranges=c.ranges,
            overlap_profile=c.overlap_profile,
            match_ids=c.match_ids,
        )
        for n, c in enumerate(clusters)
    ]


# ── Season tables ─────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class TeamSeasonStats:
    team_id: str
    n_patterns: int
    mean_passes: float
    std_passes: float
    n_fte: int
    n_team_passes: int
    n_clusters: int = 0
    n_games: int = 0
    patterns_per_game: float = 0.0
    fte_rate: float = 0.0
    no_patterns: bool = False

    def __post_init__(self) -> None:
        if self.n_patterns < 0 or self.std_passes < 0 or self.n_fte > self.n_patterns:
            raise InvariantViolation(f"{self.team_id}: inconsistent season row {self}")

    def to_dict(self) -> dict:
        return asdict(self)


def _sides(per_occurrence: bool) -> tuple[str, ...]:
    return SIDES if per_occurrence else SIDES[:1]


def team_stats(
    result: DiscoveryResult,
    totals: Mapping[str, int] | None = None,
    per_occurrence: bool = False,
) -> TeamSeasonStats:
    """One season row; per_occurrence counts passes on both segments and an entry on either."""
    totals = totals or {}
    sides = _sides(per_occurrence)
    counts = [count_passes_in(m, side) for m in result.matches for side in sides]
    n_patterns = len(result.matches)
    n_fte = sum(any(is_final_third_entry(m, side) for side in sides) for m in result.matches)
    n_games = int(totals.get("games", 0))
    return TeamSeasonStats(
        team_id=result.team_id,
        n_patterns=n_patterns,
        mean_passes=float(np.mean(counts)) if counts else 0.0,
        std_passes=float(np.std(counts)) if counts else 0.0,
        n_fte=n_fte,
        n_team_passes=int(totals.get("passes", 0)),
        n_clusters=len(cluster_occurrences(result)),
        n_games=n_games,
        patterns_per_game=n_patterns / n_games if n_games else 0.0,
        fte_rate=n_fte / n_patterns if n_patterns else 0.0,
        no_patterns=n_patterns == 0,
    )


def table1(
    results: Iterable[DiscoveryResult],
    totals: Mapping[str, Mapping[str, int]] | None = None,
    per_occurrence: bool = False,
) -> list[TeamSeasonStats]:
    totals = totals or {}
    rows = [team_stats(r, totals.get(r.team_id), per_occurrence) for r in results]
    return sorted(rows, key=lambda row: row.team_id)


def table2(results: Iterable[DiscoveryResult]) -> dict[tuple[int, int], int]:
    """League-wide match counts by (n_involved, n_overlap)."""
    tally: Counter[tuple[int, int]] = Counter()
    for result in results:
        for m in result.matches:
            rec = player_overlap(m)
            tally[(rec.n_involved, rec.n_overlap)] += 1
    return dict(sorted(tally.items()))


def _fit(stats: Iterable[TeamSeasonStats]):
    rows = list(stats)
    if len(rows) < 2:
        raise DegenerateInput(f"regression needs at least 2 teams, got {len(rows)}")
    x = np.array([r.n_team_passes for r in rows], dtype=np.float64)
    y = np.array([r.n_patterns for r in rows], dtype=np.float64)
    if np.all(x == x[0]):
        raise DegenerateInput("all teams have the same season pass total")
    return rows, x, y, sps.linregress(x, y)


def regression_r2(stats: Iterable[TeamSeasonStats]) -> float:
    """R^2 of the least-squares fit of pattern counts on season pass totals."""
    _, _, _, fit = _fit(stats)
    return float(fit.rvalue**2)


def regression_residuals(stats: Iterable[TeamSeasonStats]) -> dict[str, float]:
    rows, x, y, fit = _fit(stats)
    residuals = y - (fit.slope * x + fit.intercept)
    return {row.team_id: float(res) for row, res in zip(rows, residuals)}


# ── Distributions ─────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SpreadRow:
    team_id: str
    match_id: str
    side: str
    dx: float
    dy: float
    duration_s: float
    length_m: float
    fte: bool


def spread_rows(
    results: Iterable[DiscoveryResult], field: FieldSpec, per_occurrence: bool = False
) -> list[SpreadRow]:
    rows = []
    for result in results:
        for m in result.matches:
            for side in _sides(per_occurrence):
                dx, dy = spatial_spread(m, side)
                rows.append(
                    SpreadRow(
                        team_id=result.team_id,
                        match_id=m.match_id,
                        side=side,
                        dx=dx,
                        dy=dy,
                        duration_s=duration_seconds(m, side),
                        length_m=path_length_meters(m, field, side),
                        fte=is_final_third_entry(m, side),
                    )
                )
    return rows


def distribution_summary(rows: Iterable[SpreadRow]) -> dict[str, float]:
    """Duration and length distribution of pattern occurrences."""
    rows = list(rows)
    if not rows:
        return {"n": 0, "share_3_5s": 0.0, "longest_s": 0.0, "share_under_60m": 0.0, "n_at_least_100m": 0}
    durations = np.array([r.duration_s for r in rows])
    lengths = np.array([r.length_m for r in rows])
    return {
        "n": len(rows),
        "share_3_5s": float(np.mean((durations >= 3.0) & (durations <= 5.0))),
        "longest_s": float(durations.max()),
        "share_under_60m": float(np.mean(lengths < 60.0)),
        "n_at_least_100m": int(np.sum(lengths >= 100.0)),
    }


OVERLAP_BINS = np.linspace(0.0, 1.0, 6)


def overlap_ratio_distribution(results: Iterable[DiscoveryResult]) -> dict[str, list[int]]:
    """Per team, histogram of n_overlap / n_involved over OVERLAP_BINS."""
    histograms = {}
    for result in results:
        ratios = [
            rec.n_overlap / rec.n_involved
            for rec in (player_overlap(m) for m in result.matches)
            if rec.n_involved
        ]
        counts, _ = np.histogram(ratios, bins=OVERLAP_BINS)
        histograms[result.team_id] = [int(c) for c in counts]
    return dict(sorted(histograms.items()))


# ── Whole-season bundle ───────────────────────────────────────────────────────


@dataclass
class SeasonAnalysis:
    table1: list[TeamSeasonStats]
    table2: dict[tuple[int, int], int]
    spreads: list[SpreadRow]
    clusters: list[PatternCluster]
    summary: dict = field(default_factory=dict)


def analyze(
    results: Iterable[DiscoveryResult],
    totals: Mapping[str, Mapping[str, int]] | None = None,
    field: FieldSpec | None = None,
    per_occurrence: bool = False,
) -> SeasonAnalysis:
    results = sorted(results, key=lambda r: r.team_id)
    field = field or FieldSpec()
    rows = table1(results, totals, per_occurrence)
    spreads = spread_rows(results, field, per_occurrence)

    summary: dict = {
        "per_occurrence": per_occurrence,
        "distribution": distribution_summary(spreads),
        "overlap_ratios": overlap_ratio_distribution(results),
        "overlap_ratio_bins": [float(b) for b in OVERLAP_BINS],
    }
    try:
        summary["regression"] = {"r2": regression_r2(rows), "residuals": regression_residuals(rows)}
    except DegenerateInput as exc:
        logger.warning("passes/patterns regression skipped: %s", exc)
        summary["regression"] = None

    return SeasonAnalysis(
        table1=rows,
        table2=table2(results),
        spreads=spreads,
        clusters=[c for r in results for c in cluster_occurrences(r)],
        summary=summary,
    )
