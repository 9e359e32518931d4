"""Pairwise pattern matching between two densified sequences of one team."""

from __future__ import annotations

import logging
import math
from itertools import accumulate
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from pass_patterns.discovery import kernel
from pass_patterns.discovery.model import MatchParams, PatternMatch, Segment
from pass_patterns.errors import InvariantViolation
from pass_patterns.preprocess import DensifiedSequence, SeqPoint

logger = logging.getLogger(__name__)

Path = Sequence[tuple[int, int]]

_STEPS = {(1, 1), (1, 0), (0, 1)}


def local_distance(p: SeqPoint, q: SeqPoint) -> float:
    dx = p.x - q.x
    dy = p.y - q.y
    return math.sqrt(dx * dx + dy * dy)


def pair_distances(a: DensifiedSequence, b: DensifiedSequence) -> np.ndarray:
    """Local-distance matrix, rows index a and columns index b."""
    if len(a) == 0 or len(b) == 0:
        return np.zeros((len(a), len(b)), dtype=np.float64)
    return cdist(a.coords, b.coords, "euclidean")


def initial_blocked(a: DensifiedSequence, b: DensifiedSequence, params: MatchParams) -> np.ndarray:
    """Cells no path may use before extraction starts.

    For a sequence against itself only the band j - i >= self_exclusion_band is
    open, so the trivial diagonal never matches and every recurrence is found once.
    """
    blocked = np.zeros((len(a), len(b)), dtype=np.bool_)
    if a.seq_id == b.seq_id:
        i, j = np.indices(blocked.shape)
        blocked |= (j - i) < params.band
    return blocked


def consume(blocked: np.ndarray, match: PatternMatch, self_pair: bool) -> None:
    """Block every row of the reference span and every column of the found span."""
    ref, found = match.reference, match.found
    blocked[ref.start_idx : ref.end_idx + 1, :] = True
    blocked[:, found.start_idx : found.end_idx + 1] = True
    if self_pair:
        blocked[found.start_idx : found.end_idx + 1, :] = True
        blocked[:, ref.start_idx : ref.end_idx + 1] = True


def cannot_match(dist: np.ndarray, blocked: np.ndarray, params: MatchParams) -> bool:
    """Cheap necessary conditions; True means no admissible path can be long enough."""
    open_cells = ~blocked & (dist <= params.global_threshold)
    if not (open_cells & (dist <= params.local_threshold)).any():
        return True
    rows = int(open_cells.any(axis=1).sum())
    cols = int(open_cells.any(axis=0).sum())
    return rows < params.min_positions or cols < params.min_positions


def admissible(
    path: Path,
    dist: np.ndarray,
    params: MatchParams,
    blocked: np.ndarray | None = None,
) -> bool:
    """Whether a path satisfies the distance gates, outlier caps and stall limit."""
    if not path:
        return False
    for (i0, j0), (i1, j1) in zip(path, path[1:]):
        if (i1 - i0, j1 - j0) not in _STEPS:
            return False
    distances = [float(dist[i, j]) for i, j in path]
    if blocked is not None and any(blocked[i, j] for i, j in path):
        return False
    if any(d > params.global_threshold for d in distances):
        return False
    if distances[0] > params.local_threshold or distances[-1] > params.local_threshold:
        return False

    run = 0
    outliers = 0
    for d in distances:
        if d > params.local_threshold:
            run += 1
            outliers += 1
            if run > params.max_outlier_run:
                return False
        else:
            run = 0

    stall = 0
    for (i0, j0), (i1, j1) in zip(path, path[1:]):
        if i1 - i0 == 1 and j1 - j0 == 1:
            stall = 0
        else:
            stall += 1
            if stall > params.max_stall:
                return False

    coverage = (path[-1][0] - path[0][0] + 1) + (path[-1][1] - path[0][1] + 1)
    return 2 * outliers <= params.max_outlier_fraction * coverage


def build_match(
    a: DensifiedSequence,
    b: DensifiedSequence,
    path: Path,
    dist: np.ndarray,
    params: MatchParams,
) -> PatternMatch:
    ref = Segment(a.seq_id, path[0][0], path[-1][0])
    found = Segment(b.seq_id, path[0][1], path[-1][1])
    distances = tuple(float(dist[i, j]) for i, j in path)
    ref_passes = a.complete_passes(ref.start_idx, ref.end_idx)
    found_passes = b.complete_passes(found.start_idx, found.end_idx)
    return PatternMatch(
        team_id=a.team_id,
        reference=ref,
        found=found,
        path=tuple((int(i), int(j)) for i, j in path),
        pair_distances=distances,
        outlier_mask=tuple(d > params.local_threshold for d in distances),
        # plain left-to-right sum, same order as the alignment search
        mean_distance=list(accumulate(distances))[-1] / len(distances),
        complete_passes_ref=tuple(ref_passes),
        complete_passes_found=tuple(found_passes),
        ref_track=tuple((p.x, p.y, p.t) for p in a.points[ref.start_idx : ref.end_idx + 1]),
        found_track=tuple((p.x, p.y, p.t) for p in b.points[found.start_idx : found.end_idx + 1]),
        players_ref=tuple(sorted(a.players_of(ref_passes))),
        players_found=tuple(sorted(b.players_of(found_passes))),
    )


def complete_pass_filter(m: PatternMatch, a: DensifiedSequence, b: DensifiedSequence) -> bool:
    """True iff both segments contain at least one whole original pass."""
    ref, found = m.reference, m.found
    return bool(a.complete_passes(ref.start_idx, ref.end_idx)) and bool(
        b.complete_passes(found.start_idx, found.end_idx)
    )


def check_match(m: PatternMatch, params: MatchParams) -> None:
    """Raise InvariantViolation if a match breaks any structural invariant."""
    path = m.path
    if not path:
        raise InvariantViolation(f"{m.match_id}: empty path")
    if path[0] != (m.reference.start_idx, m.found.start_idx) or path[-1] != (
        m.reference.end_idx,
        m.found.end_idx,
    ):
        raise InvariantViolation(f"{m.match_id}: path does not span its segments")
    if len(m.pair_distances) != len(path) or len(m.outlier_mask) != len(path):
        raise InvariantViolation(f"{m.match_id}: per-pair lists misaligned with path")
    for (i0, j0), (i1, j1) in zip(path, path[1:]):
        if (i1 - i0, j1 - j0) not in _STEPS:
            raise InvariantViolation(f"{m.match_id}: non-monotonic step at {(i0, j0)}")
    for d, skipped in zip(m.pair_distances, m.outlier_mask):
        limit = params.global_threshold if skipped else params.local_threshold
        if d > limit or skipped != (d > params.local_threshold):
            raise InvariantViolation(f"{m.match_id}: distance {d} breaks the gates")
    dist = np.full((m.reference.end_idx + 1, m.found.end_idx + 1), np.inf)
    for (i, j), d in zip(path, m.pair_distances):
        dist[i, j] = d
    if not admissible(path, dist, params):
        raise InvariantViolation(f"{m.match_id}: outlier or stall limits exceeded")
    if min(len(m.reference), len(m.found)) < params.min_positions:
        raise InvariantViolation(f"{m.match_id}: shorter than {params.min_positions} positions")
    if not m.complete_passes_ref or not m.complete_passes_found:
        raise InvariantViolation(f"{m.match_id}: a segment holds no complete pass")


def _next_path(
    a: DensifiedSequence,
    b: DensifiedSequence,
    dist: np.ndarray,
    blocked: np.ndarray,
    params: MatchParams,
) -> list[tuple[int, int]] | None:
    """The next path of the greedy extraction, or None when nothing qualifies."""
    open_cells = ~blocked & (dist <= params.global_threshold)
    rows = np.flatnonzero(open_cells.any(axis=1))
    cols = np.flatnonzero(open_cells.any(axis=0))
    if rows.size == 0:
        return None
    r0, r1 = int(rows[0]), int(rows[-1]) + 1
    c0, c1 = int(cols[0]), int(cols[-1]) + 1
    sub_dist = np.ascontiguousarray(dist[r0:r1, c0:c1])
    sub_blocked = np.ascontiguousarray(blocked[r0:r1, c0:c1])

    si, sj, ei, ej = kernel.best_candidate(
        sub_dist,
        sub_blocked,
        params.local_threshold,
        params.global_threshold,
        params.max_outlier_run,
        params.max_stall,
        params.max_outlier_fraction,
        params.min_positions,
        np.ascontiguousarray(a.first_complete_end[r0:r1] - r0),
        np.ascontiguousarray(b.first_complete_end[c0:c1] - c0),
    )
    if si < 0:
        return None
    cells = kernel.trace_from(
        sub_dist,
        sub_blocked,
        si,
        sj,
        ei,
        ej,
        params.local_threshold,
        params.global_threshold,
        params.max_outlier_run,
        params.max_stall,
    )
    return [(int(i) + r0, int(j) + c0) for i, j in cells]


def find_matches(
    a: DensifiedSequence, b: DensifiedSequence, params: MatchParams | None = None
) -> list[PatternMatch]:
    """All greedily extracted, mutually non-overlapping matches between a and b.

    The pair is always solved with the lower seq_id as reference; calling with
    the roles swapped returns the transposed matches.
    """
    params = params or MatchParams()
    if b.seq_id < a.seq_id:
        return [m.transposed() for m in find_matches(b, a, params)]

    self_pair = a.seq_id == b.seq_id
    dist = pair_distances(a, b)
    blocked = initial_blocked(a, b, params)

    matches: list[PatternMatch] = []
    while not cannot_match(dist, blocked, params):
        path = _next_path(a, b, dist, blocked, params)
        if path is None:
            break
        match = build_match(a, b, path, dist, params)
        matches.append(match)
        consume(blocked, match, self_pair)

    if matches:
        logger.debug("%s x %s: %d match(es)", a.seq_id, b.seq_id, len(matches))
    return matches
