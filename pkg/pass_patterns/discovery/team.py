"""Season-level discovery over all sequence pairs of one team."""

from __future__ import annotations

import hashlib
import json
import logging
import multiprocessing as mp
import time
from typing import Iterable

import numpy as np

from pass_patterns.discovery.matcher import check_match, find_matches
from pass_patterns.discovery.model import DiscoveryResult, MatchParams, PatternMatch
from pass_patterns.preprocess import DensifiedSequence, sequences_to_json

logger = logging.getLogger(__name__)

# set in each pool worker by _init_worker
_worker_seqs: list[DensifiedSequence] = []
_worker_params: MatchParams | None = None


def _init_worker(seqs: list[DensifiedSequence], params: MatchParams) -> None:
    global _worker_seqs, _worker_params
    _worker_seqs = seqs
    _worker_params = params


def _run_pair(pair: tuple[int, int]) -> list[PatternMatch]:
    i, j = pair
    return find_matches(_worker_seqs[i], _worker_seqs[j], _worker_params)


def may_match(a: DensifiedSequence, b: DensifiedSequence, params: MatchParams) -> bool:
    """Necessary conditions checked without building the distance matrix."""
    if len(a) < params.min_positions or len(b) < params.min_positions:
        return False
    if a.seq_id == b.seq_id:
        # first found index >= band, found segment still needs min_positions
        return len(a) >= params.band + params.min_positions
    lo_a, hi_a = a.coords.min(axis=0), a.coords.max(axis=0)
    lo_b, hi_b = b.coords.min(axis=0), b.coords.max(axis=0)
    gap = np.maximum(0.0, np.maximum(lo_a - hi_b, lo_b - hi_a))
    return float(np.hypot(gap[0], gap[1])) <= params.local_threshold


def _duplicates(m1: PatternMatch, m2: PatternMatch, threshold: float) -> bool:
    def share(s1, s2) -> float:
        return s1.overlap(s2) / min(len(s1), len(s2))

    straight = share(m1.reference, m2.reference) >= threshold and share(m1.found, m2.found) >= threshold
    crossed = share(m1.reference, m2.found) >= threshold and share(m1.found, m2.reference) >= threshold
    return straight or crossed


def dedupe(matches: Iterable[PatternMatch], threshold: float) -> list[PatternMatch]:
    """Drop matches whose both segments overlap a better match by >= threshold."""
    ranked = sorted(matches, key=lambda m: (-m.coverage, m.mean_distance, m.sort_key()))
    kept: list[PatternMatch] = []
    for m in ranked:
        if not any(_duplicates(m, k, threshold) for k in kept):
            kept.append(m)
    return kept


def dataset_hash(seqs: Iterable[DensifiedSequence]) -> str:
    return hashlib.sha256(sequences_to_json(seqs).encode()).hexdigest()


def params_hash(params: MatchParams) -> str:
    return hashlib.sha256(json.dumps(params.to_dict(), sort_keys=True).encode()).hexdigest()


def discover_team(
    seqs: Iterable[DensifiedSequence],
    params: MatchParams | None = None,
    jobs: int = 1,
) -> DiscoveryResult:
    """Match every unordered pair of a team's sequences, each sequence with itself included."""
    params = params or MatchParams()
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    seqs = sorted(seqs, key=lambda s: s.seq_id)
    teams = {s.team_id for s in seqs}
    if len(teams) > 1:
        raise ValueError(f"discover_team needs one team, got {sorted(teams)}")
    team_id = teams.pop() if teams else ""

    pairs = [
        (i, j)
        for i in range(len(seqs))
        for j in range(i, len(seqs))
        if may_match(seqs[i], seqs[j], params)
    ]
    started = time.perf_counter()

    if jobs > 1 and len(pairs) > 1:
        chunksize = max(1, len(pairs) // (jobs * 8))
        with mp.Pool(jobs, initializer=_init_worker, initargs=(seqs, params)) as pool:
            found = [m for chunk in pool.imap_unordered(_run_pair, pairs, chunksize) for m in chunk]
    else:
        found = [m for i, j in pairs for m in find_matches(seqs[i], seqs[j], params)]

    for m in found:
        check_match(m, params)
    matches = sorted(dedupe(found, params.dedupe_overlap), key=PatternMatch.sort_key)

    logger.info(
        "team %s: %d sequences, %d candidate pairs, %d matches in %.1fs",
        team_id,
        len(seqs),
        len(pairs),
        len(matches),
        time.perf_counter() - started,
    )
    return DiscoveryResult(
        team_id=team_id,
        matches=tuple(matches),
        params=params,
        provenance={"dataset": dataset_hash(seqs), "params": params_hash(params)},
    )
