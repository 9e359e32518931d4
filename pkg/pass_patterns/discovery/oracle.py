"""Reference matcher for verification on small pairs.

Searches the alignments of every start cell on its own, with paths held
explicitly as backward chains ``(cell, previous_chain)`` terminated by ``()``.
Comparing ``(outliers, distance, cells, chain)`` tuples then ranks paths with
a common start and end exactly like the compiled search: plain tuple ordering
on a chain compares the path read backwards from its last cell.

From a fixed start, two paths that meet in the same cell and state keep their
order under every common continuation, so each (cell, state) holds only its
lowest path. Nothing is pruned across starts, and there are no rank tables or
back-pointers.
"""

from __future__ import annotations

import numpy as np

from pass_patterns.discovery.matcher import build_match, consume, initial_blocked, pair_distances
from pass_patterns.discovery.model import MatchParams, PatternMatch
from pass_patterns.errors import SizeError
from pass_patterns.preprocess import DensifiedSequence

ORACLE_LIMIT = 10_000

Cell = tuple[int, int]
Entry = tuple[int, float, int, tuple]  # outliers, accumulated distance, cells, backward chain


def _unchain(chain: tuple) -> list[Cell]:
    cells = []
    while chain:
        cell, chain = chain
        cells.append(cell)
    cells.reverse()
    return cells


def _from_start(start: Cell, dist: np.ndarray, blocked: np.ndarray, params: MatchParams) -> dict[Cell, Entry]:
    """Lowest ranked path from start to every cell it can reach."""
    n, m = dist.shape
    si, sj = start
    local, ceiling = params.local_threshold, params.global_threshold
    # coverage of the longest segment pair this start can still reach
    outlier_cap = params.max_outlier_fraction * ((n - si) + (m - sj))

    table: dict[Cell, dict[tuple[int, int], Entry]] = {
        start: {(0, 0): (0, float(dist[start]), 1, (start, ()))}
    }
    for i in range(si, n):
        for j in range(sj, m):
            d = float(dist[i, j])
            if (i, j) == start or blocked[i, j] or d > ceiling:
                continue
            outlier = d > local
            states: dict[tuple[int, int], Entry] = {}
            for prev, diagonal in (((i - 1, j - 1), True), ((i - 1, j), False), ((i, j - 1), False)):
                for (run, stall), (count, cost, cells, chain) in table.get(prev, {}).items():
                    run = run + 1 if outlier else 0
                    stall = 0 if diagonal else stall + 1
                    count += outlier
                    if run > params.max_outlier_run or stall > params.max_stall or 2 * count > outlier_cap:
                        continue
                    entry = (count, cost + d, cells + 1, ((i, j), chain))
                    held = states.get((run, stall))
                    if held is None or entry < held:
                        states[(run, stall)] = entry
            if states:
                table[(i, j)] = states
    return {cell: min(states.values()) for cell, states in table.items()}


def _best_path(
    a: DensifiedSequence, b: DensifiedSequence, dist: np.ndarray, blocked: np.ndarray, params: MatchParams
) -> list[Cell] | None:
    n, m = dist.shape
    best = None
    for si in range(n - params.min_positions + 1):
        for sj in range(m - params.min_positions + 1):
            if blocked[si, sj] or dist[si, sj] > params.local_threshold:
                continue
            for (ei, ej), (count, cost, cells, chain) in _from_start((si, sj), dist, blocked, params).items():
                if dist[ei, ej] > params.local_threshold:
                    continue
                if ei - si + 1 < params.min_positions or ej - sj + 1 < params.min_positions:
                    continue
                coverage = (ei - si + 1) + (ej - sj + 1)
                if 2 * count > params.max_outlier_fraction * coverage:
                    continue
                if not a.complete_passes(si, ei) or not b.complete_passes(sj, ej):
                    continue
                rank = (-coverage, cost / cells, (si, sj), (ei, ej))
                if best is None or rank < best[0]:
                    best = (rank, chain)
    return None if best is None else _unchain(best[1])


def brute_force_oracle(
    a: DensifiedSequence, b: DensifiedSequence, params: MatchParams | None = None
) -> list[PatternMatch]:
    """Ground-truth matches for small pairs; raises SizeError above ORACLE_LIMIT cells."""
    params = params or MatchParams()
    if len(a) * len(b) > ORACLE_LIMIT:
        raise SizeError(f"{len(a)} x {len(b)} cells exceeds the oracle limit of {ORACLE_LIMIT}")
    if b.seq_id < a.seq_id:
        return [m.transposed() for m in brute_force_oracle(b, a, params)]

    self_pair = a.seq_id == b.seq_id
    dist = pair_distances(a, b)
    blocked = initial_blocked(a, b, params)

    matches: list[PatternMatch] = []
    while (path := _best_path(a, b, dist, blocked, params)) is not None:
        match = build_match(a, b, path, dist, params)
        matches.append(match)
        consume(blocked, match, self_pair)
    return matches
