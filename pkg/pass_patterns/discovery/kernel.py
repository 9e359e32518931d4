"""Compiled alignment search for the pair matcher.

A path is ranked against paths with the same first and last cell by outlier
count, then accumulated distance, then number of cells, then the path read
backwards from its last cell (all lower first). Across different ends the
matcher ranks by coverage (reference + found positions, higher first), mean
distance, first cell and last cell.

``best_candidate`` sweeps the table row by row and keeps, for every cell and
alignment state (outlier run, stall run), one label per path start:
``(start_i, start_j, outliers, cells)`` plus the accumulated distance. A label
is dropped when another label in the same state has the same start and ranks
lower, or starts no later on both axes with no more outliers; the survivor of
the latter then reaches every end the dropped one reaches with more coverage
and passes the same length and complete-pass checks. Only two rows of labels
are held at a time.

``trace_from`` then rebuilds the winning path from its fixed start, where the
backwards order is carried as ``key``: 0 for the start cell, otherwise
``(flat predecessor + 1) * n_states + rank`` of the predecessor's path among
the paths ending at the predecessor.

No fastmath: costs must be bit-identical to a left-to-right Python sum.
"""

import numba as nb
import numpy as np

MOVE_DI = np.array([1, 1, 0], dtype=np.int64)
MOVE_DJ = np.array([1, 0, 1], dtype=np.int64)

# label columns
SI, SJ, OUT, CELLS = 0, 1, 2, 3


@nb.njit(cache=True)
def _reserve(ints, costs, need):
    cap = ints.shape[0]
    if need <= cap:
        return ints, costs
    size = max(2 * cap, need)
    grown_ints = np.empty((size, ints.shape[1]), dtype=np.int64)
    grown_costs = np.empty(size, dtype=np.float64)
    grown_ints[:cap] = ints
    grown_costs[:cap] = costs
    return grown_ints, grown_costs


@nb.njit(cache=True)
def _next_state(ps, outlier, diagonal, max_run, max_stall):
    """State reached from ps by one step, -1 when the step breaks a run limit."""
    n_stall = max_stall + 1
    r = ps // n_stall
    s = ps % n_stall
    if outlier:
        r += 1
        if r > max_run:
            return -1
    else:
        r = 0
    if diagonal:
        s = 0
    else:
        s += 1
        if s > max_stall:
            return -1
    return r * n_stall + s


@nb.njit(cache=True)
def _ranks_before(a, b, ints, costs):
    """Whether label a ranks before label b among paths with the same start and end."""
    if ints[a, OUT] != ints[b, OUT]:
        return ints[a, OUT] < ints[b, OUT]
    if costs[a] != costs[b]:
        return costs[a] < costs[b]
    if ints[a, CELLS] != ints[b, CELLS]:
        return ints[a, CELLS] < ints[b, CELLS]
    return a < b


@nb.njit(cache=True)
def _dropped(a, tmp, tmp_costs, count, tag):
    for b in range(count):
        if b == a or tmp[b, 4] != tag:
            continue
        same_start = tmp[b, SI] == tmp[a, SI] and tmp[b, SJ] == tmp[a, SJ]
        if same_start:
            if _ranks_before(b, a, tmp, tmp_costs):
                return True
        elif tmp[b, SI] <= tmp[a, SI] and tmp[b, SJ] <= tmp[a, SJ] and tmp[b, OUT] <= tmp[a, OUT]:
            return True
    return False


@nb.njit(cache=True)
def best_candidate(
    dist,
    blocked,
    local_threshold,
    global_threshold,
    max_run,
    max_stall,
    max_outlier_fraction,
    min_positions,
    first_end_a,
    first_end_b,
):
    """First and last cell of the best admissible path passing the length and pass checks.

    Returns ``(start_i, start_j, end_i, end_j)``, all -1 when no path qualifies.
    ``first_end_a[s]`` is the smallest reception index of a pass emitted at or
    after s (len(a) when there is none), likewise for b.
    """
    n, m = dist.shape
    n_states = (max_run + 1) * (max_stall + 1)

    prev_off = np.zeros((m, n_states), dtype=np.int64)
    prev_cnt = np.zeros((m, n_states), dtype=np.int64)
    cur_off = np.zeros((m, n_states), dtype=np.int64)
    cur_cnt = np.zeros((m, n_states), dtype=np.int64)
    prev_ints = np.empty((64, 4), dtype=np.int64)
    prev_costs = np.empty(64, dtype=np.float64)
    cur_ints = np.empty((64, 4), dtype=np.int64)
    cur_costs = np.empty(64, dtype=np.float64)
    # candidate labels of one cell, column 4 holds the target state
    tmp = np.empty((64, 5), dtype=np.int64)
    tmp_costs = np.empty(64, dtype=np.float64)

    best = np.full(4, -1, dtype=np.int64)
    best_cov = -1
    best_mean = 0.0

    for i in range(n):
        cur_size = 0
        for j in range(m):
            for st in range(n_states):
                cur_cnt[j, st] = 0
            d = dist[i, j]
            if blocked[i, j] or d > global_threshold:
                continue
            outlier = d > local_threshold
            step_out = 1 if outlier else 0

            count = 0
            if (
                not outlier
                and i + min_positions <= n
                and j + min_positions <= m
                and first_end_a[i] < n
                and first_end_b[j] < m
            ):
                tmp, tmp_costs = _reserve(tmp, tmp_costs, count + 1)
                tmp[count, SI] = i
                tmp[count, SJ] = j
                tmp[count, OUT] = 0
                tmp[count, CELLS] = 1
                tmp[count, 4] = 0
                tmp_costs[count] = d
                count += 1

            for mv in range(3):
                pi = i - MOVE_DI[mv]
                pj = j - MOVE_DJ[mv]
                if pi < 0 or pj < 0:
                    continue
                for ps in range(n_states):
                    ns = _next_state(ps, outlier, mv == 0, max_run, max_stall)
                    if ns < 0:
                        continue
                    if mv == 2:
                        off = cur_off[pj, ps]
                        cnt = cur_cnt[pj, ps]
                    else:
                        off = prev_off[pj, ps]
                        cnt = prev_cnt[pj, ps]
                    for q in range(off, off + cnt):
                        if mv == 2:
                            si = cur_ints[q, SI]
                            sj = cur_ints[q, SJ]
                            o = cur_ints[q, OUT] + step_out
                            cells = cur_ints[q, CELLS] + 1
                            c = cur_costs[q] + d
                        else:
                            si = prev_ints[q, SI]
                            sj = prev_ints[q, SJ]
                            o = prev_ints[q, OUT] + step_out
                            cells = prev_ints[q, CELLS] + 1
                            c = prev_costs[q] + d
                        # no end can give this start enough coverage for o outliers
                        if 2 * o > max_outlier_fraction * ((n - si) + (m - sj)):
                            continue
                        tmp, tmp_costs = _reserve(tmp, tmp_costs, count + 1)
                        tmp[count, SI] = si
                        tmp[count, SJ] = sj
                        tmp[count, OUT] = o
                        tmp[count, CELLS] = cells
                        tmp[count, 4] = ns
                        tmp_costs[count] = c
                        count += 1

            for ns in range(n_states):
                first = cur_size
                for a in range(count):
                    if tmp[a, 4] != ns or _dropped(a, tmp, tmp_costs, count, ns):
                        continue
                    cur_ints, cur_costs = _reserve(cur_ints, cur_costs, cur_size + 1)
                    for col in range(4):
                        cur_ints[cur_size, col] = tmp[a, col]
                    cur_costs[cur_size] = tmp_costs[a]
                    cur_size += 1
                cur_off[j, ns] = first
                cur_cnt[j, ns] = cur_size - first

            if outlier:
                continue
            lo = cur_off[j, 0]
            hi = cur_size
            for q in range(lo, hi):
                si = cur_ints[q, SI]
                sj = cur_ints[q, SJ]
                if i - si + 1 < min_positions or j - sj + 1 < min_positions:
                    continue
                if first_end_a[si] > i or first_end_b[sj] > j:
                    continue
                cov = (i - si + 1) + (j - sj + 1)
                if 2 * cur_ints[q, OUT] > max_outlier_fraction * cov:
                    continue
                representative = True
                for r in range(lo, hi):
                    if r != q and cur_ints[r, SI] == si and cur_ints[r, SJ] == sj:
                        if _ranks_before(r, q, cur_ints, cur_costs):
                            representative = False
                            break
                if not representative:
                    continue
                mean = cur_costs[q] / cur_ints[q, CELLS]
                better = cov > best_cov
                if not better and cov == best_cov:
                    if mean != best_mean:
                        better = mean < best_mean
                    elif si != best[0]:
                        better = si < best[0]
                    elif sj != best[1]:
                        better = sj < best[1]
                    elif i != best[2]:
                        better = i < best[2]
                    else:
                        better = j < best[3]
                if better:
                    best_cov = cov
                    best_mean = mean
                    best[0] = si
                    best[1] = sj
                    best[2] = i
                    best[3] = j

        prev_ints, cur_ints = cur_ints, prev_ints
        prev_costs, cur_costs = cur_costs, prev_costs
        prev_off, cur_off = cur_off, prev_off
        prev_cnt, cur_cnt = cur_cnt, prev_cnt

    return best[0], best[1], best[2], best[3]


@nb.njit(cache=True)
def trace_from(dist, blocked, si, sj, ei, ej, local_threshold, global_threshold, max_run, max_stall):
    """Cells of the lowest ranked admissible path from (si, sj) to (ei, ej), as a (k, 2) array."""
    h = ei - si + 1
    w = ej - sj + 1
    n_states = (max_run + 1) * (max_stall + 1)

    alive = np.zeros((h, w, n_states), dtype=np.bool_)
    outliers = np.zeros((h, w, n_states), dtype=np.int32)
    cost = np.zeros((h, w, n_states), dtype=np.float64)
    cells = np.zeros((h, w, n_states), dtype=np.int32)
    key = np.zeros((h, w, n_states), dtype=np.int64)
    rank = np.zeros((h, w, n_states), dtype=np.int32)
    move = np.full((h, w, n_states), -1, dtype=np.int8)
    parent = np.zeros((h, w, n_states), dtype=np.int32)

    live = np.empty(n_states, dtype=np.int64)
    live_keys = np.empty(n_states, dtype=np.int64)

    for a in range(h):
        for b in range(w):
            d = dist[si + a, sj + b]
            if blocked[si + a, sj + b] or d > global_threshold:
                continue
            outlier = d > local_threshold
            step_out = 1 if outlier else 0
            if a == 0 and b == 0:
                if not outlier:
                    alive[0, 0, 0] = True
                    cost[0, 0, 0] = d
                    cells[0, 0, 0] = 1
                continue

            for mv in range(3):
                pa = a - MOVE_DI[mv]
                pb = b - MOVE_DJ[mv]
                if pa < 0 or pb < 0:
                    continue
                key_base = (pa * w + pb + 1) * n_states
                for ps in range(n_states):
                    if not alive[pa, pb, ps]:
                        continue
                    ns = _next_state(ps, outlier, mv == 0, max_run, max_stall)
                    if ns < 0:
                        continue
                    co = outliers[pa, pb, ps] + step_out
                    cc = cost[pa, pb, ps] + d
                    cn = cells[pa, pb, ps] + 1
                    ck = key_base + rank[pa, pb, ps]
                    better = not alive[a, b, ns]
                    if not better:
                        if co != outliers[a, b, ns]:
                            better = co < outliers[a, b, ns]
                        elif cc != cost[a, b, ns]:
                            better = cc < cost[a, b, ns]
                        elif cn != cells[a, b, ns]:
                            better = cn < cells[a, b, ns]
                        else:
                            better = ck < key[a, b, ns]
                    if better:
                        alive[a, b, ns] = True
                        outliers[a, b, ns] = co
                        cost[a, b, ns] = cc
                        cells[a, b, ns] = cn
                        key[a, b, ns] = ck
                        move[a, b, ns] = mv
                        parent[a, b, ns] = ps

            count = 0
            for st in range(n_states):
                if alive[a, b, st]:
                    live[count] = st
                    live_keys[count] = key[a, b, st]
                    count += 1
            if count > 0:
                order = np.argsort(live_keys[:count])
                for pos in range(count):
                    rank[a, b, live[order[pos]]] = pos

    a = h - 1
    b = w - 1
    state = -1
    for st in range(n_states):
        if not alive[a, b, st]:
            continue
        if state < 0:
            state = st
            continue
        if outliers[a, b, st] != outliers[a, b, state]:
            better = outliers[a, b, st] < outliers[a, b, state]
        elif cost[a, b, st] != cost[a, b, state]:
            better = cost[a, b, st] < cost[a, b, state]
        elif cells[a, b, st] != cells[a, b, state]:
            better = cells[a, b, st] < cells[a, b, state]
        else:
            better = key[a, b, st] < key[a, b, state]
        if better:
            state = st

    path = np.empty((h + w, 2), dtype=np.int64)
    if state < 0:
        return path[:0]
    k = 0
    while True:
        path[k, 0] = si + a
        path[k, 1] = sj + b
        k += 1
        mv = move[a, b, state]
        if mv < 0:
            break
        state = parent[a, b, state]
        a -= MOVE_DI[mv]
        b -= MOVE_DJ[mv]
    return path[:k][::-1].copy()
