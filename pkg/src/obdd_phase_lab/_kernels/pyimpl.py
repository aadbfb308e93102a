"""Pure-Python kernels: OBDD conjunction, extension counting, min-fill.

These are the fallback twins of the compiled extension module. Both
backends implement the same functions with the same deterministic
results; only speed differs. Bitsets are arbitrary-precision ints here
(bit 2*(v-1) is the positive literal of v, bit 2*(v-1)+1 the negative).
"""

from __future__ import annotations

from obdd_phase_lab.errors import CapacityExceeded

NAME = "python"


def _shortcut_and(a: int, b: int) -> int | None:
    if a == 0 or b == 0:
        return 0
    if a == 1:
        return b
    if b == 1:
        return a
    if a == b:
        return a
    return None


def compile_clauses(n_levels, clauses, capacity):
    """Conjoin width-2 clause diagrams into a reduced OBDD.

    ``clauses``: iterable of (level_a, pol_a, level_b, pol_b) with
    level_a < level_b (0-based positions in the variable order); a
    polarity bit of 1 means the literal is satisfied when the variable
    is 1. Returns raw (level, low, high, root) with sinks at ids 0/1
    and terminal level == n_levels. One apply cache lives for the whole
    conjunction and is dropped afterwards.
    """
    level = [n_levels, n_levels]
    low = [-1, -1]
    high = [-1, -1]
    unique: dict[tuple[int, int, int], int] = {}
    cache: dict[tuple[int, int], int] = {}

    def mk(lv, lo, hi):
        if lo == hi:
            return lo
        key = (lv, lo, hi)
        r = unique.get(key)
        if r is None:
            if len(level) >= capacity:
                raise CapacityExceeded(len(level))
            r = len(level)
            level.append(lv)
            low.append(lo)
            high.append(hi)
            unique[key] = r
        return r

    def apply_and(f, g):
        r = _shortcut_and(f, g)
        if r is not None:
            return r
        root_key = (f, g) if f <= g else (g, f)
        stack = [root_key]
        while stack:
            key = stack[-1]
            if key in cache:
                stack.pop()
                continue
            a, b = key
            top = min(level[a], level[b])
            a0, a1 = (low[a], high[a]) if level[a] == top else (a, a)
            b0, b1 = (low[b], high[b]) if level[b] == top else (b, b)
            r0 = _shortcut_and(a0, b0)
            r1 = _shortcut_and(a1, b1)
            k0 = k1 = None
            if r0 is None:
                k0 = (a0, b0) if a0 <= b0 else (b0, a0)
                r0 = cache.get(k0)
            if r1 is None:
                k1 = (a1, b1) if a1 <= b1 else (b1, a1)
                r1 = cache.get(k1)
            if r0 is None or r1 is None:
                if r0 is None:
                    stack.append(k0)
                if r1 is None:
                    stack.append(k1)
                continue
            cache[key] = mk(top, r0, r1)
            stack.pop()
        return cache[root_key]

    root = 1
    for la, pa, lb, pb in clauses:
        nb = mk(lb, 1 - pb, pb)
        na = mk(la, nb if pa == 1 else 1, 1 if pa == 1 else nb)
        root = apply_and(root, na)
        if root == 0:
            break
    return level, low, high, root


def prepare_reach(reach_ints, nvars):
    even = ((1 << (2 * nvars)) - 1) // 3
    return (list(reach_ints), even)


def count_matching_extendable(prepared, options) -> int:
    """Count satisfying triples of a matching formula whose forced units
    stay conflict-free in the implication closure.

    ``options[i]`` holds, in the fixed triple order (01, 10, 11), the
    pair of closure row indices forced by clause i. A conflict in a
    prefix accumulator kills the whole subtree (the closure union only
    grows), so pruning is sound.
    """
    reach, even = prepared
    h = len(options)
    if h == 0:
        return 1
    count = 0
    acc = [0] * (h + 1)
    choice = [0] * h
    d = 0
    while True:
        if choice[d] == 3:
            if d == 0:
                break
            d -= 1
            choice[d] += 1
            continue
        r1, r2 = options[d][choice[d]]
        a = acc[d] | reach[r1] | reach[r2]
        if a & (a >> 1) & even:
            choice[d] += 1
            continue
        if d == h - 1:
            count += 1
            choice[d] += 1
            continue
        acc[d + 1] = a
        d += 1
        choice[d] = 0
    return count


def extendable_mask(prepared, unit_rows) -> list[bool]:
    """Conflict-freeness of each batch entry's closure union."""
    reach, even = prepared
    out = []
    for rows in unit_rows:
        a = 0
        for r in rows:
            a |= reach[r]
        out.append(not (a & (a >> 1) & even))
    return out


def min_fill(n, edges, priorities):
    """Min-fill elimination: (width, order) on vertices 0..n-1.

    Ties broken by (fill, priority, index); the caller supplies the
    per-vertex priorities. Width is the largest live degree met at an
    elimination, an upper bound on treewidth.
    """
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    alive = (1 << n) - 1
    fill = [0] * n

    def fill_value(v):
        nb = adj[v] & alive
        total = 0
        m = nb
        while m:
            u = (m & -m).bit_length() - 1
            m &= m - 1
            total += (nb & ~adj[u] & ~(1 << u)).bit_count()
        return total // 2

    for v in range(n):
        fill[v] = fill_value(v)

    order = []
    width = 0
    remaining = n
    while remaining:
        best = None
        m = alive
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            key = (fill[v], priorities[v], v)
            if best is None or key < best:
                best = key
                best_v = v
        v = best_v
        nb = adj[v] & alive & ~(1 << v)
        deg = nb.bit_count()
        if deg > width:
            width = deg
        order.append(v)
        alive &= ~(1 << v)
        remaining -= 1
        # clique the neighborhood
        m = nb
        while m:
            u = (m & -m).bit_length() - 1
            m &= m - 1
            adj[u] = (adj[u] | nb) & ~(1 << u)
        # fill values change for neighbours and for vertices seeing >= 2
        # endpoints of newly added edges; a conservative superset is all
        # alive w with |N(w) & nb| >= 2, plus nb itself
        m = alive
        while m:
            w = (m & -m).bit_length() - 1
            m &= m - 1
            if (1 << w) & nb or (adj[w] & nb).bit_count() >= 2:
                fill[w] = fill_value(w)
    return width, order
