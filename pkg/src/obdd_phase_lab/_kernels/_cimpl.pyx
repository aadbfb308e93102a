# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled kernels: OBDD conjunction, extension counting, min-fill.

Mirror of ``pyimpl`` with identical results; see that module for the
algorithmic contracts. Node and hash tables are flat C arrays, literal
closures are uint64 bit matrices.
"""

from libc.stdlib cimport free, malloc, realloc
from libc.stdint cimport int32_t, int64_t, uint64_t

import numpy as np

from obdd_phase_lab.errors import CapacityExceeded

NAME = "compiled"

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

cdef uint64_t EVEN_WORD = <uint64_t>0x5555555555555555


# ---------------------------------------------------------------------------
# OBDD conjunction

cdef struct NodeStore:
    int32_t *level
    int32_t *low
    int32_t *high
    Py_ssize_t count
    Py_ssize_t alloc
    Py_ssize_t capacity
    # unique table (open addressing on node ids)
    int32_t *uslot
    Py_ssize_t usize
    Py_ssize_t uused
    # apply cache
    int32_t *ck_a
    int32_t *ck_b
    int32_t *ck_r
    Py_ssize_t csize
    Py_ssize_t cused


cdef inline uint64_t _mix(uint64_t x) nogil:
    x ^= x >> 33
    x *= <uint64_t>0xFF51AFD7ED558CCD
    x ^= x >> 33
    return x


cdef int _ugrow(NodeStore *st) except -1:
    cdef Py_ssize_t nsize = st.usize * 2
    cdef int32_t *nslot = <int32_t *>malloc(nsize * sizeof(int32_t))
    if nslot == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, pos
    for i in range(nsize):
        nslot[i] = -1
    cdef uint64_t hh
    cdef int32_t node
    for i in range(st.usize):
        node = st.uslot[i]
        if node >= 0:
            hh = _mix((<uint64_t>st.level[node] << 54)
                      ^ (<uint64_t>st.low[node] << 27) ^ <uint64_t>st.high[node])
            pos = hh & (nsize - 1)
            while nslot[pos] >= 0:
                pos = (pos + 1) & (nsize - 1)
            nslot[pos] = node
    free(st.uslot)
    st.uslot = nslot
    st.usize = nsize
    return 0


cdef int32_t _mk(NodeStore *st, int32_t lv, int32_t lo, int32_t hi) except -9:
    if lo == hi:
        return lo
    cdef uint64_t hh = _mix((<uint64_t>lv << 54) ^ (<uint64_t>lo << 27) ^ <uint64_t>hi)
    cdef Py_ssize_t pos = hh & (st.usize - 1)
    cdef int32_t node = st.uslot[pos]
    while node >= 0:
        if st.level[node] == lv and st.low[node] == lo and st.high[node] == hi:
            return node
        pos = (pos + 1) & (st.usize - 1)
        node = st.uslot[pos]
    if st.count >= st.capacity:
        raise CapacityExceeded(st.count)
    if st.count == st.alloc:
        st.alloc *= 2
        st.level = <int32_t *>realloc(st.level, st.alloc * sizeof(int32_t))
        st.low = <int32_t *>realloc(st.low, st.alloc * sizeof(int32_t))
        st.high = <int32_t *>realloc(st.high, st.alloc * sizeof(int32_t))
        if st.level == NULL or st.low == NULL or st.high == NULL:
            raise MemoryError()
    node = <int32_t>st.count
    st.level[node] = lv
    st.low[node] = lo
    st.high[node] = hi
    st.count += 1
    st.uslot[pos] = node
    st.uused += 1
    if st.uused * 4 > st.usize * 3:
        _ugrow(st)
    return node


cdef int _cgrow(NodeStore *st) except -1:
    cdef Py_ssize_t nsize = st.csize * 2
    cdef int32_t *na = <int32_t *>malloc(nsize * sizeof(int32_t))
    cdef int32_t *nb = <int32_t *>malloc(nsize * sizeof(int32_t))
    cdef int32_t *nr = <int32_t *>malloc(nsize * sizeof(int32_t))
    if na == NULL or nb == NULL or nr == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, pos
    for i in range(nsize):
        na[i] = -1
    cdef uint64_t hh
    for i in range(st.csize):
        if st.ck_a[i] >= 0:
            hh = _mix((<uint64_t>st.ck_a[i] << 32) | <uint64_t>st.ck_b[i])
            pos = hh & (nsize - 1)
            while na[pos] >= 0:
                pos = (pos + 1) & (nsize - 1)
            na[pos] = st.ck_a[i]
            nb[pos] = st.ck_b[i]
            nr[pos] = st.ck_r[i]
    free(st.ck_a)
    free(st.ck_b)
    free(st.ck_r)
    st.ck_a = na
    st.ck_b = nb
    st.ck_r = nr
    st.csize = nsize
    return 0


cdef inline int32_t _cache_get(NodeStore *st, int32_t a, int32_t b) nogil:
    cdef uint64_t hh = _mix((<uint64_t>a << 32) | <uint64_t>b)
    cdef Py_ssize_t pos = hh & (st.csize - 1)
    while st.ck_a[pos] >= 0:
        if st.ck_a[pos] == a and st.ck_b[pos] == b:
            return st.ck_r[pos]
        pos = (pos + 1) & (st.csize - 1)
    return -1


cdef int _cache_put(NodeStore *st, int32_t a, int32_t b, int32_t r) except -1:
    cdef uint64_t hh = _mix((<uint64_t>a << 32) | <uint64_t>b)
    cdef Py_ssize_t pos = hh & (st.csize - 1)
    while st.ck_a[pos] >= 0:
        pos = (pos + 1) & (st.csize - 1)
    st.ck_a[pos] = a
    st.ck_b[pos] = b
    st.ck_r[pos] = r
    st.cused += 1
    if st.cused * 4 > st.csize * 3:
        _cgrow(st)
    return 0


cdef int32_t _apply_and(NodeStore *st, int32_t f, int32_t g) except -9:
    if f == 0 or g == 0:
        return 0
    if f == 1:
        return g
    if g == 1:
        return f
    if f == g:
        return f
    cdef int32_t a = f, b = g
    if a > b:
        a, b = b, a
    cdef int32_t r = _cache_get(st, a, b)
    if r >= 0:
        return r
    cdef int32_t la = st.level[a], lb = st.level[b]
    cdef int32_t top = la if la < lb else lb
    cdef int32_t a0, a1, b0, b1
    if la == top:
        a0 = st.low[a]
        a1 = st.high[a]
    else:
        a0 = a
        a1 = a
    if lb == top:
        b0 = st.low[b]
        b1 = st.high[b]
    else:
        b0 = b
        b1 = b
    cdef int32_t r0 = _apply_and(st, a0, b0)
    cdef int32_t r1 = _apply_and(st, a1, b1)
    r = _mk(st, top, r0, r1)
    _cache_put(st, a, b, r)
    return r


def compile_clauses(n_levels, clauses, capacity):
    """See pyimpl.compile_clauses; identical contract and results."""
    cdef NodeStore st
    st.alloc = 1024
    st.capacity = capacity
    st.count = 2
    st.level = <int32_t *>malloc(st.alloc * sizeof(int32_t))
    st.low = <int32_t *>malloc(st.alloc * sizeof(int32_t))
    st.high = <int32_t *>malloc(st.alloc * sizeof(int32_t))
    st.usize = 4096
    st.uused = 0
    st.uslot = <int32_t *>malloc(st.usize * sizeof(int32_t))
    st.csize = 4096
    st.cused = 0
    st.ck_a = <int32_t *>malloc(st.csize * sizeof(int32_t))
    st.ck_b = <int32_t *>malloc(st.csize * sizeof(int32_t))
    st.ck_r = <int32_t *>malloc(st.csize * sizeof(int32_t))
    if (st.level == NULL or st.low == NULL or st.high == NULL
            or st.uslot == NULL or st.ck_a == NULL or st.ck_b == NULL
            or st.ck_r == NULL):
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(st.usize):
        st.uslot[i] = -1
    for i in range(st.csize):
        st.ck_a[i] = -1
    st.level[0] = n_levels
    st.level[1] = n_levels
    st.low[0] = -1
    st.low[1] = -1
    st.high[0] = -1
    st.high[1] = -1

    cdef int32_t root = 1
    cdef int32_t la, pa, lb, pb, nb, na
    try:
        for la_, pa_, lb_, pb_ in clauses:
            la = la_
            pa = pa_
            lb = lb_
            pb = pb_
            nb = _mk(&st, lb, 1 - pb, pb)
            na = _mk(&st, la, nb if pa == 1 else 1, 1 if pa == 1 else nb)
            root = _apply_and(&st, root, na)
            if root == 0:
                break
        level = np.empty(st.count, dtype=np.int64)
        low = np.empty(st.count, dtype=np.int64)
        high = np.empty(st.count, dtype=np.int64)
        for i in range(st.count):
            level[i] = st.level[i]
            low[i] = st.low[i]
            high[i] = st.high[i]
        return level, low, high, int(root)
    finally:
        free(st.level)
        free(st.low)
        free(st.high)
        free(st.uslot)
        free(st.ck_a)
        free(st.ck_b)
        free(st.ck_r)


# ---------------------------------------------------------------------------
# Extension-closure checks

def prepare_reach(reach_ints, nvars):
    """Pack per-literal closure ints into a uint64 bit matrix."""
    cdef Py_ssize_t nlits = len(reach_ints)
    cdef Py_ssize_t words = (2 * nvars + 63) // 64
    if words == 0:
        words = 1
    mat = np.zeros((nlits, words), dtype=np.uint64)
    cdef Py_ssize_t i
    for i in range(nlits):
        b = int(reach_ints[i]).to_bytes(words * 8, "little")
        mat[i, :] = np.frombuffer(b, dtype="<u8")
    return np.ascontiguousarray(mat)


def count_matching_extendable(prepared, options):
    cdef uint64_t[:, ::1] reach = prepared
    cdef Py_ssize_t words = reach.shape[1]
    cdef int h = len(options)
    if h == 0:
        return 1
    opts_np = np.empty((h, 6), dtype=np.int32)
    cdef Py_ssize_t i, t
    for i in range(h):
        for t in range(3):
            opts_np[i, 2 * t] = options[i][t][0]
            opts_np[i, 2 * t + 1] = options[i][t][1]
    cdef int32_t[:, ::1] opts = opts_np
    acc_np = np.zeros((h + 1, words), dtype=np.uint64)
    cdef uint64_t[:, ::1] acc = acc_np
    choice_np = np.zeros(h, dtype=np.int32)
    cdef int32_t[::1] choice = choice_np
    cdef long long count = 0
    cdef int d = 0
    cdef int32_t r1, r2
    cdef Py_ssize_t w
    cdef uint64_t x
    cdef bint conflict
    with nogil:
        while True:
            if choice[d] == 3:
                if d == 0:
                    break
                d -= 1
                choice[d] += 1
                continue
            r1 = opts[d, 2 * choice[d]]
            r2 = opts[d, 2 * choice[d] + 1]
            conflict = False
            for w in range(words):
                x = acc[d, w] | reach[r1, w] | reach[r2, w]
                acc[d + 1, w] = x
                if x & (x >> 1) & EVEN_WORD:
                    conflict = True
            if conflict:
                choice[d] += 1
                continue
            if d == h - 1:
                count += 1
                choice[d] += 1
                continue
            d += 1
            choice[d] = 0
    return int(count)


def extendable_mask(prepared, unit_rows):
    cdef uint64_t[:, ::1] reach = prepared
    cdef Py_ssize_t words = reach.shape[1]
    rows_np = np.ascontiguousarray(np.asarray(unit_rows, dtype=np.int32))
    if rows_np.ndim == 1:
        rows_np = rows_np.reshape(1, -1)
    cdef int32_t[:, ::1] rows = rows_np
    cdef Py_ssize_t cnt = rows.shape[0]
    cdef Py_ssize_t width = rows.shape[1]
    out_np = np.zeros(cnt, dtype=np.uint8)
    cdef unsigned char[::1] out = out_np
    cdef Py_ssize_t i, j, w
    cdef uint64_t x
    cdef bint conflict
    cdef uint64_t *accbuf = <uint64_t *>malloc(words * sizeof(uint64_t))
    if accbuf == NULL:
        raise MemoryError()
    with nogil:
        for i in range(cnt):
            for w in range(words):
                accbuf[w] = 0
            for j in range(width):
                for w in range(words):
                    accbuf[w] |= reach[rows[i, j], w]
            conflict = False
            for w in range(words):
                x = accbuf[w]
                if x & (x >> 1) & EVEN_WORD:
                    conflict = True
                    break
            out[i] = 0 if conflict else 1
    free(accbuf)
    return [bool(v) for v in out_np]


# ---------------------------------------------------------------------------
# Min-fill elimination

cdef int64_t _fill_value(uint64_t[:, ::1] adj, uint64_t[::1] alive,
                         Py_ssize_t words, Py_ssize_t v) nogil:
    cdef int64_t total = 0
    cdef Py_ssize_t w, uw, u
    cdef uint64_t m, mm
    for w in range(words):
        m = adj[v, w] & alive[w]
        while m:
            u = (w << 6) + __builtin_ctzll(m)
            m &= m - 1
            for uw in range(words):
                mm = (adj[v, uw] & alive[uw]) & ~adj[u, uw]
                if uw == (u >> 6):
                    mm &= ~(<uint64_t>1 << (u & 63))
                total += __builtin_popcountll(mm)
    return total // 2


def min_fill(n, edges, priorities):
    """See pyimpl.min_fill; identical tie-breaking and results."""
    cdef Py_ssize_t nn = n
    cdef Py_ssize_t words = (nn + 63) // 64
    if words == 0:
        words = 1
    adj_np = np.zeros((nn, words), dtype=np.uint64)
    cdef uint64_t[:, ::1] adj = adj_np
    cdef Py_ssize_t u, v
    for u_, v_ in edges:
        u = u_
        v = v_
        adj[u, v >> 6] |= <uint64_t>1 << (v & 63)
        adj[v, u >> 6] |= <uint64_t>1 << (u & 63)
    alive_np = np.zeros(words, dtype=np.uint64)
    cdef uint64_t[::1] alive = alive_np
    cdef Py_ssize_t i
    for i in range(nn):
        alive[i >> 6] |= <uint64_t>1 << (i & 63)
    prio_np = np.asarray(priorities, dtype=np.uint64)
    cdef uint64_t[::1] prio = prio_np
    fill_np = np.zeros(nn, dtype=np.int64)
    cdef int64_t[::1] fill = fill_np
    nb_np = np.zeros(words, dtype=np.uint64)
    cdef uint64_t[::1] nb = nb_np
    order_np = np.zeros(nn, dtype=np.int64)
    cdef int64_t[::1] order = order_np

    cdef Py_ssize_t w, pos
    cdef uint64_t m
    cdef int64_t deg, cnt
    cdef int64_t width = 0
    cdef Py_ssize_t remaining = nn
    cdef Py_ssize_t best_v
    cdef int64_t best_f
    cdef uint64_t best_p

    with nogil:
        for i in range(nn):
            fill[i] = _fill_value(adj, alive, words, i)

        pos = 0
        while remaining > 0:
            best_v = -1
            best_f = 0
            best_p = 0
            for i in range(nn):
                if not (alive[i >> 6] >> (i & 63)) & 1:
                    continue
                if (best_v < 0 or fill[i] < best_f
                        or (fill[i] == best_f and prio[i] < best_p)):
                    best_v = i
                    best_f = fill[i]
                    best_p = prio[i]
            v = best_v
            deg = 0
            for w in range(words):
                m = adj[v, w] & alive[w]
                nb[w] = m
                deg += __builtin_popcountll(m)
            if deg > width:
                width = deg
            order[pos] = v
            pos += 1
            alive[v >> 6] &= ~(<uint64_t>1 << (v & 63))
            remaining -= 1
            # clique the neighborhood
            for i in range(nn):
                if (nb[i >> 6] >> (i & 63)) & 1:
                    for w in range(words):
                        adj[i, w] |= nb[w]
                    adj[i, i >> 6] &= ~(<uint64_t>1 << (i & 63))
            # fills change for nb members and vertices seeing >= 2 of nb
            for i in range(nn):
                if not (alive[i >> 6] >> (i & 63)) & 1:
                    continue
                if (nb[i >> 6] >> (i & 63)) & 1:
                    fill[i] = _fill_value(adj, alive, words, i)
                else:
                    cnt = 0
                    for w in range(words):
                        cnt += __builtin_popcountll(adj[i, w] & nb[w])
                        if cnt >= 2:
                            break
                    if cnt >= 2:
                        fill[i] = _fill_value(adj, alive, words, i)
    return int(width), [int(x) for x in order_np]
