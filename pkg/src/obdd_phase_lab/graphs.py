"""Primal graphs and width parameters.

Treewidth is approximated from above by min-fill elimination (kernel
backed) and computed exactly on small graphs by branch and bound over
elimination orders with subset memoization. Pathwidth uses the vertex
separation formulation: the smallest over vertex orders of the largest
prefix boundary, which equals pathwidth.
"""

from __future__ import annotations

from dataclasses import dataclass

from obdd_phase_lab._kernels import impl
from obdd_phase_lab.cnf import Bipartition, Cnf
from obdd_phase_lab.errors import (
    EdgeWithoutClause,
    GraphTooLarge,
    GraphTooSmall,
    NotMatchingSubformula,
    PartsOverlap,
)
from obdd_phase_lab.seeds import as_seed

TW_EXACT_GUARD = 14
PW_EXACT_GUARD = 12


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph; isolated vertices are first-class."""

    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        vset = set(self.vertices)
        canon = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at {u}")
            if u not in vset or v not in vset:
                raise ValueError(f"edge ({u},{v}) leaves the vertex set")
            canon.add((u, v) if u < v else (v, u))
        object.__setattr__(self, "edges", frozenset(canon))
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", adj)

    @property
    def adj(self) -> dict[int, set[int]]:
        return self._adj  # type: ignore[attr-defined]

    def degree(self, v: int) -> int:
        return len(self.adj[v])


def primal_graph(formula: Cnf, include_isolated: bool = True) -> Graph:
    """Graph on the formula's variables, one edge per co-occurring pair.

    Parallel clauses collapse to a single edge. With include_isolated,
    vertices are all ambient 1..n; otherwise only var(F).
    """
    edges = frozenset(
        (abs(a), abs(b)) if abs(a) < abs(b) else (abs(b), abs(a))
        for a, b in formula.clauses
    )
    if include_isolated:
        vertices = tuple(range(1, formula.n + 1))
    else:
        vertices = tuple(sorted(formula.variables()))
    return Graph(vertices, edges)


def max_degree(G: Graph) -> int:
    return max((len(s) for s in G.adj.values()), default=0)


def every_component_at_most_one_cycle(G: Graph) -> bool:
    """True iff each connected component has at most as many edges as vertices."""
    seen: set[int] = set()
    for start in G.vertices:
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        qi = 0
        deg_sum = 0
        while qi < len(comp):
            v = comp[qi]
            qi += 1
            deg_sum += len(G.adj[v])
            for w in G.adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
        if deg_sum // 2 > len(comp):
            return False
    return True


def min_fill_order(G: Graph, seed=0) -> tuple[int, list[int]]:
    """Min-fill elimination (random tie-break under seed): (width, order)."""
    verts = G.vertices
    index = {v: i for i, v in enumerate(verts)}
    edges = [(index[u], index[v]) for u, v in sorted(G.edges)]
    rng = as_seed(seed).rng()
    priorities = [rng.getrandbits(63) for _ in verts]
    width, order = impl.min_fill(len(verts), edges, priorities)
    return width, [verts[i] for i in order]


def tw_upper(G: Graph, seed=0) -> int:
    """Treewidth upper bound: largest bag met by min-fill elimination."""
    return min_fill_order(G, seed)[0]


def _bit_adjacency(G: Graph) -> tuple[list[int], dict[int, int]]:
    index = {v: i for i, v in enumerate(G.vertices)}
    adj = [0] * len(G.vertices)
    for u, v in G.edges:
        adj[index[u]] |= 1 << index[v]
        adj[index[v]] |= 1 << index[u]
    return adj, index


def tw_exact(G: Graph) -> int:
    """Exact treewidth by branch and bound over elimination orders.

    The state after eliminating a vertex set is order-independent, so
    results are memoized per set; branches that cannot beat the local
    best are cut. Guarded to 14 vertices.
    """
    n = len(G.vertices)
    if n > TW_EXACT_GUARD:
        raise GraphTooLarge(f"{n} vertices exceed the exact-treewidth guard")
    if n == 0:
        return 0
    adj, _ = _bit_adjacency(G)
    full = (1 << n) - 1
    memo: dict[int, int] = {}

    def elim_degree(v: int, eliminated: int) -> int:
        # degree of v in the fill-in graph: live vertices reachable from v
        # through eliminated ones
        seen = adj[v] | (1 << v)
        frontier = adj[v] & eliminated
        while frontier:
            u = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            new = adj[u] & ~seen
            seen |= new
            frontier |= new & eliminated
        return (seen & ~eliminated & ~(1 << v)).bit_count()

    def solve(eliminated: int) -> int:
        if eliminated == full:
            return 0
        cached = memo.get(eliminated)
        if cached is not None:
            return cached
        rest = full & ~eliminated
        degs = []
        m = rest
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            d = elim_degree(v, eliminated)
            if d <= 1:
                # eliminating a (near-)simplicial vertex first is optimal
                result = max(d, solve(eliminated | (1 << v)))
                memo[eliminated] = result
                return result
            degs.append((d, v))
        degs.sort()
        best = len(G.vertices)
        for d, v in degs:
            if d >= best:
                break
            sub = solve(eliminated | (1 << v))
            cand = d if d > sub else sub
            if cand < best:
                best = cand
        memo[eliminated] = best
        return best

    return solve(0)


def pw_exact_order(G: Graph) -> tuple[int, list[int]]:
    """Exact pathwidth (vertex separation) and a witness vertex order."""
    n = len(G.vertices)
    if n > PW_EXACT_GUARD:
        raise GraphTooLarge(f"{n} vertices exceed the exact-pathwidth guard")
    if n == 0:
        return 0, []
    adj, _ = _bit_adjacency(G)
    full = (1 << n) - 1
    big = n + 1
    dp = [0] * (full + 1)
    choice = [-1] * (full + 1)
    for s in range(1, full + 1):
        boundary = 0
        m = s
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            if adj[v] & ~s:
                boundary += 1
        best = big
        best_v = -1
        m = s
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            prev = dp[s & ~(1 << v)]
            if prev < best:
                best = prev
                best_v = v
        dp[s] = boundary if boundary > best else best
        choice[s] = best_v
    order_idx = []
    s = full
    while s:
        v = choice[s]
        order_idx.append(v)
        s &= ~(1 << v)
    order_idx.reverse()
    return dp[full], [G.vertices[i] for i in order_idx]


def pw_exact(G: Graph) -> int:
    return pw_exact_order(G)[0]


@dataclass(frozen=True)
class Matching:
    """Vertex-disjoint edge set, optionally across a bipartition."""

    edges: frozenset[tuple[int, int]]
    sides: Bipartition | None = None

    def __post_init__(self):
        canon = frozenset((u, v) if u < v else (v, u) for u, v in self.edges)
        object.__setattr__(self, "edges", canon)
        seen: set[int] = set()
        for u, v in canon:
            if u in seen or v in seen or u == v:
                raise ValueError("edges share an endpoint")
            seen.add(u)
            seen.add(v)
        if self.sides is not None:
            for u, v in canon:
                if {self.sides.side(u), self.sides.side(v)} != {1, 2}:
                    raise ValueError(f"edge ({u},{v}) does not cross the bipartition")

    def __len__(self) -> int:
        return len(self.edges)


def _cross_matching_size(adj_sets: dict[int, set[int]], left: list[int],
                         right_all: set[int]) -> dict:
    """Kuhn's augmenting paths; returns the right->left matched map."""
    match_r: dict[int, int] = {}

    def try_augment(u: int, visited: set[int]) -> bool:
        for w in sorted(adj_sets[u] & right_all):
            if w in visited:
                continue
            visited.add(w)
            if w not in match_r or try_augment(match_r[w], visited):
                match_r[w] = u
                return True
        return False

    for u in left:
        try_augment(u, set())
    return match_r


def max_cross_matching(G: Graph, v1, v2) -> Matching:
    """Maximum-cardinality matching between the disjoint sets v1 and v2."""
    s1, s2 = set(v1), set(v2)
    if s1 & s2:
        raise PartsOverlap(f"parts share {sorted(s1 & s2)}")
    vset = set(G.vertices)
    left = sorted(s1 & vset)
    right = s2 & vset
    match_r = _cross_matching_size(G.adj, left, right)
    edges = frozenset((u, w) if u < w else (w, u) for w, u in match_r.items())
    return Matching(edges, Bipartition(frozenset(s1), frozenset(s2)))


def _lex_min_max_matching(G: Graph, s1: set[int], s2: set[int]) -> Matching:
    """Lexicographically smallest maximum crossing matching (edge list order)."""
    base = len(max_cross_matching(G, s1, s2))
    candidates = sorted(
        (min(u, v), max(u, v))
        for u, v in G.edges
        if (u in s1 and v in s2) or (u in s2 and v in s1)
    )
    chosen: list[tuple[int, int]] = []
    banned: set[int] = set()
    for u, v in candidates:
        if u in banned or v in banned:
            continue
        left = sorted((s1 - banned - {u, v}))
        match_r = _cross_matching_size(G.adj, left, s2 - banned - {u, v})
        if len(chosen) + 1 + len(match_r) >= base:
            chosen.append((u, v))
            banned.add(u)
            banned.add(v)
            if len(chosen) == base:
                break
    assert len(chosen) == base
    return Matching(frozenset(chosen), Bipartition(frozenset(s1), frozenset(s2)))


def _balanced_cut_range(nv: int) -> range:
    lo = -(-nv // 3)
    hi = (2 * nv) // 3
    return range(lo, hi + 1)


def mmw_linear(G: Graph, order) -> int:
    """Max crossing-matching size over balanced prefix cuts of the order."""
    nv = len(G.vertices)
    if nv < 3:
        raise GraphTooSmall("need at least 3 vertices for a balanced cut")
    if sorted(order) != list(G.vertices):
        raise ValueError("order is not a permutation of the vertex set")
    best = 0
    for k in _balanced_cut_range(nv):
        prefix = set(order[:k])
        suffix = set(order[k:])
        best = max(best, len(max_cross_matching(G, prefix, suffix)))
    return best


@dataclass(frozen=True)
class BalancedCut:
    position: int
    matching: Matching


def best_balanced_cut(G: Graph, order) -> BalancedCut:
    """Argmax balanced cut with a deterministic witness.

    Ties on the matching size go to the smallest cut position, then to
    the lexicographically smallest maximum matching at that cut.
    """
    nv = len(G.vertices)
    if nv < 3:
        raise GraphTooSmall("need at least 3 vertices for a balanced cut")
    if sorted(order) != list(G.vertices):
        raise ValueError("order is not a permutation of the vertex set")
    best_k = None
    best_size = -1
    for k in _balanced_cut_range(nv):
        size = len(max_cross_matching(G, set(order[:k]), set(order[k:])))
        if size > best_size:
            best_size = size
            best_k = k
    matching = _lex_min_max_matching(G, set(order[:best_k]), set(order[best_k:]))
    return BalancedCut(best_k, matching)


def mmw_linear_min_over_orders(G: Graph) -> int:
    """min over all vertex orders of mmw_linear(G, order).

    Subset dynamic program over chains of balanced prefix sets; a chain
    of sets of every balanced size extends to an order and vice versa,
    so this equals exhaustive order search.
    """
    nv = len(G.vertices)
    if nv < 3:
        raise GraphTooSmall("need at least 3 vertices for a balanced cut")
    ks = _balanced_cut_range(nv)
    lo, hi = ks.start, ks.stop - 1
    verts = G.vertices

    from itertools import combinations

    def cut_cost(prefix: frozenset[int]) -> int:
        return len(max_cross_matching(G, prefix, set(verts) - prefix))

    level: dict[frozenset[int], int] = {
        frozenset(c): cut_cost(frozenset(c)) for c in combinations(verts, lo)
    }
    for _size in range(lo + 1, hi + 1):
        nxt: dict[frozenset[int], int] = {}
        for s, val in level.items():
            for v in verts:
                if v in s:
                    continue
                t = s | {v}
                prev = nxt.get(t)
                if prev is None or val < prev:
                    nxt[t] = val
        for t in nxt:
            nxt[t] = max(nxt[t], cut_cost(t))
        level = nxt
    return min(level.values())


def extract_matching_subformula(formula: Cnf, matching: Matching,
                                pi: Bipartition) -> Cnf:
    """One clause per matching edge, the earliest in clause order.

    The result is a pi-matching subformula whose primal graph is exactly
    the matching; clause order follows the source formula.
    """
    wanted = {}
    for u, v in matching.edges:
        if {pi.side(u), pi.side(v)} != {1, 2}:
            raise NotMatchingSubformula(f"edge ({u},{v}) does not cross pi")
        wanted[(u, v)] = None
    picked: list[tuple[int, tuple[int, int]]] = []
    for pos, (a, b) in enumerate(formula.clauses):
        key = (abs(a), abs(b)) if abs(a) < abs(b) else (abs(b), abs(a))
        if key in wanted and wanted[key] is None:
            wanted[key] = pos
    missing = [e for e, pos in wanted.items() if pos is None]
    if missing:
        raise EdgeWithoutClause(f"no clause for edges {sorted(missing)}")
    positions = sorted(wanted.values())
    return Cnf(formula.n, tuple(formula.clauses[p] for p in positions),
               allow_duplicates=False)
