"""Reduced ordered BDD construction and size accounting.

Diagrams are immutable after construction: parallel tuples (var, low,
high) in a canonical numbering (terminals first, then nodes from the
deepest level up, sorted by renumbered children), so two compilations
of the same function under the same order produce identical objects.
Size counts every reachable node including sinks; an unsatisfiable
formula compiles to the single 0-sink, size 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from obdd_phase_lab._kernels import impl
from obdd_phase_lab.cnf import Cnf
from obdd_phase_lab.errors import (
    CapacityExceeded,
    EnumerationTooLarge,
    GraphTooLarge,
    PartialAssignment,
    TooManyVariables,
    UnknownStrategy,
)
from obdd_phase_lab.graphs import min_fill_order, primal_graph, pw_exact_order
from obdd_phase_lab.sat import ExtensionOracle, lit_index

DEFAULT_CAPACITY = 1 << 26
SEMANTIC_WIDTH_GUARD = 28
EXACT_MIN_GUARD = 10


@dataclass(frozen=True)
class Obdd:
    """Reduced ordered BDD. Terminal nodes have var == 0 and their value
    in the low field; internal nodes store the variable index."""

    order: tuple[int, ...]
    n: int
    var: tuple[int, ...]
    low: tuple[int, ...]
    high: tuple[int, ...]
    root: int

    @property
    def size(self) -> int:
        return len(self.var)

    def is_terminal(self, x: int) -> bool:
        return self.var[x] == 0

    def level_of(self, x: int) -> int:
        if self.var[x] == 0:
            return self.n
        return self._pos[self.var[x]]  # type: ignore[attr-defined]

    def __post_init__(self):
        object.__setattr__(
            self, "_pos", {v: i for i, v in enumerate(self.order)}
        )

    def evaluate(self, alpha: dict[int, bool]) -> bool:
        if len(alpha) != self.n or any(v not in alpha for v in self.order):
            raise PartialAssignment("evaluate needs a total assignment on 1..n")
        x = self.root
        while self.var[x] != 0:
            x = self.high[x] if alpha[self.var[x]] else self.low[x]
        return bool(self.low[x])

    def model_count(self) -> int:
        """Satisfying assignments over all ambient 2**n assignments."""
        counts = [0] * len(self.var)
        for x in range(len(self.var)):
            if self.var[x] == 0:
                counts[x] = self.low[x]
            else:
                p = self.level_of(x)
                lo, hi = self.low[x], self.high[x]
                counts[x] = counts[lo] * (1 << (self.level_of(lo) - p - 1)) + \
                    counts[hi] * (1 << (self.level_of(hi) - p - 1))
        return counts[self.root] * (1 << self.level_of(self.root))

    def width_per_level(self) -> list[int]:
        widths = [0] * self.n
        for x in range(len(self.var)):
            if self.var[x] != 0:
                widths[self.level_of(x)] += 1
        return widths

    def cut_nodes(self, k: int) -> int:
        """Distinct nodes reached right after the first k order positions."""
        cut: set[int] = set()
        if self.level_of(self.root) >= k:
            cut.add(self.root)
        for x in range(len(self.var)):
            if self.var[x] != 0 and self.level_of(x) < k:
                for child in (self.low[x], self.high[x]):
                    if self.level_of(child) >= k:
                        cut.add(child)
        return len(cut)

    def dump_text(self) -> str:
        """One node per line: id, var, low, high (terminals: var 0,
        low = sink value, high = -1). Root on the first line header."""
        lines = [f"root {self.root} n {self.n} order {' '.join(map(str, self.order))}"]
        for x in range(len(self.var)):
            lines.append(f"{x} {self.var[x]} {self.low[x]} {self.high[x]}")
        return "\n".join(lines) + "\n"


def identity_order(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def _check_order(formula: Cnf, order) -> tuple[int, ...]:
    order = tuple(order)
    if sorted(order) != list(range(1, formula.n + 1)):
        raise ValueError("order must be a permutation of 1..n")
    return order


def _canonicalize(order, level, low, high, root, n) -> Obdd:
    reachable: set[int] = set()
    stack = [root]
    while stack:
        x = stack.pop()
        if x in reachable:
            continue
        reachable.add(x)
        if level[x] < n:
            stack.append(low[x])
            stack.append(high[x])
    by_level: dict[int, list[int]] = {}
    for x in reachable:
        if level[x] < n:
            by_level.setdefault(level[x], []).append(x)
    new_id: dict[int, int] = {}
    nid = 0
    for t in (0, 1):
        if t in reachable:
            new_id[t] = nid
            nid += 1
    for lev in range(n - 1, -1, -1):
        members = by_level.get(lev)
        if not members:
            continue
        members.sort(key=lambda x: (new_id[low[x]], new_id[high[x]]))
        for x in members:
            new_id[x] = nid
            nid += 1
    var_out = [0] * nid
    low_out = [0] * nid
    high_out = [0] * nid
    for old, new in new_id.items():
        if level[old] >= n:
            var_out[new] = 0
            low_out[new] = old  # terminal value == raw sink id
            high_out[new] = -1
        else:
            var_out[new] = order[level[old]]
            low_out[new] = new_id[low[old]]
            high_out[new] = new_id[high[old]]
    return Obdd(tuple(order), n, tuple(var_out), tuple(low_out),
                tuple(high_out), new_id[root])


def compile_cnf(formula: Cnf, order, capacity: int = DEFAULT_CAPACITY) -> Obdd:
    """Canonical reduced OBDD of the formula under the given order.

    Raises CapacityExceeded (recoverable, with the peak node count) when
    the working node table would outgrow ``capacity``.
    """
    order = _check_order(formula, order)
    n = formula.n
    pos = {v: i for i, v in enumerate(order)}
    prepared = []
    for a, b in formula.clauses:
        la, pa = pos[abs(a)], 1 if a > 0 else 0
        lb, pb = pos[abs(b)], 1 if b > 0 else 0
        if la > lb:
            la, pa, lb, pb = lb, pb, la, pa
        prepared.append((la, pa, lb, pb))
    prepared.sort()
    level, low, high, root = impl.compile_clauses(n, prepared, capacity)
    return _canonicalize(order, level, low, high, root, n)


def evaluate(B: Obdd, alpha: dict[int, bool]) -> bool:
    return B.evaluate(alpha)


def model_count(B: Obdd) -> int:
    return B.model_count()


def _residual_signature(oracle: ExtensionOracle, free_vars, beta_rows) -> object:
    """Semantic fingerprint of F restricted by the units in beta_rows.

    Two restrictions of the same 2-CNF agree as functions over the free
    variables iff they force the same units and the same binary
    implicates there, so (units, pairs) is a sound canonical form.
    """
    reach, even = oracle.reach_ints, oracle.even_mask
    base = 0
    for r in beta_rows:
        base |= reach[r]
    if base & (base >> 1) & even:
        return "UNSAT"
    units = []
    free = []
    for v in free_vars:
        pos_conflict = ((base | reach[lit_index(v)]) &
                        ((base | reach[lit_index(v)]) >> 1) & even) != 0
        neg_conflict = ((base | reach[lit_index(-v)]) &
                        ((base | reach[lit_index(-v)]) >> 1) & even) != 0
        if pos_conflict:
            units.append(-v)
        elif neg_conflict:
            units.append(v)
        else:
            free.append(v)
    pairs = []
    for i, x in enumerate(free):
        for y in free[i + 1:]:
            for sx in (x, -x):
                for sy in (y, -y):
                    acc = base | reach[lit_index(-sx)] | reach[lit_index(-sy)]
                    if acc & (acc >> 1) & even:
                        pairs.append((sx, sy))
    return (frozenset(units), frozenset(pairs))


def semantic_width(formula: Cnf, order, k: int,
                   capacity: int = DEFAULT_CAPACITY,
                   diagram: Obdd | None = None) -> int:
    """Number of distinct residual functions over prefix assignments.

    Computed from the compiled diagram when available (the k-th layer
    cut of the canonical OBDD); falls back to enumerating the 2**k
    prefixes with a semantic fingerprint when compilation blows up.
    """
    order = _check_order(formula, order)
    if not 0 <= k <= formula.n:
        raise ValueError(f"cut {k} outside 0..{formula.n}")
    if diagram is not None:
        return diagram.cut_nodes(k)
    try:
        return compile_cnf(formula, order, capacity).cut_nodes(k)
    except CapacityExceeded:
        pass
    if k > SEMANTIC_WIDTH_GUARD:
        raise EnumerationTooLarge(f"cut {k} exceeds the enumeration guard")
    oracle = ExtensionOracle(formula)
    if not oracle.satisfiable:
        return 1
    prefix = order[:k]
    free_vars = order[k:]
    signatures: set[object] = set()
    for bits in range(1 << k):
        rows = [lit_index(v if (bits >> i) & 1 else -v)
                for i, v in enumerate(prefix)]
        signatures.add(_residual_signature(oracle, free_vars, rows))
    return len(signatures)


def _bfs_order(formula: Cnf) -> tuple[int, ...]:
    G = primal_graph(formula, include_isolated=True)
    seen: set[int] = set()
    out: list[int] = []
    for start in G.vertices:
        if start in seen:
            continue
        queue = [start]
        seen.add(start)
        qi = 0
        while qi < len(queue):
            v = queue[qi]
            qi += 1
            out.append(v)
            for w in sorted(G.adj[v]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return tuple(out)


def heuristic_order(formula: Cnf, strategy: str, seed=0,
                    capacity: int = DEFAULT_CAPACITY) -> tuple[int, ...]:
    """Variable-order heuristics: minfill, bfs, or minfill followed by
    sifting (which never yields a larger compiled size than its base)."""
    if strategy == "minfill":
        return tuple(min_fill_order(primal_graph(formula, True), seed)[1])
    if strategy == "bfs":
        return _bfs_order(formula)
    if strategy == "sifting":
        from obdd_phase_lab.sifting import sift_order

        base = tuple(min_fill_order(primal_graph(formula, True), seed)[1])
        try:
            diagram = compile_cnf(formula, base, capacity)
        except CapacityExceeded:
            return base
        return sift_order(diagram)
    raise UnknownStrategy(f"strategy {strategy!r} not in minfill/bfs/sifting")


def _var_masks(n: int):
    size = 1 << n
    full = (1 << size) - 1
    masks = {}
    for v in range(1, n + 1):
        s = 1 << (v - 1)
        block = ((1 << s) - 1) << s
        period = 2 * s
        reps = size // period
        rep_pattern = ((1 << (period * reps)) - 1) // ((1 << period) - 1)
        masks[v] = (block * rep_pattern, s)
    return full, masks


def exact_min_size(formula: Cnf) -> tuple[int, tuple[int, ...]]:
    """True minimum OBDD size over all n! orders, with a witness order.

    Subset dynamic program on truth tables: the set of distinct
    cofactors after fixing a prefix depends only on the prefix *set*,
    and the nodes labelled v given prefix S are the distinct cofactors
    on S that depend on v. This prunes order enumeration by shared
    prefixes without affecting correctness.
    """
    n = formula.n
    if n > EXACT_MIN_GUARD:
        raise TooManyVariables(f"{n} > {EXACT_MIN_GUARD}")
    full, masks = _var_masks(n)
    table = full
    for a, b in formula.clauses:
        ma, sa = masks[abs(a)]
        mb, sb = masks[abs(b)]
        ta = ma if a > 0 else full ^ ma
        tb = mb if b > 0 else full ^ mb
        table &= ta | tb
    if table == 0 or table == full:
        return 1, identity_order(n)

    def split(g: int, v: int) -> tuple[int, int]:
        m1, s = masks[v]
        m0 = full ^ m1
        x = g & m0
        y = g & m1
        return x | (x << s), y | (y >> s)

    fullmask = (1 << n) - 1
    dp = {0: 0}
    parent: dict[int, int] = {}
    cof = {0: (table,)}
    for _layer in range(n):
        ndp: dict[int, int] = {}
        ncof: dict[int, tuple] = {}
        nparent: dict[int, int] = {}
        for mask, cost_so_far in dp.items():
            tables = cof[mask]
            for v in range(1, n + 1):
                bit = 1 << (v - 1)
                if mask & bit:
                    continue
                nodes_here = 0
                children = set()
                for g in tables:
                    g0, g1 = split(g, v)
                    if g0 != g1:
                        nodes_here += 1
                    children.add(g0)
                    children.add(g1)
                nmask = mask | bit
                cand = cost_so_far + nodes_here
                old = ndp.get(nmask)
                if old is None or cand < old:
                    ndp[nmask] = cand
                    nparent[nmask] = v
                    if nmask not in ncof:
                        ncof[nmask] = tuple(sorted(children))
                elif nmask not in ncof:
                    ncof[nmask] = tuple(sorted(children))
        dp = ndp
        cof = ncof
        parent.update(nparent)
    internal = dp[fullmask]
    order_rev = []
    mask = fullmask
    while mask:
        v = parent[mask]
        order_rev.append(v)
        mask &= ~(1 << (v - 1))
    order = tuple(reversed(order_rev))
    return internal + 2, order


@dataclass(frozen=True)
class PathwidthBoundReport:
    pw: int
    size: int
    bound: int


def pathwidth_upper_bound_check(formula: Cnf,
                                capacity: int = DEFAULT_CAPACITY) -> PathwidthBoundReport:
    """Compile along an optimal vertex-separation order and check the
    n * 2**(pw+1) + 2 size bound."""
    n = formula.n
    if n > 12:
        raise GraphTooLarge(f"{n} > 12 needs the exact-pathwidth oracle")
    G = primal_graph(formula, include_isolated=True)
    pw, order = pw_exact_order(G)
    diagram = compile_cnf(formula, tuple(order), capacity)
    bound = n * (1 << (pw + 1)) + 2
    report = PathwidthBoundReport(pw, diagram.size, bound)
    assert diagram.size <= bound, f"size {diagram.size} above bound {bound}"
    return report


