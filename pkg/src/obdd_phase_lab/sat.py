"""2-SAT decision, extension queries, and the exact theta fraction.

Satisfiability goes through the implication graph: clause (a or b)
contributes the edges not-a -> b and not-b -> a, a unit u contributes
not-u -> u, and the formula is satisfiable iff no variable shares a
strongly connected component with its negation.

Extension queries "does alpha extend to a model of F" are answered from
per-literal reachability closures: for satisfiable F, F and alpha is
satisfiable iff the union of the closures of alpha's forced literals
contains no complementary pair. (Forced literals propagate exactly along
implication edges; a clause with both literals falsified would force the
complement of one of them into the union.)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from obdd_phase_lab._kernels import impl
from obdd_phase_lab.cnf import Cnf, evaluate_cnf, is_matching_formula
from obdd_phase_lab.errors import EnumerationTooLarge

THETA_VAR_GUARD = 30
THETA_MATCHING_GUARD = 20


def lit_index(lit: int) -> int:
    """Row index of a literal: even for positive, odd for negative."""
    return 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)


def _implication_adj(formula: Cnf, nvars: int, unit_lits=()) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(2 * nvars)]
    for a, b in formula.clauses:
        adj[lit_index(-a)].append(lit_index(b))
        adj[lit_index(-b)].append(lit_index(a))
    for u in unit_lits:
        adj[lit_index(-u)].append(lit_index(u))
    return adj


def _tarjan(nv: int, adj: list[list[int]]) -> tuple[int, list[int]]:
    """Iterative Tarjan; component ids in reverse topological order."""
    index = [-1] * nv
    lowlink = [0] * nv
    on_stack = bytearray(nv)
    comp = [-1] * nv
    stack: list[int] = []
    ncomp = 0
    counter = 0
    for root in range(nv):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = 1
            descend = False
            edges = adj[v]
            for i in range(pi, len(edges)):
                w = edges[i]
                if index[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    descend = True
                    break
                if on_stack[w] and index[w] < lowlink[v]:
                    lowlink[v] = index[w]
            if descend:
                continue
            if lowlink[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = 0
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            work.pop()
            if work:
                u, _ = work[-1]
                if lowlink[v] < lowlink[u]:
                    lowlink[u] = lowlink[v]
    return ncomp, comp


@dataclass(frozen=True)
class Solve2SatResult:
    satisfiable: bool
    witness: dict[int, bool] | None

    def __bool__(self) -> bool:
        return self.satisfiable


def solve_2sat(formula: Cnf, units: dict[int, bool] | None = None) -> Solve2SatResult:
    """Decide F and units; on success return a verified total witness."""
    n = formula.n
    unit_lits = []
    if units:
        for var, val in units.items():
            if not 1 <= var <= n:
                raise ValueError(f"unit variable {var} beyond n={n}")
            unit_lits.append(var if val else -var)
    adj = _implication_adj(formula, n, unit_lits)
    _, comp = _tarjan(2 * n, adj)
    witness: dict[int, bool] = {}
    for v in range(1, n + 1):
        cp, cn = comp[lit_index(v)], comp[lit_index(-v)]
        if cp == cn:
            return Solve2SatResult(False, None)
        witness[v] = cp < cn
    assert evaluate_cnf(formula, witness)
    assert all(witness[var] == val for var, val in (units or {}).items())
    return Solve2SatResult(True, witness)


def extends_to_sat(formula: Cnf, alpha: dict[int, bool]) -> bool:
    """True iff alpha has an extension satisfying F (alias of solve_2sat)."""
    return solve_2sat(formula, alpha).satisfiable


class ExtensionOracle:
    """Reusable extension checker for one formula and many assignments.

    Precomputes per-literal implication closures (as literal bitsets)
    once, so each query is a handful of word operations in the selected
    kernel backend.
    """

    def __init__(self, formula: Cnf, nvars: int | None = None):
        self.formula = formula
        self.n = max(formula.n, nvars or 0)
        adj = _implication_adj(formula, self.n)
        nv = 2 * self.n
        ncomp, comp = _tarjan(nv, adj)
        self.satisfiable = all(
            comp[lit_index(v)] != comp[lit_index(-v)] for v in range(1, formula.n + 1)
        )
        self._prepared = None
        if not self.satisfiable:
            return
        comp_bits = [0] * ncomp
        for node in range(nv):
            comp_bits[comp[node]] |= 1 << node
        comp_succ: list[set[int]] = [set() for _ in range(ncomp)]
        for u in range(nv):
            cu = comp[u]
            for w in adj[u]:
                if comp[w] != cu:
                    comp_succ[cu].add(comp[w])
        # Tarjan ids are reverse-topological: every edge goes to a
        # smaller id, so ascending order sees successors first.
        comp_reach = [0] * ncomp
        for c in range(ncomp):
            r = comp_bits[c]
            for d in comp_succ[c]:
                r |= comp_reach[d]
            comp_reach[c] = r
        reach = [comp_reach[comp[node]] for node in range(nv)]
        self._prepared = impl.prepare_reach(reach, self.n)

    def extendable_rows(self, rows) -> bool:
        if not self.satisfiable:
            return False
        return impl.extendable_mask(self._prepared, [list(rows)])[0]

    def extendable(self, alpha: dict[int, bool]) -> bool:
        return self.extendable_rows(
            lit_index(v if val else -v) for v, val in alpha.items()
        )

    def extendable_many(self, rows_matrix) -> list[bool]:
        if not self.satisfiable:
            return [False] * len(rows_matrix)
        return list(impl.extendable_mask(self._prepared, rows_matrix))

    def count_matching(self, oriented_clauses) -> int:
        """Extendable solutions of a matching formula given as clauses.

        Solutions are enumerated per clause in the triple order
        (01, 10, 11) on the clause's (first, second) literal.
        """
        if not self.satisfiable:
            return 0
        options = []
        for a, b in oriented_clauses:
            options.append(
                (
                    (lit_index(-a), lit_index(b)),
                    (lit_index(a), lit_index(-b)),
                    (lit_index(a), lit_index(b)),
                )
            )
        return impl.count_matching_extendable(self._prepared, options)


def _sat_assignment_rows(H: Cnf) -> np.ndarray:
    """Row-index matrix of all satisfying assignments of H over var(H)."""
    vars_h = sorted(H.variables())
    nv = len(vars_h)
    pos = {v: j for j, v in enumerate(vars_h)}
    idx = np.arange(1 << nv, dtype=np.uint64)
    mask = np.ones(1 << nv, dtype=bool)
    for a, b in H.clauses:
        ba = ((idx >> np.uint64(pos[abs(a)])) & np.uint64(1)).astype(bool)
        bb = ((idx >> np.uint64(pos[abs(b)])) & np.uint64(1)).astype(bool)
        mask &= (ba == (a > 0)) | (bb == (b > 0))
    sat_idx = idx[mask]
    rows = np.empty((len(sat_idx), nv), dtype=np.int32)
    for j, v in enumerate(vars_h):
        bit = ((sat_idx >> np.uint64(j)) & np.uint64(1)).astype(np.int32)
        rows[:, j] = 2 * (v - 1) + (1 - bit)
    return rows


def theta(H: Cnf, F: Cnf, oracle: ExtensionOracle | None = None) -> Fraction:
    """Exact fraction of sat(H) assignments extendable to a model of F.

    1 by convention when H is unsatisfiable. Assignments range over
    var(H); the extension is over the ambient variables of F.
    """
    if oracle is None:
        oracle = ExtensionOracle(F, nvars=max(F.n, H.n))
    if is_matching_formula(H):
        h = len(H.clauses)
        if h > THETA_MATCHING_GUARD:
            raise EnumerationTooLarge(f"matching formula with {h} > "
                                      f"{THETA_MATCHING_GUARD} clauses")
        if h == 0:
            return Fraction(1 if oracle.satisfiable else 0)
        return Fraction(oracle.count_matching(H.clauses), 3**h)
    if len(H.variables()) > THETA_VAR_GUARD:
        raise EnumerationTooLarge(
            f"{len(H.variables())} variables exceed the guard {THETA_VAR_GUARD}"
        )
    rows = _sat_assignment_rows(H)
    if len(rows) == 0:
        return Fraction(1)
    if not oracle.satisfiable:
        return Fraction(0)
    good = sum(oracle.extendable_many(rows))
    return Fraction(good, len(rows))
