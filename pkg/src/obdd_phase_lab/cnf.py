"""2-CNF data model, DIMACS I/O, matching-formula recognition.

Literals are DIMACS-style signed integers: ``+v`` for the variable,
``-v`` for its negation. A clause is a pair of literals over distinct
variables, stored in canonical order (sorted by variable index, negative
polarity before positive), so clause equality is structural.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from obdd_phase_lab.errors import (
    NotAMatchingFormula,
    ParseError,
    PartsOverlap,
    TautologyError,
    WidthError,
)

Clause = tuple[int, int]


def lit_var(lit: int) -> int:
    return abs(lit)


def lit_positive(lit: int) -> bool:
    return lit > 0


def clause(a: int, b: int) -> Clause:
    """Canonical clause from two literals.

    Rejects repeated and opposite literals; sorts by (variable, polarity)
    with negative before positive.
    """
    if a == 0 or b == 0:
        raise WidthError("literal 0 is not allowed")
    if abs(a) == abs(b):
        if a == -b:
            raise TautologyError(f"opposite literals {a} {b}")
        raise WidthError(f"repeated literal {a}")
    if (abs(a), a > 0) > (abs(b), b > 0):
        a, b = b, a
    return (a, b)


@dataclass(frozen=True)
class Cnf:
    """2-CNF over ambient variables x1..xn with a significant clause order.

    ``allow_duplicates`` distinguishes the with-replacement clause model
    (duplicates permitted) from the distinct-clause model.
    """

    n: int
    clauses: tuple[Clause, ...]
    allow_duplicates: bool = True

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        for c in self.clauses:
            if len(c) != 2:
                raise WidthError(f"clause {c} does not have width 2")
            if not (1 <= abs(c[0]) <= self.n and 1 <= abs(c[1]) <= self.n):
                raise ParseError(f"clause {c} uses a variable beyond n={self.n}")
            if c != clause(*c):
                raise ParseError(f"clause {c} is not canonical")
        if not self.allow_duplicates and len(set(self.clauses)) != len(self.clauses):
            raise ParseError("duplicate clauses with allow_duplicates=False")

    def __len__(self) -> int:
        return len(self.clauses)

    def variables(self) -> frozenset[int]:
        return frozenset(abs(l) for c in self.clauses for l in c)

    def is_monotone(self) -> bool:
        return all(a > 0 and b > 0 for a, b in self.clauses)


def from_literal_pairs(n: int, pairs, allow_duplicates: bool = True) -> Cnf:
    return Cnf(n, tuple(clause(a, b) for a, b in pairs), allow_duplicates)


def evaluate_clause(c: Clause, assignment: dict[int, bool]) -> bool:
    a, b = c
    return assignment[abs(a)] == (a > 0) or assignment[abs(b)] == (b > 0)


def evaluate_cnf(formula: Cnf, assignment: dict[int, bool]) -> bool:
    """Truth of the formula under an assignment covering all its variables."""
    return all(evaluate_clause(c, assignment) for c in formula.clauses)


def is_simple(formula: Cnf) -> bool:
    """True iff no two clauses are identical."""
    return len(set(formula.clauses)) == len(formula.clauses)


def count_non_unique(formula: Cnf) -> int:
    """Number of clause positions whose clause also occurs elsewhere."""
    counts: dict[Clause, int] = {}
    for c in formula.clauses:
        counts[c] = counts.get(c, 0) + 1
    return sum(k for k in counts.values() if k >= 2)


@dataclass(frozen=True)
class Bipartition:
    part1: frozenset[int]
    part2: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "part1", frozenset(self.part1))
        object.__setattr__(self, "part2", frozenset(self.part2))
        if self.part1 & self.part2:
            raise PartsOverlap(f"parts share {sorted(self.part1 & self.part2)}")

    def side(self, var: int) -> int:
        """1 or 2, or 0 when the variable is in neither part."""
        if var in self.part1:
            return 1
        if var in self.part2:
            return 2
        return 0


def is_matching_formula(formula: Cnf, pi: Bipartition | None = None) -> bool:
    """True iff clauses are pairwise variable-disjoint (and cross pi, if given)."""
    seen: set[int] = set()
    for a, b in formula.clauses:
        va, vb = abs(a), abs(b)
        if va in seen or vb in seen:
            return False
        seen.add(va)
        seen.add(vb)
        if pi is not None:
            if {pi.side(va), pi.side(vb)} != {1, 2}:
                return False
    return True


def count_matching_solutions(formula: Cnf) -> int:
    """3**k satisfying assignments of a k-clause matching formula."""
    if not is_matching_formula(formula):
        raise NotAMatchingFormula("clauses share variables")
    return 3 ** len(formula.clauses)


def parse_dimacs(text: str) -> Cnf:
    """Strict DIMACS CNF reader for width-2 clauses.

    Requires a ``p cnf n m`` header, exactly two nonzero literals per
    clause line, a terminating 0, and exactly m clause lines. Comment
    lines (``c ...``) are permitted before and between clauses.
    """
    n = None
    m = None
    clauses: list[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("c"):
            continue
        if s.startswith("p"):
            if n is not None:
                raise ParseError("duplicate header", lineno)
            parts = s.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise ParseError(f"malformed header {s!r}", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"malformed header {s!r}", lineno) from None
            if n < 0 or m < 0:
                raise ParseError("negative header counts", lineno)
            continue
        if n is None:
            raise ParseError("clause before header", lineno)
        try:
            lits = [int(tok) for tok in s.split()]
        except ValueError:
            raise ParseError(f"bad token in {s!r}", lineno) from None
        if not lits or lits[-1] != 0:
            raise ParseError("clause line not terminated by 0", lineno)
        lits = lits[:-1]
        if len(lits) != 2 or 0 in lits:
            raise WidthError(f"expected exactly 2 literals, got {len(lits)}", lineno)
        a, b = lits
        if abs(a) > n or abs(b) > n:
            raise ParseError(f"variable beyond header n={n}", lineno)
        try:
            clauses.append(clause(a, b))
        except TautologyError:
            raise TautologyError(f"opposite literals {a} {b}", lineno) from None
        except WidthError:
            raise WidthError(f"repeated literal {a}", lineno) from None
    if n is None:
        raise ParseError("missing header", 1)
    if len(clauses) != m:
        raise ParseError(f"header promises {m} clauses, found {len(clauses)}")
    return Cnf(n, tuple(clauses))


def write_dimacs(formula: Cnf) -> str:
    lines = [f"p cnf {formula.n} {len(formula.clauses)}"]
    for a, b in formula.clauses:
        lines.append(f"{a} {b} 0")
    return "\n".join(lines) + "\n"
