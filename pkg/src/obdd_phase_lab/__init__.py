"""Random 2-CNF to OBDD compilation lab.

Compiles 2-CNF formulas to reduced ordered binary decision diagrams,
measures graph width parameters of the primal graph, extracts fooling-set
lower-bound certificates, and runs seed-deterministic experiment sweeps
over the clause-density parameter.
"""

from obdd_phase_lab.cnf import Bipartition, Cnf, clause, parse_dimacs, write_dimacs
from obdd_phase_lab.seeds import Seed

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "Cnf",
    "Seed",
    "clause",
    "parse_dimacs",
    "write_dimacs",
    "__version__",
]
