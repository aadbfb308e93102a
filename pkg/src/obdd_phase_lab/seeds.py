"""Deterministic seed derivation and low-level sampling primitives.

All randomness in the package flows through ``Seed``: the same
(master, stream_id) pair reproduces the same draws on any platform and
under any degree of trial parallelism. Sub-streams are derived with a
keyed hash, never by sharing generator state.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

MASK64 = (1 << 64) - 1


def _derive(*parts) -> int:
    blob = repr(parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(blob, digest_size=8).digest(), "big")


@dataclass(frozen=True)
class Seed:
    """Splittable 64-bit seed (master stream plus derived stream id)."""

    master: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "master", self.master & MASK64)
        object.__setattr__(self, "stream_id", self.stream_id & MASK64)

    def child(self, *parts) -> "Seed":
        """Derive an independent sub-stream from hashable labels."""
        return Seed(self.master, _derive(self.stream_id, *parts))

    def rng(self) -> random.Random:
        return random.Random(_derive("rng", self.master, self.stream_id))


def as_seed(seed) -> Seed:
    if isinstance(seed, Seed):
        return seed
    return Seed(int(seed))


def floyd_sample(rng: random.Random, population: int, k: int) -> list[int]:
    """k distinct integers from range(population), uniform over k-subsets.

    Robert Floyd's algorithm: O(k) memory, exactly k randrange calls.
    The returned insertion order is *not* uniform over permutations;
    callers that need exchangeability must shuffle.
    """
    if not 0 <= k <= population:
        raise ValueError(f"cannot sample {k} from {population}")
    chosen: dict[int, None] = {}
    for j in range(population - k, population):
        t = rng.randrange(j + 1)
        chosen[t if t not in chosen else j] = None
    return list(chosen)


def fisher_yates(rng: random.Random, items: list) -> None:
    """In-place uniform shuffle; one randrange call per position."""
    for i in range(len(items) - 1, 0, -1):
        j = rng.randrange(i + 1)
        items[i], items[j] = items[j], items[i]
