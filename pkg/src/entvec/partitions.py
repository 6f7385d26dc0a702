"""Party-subset combinatorics.

Parties are 1-based integers internally and letters ``A, B, C, ...`` in text.
A subset ``r`` stands for the bipartition ``r | complement(r)``; a family
never holds both a subset and its complement.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Sequence

from .errors import EntvecError, ParseError

LETTERS = string.ascii_uppercase


def subset(parties: Iterable[int]) -> frozenset[int]:
    return frozenset(int(p) for p in parties)


def canonical(r: Iterable[int], n: int) -> frozenset[int]:
    """Representative of the bipartition r|r̄: the side containing party 1."""
    r = subset(r)
    return r if 1 in r else frozenset(range(1, n + 1)) - r


@dataclass(frozen=True)
class PartitionFamily:
    """An ordered set R of proper, nonempty party subsets of n parties."""

    n: int
    subsets: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.n < 2:
            raise EntvecError(f"a partition family needs n >= 2 parties, got {self.n}")
        full = frozenset(range(1, self.n + 1))
        seen = set()
        kept = []
        for r in self.subsets:
            r = subset(r)
            if not r or r == full:
                raise EntvecError(f"subset {format_subset(r)} is not a proper nonempty subset")
            if not r <= full:
                raise EntvecError(f"subset {sorted(r)} has parties outside 1..{self.n}")
            key = canonical(r, self.n)
            if key in seen:
                continue
            seen.add(key)
            kept.append(r)
        if not kept:
            raise EntvecError("partition family is empty")
        object.__setattr__(self, "subsets", tuple(kept))

    @classmethod
    def of(cls, n: int, subsets: Iterable[Iterable[int]]) -> PartitionFamily:
        return cls(n, tuple(subset(r) for r in subsets))

    def __len__(self) -> int:
        return len(self.subsets)

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.subsets)

    def labels(self) -> list[str]:
        return [format_bipartition(r, self.n) for r in self.subsets]

    def __str__(self):
        return ",".join(self.labels())


@lru_cache(maxsize=None)
def all_bipartitions(n: int) -> PartitionFamily:
    """R_total: every bipartition once, as the side containing party 1."""
    if n < 2:
        raise EntvecError(f"need n >= 2, got {n}")
    others = range(2, n + 1)
    subsets = []
    for size in range(0, n - 1):
        for extra in combinations(others, size):
            subsets.append(frozenset((1,) + extra))
    return PartitionFamily(n, tuple(subsets))


@lru_cache(maxsize=None)
def subsets_of_size(n: int, h: int) -> PartitionFamily:
    """R_h: all subsets of exactly h parties (complements merged for h = n/2)."""
    if not 1 <= h <= n - 1:
        raise EntvecError(f"subset size must lie in 1..{n - 1}, got {h}")
    return PartitionFamily(n, tuple(frozenset(c) for c in combinations(range(1, n + 1), h)))


def gamma(n: int, k: int) -> int:
    """Index of the full-vector entry that vanishes for (k+1)-separable states."""
    if not 1 <= k <= n - 1:
        raise EntvecError(f"k must lie in 1..{n - 1}, got {k}")
    return 2 ** (n - 1) - 2 ** k + 1


def depth_levels(n: int) -> int:
    """Number of valid levels m for depth_family, i.e. floor(n/2)."""
    return n // 2


@lru_cache(maxsize=None)
def depth_family(n: int, m: int) -> PartitionFamily:
    """G_m = R_{ceil(n/2)} ∪ ... ∪ R_{ceil(n/2)+m}, each bipartition once."""
    if n < 2 or not 0 <= m <= n // 2 - 1:
        raise EntvecError(f"level m must lie in 0..{n // 2 - 1} for n={n}, got {m}")
    start = (n + 1) // 2
    subsets = []
    for h in range(start, start + m + 1):
        subsets.extend(frozenset(c) for c in combinations(range(1, n + 1), h))
    return PartitionFamily(n, tuple(subsets))


def depth_family_size(n: int, m: int) -> int:
    """Closed-form |G_m|."""
    if n % 2 == 0:
        return comb(n, n // 2) // 2 + sum(comb(n, n // 2 + i) for i in range(1, m + 1))
    return sum(comb(n, (n + 1) // 2 + i) for i in range(0, m + 1))


def swap_pair(eta: Sequence[int], eta2: Sequence[int], r: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Exchange the digits on the (1-based) parties in r between two multi-indices."""
    if len(eta) != len(eta2):
        raise EntvecError(f"multi-indices have different lengths: {len(eta)} vs {len(eta2)}")
    a, b = list(eta), list(eta2)
    for p in r:
        if not 1 <= p <= len(a):
            raise EntvecError(f"party {p} out of range for {len(a)} parties")
        a[p - 1], b[p - 1] = b[p - 1], a[p - 1]
    return tuple(a), tuple(b)


def format_subset(r: Iterable[int]) -> str:
    return "".join(LETTERS[p - 1] for p in sorted(r))


def format_bipartition(r: Iterable[int], n: int) -> str:
    r = subset(r)
    return f"{format_subset(r)}|{format_subset(frozenset(range(1, n + 1)) - r)}"


def parse_subset(text: str, n: int) -> frozenset[int]:
    """Parse ``"AB"`` or ``"A|BC"`` (the left side is the subset).

    When both sides are given they must partition the n parties.
    """
    sides = text.strip().upper().split("|")
    if len(sides) > 2 or not sides[0]:
        raise ParseError(f"bad subset syntax {text!r}")
    parsed = []
    for side in sides:
        parties = []
        for ch in side.strip():
            idx = LETTERS.find(ch)
            if idx < 0 or idx >= n:
                raise ParseError(f"unknown party {ch!r} in {text!r} for {n} parties")
            parties.append(idx + 1)
        if len(set(parties)) != len(parties):
            raise ParseError(f"repeated party in {text!r}")
        parsed.append(frozenset(parties))
    if len(parsed) == 2:
        left, right = parsed
        if left & right or (left | right) != frozenset(range(1, n + 1)) or not right:
            raise ParseError(f"{text!r} is not a bipartition of {n} parties")
    return parsed[0]


def parse_family(text: str, n: int) -> PartitionFamily:
    """Parse a comma-separated family such as ``"A|BC,B|AC"``."""
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise ParseError("empty partition family")
    try:
        return PartitionFamily(n, tuple(parse_subset(t, n) for t in items))
    except ParseError:
        raise
    except EntvecError as exc:
        raise ParseError(str(exc)) from exc


def single_parties(n: int) -> PartitionFamily:
    return subsets_of_size(n, 1)
