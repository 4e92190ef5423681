"""Circular weak orders, dihedral canonical forms and reduced permutation tables.

A configuration of ``m`` labeled points on one circle is stored as a rank
vector: ``ranks[i]`` is the position of point ``i`` among the distinct circle
values, read off after cutting the circle just below the smallest value.
Ties share a rank. Only the cyclic order matters, so rotating the circle
shifts every rank cyclically and reversing orientation mirrors them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Iterator, Sequence

import numpy as np

RankVector = tuple[int, ...]
XPattern = tuple[int, ...]

MAX_WEAK_ORDER_POINTS = 11


class SizeLimitError(ValueError):
    """Requested enumeration is outside the supported size range."""


class CapabilityError(ValueError):
    """No reduced table exists for the requested factor count."""


def is_rank_vector(ranks: Sequence[int]) -> bool:
    if len(ranks) == 0:
        return False
    k = max(ranks)
    return min(ranks) >= 1 and set(ranks) == set(range(1, k + 1))


def check_rank_vector(ranks: Sequence[int]) -> RankVector:
    rv = tuple(int(r) for r in ranks)
    if not is_rank_vector(rv):
        raise ValueError(f"not a gap-free rank vector: {rv}")
    return rv


def densify(values: Sequence) -> RankVector:
    """Rank arbitrary comparable values, ties sharing a rank, starting at 1."""
    distinct = sorted(set(values))
    index = {v: i + 1 for i, v in enumerate(distinct)}
    return tuple(index[v] for v in values)


def block_count(rv: Sequence[int]) -> int:
    return max(rv)


def fubini(m: int) -> int:
    """Ordered Bell number: the count of weak orders on ``m`` labeled points."""
    a = [1]
    for j in range(1, m + 1):
        a.append(sum(comb(j, k) * a[j - k] for k in range(1, j + 1)))
    return a[m]


def iter_weak_orders(m: int) -> Iterator[RankVector]:
    """Yield every surjective rank assignment of ``m`` points, lexicographically."""
    if not 1 <= m <= MAX_WEAK_ORDER_POINTS:
        raise SizeLimitError(f"point count must be in 1..{MAX_WEAK_ORDER_POINTS}, got {m}")
    prefix: list[int] = []

    def rec(used: frozenset[int]) -> Iterator[RankVector]:
        pos = len(prefix)
        if pos == m:
            if len(used) == max(used):
                yield tuple(prefix)
            return
        remaining = m - pos - 1
        for c in range(1, m + 1):
            new_used = used | {c}
            # gaps below the current maximum must be fillable by later points
            if max(new_used) - len(new_used) > remaining:
                continue
            prefix.append(c)
            yield from rec(new_used)
            prefix.pop()

    yield from rec(frozenset())


def enumerate_weak_orders(m: int) -> list[RankVector]:
    return list(iter_weak_orders(m))


def rotate_ranks(rv: Sequence[int], shift: int) -> RankVector:
    """Rotate the circle so every value moves ``shift`` blocks forward."""
    k = max(rv)
    return tuple((r - 1 + shift) % k + 1 for r in rv)


def reflect_ranks(rv: Sequence[int]) -> RankVector:
    """Reverse the circle's orientation."""
    k = max(rv)
    return tuple(k + 1 - r for r in rv)


def canonicalize_cyclic(rv: Sequence[int], use_reflection: bool = True) -> RankVector:
    """Lexicographically least rank vector in the rotation (or dihedral) orbit of ``rv``."""
    k = max(rv)
    best = None
    for s in range(k):
        cand = tuple((r - 1 - s) % k + 1 for r in rv)
        if best is None or cand < best:
            best = cand
        if use_reflection:
            cand = tuple((k - r - s) % k + 1 for r in rv)
            if cand < best:
                best = cand
    return best


@lru_cache(maxsize=None)
def cyclic_classes(m: int, use_reflection: bool = True) -> tuple[RankVector, ...]:
    """Sorted canonical representatives of all circular weak orders of ``m`` points."""
    return tuple(sorted({canonicalize_cyclic(rv, use_reflection) for rv in iter_weak_orders(m)}))


def enumerate_x_patterns(n: int) -> list[XPattern]:
    """Weakly increasing surjective rank sequences of length ``2n+1``, lexicographic."""
    if not 1 <= n <= 5:
        raise SizeLimitError(f"factor count must be in 1..5, got {n}")
    m = 2 * n + 1
    out = []
    for steps in itertools.product((0, 1), repeat=m - 1):
        x = [1]
        for s in steps:
            x.append(x[-1] + s)
        out.append(tuple(x))
    return sorted(out)


def permutation_sign(perm: Sequence[int]) -> int:
    """Parity of a permutation of ``0..len-1`` via its cycle decomposition."""
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# positions each factor reads inside the reduced sum, after moving the middle
# factor's shared index from position 2 to position 0
_FACTOR_POSITIONS = {
    2: ((0, 1, 2), (0, 3, 4)),
    3: ((0, 1, 2), (0, 3, 4), (4, 5, 6)),
}
_ORDER_CONSTRAINTS = {
    2: ((1, 2), (3, 4)),
    3: ((1, 2), (5, 6)),
}


@dataclass(frozen=True)
class PermTable:
    n: int
    rows: tuple[tuple[tuple[int, ...], int], ...]
    constraints: tuple[tuple[int, int], ...]
    factor_positions: tuple[tuple[int, int, int], ...]

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def perms(self) -> np.ndarray:
        return np.array([p for p, _ in self.rows], dtype=np.int64)

    @property
    def signs(self) -> np.ndarray:
        return np.array([s for _, s in self.rows], dtype=np.int64)

    @property
    def scale_denominator(self) -> int:
        """Each row stands for ``2**len(constraints)`` terms of the full alternation."""
        return factorial(2 * self.n + 1) // (2 ** len(self.constraints))


@lru_cache(maxsize=None)
def reduced_perm_table(n: int) -> PermTable:
    """Permutations of ``0..2n`` obeying the pairwise order constraints, with signs.

    ``n=3`` gives 1260 rows with ``p[1] < p[2]`` and ``p[5] < p[6]``; ``n=2``
    gives 30 rows with ``p[1] < p[2]`` and ``p[3] < p[4]``.
    """
    if n not in _FACTOR_POSITIONS:
        raise CapabilityError(f"no reduced table for n={n}; use the direct sum")
    constraints = _ORDER_CONSTRAINTS[n]
    rows = []
    for p in itertools.permutations(range(2 * n + 1)):
        if all(p[a] < p[b] for a, b in constraints):
            rows.append((p, permutation_sign(p)))
    return PermTable(n, tuple(rows), constraints, _FACTOR_POSITIONS[n])


def multiset_permutations(base: Sequence[int]) -> list[RankVector]:
    """Distinct rearrangements of ``base`` in lexicographic order."""
    return sorted(set(itertools.permutations(base)))


def distinct_order_table() -> list[RankVector]:
    """The 360 orders of seven distinct points with point 0 lowest and point 1 below point 2."""
    return [p for p in multiset_permutations(range(1, 8)) if p[0] == 1 and p[1] < p[2]]


STACKED_BLOCKS = (
    (1, 1, 2, 3, 4, 5, 6),
    (1, 1, 2, 2, 3, 4, 5),
    (1, 1, 2, 3, 3, 4, 5),
    (1, 1, 1, 2, 3, 4, 5),
    (1, 1, 2, 2, 3, 3, 4),
    (1, 1, 1, 2, 2, 3, 4),
    (1, 1, 1, 2, 3, 3, 4),
)


def stacked_order_table() -> list[RankVector]:
    """The 7710 columns: the distinct-order table followed by every arrangement of each tie block."""
    out = distinct_order_table()
    for base in STACKED_BLOCKS:
        out.extend(multiset_permutations(base))
    return out
