"""Exact evaluation of the orientation cocycle and the alternated cup product.

Three evaluation routes share one meaning:

* :func:`theta_direct` sums over every permutation of the ``2n+1`` points and
  is the ground truth;
* :func:`theta_reduced` sums over the constrained table of
  :func:`~thetanorm.ordercomb.reduced_perm_table` (n = 2, 3);
* :func:`bilinear_max` evaluates the reduced sum for whole blocks of
  configuration classes at once as an integer bilinear form.

Values are :class:`fractions.Fraction`; no floating point enters any result.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .ordercomb import (
    PermTable,
    RankVector,
    check_rank_vector,
    densify,
    permutation_sign,
    reduced_perm_table,
)

MAX_DIRECT_N = 6
MAX_SUM_N = 4


class BudgetError(ValueError):
    """The factorial sum is too large for the requested factor count."""


class ShapeError(ValueError):
    """Tables or classes disagree in size or role."""


def or3(a: int, b: int, c: int) -> int:
    """Orientation of three circle points given by their ranks.

    Zero when two ranks coincide, otherwise the parity of the permutation
    that sorts ``(a, b, c)`` ascending.
    """
    if a == b or b == c or a == c:
        return 0
    inversions = (a > b) + (a > c) + (b > c)
    return -1 if inversions % 2 else 1


def _or3_array(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.sign(b - a) * np.sign(c - b) * np.sign(c - a)


@dataclass(frozen=True)
class Configuration:
    """``n`` circle factors over ``2n+1`` points; factor ``i`` holds the ranks of its points."""

    factors: tuple[RankVector, ...]
    angles: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self):
        factors = tuple(check_rank_vector(f) for f in self.factors)
        object.__setattr__(self, "factors", factors)
        n = len(factors)
        if n == 0:
            raise ShapeError("configuration needs at least one factor")
        for f in factors:
            if len(f) != 2 * n + 1:
                raise ShapeError(f"factor {f} has {len(f)} points, expected {2 * n + 1}")
        if self.angles is not None:
            angles = tuple(tuple(Fraction(a) for a in row) for row in self.angles)
            object.__setattr__(self, "angles", angles)
            if len(angles) != n:
                raise ShapeError("angle rows do not match factor count")
            for i, row in enumerate(angles):
                if any(not 0 <= a < 1 for a in row):
                    raise ValueError(f"factor {i + 1}: angles must lie in [0, 1)")
                if densify(row) != factors[i]:
                    raise ValueError(f"factor {i + 1}: angles {row} disagree with ranks {factors[i]}")

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def m(self) -> int:
        return 2 * self.n + 1

    @classmethod
    def from_angles(cls, angles: Sequence[Sequence]) -> Configuration:
        rows = tuple(tuple(Fraction(a) % 1 for a in row) for row in angles)
        return cls(tuple(densify(row) for row in rows), rows)

    def as_array(self) -> np.ndarray:
        return np.array(self.factors, dtype=np.int64)

    def permute_points(self, tau: Sequence[int]) -> Configuration:
        """Configuration whose point ``j`` is this configuration's point ``tau[j]``."""
        return Configuration(tuple(tuple(f[t] for t in tau) for f in self.factors))

    def with_factor(self, i: int, ranks: Sequence[int]) -> Configuration:
        factors = list(self.factors)
        factors[i] = tuple(ranks)
        return Configuration(tuple(factors))


def regular_configuration(n: int) -> Configuration:
    """Factor ``k`` places point ``i`` at angle ``(k*i mod 2n+1)/(2n+1)``."""
    m = 2 * n + 1
    return Configuration.from_angles(
        [[Fraction((k * i) % m, m) for i in range(m)] for k in range(1, n + 1)]
    )


@lru_cache(maxsize=None)
def _all_permutations(m: int) -> tuple[np.ndarray, np.ndarray]:
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int8)
    signs = np.array([permutation_sign(p) for p in perms.tolist()], dtype=np.int64)
    return perms, signs


def theta_direct_many(batch: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Integer numerators of the full alternation sum for a ``(B, n, 2n+1)`` rank array.

    The value of each configuration is ``numerator / (2n+1)!``.
    """
    batch = np.asarray(batch, dtype=np.int8)
    _, n, m = batch.shape
    if m != 2 * n + 1:
        raise ShapeError(f"expected {2 * n + 1} points per factor, got {m}")
    if n > MAX_SUM_N:
        raise BudgetError(f"literal factorial sum limited to n <= {MAX_SUM_N}")
    perms, signs = _all_permutations(m)
    out = np.empty(len(batch), dtype=np.int64)
    for start in range(0, len(batch), chunk):
        part = batch[start:start + chunk]
        prod = np.ones((len(part), len(perms)), dtype=np.int8)
        for i in range(n):
            r = part[:, i, :]
            a = r[:, perms[:, 2 * i]]
            b = r[:, perms[:, 2 * i + 1]]
            c = r[:, perms[:, 2 * i + 2]]
            prod *= _or3_array(a, b, c).astype(np.int8)
        out[start:start + chunk] = prod.astype(np.int64) @ signs
    return out


def theta_chain(cfg: Configuration) -> Fraction:
    """Full alternation sum regrouped by (points used, shared point).

    Factor ``i`` reads positions ``2i-2, 2i-1, 2i``, so consecutive factors
    share exactly one position and the sum over permutations can be carried
    forward as a table keyed by the set of points placed so far and the point
    at the shared position. The permutation sign is accumulated as the parity
    of inversions created by each newly placed point.
    """
    n, m = cfg.n, cfg.m
    tables = []
    for f in cfg.factors:
        tables.append([[[or3(f[a], f[b], f[c]) for c in range(m)] for b in range(m)] for a in range(m)])

    def inv_sign(used: int, v: int) -> int:
        return -1 if bin(used >> (v + 1)).count("1") % 2 else 1

    states: dict[tuple[int, int], int] = {(1 << a, a): 1 for a in range(m)}
    for i in range(n):
        t = tables[i]
        nxt: dict[tuple[int, int], int] = {}
        for (used, last), w in states.items():
            row = t[last]
            for b in range(m):
                if used >> b & 1:
                    continue
                used_b = used | (1 << b)
                wb = w * inv_sign(used, b)
                rb = row[b]
                for c in range(m):
                    if used_b >> c & 1:
                        continue
                    o = rb[c]
                    if o == 0:
                        continue
                    key = (used_b | (1 << c), c)
                    nxt[key] = nxt.get(key, 0) + wb * o * inv_sign(used_b, c)
        states = nxt
    total = sum(states.values())
    return Fraction(total, math.factorial(m))


def theta_direct(cfg: Configuration, method: str = "auto") -> Fraction:
    """Alternation of the cup product of the factor orientation cocycles.

    ``method="sum"`` enumerates all ``(2n+1)!`` permutations (n <= 4);
    ``method="chain"`` regroups the same sum (n <= 6); ``"auto"`` picks the
    literal sum whenever it is available.
    """
    if cfg.n > MAX_DIRECT_N:
        raise BudgetError(f"direct evaluation limited to n <= {MAX_DIRECT_N}, got {cfg.n}")
    if method == "auto":
        method = "sum" if cfg.n <= MAX_SUM_N else "chain"
    if method == "chain":
        return theta_chain(cfg)
    if method != "sum":
        raise ValueError(f"unknown method {method!r}")
    num = int(theta_direct_many(cfg.as_array()[None])[0])
    return Fraction(num, math.factorial(cfg.m))


def _reduced_terms(table: PermTable, batch: np.ndarray) -> np.ndarray:
    perms = table.perms
    prod = np.ones((len(batch), len(perms)), dtype=np.int64)
    for i, (p0, p1, p2) in enumerate(table.factor_positions):
        r = batch[:, i, :]
        prod *= _or3_array(r[:, perms[:, p0]], r[:, perms[:, p1]], r[:, perms[:, p2]])
    return prod @ table.signs


def theta_reduced_many(batch: np.ndarray) -> np.ndarray:
    """Numerators over ``len(table)`` of the reduced sum for a ``(B, n, 2n+1)`` rank array."""
    batch = np.asarray(batch, dtype=np.int64)
    table = reduced_perm_table(batch.shape[1])
    return _reduced_terms(table, batch)


def theta_reduced(cfg: Configuration) -> Fraction:
    """The constrained-table evaluation; must agree with :func:`theta_direct`."""
    table = reduced_perm_table(cfg.n)
    num = int(_reduced_terms(table, cfg.as_array()[None])[0])
    return Fraction(num, table.scale_denominator)


ROLES = ("first", "middle", "last", "combined")


@dataclass(frozen=True)
class SignMatrix:
    """Rows follow the permutation table, columns follow configuration classes."""

    role: str
    data: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j]


def _role_positions(role: str, table: PermTable) -> tuple[int, int, int]:
    if role in ("first", "combined"):
        return table.factor_positions[0]
    if role == "middle":
        return table.factor_positions[1]
    if role == "last":
        return table.factor_positions[-1]
    raise ShapeError(f"unknown role {role!r}; expected one of {ROLES}")


def build_sign_matrix(role: str, table: PermTable, classes: Sequence[Sequence[int]]) -> SignMatrix:
    """Orientation signs of every class at the positions ``role`` reads from each table row.

    The ``combined`` role multiplies the first-factor sign by the row's
    permutation sign; its columns are usually sorted tie patterns.
    """
    m = 2 * table.n + 1
    ranks = np.asarray(classes, dtype=np.int64)
    if ranks.ndim != 2 or ranks.shape[1] != m:
        raise ShapeError(f"classes must have {m} points each, got shape {ranks.shape}")
    p0, p1, p2 = _role_positions(role, table)
    perms = table.perms
    data = _or3_array(ranks[:, perms[:, p0]], ranks[:, perms[:, p1]], ranks[:, perms[:, p2]]).T
    if role == "combined":
        data = data * table.signs[:, None]
    return SignMatrix(role, np.ascontiguousarray(data, dtype=np.int8))


@dataclass
class KernelMax:
    """Largest ``|O|`` entry as ``numerator/denominator`` plus the cells reaching it."""

    numerator: int
    denominator: int
    cells: list[tuple[int, ...]]
    count: int
    complete: bool = True

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


def _tile_max(A: np.ndarray, B: np.ndarray, i0: int, j0: int, diagonal: bool, cap: int):
    block = A @ B
    # partial sums are integers below 2**24, so float32 accumulation is exact
    vals = np.rint(np.abs(block)).astype(np.int64)
    if diagonal:
        vals = np.triu(vals) - np.tril(np.ones_like(vals), -1)
    best = int(vals.max())
    hits = np.argwhere(vals == best)
    cells = [(i0 + int(a), j0 + int(b)) for a, b in hits[:cap]]
    return best, cells, len(hits)


def _merge(results, cap: int) -> tuple[int, list, int]:
    best, cells, count = -1, [], 0
    for b, c, k in results:
        if b > best:
            best, cells, count = b, list(c), k
        elif b == best:
            cells.extend(c)
            count += k
    cells.sort()
    return best, cells[:cap], count


def bilinear_max(
    sign_vec: np.ndarray,
    Py: SignMatrix,
    Pz: SignMatrix,
    *,
    tile: int = 256,
    threads: int = 1,
    cap: int = 16,
    symmetric: bool = False,
    deadline: float | None = None,
) -> KernelMax:
    """Maximise ``|sum_l s_l Py[l, i] Pz[l, j]| / rows`` over all cells ``(i, j)``.

    ``cells`` holds the first ``cap`` maximising cells in lexicographic
    order and ``count`` the total number found. With ``symmetric=True`` the
    caller asserts the form is symmetric (same classes on both sides) and
    only cells with ``i <= j`` are visited. Tiles left unvisited when
    ``deadline`` (a ``time.monotonic`` value) passes make the result
    incomplete.
    """
    s = np.asarray(sign_vec).reshape(-1)
    rows = len(s)
    if Py.rows != rows or Pz.rows != rows:
        raise ShapeError(f"row counts differ: {rows}, {Py.rows}, {Pz.rows}")
    if symmetric and Py.cols != Pz.cols:
        raise ShapeError("symmetric mode needs square class tables")
    if rows >= 2 ** 24:
        raise OverflowError("row count too large for exact float32 accumulation")
    A = np.ascontiguousarray((s.astype(np.float32)[:, None] * Py.data).T)
    B = np.ascontiguousarray(Pz.data, dtype=np.float32)
    jobs = [
        (i0, j0)
        for i0 in range(0, Py.cols, tile)
        for j0 in range(0, Pz.cols, tile)
        if not symmetric or j0 >= i0
    ]
    complete = True

    def run(job):
        i0, j0 = job
        if deadline is not None and time.monotonic() > deadline:
            return None
        return _tile_max(A[i0:i0 + tile], B[:, j0:j0 + tile], i0, j0, symmetric and i0 == j0, cap)

    if threads > 1:
        with threadpool_limits(limits=1, user_api="blas"), ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    if any(r is None for r in results):
        complete = False
    best, cells, count = _merge([r for r in results if r is not None], cap)
    return KernelMax(max(best, 0), rows, cells, count, complete)


def linear_max(sign_vec: np.ndarray, Py: SignMatrix, *, cap: int = 16) -> KernelMax:
    """Maximise ``|sum_l s_l Py[l, i]| / rows`` over columns ``i`` (two-factor case)."""
    s = np.asarray(sign_vec, dtype=np.int64).reshape(-1)
    if Py.rows != len(s):
        raise ShapeError(f"row counts differ: {len(s)}, {Py.rows}")
    vals = np.abs(s @ Py.data.astype(np.int64))
    best = int(vals.max())
    hits = np.flatnonzero(vals == best)
    return KernelMax(best, len(s), [(int(i),) for i in hits[:cap]], len(hits))
