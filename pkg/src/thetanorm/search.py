"""Symmetry-reduced exhaustive computation of the sup-norm of the cocycle.

Alternation lets the first factor be sorted, so the first factor runs over
the tie patterns of :func:`~thetanorm.ordercomb.enumerate_x_patterns`. Each
remaining factor runs over circular weak-order classes up to rotation and
reflection, which preserve ``|Theta|``. For three factors, swapping the
second and third factor leaves ``Theta`` unchanged, so the class-by-class
value table is symmetric and only its upper triangle is visited.
"""
from __future__ import annotations

import hashlib
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .cache import load_or_build
from .cocycle import (
    BudgetError,
    Configuration,
    SignMatrix,
    bilinear_max,
    build_sign_matrix,
    linear_max,
    or3,
    regular_configuration,
    theta_chain,
    theta_direct,
)
from .ordercomb import (
    PermTable,
    RankVector,
    XPattern,
    block_count,
    canonicalize_cyclic,
    cyclic_classes,
    densify,
    distinct_order_table,
    enumerate_x_patterns,
    reduced_perm_table,
    stacked_order_table,
)
from .rational import format_rational, parse_rational

log = logging.getLogger(__name__)

MODES = ("exhaustive", "paper-fast", "regular-only", "sample")
DEFAULT_TILE = 256
DEFAULT_WITNESS_CAP = 16

# first-factor patterns covered by paper-fast, with the table each is run against
DISTINCT_PATTERN = (1, 2, 3, 4, 5, 6, 7)
FOUR_TIED_PATTERN = (1, 1, 1, 1, 2, 3, 4)
STACKED_PATTERNS = (
    (1, 1, 1, 2, 2, 3, 4),
    (1, 1, 1, 2, 3, 3, 4),
    (1, 1, 2, 2, 3, 3, 4),
    (1, 1, 1, 2, 3, 4, 5),
    (1, 1, 2, 2, 3, 4, 5),
    (1, 1, 2, 3, 4, 5, 6),
)


def class_table(n: int, use_reflection: bool = True, compat: str | None = None) -> list[RankVector]:
    """Canonical circular weak-order classes of ``2n+1`` points.

    ``compat="distinct"`` and ``compat="stacked"`` return the published raw
    column sets (360 and 7710 columns for ``n=3``) without canonicalising.
    """
    if n not in (1, 2, 3):
        raise ValueError(f"class tables are built for n in 1..3, got {n}")
    m = 2 * n + 1
    if compat is None:
        return list(cyclic_classes(m, use_reflection))
    if compat == "distinct":
        if n == 3:
            return distinct_order_table()
        return [c for c in cyclic_classes(m, True) if max(c) == m]
    if compat == "stacked":
        if n != 3:
            raise ValueError("the stacked table exists only for n=3")
        return stacked_order_table()
    raise ValueError(f"unknown compat table {compat!r}")


def _fingerprint(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr, dtype=np.int64).tobytes()).hexdigest()[:16]


@dataclass
class SearchTables:
    """Permutation table, class list and per-role sign matrices for one ``n``."""

    n: int
    kind: str
    table: PermTable | None
    classes: tuple[RankVector, ...]
    Py: SignMatrix | None
    Pz: SignMatrix | None
    raw_count: int

    @property
    def fingerprints(self) -> dict[str, str]:
        out = {"classes": _fingerprint(np.array(self.classes))}
        if self.table is not None:
            out["perm_table"] = _fingerprint(np.column_stack([self.table.perms, self.table.signs]))
        return out


def build_tables(n: int, kind: str = "full", cache_dir: str | Path | None = None) -> SearchTables:
    """Tables for ``kind`` in ``full``, ``distinct``, ``stacked``.

    Compatibility tables are reduced to distinct dihedral classes before the
    kernel runs; duplicates under rotation and reflection cannot change a
    maximum of ``|Theta|``.
    """
    compat = None if kind == "full" else kind
    if compat is None and cache_dir is not None:
        arr = load_or_build(cache_dir, n, "cls-full", lambda: np.array(class_table(n)))
        raw = [tuple(int(v) for v in row) for row in arr]
    else:
        raw = class_table(n, compat=compat)
    classes = tuple(sorted({canonicalize_cyclic(c) for c in raw})) if compat else tuple(raw)
    if n == 1:
        return SearchTables(n, kind, None, classes, None, None, len(raw))
    table = reduced_perm_table(n)

    def make(role: str) -> SignMatrix:
        def builder() -> np.ndarray:
            return build_sign_matrix(role, table, classes).data

        if cache_dir is None:
            return SignMatrix(role, builder())
        data = load_or_build(cache_dir, n, f"{role[:4]}-{kind}", builder)
        if data.shape != (len(table), len(classes)):
            raise ValueError("cached sign matrix has unexpected shape")
        return SignMatrix(role, data)

    if n == 2:
        return SearchTables(n, kind, table, classes, make("last"), None, len(raw))
    return SearchTables(n, kind, table, classes, make("middle"), make("last"), len(raw))


@dataclass
class PatternResult:
    pattern: XPattern
    value: Fraction
    witnesses: list[Configuration]
    count: int
    complete: bool = True


def max_for_x_pattern(
    xp: Sequence[int],
    tables: SearchTables,
    *,
    threads: int = 1,
    tile: int = DEFAULT_TILE,
    cap: int = DEFAULT_WITNESS_CAP,
    deadline: float | None = None,
) -> PatternResult:
    """Largest ``|Theta|`` over all classes of the later factors with the first factor fixed."""
    xp = tuple(xp)
    n = tables.n
    if len(xp) != 2 * n + 1:
        raise ValueError(f"pattern {xp} does not have {2 * n + 1} points")
    if n == 1:
        v = Fraction(abs(or3(*xp)))
        return PatternResult(xp, v, [Configuration((xp,))] if v else [], int(v != 0))
    sign_vec = build_sign_matrix("combined", tables.table, [xp]).column(0)
    if block_count(xp) < 3:
        # every first-factor orientation vanishes
        if sign_vec.any():
            raise AssertionError(f"nonzero sign vector for tied pattern {xp}")
        return PatternResult(xp, Fraction(0), [], 0)
    if n == 2:
        km = linear_max(sign_vec, tables.Py, cap=cap)
        witnesses = [Configuration((xp, tables.classes[i])) for (i,) in km.cells]
    else:
        km = bilinear_max(
            sign_vec, tables.Py, tables.Pz,
            tile=tile, threads=threads, cap=cap, symmetric=True, deadline=deadline,
        )
        witnesses = [Configuration((xp, tables.classes[i], tables.classes[j])) for i, j in km.cells]
    return PatternResult(xp, km.value, witnesses, km.count, km.complete)


@dataclass
class NormReport:
    n: int
    mode: str
    norm: Fraction
    exhaustive: bool
    complete: bool
    witnesses: list[Configuration]
    witness_count: int
    per_pattern_maxima: dict[XPattern, Fraction]
    class_counts: dict[str, int]
    fingerprints: dict[str, str]
    notes: list[str] = field(default_factory=list)
    elapsed: float = 0.0
    threads: int = 1

    def to_dict(self, include_run: bool = False) -> dict:
        """Plain-data form; run facts (time, threads) only on request so output stays reproducible."""
        d = {
            "n": self.n,
            "mode": self.mode,
            "norm": format_rational(self.norm),
            "exhaustive": self.exhaustive,
            "complete": self.complete,
            "witnesses": [[list(f) for f in w.factors] for w in self.witnesses],
            "witness_count": self.witness_count,
            "per_pattern_maxima": {
                ",".join(map(str, p)): format_rational(v) for p, v in self.per_pattern_maxima.items()
            },
            "class_counts": dict(self.class_counts),
            "fingerprints": dict(self.fingerprints),
            "notes": list(self.notes),
        }
        if include_run:
            d["run"] = {"elapsed_seconds": round(self.elapsed, 3), "threads": self.threads}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> NormReport:
        run = d.get("run", {})
        return cls(
            n=d["n"],
            mode=d["mode"],
            norm=parse_rational(d["norm"]),
            exhaustive=d["exhaustive"],
            complete=d["complete"],
            witnesses=[Configuration(tuple(tuple(f) for f in w)) for w in d["witnesses"]],
            witness_count=d["witness_count"],
            per_pattern_maxima={
                tuple(int(x) for x in k.split(",")): parse_rational(v)
                for k, v in d["per_pattern_maxima"].items()
            },
            class_counts=dict(d["class_counts"]),
            fingerprints=dict(d["fingerprints"]),
            notes=list(d.get("notes", [])),
            elapsed=run.get("elapsed_seconds", 0.0),
            threads=run.get("threads", 1),
        )

    def __eq__(self, other):
        if not isinstance(other, NormReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def eval_regular(n: int) -> Fraction:
    """Theta at the regular configuration, by the full alternation sum."""
    if n > 6:
        raise BudgetError(f"regular evaluation limited to n <= 6, got {n}")
    return theta_direct(regular_configuration(n))


def _verify_witnesses(witnesses: list[Configuration], norm: Fraction) -> None:
    for w in witnesses:
        v = theta_direct(w)
        if abs(v) != norm:
            raise AssertionError(f"witness {w.factors} evaluates to {v}, expected +-{norm}")


def _collect(results: list[PatternResult], cap: int) -> tuple[Fraction, list[Configuration], int]:
    norm = max((r.value for r in results), default=Fraction(0))
    witnesses: list[Configuration] = []
    count = 0
    if norm == 0:
        return norm, witnesses, count
    for r in results:
        if r.value == norm:
            witnesses.extend(r.witnesses)
            count += r.count
    return norm, witnesses[:cap], count


def _fast_plan(n: int) -> list[tuple[XPattern, str]]:
    if n == 3:
        plan = [(DISTINCT_PATTERN, "distinct"), (FOUR_TIED_PATTERN, "distinct")]
        return plan + [(p, "stacked") for p in STACKED_PATTERNS]
    return [(tuple(range(1, 2 * n + 2)), "distinct")]


def norm(
    n: int,
    mode: str = "exhaustive",
    *,
    threads: int = 1,
    tile: int = DEFAULT_TILE,
    cap: int = DEFAULT_WITNESS_CAP,
    budget_seconds: float | None = None,
    cache_dir: str | Path | None = None,
    samples: int = 1000,
    seed: int = 0,
) -> NormReport:
    """Compute ``||Theta_n||`` in one of :data:`MODES`.

    ``exhaustive`` covers every first-factor pattern against every class
    (n <= 3); ``paper-fast`` runs only the first-factor patterns that
    decide the maximum, each against a small linear-order table; ``regular-only`` evaluates the regular configuration;
    ``sample`` draws seeded random configurations (any n <= 6) and is never
    exhaustive.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode in ("exhaustive", "paper-fast") and n not in (1, 2, 3):
        raise ValueError(f"{mode} search is available for n in 1..3 only")
    if not 1 <= n <= 6:
        raise BudgetError(f"n must be in 1..6, got {n}")
    start = time.monotonic()
    deadline = start + budget_seconds if budget_seconds is not None else None
    notes: list[str] = []

    if mode == "regular-only":
        cfg = regular_configuration(n)
        v = theta_direct(cfg)
        report = NormReport(
            n, mode, abs(v), exhaustive=False, complete=True, witnesses=[cfg], witness_count=1,
            per_pattern_maxima={cfg.factors[0]: abs(v)}, class_counts={}, fingerprints={},
            notes=["value at the regular configuration; a lower bound for the norm"],
        )
    elif mode == "sample":
        report = _sample_norm(n, samples, seed, deadline, cap)
    else:
        results: list[PatternResult] = []
        complete = True
        if mode == "exhaustive":
            tables = build_tables(n, "full", cache_dir)
            plan = [(p, tables) for p in enumerate_x_patterns(n)]
            class_counts = {"y": len(tables.classes), "z": len(tables.classes)}
            if n < 3:
                class_counts = {"y": len(tables.classes)} if n == 2 else {}
            fingerprints = tables.fingerprints
        else:
            kinds = {}
            plan = []
            for p, kind in _fast_plan(n):
                if kind not in kinds:
                    kinds[kind] = build_tables(n, kind, cache_dir)
                plan.append((p, kinds[kind]))
            class_counts = {}
            fingerprints = {}
            for kind, t in kinds.items():
                class_counts[f"{kind}_raw"] = t.raw_count
                class_counts[f"{kind}_classes"] = len(t.classes)
                for key, val in t.fingerprints.items():
                    fingerprints[f"{kind}_{key}"] = val
            notes.append("restricted to the deciding first-factor patterns and the 360/7710-order tables")
        for p, tables in plan:
            if deadline is not None and time.monotonic() > deadline:
                complete = False
                break
            r = max_for_x_pattern(p, tables, threads=threads, tile=tile, cap=cap, deadline=deadline)
            log.debug("pattern %s -> %s", p, r.value)
            if not r.complete:
                complete = False
                break
            results.append(r)
        value, witnesses, count = _collect(results, cap)
        if not complete:
            notes.append("budget exceeded; maximum covers the evaluated patterns only")
        report = NormReport(
            n, mode, value, exhaustive=(mode == "exhaustive" and complete), complete=complete,
            witnesses=witnesses, witness_count=count,
            per_pattern_maxima={r.pattern: r.value for r in results},
            class_counts=class_counts, fingerprints=fingerprints, notes=notes,
        )
    _verify_witnesses(report.witnesses, report.norm)
    report.elapsed = time.monotonic() - start
    report.threads = threads
    return report


def random_configuration(n: int, rng: np.random.Generator) -> Configuration:
    """Random circle factors; drawing from ``m`` slots makes ties common."""
    m = 2 * n + 1
    return Configuration(tuple(densify(rng.integers(0, m, size=m).tolist()) for _ in range(n)))


def _sample_norm(n: int, samples: int, seed: int, deadline: float | None, cap: int) -> NormReport:
    rng = np.random.default_rng(seed)
    best = Fraction(0)
    witnesses: list[Configuration] = []
    done = 0
    per_pattern: dict[XPattern, Fraction] = {}
    for _ in range(samples):
        if deadline is not None and time.monotonic() > deadline:
            break
        cfg = random_configuration(n, rng)
        # sort the first factor; alternation only flips the sign
        order = sorted(range(cfg.m), key=lambda i: cfg.factors[0][i])
        cfg = cfg.permute_points(order)
        v = abs(theta_chain(cfg))
        done += 1
        xp = cfg.factors[0]
        per_pattern[xp] = max(per_pattern.get(xp, Fraction(0)), v)
        if v > best:
            best, witnesses = v, [cfg]
        elif v == best and v and len(witnesses) < cap:
            witnesses.append(cfg)
    complete = done == samples
    notes = [f"random sampling of {done} configurations (seed {seed}); a lower bound, not exhaustive"]
    if not complete:
        notes.append("budget exceeded before all samples were drawn")
    return NormReport(
        n, "sample", best, exhaustive=False, complete=complete,
        witnesses=witnesses if best else [], witness_count=len(witnesses) if best else 0,
        per_pattern_maxima=dict(sorted(per_pattern.items())), class_counts={"samples": done},
        fingerprints={}, notes=notes,
    )
