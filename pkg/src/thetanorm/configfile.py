"""Text format for a single configuration.

::

    # comments and blank lines are ignored
    n = 3
    angles 1 = 0 1/7 2/7 3/7 4/7 5/7 6/7
    angles 2 = 0 2/7 4/7 6/7 1/7 3/7 5/7
    ranks 3 = 1 4 7 3 6 2 5

Each factor ``1..n`` needs an ``angles`` line (fractions of a turn in
``[0, 1)``), a ``ranks`` line, or both; when both are given they must agree.
The ``n`` line is optional and otherwise inferred from the factor indices.
"""
from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from .cocycle import Configuration
from .ordercomb import densify, is_rank_vector

_LINE = re.compile(r"^(?P<key>n|angles|ranks)(?:\s+(?P<idx>\d+))?\s*=\s*(?P<vals>.*)$")


class ConfigParseError(ValueError):
    def __init__(self, line: int | None, field: str, message: str):
        self.line = line
        self.field = field
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{where}field '{field}': {message}")


def parse_config(text: str) -> Configuration:
    declared_n = None
    angles: dict[int, tuple[tuple[Fraction, ...], int]] = {}
    ranks: dict[int, tuple[tuple[int, ...], int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigParseError(lineno, line.split("=")[0].strip() or line, "expected 'n = K', 'angles I = ...' or 'ranks I = ...'")
        key, idx, vals = m.group("key"), m.group("idx"), m.group("vals").split()
        field = key if idx is None else f"{key} {idx}"
        if key == "n":
            if idx is not None or len(vals) != 1 or not vals[0].isdigit() or int(vals[0]) < 1:
                raise ConfigParseError(lineno, field, "expected a positive integer")
            declared_n = int(vals[0])
            continue
        if idx is None:
            raise ConfigParseError(lineno, field, "missing factor index")
        i = int(idx)
        target = angles if key == "angles" else ranks
        if i in target:
            raise ConfigParseError(lineno, field, "factor given twice")
        if key == "angles":
            try:
                row = tuple(Fraction(v) for v in vals)
            except (ValueError, ZeroDivisionError):
                raise ConfigParseError(lineno, field, "angles must be exact fractions like 3/7 or 0.25") from None
            if any(not 0 <= a < 1 for a in row):
                raise ConfigParseError(lineno, field, "angles must lie in [0, 1)")
            angles[i] = (row, lineno)
        else:
            if not all(re.fullmatch(r"\d+", v) for v in vals):
                raise ConfigParseError(lineno, field, "ranks must be positive integers")
            row = tuple(int(v) for v in vals)
            if not is_rank_vector(row):
                raise ConfigParseError(lineno, field, "ranks must cover 1..k without gaps")
            ranks[i] = (row, lineno)

    indices = set(angles) | set(ranks)
    n = declared_n if declared_n is not None else len(indices)
    if n == 0:
        raise ConfigParseError(None, "n", "no factors given")
    if indices != set(range(1, n + 1)):
        raise ConfigParseError(None, "factors", f"expected factors 1..{n}, got {sorted(indices)}")
    factors = []
    for i in range(1, n + 1):
        a = angles.get(i)
        r = ranks.get(i)
        row = densify(a[0]) if a else r[0]
        lineno = (a or r)[1]
        if len(row) != 2 * n + 1:
            raise ConfigParseError(lineno, f"factor {i}", f"expected {2 * n + 1} points, got {len(row)}")
        if a and r and densify(a[0]) != r[0]:
            raise ConfigParseError(r[1], f"ranks {i}", f"ranks {r[0]} disagree with angles (ranks {densify(a[0])})")
        factors.append(row)
    all_angles = None
    if len(angles) == n:
        all_angles = tuple(angles[i][0] for i in range(1, n + 1))
    return Configuration(tuple(factors), all_angles)


def load_config(path: str | Path) -> Configuration:
    return parse_config(Path(path).read_text())


def format_config(cfg: Configuration) -> str:
    lines = [f"n = {cfg.n}"]
    for i, f in enumerate(cfg.factors, start=1):
        if cfg.angles is not None:
            lines.append(f"angles {i} = " + " ".join(str(a) for a in cfg.angles[i - 1]))
        lines.append(f"ranks {i} = " + " ".join(map(str, f)))
    return "\n".join(lines) + "\n"
