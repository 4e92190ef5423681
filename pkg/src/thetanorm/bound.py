"""Simplicial-volume lower bounds from a cocycle norm.

For a closed manifold covered by ``n`` hyperbolic planes the volume class
is ``pi**n`` times the cocycle class, so ``||M|| >= Vol(M) / (pi**n * v)``
where ``v`` is the combinatorial norm. Volumes are written as a rational
coefficient times a power of pi so the bound stays exact when it can.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction

import mpmath

from .rational import format_rational, parse_rational

WORKING_DPS = 60
DEFAULT_DIGITS = 30

_VOLUME_RE = re.compile(
    r"^\s*(?P<coef>[0-9]*\.?[0-9]+(?:/[0-9]+)?)?\s*\*?\s*(?P<pi>pi(?:\s*\^\s*(?P<exp>[0-9]+))?)?\s*$"
)


@dataclass(frozen=True)
class Volume:
    """``coefficient * pi**pi_power``."""

    coefficient: Fraction
    pi_power: int = 0

    def __str__(self) -> str:
        return _symbolic(self.coefficient, self.pi_power)


def parse_volume(text: str) -> Volume:
    """Accept ``1``, ``2.5``, ``3/4``, ``pi^3``, ``8*pi^3`` and similar."""
    m = _VOLUME_RE.match(text)
    if not m or not (m.group("coef") or m.group("pi")):
        raise ValueError(f"cannot parse volume {text!r}; expected e.g. 1, 3/4, pi^3, 8*pi^3")
    coef = parse_rational(m.group("coef")) if m.group("coef") else Fraction(1)
    power = 0
    if m.group("pi"):
        power = int(m.group("exp")) if m.group("exp") else 1
    return Volume(coef, power)


def _symbolic(coef: Fraction, power: int) -> str:
    if power == 0 or coef == 0:
        return format_rational(coef)
    pi = "pi" if abs(power) == 1 else f"pi^{abs(power)}"
    p, q = coef.numerator, coef.denominator
    if power > 0:
        head = pi if p == 1 else f"{p}*{pi}"
        return head if q == 1 else f"{head}/{q}"
    if q == 1:
        return f"{p}/{pi}"
    return f"{p}/({q}*{pi})"


def pi_decimal(dps: int = WORKING_DPS) -> mpmath.mpf:
    with mpmath.workdps(dps):
        return +mpmath.pi


def round_significant(x: mpmath.mpf, digits: int) -> Decimal:
    """Round half-even to ``digits`` significant digits."""
    with mpmath.workdps(WORKING_DPS):
        d = Decimal(mpmath.nstr(x, WORKING_DPS - 5, strip_zeros=False))
    return Context(prec=digits, rounding=ROUND_HALF_EVEN).plus(d)


@dataclass(frozen=True)
class BoundResult:
    n: int
    norm: Fraction
    volume: Volume
    coefficient: Fraction
    pi_power: int
    lower_bound: Decimal

    @property
    def exact(self) -> Fraction | None:
        return self.coefficient if self.pi_power == 0 else None

    @property
    def symbolic(self) -> str:
        return _symbolic(self.coefficient, self.pi_power)


def lower_bound(n: int, norm: Fraction, volume: Volume, digits: int = DEFAULT_DIGITS) -> BoundResult:
    """``volume / (pi**n * norm)`` as an exact symbolic form and a rounded decimal."""
    norm = Fraction(norm)
    if norm <= 0:
        raise ValueError("norm must be positive")
    if volume.coefficient <= 0:
        raise ValueError("volume must be positive")
    coef = volume.coefficient / norm
    power = volume.pi_power - n
    with mpmath.workdps(WORKING_DPS):
        value = mpmath.mpf(coef.numerator) / coef.denominator * pi_decimal() ** power
    return BoundResult(n, norm, volume, coef, power, round_significant(value, digits))


def surface_volume(genera: list[int]) -> Volume:
    """Product of hyperbolic surfaces: each of genus ``g`` has area ``2*pi*(2g-2)``."""
    coef = Fraction(1)
    for g in genera:
        if g < 2:
            raise ValueError(f"genus {g} surface is not hyperbolic")
        coef *= 2 * (2 * g - 2)
    return Volume(coef, len(genera))


def surface_simplicial_volume(g: int) -> int:
    return 4 * g - 4
