"""Weight functions δ: word length → positive weight, strictly decreasing to 0."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

Number = Fraction | float


@dataclass(frozen=True)
class WeightFunction:
    """δ with constants c̄ (δ(ab) ≤ c̄δ(a)δ(b) for a, b ≥ 1) and c_ (δ(2a) ≥ c_δ(a)).

    ``exact`` weights return Fractions for integer or Fraction arguments.
    """

    name: str
    evaluator: Callable[[Number], Number]
    c_upper: Number
    c_lower: Number
    exact: bool = True

    def __call__(self, n) -> Number:
        if n < 0:
            raise ValueError(f"weight functions are only evaluated on non-negative lengths, got {n}")
        return self.evaluator(n)


def default_weight() -> WeightFunction:
    """δ(n) = 1/(n+1), extended to non-negative rationals by the same formula."""
    return WeightFunction("inverse", lambda n: 1 / (Fraction(n) + 1), Fraction(2), Fraction(1, 2))


def power_weight(alpha) -> WeightFunction:
    """δ(n) = (n+1)^(-alpha); exact when alpha is a positive integer."""
    if alpha <= 0:
        raise ValueError("the exponent must be positive")
    if float(alpha).is_integer():
        a = int(alpha)
        return WeightFunction(f"power{a}", lambda n: 1 / (Fraction(n) + 1) ** a, Fraction(2) ** a, Fraction(1, 2**a))
    a = float(alpha)
    return WeightFunction(f"power{a:g}", lambda n: (float(n) + 1.0) ** -a, 2.0**a, 2.0**-a, exact=False)


def weight_from_name(name: str) -> WeightFunction:
    """``"inverse"`` or ``"power:<alpha>"``."""
    if name in ("inverse", "default"):
        return default_weight()
    if name.startswith("power:"):
        text = name.split(":", 1)[1]
        return power_weight(Fraction(text) if "." not in text else float(text))
    raise ValueError(f"unknown weight {name!r}")


@dataclass(frozen=True)
class WeightAudit:
    grid: tuple[int, ...]
    max_upper_ratio: float
    min_lower_ratio: float
    decreasing: bool
    decay_exponent: float
    ok: bool

    def as_dict(self) -> dict:
        return {
            "grid_max": self.grid[-1],
            "grid_points": len(self.grid),
            "max_upper_ratio": self.max_upper_ratio,
            "min_lower_ratio": self.min_lower_ratio,
            "decreasing": self.decreasing,
            "decay_exponent": self.decay_exponent,
            "summable_power_consistent": abs(self.decay_exponent - 1.0) < 0.1,
            "ok": self.ok,
        }


def audit_grid(limit: int = 10**4, points: int = 60) -> tuple[int, ...]:
    return tuple(sorted({int(round(x)) for x in np.geomspace(1, limit, points)}))


def audit(weight: WeightFunction, limit: int = 10**4, points: int = 60) -> WeightAudit:
    """Spot-check both weight inequalities and monotonicity on a log-spaced grid of lengths."""
    grid = audit_grid(limit, points)
    upper = max(weight(a * b) / (weight(a) * weight(b)) for a in grid for b in grid)
    lower = min(weight(2 * a) / weight(a) for a in (0, *grid))
    decreasing = all(weight(n + 1) < weight(n) for n in range(0, 1000)) and all(
        weight(b) < weight(a) for a, b in zip(grid, grid[1:])
    )
    tail = [n for n in grid if n >= limit // 100] or list(grid)
    slope = np.polyfit(np.log(tail), [math.log(float(weight(n))) for n in tail], 1)[0]
    ok = upper <= weight.c_upper and lower >= weight.c_lower and decreasing
    return WeightAudit(grid, float(upper), float(lower), decreasing, float(-slope), bool(ok))
