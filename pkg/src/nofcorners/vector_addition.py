"""One-round NOF protocol for vector addition, g(alpha, beta, gamma) = [alpha + beta == gamma].

P_z sees (alpha, beta) and announces ||alpha - beta||^2.  P_y sees
(alpha, gamma) and P_x sees (beta, gamma); each compares the announcement
with the norm it can compute.  Since

    ||2a - g||^2 + ||2b - g||^2 = 2||a - b||^2 + 2||a + b - g||^2,

both comparisons succeed exactly when gamma = alpha + beta.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .bits import ceil_log2
from .errors import ShapeError


@dataclass(frozen=True)
class GDecision:
    accept: bool
    announced_norm: int
    bit_y: int
    bit_x: int
    cost_bits: int


def sq_dist(u: Sequence[int], v: Sequence[int]) -> int:
    return sum((a - b) * (a - b) for a, b in zip(u, v))


def sq_dist_scaled(u: Sequence[int], g: Sequence[int]) -> int:
    """||2u - g||^2"""
    return sum((2 * a - c) * (2 * a - c) for a, c in zip(u, g))


def norm_field_width(d: int, entry_bound: int) -> int:
    """Bits needed for any squared norm of a length-d vector with |entries| <= entry_bound."""
    return ceil_log2(d * entry_bound * entry_bound + 1)


def decide_g(alpha: Sequence[int], beta: Sequence[int], gamma: Sequence[int],
             q: int = 2, entry_bound: int | None = None) -> GDecision:
    d = len(alpha)
    if len(beta) != d or len(gamma) != d:
        raise ShapeError(f"length mismatch: {len(alpha)}, {len(beta)}, {len(gamma)}")
    if entry_bound is None:
        entry_bound = q - 1
    announced = sq_dist(alpha, beta)
    bit_y = int(announced == sq_dist_scaled(alpha, gamma))
    bit_x = int(announced == sq_dist_scaled(beta, gamma))
    return GDecision(
        accept=bool(bit_y and bit_x),
        announced_norm=announced,
        bit_y=bit_y,
        bit_x=bit_x,
        cost_bits=norm_field_width(d, max(entry_bound, 1)) + 2,
    )
