"""Base-q digit vectors, carry vectors and parameter selection.

Digit vectors are plain tuples, least significant digit first.  Positions are
0-based in code (position ``i`` holds the coefficient of ``q**i``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Tuple

from .errors import InvalidSizeError, MalformedVectorError, RangeError

DigitVec = Tuple[int, ...]
CarryVector = Tuple[int, ...]
EtaVec = Tuple[int, ...]

#: integral of the binary entropy function over [0, 1], i.e. log2(e) / 2
LAMBDA = math.log2(math.e) / 2


class NonAsymptoticRegimeWarning(UserWarning):
    """The upper inequality 2qN > q**d fails; cost claims are not asymptotic here."""


def default_slack(d: int) -> int:
    return math.ceil(2 * math.sqrt(d) * math.log2(d + 1))


def default_budget(d: int, slack: int | None = None) -> int:
    """Carry-code budget separating good pairs from the rest."""
    if slack is None:
        slack = default_slack(d)
    return math.ceil(LAMBDA * d) + slack


def default_buckets(d: int) -> int:
    return max(1, math.floor(math.sqrt(d) + 0.5))


@dataclass(frozen=True)
class ProtocolParams:
    N: int
    q: int
    d: int
    r: int
    B: int
    asymptotic: bool = True

    def __post_init__(self):
        if self.N < 1:
            raise InvalidSizeError(f"N must be positive, got {self.N}")
        if self.q < 2 or self.d < 1:
            raise InvalidSizeError(f"need q >= 2 and d >= 1, got q={self.q}, d={self.d}")
        if not 1 <= self.r <= self.d:
            raise InvalidSizeError(f"bucket count r={self.r} outside [1, {self.d}]")
        if self.q ** self.d < 2 * self.N + 1:
            raise InvalidSizeError(
                f"q**d = {self.q ** self.d} cannot represent every z in [0, {2 * self.N}]"
            )

    @property
    def lam(self) -> float:
        return LAMBDA

    @property
    def capacity(self) -> int:
        return self.q ** self.d

    @property
    def norm_width(self) -> int:
        """Width of the announced-norm field; entries of eta - x_q lie in [-(2q-1), q]."""
        from .vector_addition import norm_field_width

        return norm_field_width(self.d, 2 * self.q - 1)

    @property
    def analytic_cost(self) -> float:
        return LAMBDA * self.d + self.norm_width + 2

    def describe(self) -> dict:
        return {
            "N": self.N,
            "q": self.q,
            "d": self.d,
            "r": self.r,
            "B": self.B,
            "asymptotic": self.asymptotic,
            "lambda_d": LAMBDA * self.d,
            "norm_width": self.norm_width,
            "analytic_cost": self.analytic_cost,
        }


def _min_radix(N: int, d: int) -> int:
    target = 2 * N + 1
    q = max(2, int(round(target ** (1.0 / d))) - 1)
    while q > 2 and (q - 1) ** d >= target:
        q -= 1
    while q ** d < target:
        q += 1
    return q


def _min_dimension(N: int, q: int) -> int:
    d = 1
    while q ** d < 2 * N + 1:
        d += 1
    return max(d, 2)


def select_params(N: int, q: int | None = None, d: int | None = None, r: int | None = None,
                  B: int | None = None, slack: int | None = None) -> ProtocolParams:
    """Choose radix and dimension for problem size ``N``.

    Without overrides, ``d`` is sqrt((2/lambda) * log2(2N)) rounded to nearest,
    ``q`` the least radix with q**d >= 2N+1, and ``d`` is lowered until
    2qN > q**d holds (or d reaches 2).  Explicit ``q``/``d`` are taken as
    given; if the upper inequality fails the params are flagged
    non-asymptotic and a :class:`NonAsymptoticRegimeWarning` is issued.
    """
    if N < 2:
        raise InvalidSizeError(f"N must be at least 2, got {N}")
    if d is not None and d < 2:
        raise InvalidSizeError(f"dimension must be at least 2, got {d}")
    if q is not None and q < 2:
        raise InvalidSizeError(f"radix must be at least 2, got {q}")

    if d is None and q is None:
        d = max(2, math.floor(math.sqrt((2 / LAMBDA) * math.log2(2 * N)) + 0.5))
        while True:
            q = _min_radix(N, d)
            if 2 * q * N > q ** d or d == 2:
                break
            d -= 1
    elif q is None:
        q = _min_radix(N, d)
    elif d is None:
        d = _min_dimension(N, q)
    elif q ** d < 2 * N + 1:
        raise InvalidSizeError(f"q**d = {q ** d} < 2N+1 = {2 * N + 1}")

    asymptotic = 2 * q * N > q ** d
    if not asymptotic:
        warnings.warn(
            f"2qN > q^d fails for N={N}, q={q}, d={d}; running in non-asymptotic regime",
            NonAsymptoticRegimeWarning,
            stacklevel=2,
        )
    if r is None:
        r = default_buckets(d)
    if B is None:
        B = default_budget(d, slack)
    return ProtocolParams(N=N, q=q, d=d, r=r, B=B, asymptotic=asymptotic)


def to_digits(w: int, params: ProtocolParams) -> DigitVec:
    q, d = params.q, params.d
    if w < 0 or w >= q ** d:
        raise RangeError(f"{w} outside [0, {q}^{d})")
    out = []
    for _ in range(d):
        w, digit = divmod(w, q)
        out.append(digit)
    return tuple(out)


def from_digits(v, params: ProtocolParams) -> int:
    q = params.q
    if len(v) != params.d:
        raise MalformedVectorError(f"expected {params.d} digits, got {len(v)}")
    w = 0
    for digit in reversed(v):
        if not 0 <= digit < q:
            raise MalformedVectorError(f"digit {digit} outside [0, {q - 1}]")
        w = w * q + digit
    return w


def vector_value(v, q: int) -> int:
    """Evaluate sum v[i] * q**i without digit-range checks (entries may be negative)."""
    w = 0
    for entry in reversed(v):
        w = w * q + entry
    return w


def carry_vector(x: int, y: int, params: ProtocolParams) -> CarryVector:
    q, d = params.q, params.d
    if x < 0 or y < 0:
        raise RangeError("carry_vector needs nonnegative operands")
    if x + y >= q ** d:
        raise RangeError(f"{x} + {y} overflows {q}^{d}")
    bits = []
    carry = 0
    for _ in range(d):
        x, xi = divmod(x, q)
        y, yi = divmod(y, q)
        carry = 1 if xi + yi + carry >= q else 0
        bits.append(carry)
    return tuple(bits)


def eta(y: int, C: CarryVector, params: ProtocolParams) -> EtaVec:
    """(x+y)_q - x_q recovered from y and the carries: y_i - q*C_i + C_{i-1}."""
    q = params.q
    ys = to_digits(y, params)
    prev = 0
    out = []
    for yi, ci in zip(ys, C):
        out.append(yi - q * ci + prev)
        prev = ci
    return tuple(out)


def zeta(z: int, C: CarryVector, params: ProtocolParams) -> EtaVec:
    """z_i + q*C_i - C_{i-1}; equals x_q + y_q exactly when x + y = z."""
    q = params.q
    zs = to_digits(z, params)
    prev = 0
    out = []
    for zi, ci in zip(zs, C):
        out.append(zi + q * ci - prev)
        prev = ci
    return tuple(out)
