"""The typical-pair exactly-N protocol, its smeared worst-case variant and cost sweeps.

Board layout (bit-exact, MSB first within each field)::

    [shift index][carry code][norm field][bit_y][bit_x]

The shift index is present only in smeared mode and is ``ceil(log2 |F|)`` bits
wide.  The norm field holds ||eta - x_q||^2 in ``params.norm_width`` bits.
Everything before the two verification bits depends on (x, y) alone.

Each player is a separate function receiving exactly what that player sees:
P_z gets (x, y), P_y gets (x, z, board), P_x gets (y, z, board).  The
verifiers parse the board themselves; P_y cannot parse the carry code (it
does not know y) and reads the fixed-width norm field from the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bits import BitReader, ceil_log2, uint_bits
from .carry_code import encode_carry, encode_carry_raw, read_carry
from .errors import CoverError, MalformedCodeError, RangeError
from .radix import ProtocolParams, carry_vector, eta, to_digits, zeta
from .shift_cover import GridSet, ShiftFamily
from .vector_addition import norm_field_width, sq_dist, sq_dist_scaled


@dataclass(frozen=True)
class Message:
    """What P_z writes: pair-determined, never depends on z."""

    carry_code: str
    norm_field: str
    shift_index: str = ""

    @property
    def bits(self) -> str:
        return self.shift_index + self.carry_code + self.norm_field

    def __len__(self):
        return len(self.shift_index) + len(self.carry_code) + len(self.norm_field)


@dataclass(frozen=True)
class Transcript:
    message: Message
    bit_y: int
    bit_x: int

    @property
    def bits(self) -> str:
        return self.message.bits + str(self.bit_y) + str(self.bit_x)

    def __len__(self):
        return len(self.message) + 2

    def fields(self) -> dict:
        return {
            "shift_index": self.message.shift_index,
            "carry_code": self.message.carry_code,
            "norm_field": self.message.norm_field,
            "bit_y": str(self.bit_y),
            "bit_x": str(self.bit_x),
        }


@dataclass(frozen=True)
class Outcome:
    accept: bool
    transcript: Transcript
    good_pair: bool

    @property
    def cost_bits(self) -> int:
        return len(self.transcript)


def _check_pair(x: int, y: int, params: ProtocolParams):
    if not (0 <= x <= params.N and 0 <= y <= params.N):
        raise RangeError(f"pair ({x}, {y}) outside [0, {params.N}]^2")


def _check_target(z: int, params: ProtocolParams):
    if not 0 <= z <= 2 * params.N:
        raise RangeError(f"z={z} outside [0, {2 * params.N}]")


def trans(x: int, y: int, params: ProtocolParams) -> Message:
    """P_z's message on (x, y): the carry code of x + y given y, then ||eta - x_q||^2."""
    _check_pair(x, y, params)
    xs = to_digits(x, params)
    ys = to_digits(y, params)
    C = carry_vector(x, y, params)
    e = eta(y, C, params)
    return Message(
        carry_code=encode_carry(C, ys, params),
        norm_field=uint_bits(sq_dist(e, xs), params.norm_width),
    )


def player_y_bit(x: int, z: int, board: str, params: ProtocolParams) -> int:
    """P_y: 1 iff the announced norm equals ||2 x_q - z_q||^2."""
    nw = params.norm_width
    if len(board) < nw:
        return 0
    announced = int(board[len(board) - nw:], 2) if nw else 0
    return int(announced == sq_dist_scaled(to_digits(x, params), to_digits(z, params)))


def player_x_bit(y: int, z: int, board: str, params: ProtocolParams) -> int:
    """P_x: decode the carries with y, rebuild eta, 1 iff announced == ||2 eta - z_q||^2.

    A board that does not parse under y is rejected (bit 0).
    """
    reader = BitReader(board)
    try:
        C = read_carry(reader, to_digits(y, params), params)
        announced = reader.read(params.norm_width)
    except MalformedCodeError:
        return 0
    if reader.remaining:
        return 0
    e = eta(y, C, params)
    return int(announced == sq_dist_scaled(e, to_digits(z, params)))


def run_typical(x: int, y: int, z: int, params: ProtocolParams) -> Outcome:
    _check_pair(x, y, params)
    _check_target(z, params)
    msg = trans(x, y, params)
    board = msg.bits
    bit_y = player_y_bit(x, z, board, params)
    bit_x = player_x_bit(y, z, board, params)
    return Outcome(
        accept=bool(bit_y and bit_x),
        transcript=Transcript(msg, bit_y, bit_x),
        good_pair=len(msg.carry_code) <= params.B,
    )


def exactly_n(X: int, Y: int, Z: int, params: ProtocolParams) -> Outcome:
    """Decide X + Y + Z == N through x = X, y = Y, z = N - Z."""
    N = params.N
    for v in (X, Y, Z):
        if not 0 <= v <= N:
            raise RangeError(f"input {v} outside [0, {N}]")
    return run_typical(X, Y, N - Z, params)


def shift_index_width(F: ShiftFamily) -> int:
    return ceil_log2(len(F))


def _read_shift(board: str, F: ShiftFamily) -> tuple[tuple[int, int], str]:
    sw = shift_index_width(F)
    index = int(board[:sw], 2) if sw else 0
    return F[index], board[sw:]


def smeared_player_y_bit(x: int, z: int, board: str, F: ShiftFamily,
                         params: ProtocolParams) -> int:
    (d1, d2), rest = _read_shift(board, F)
    z_shifted = z - d1 - d2
    if not 0 <= z_shifted <= 2 * params.N:
        return 0
    return player_y_bit(x - d1, z_shifted, rest, params)


def smeared_player_x_bit(y: int, z: int, board: str, F: ShiftFamily,
                         params: ProtocolParams) -> int:
    (d1, d2), rest = _read_shift(board, F)
    z_shifted = z - d1 - d2
    if not 0 <= z_shifted <= 2 * params.N:
        return 0
    return player_x_bit(y - d2, z_shifted, rest, params)


def run_smeared(x: int, y: int, z: int, params: ProtocolParams, F: ShiftFamily,
                good: GridSet) -> Outcome:
    """Worst-case protocol: P_z names a shift moving (x, y) into the good set."""
    _check_pair(x, y, params)
    _check_target(z, params)
    index = F.find_index(x, y, good)
    if index is None:
        raise CoverError(f"no shift in the family moves ({x}, {y}) into the good set")
    d1, d2 = F[index]
    xs, ys = x - d1, y - d2
    base = trans(xs, ys, params)
    msg = Message(base.carry_code, base.norm_field, uint_bits(index, shift_index_width(F)))
    board = msg.bits
    bit_y = smeared_player_y_bit(x, z, board, F, params)
    bit_x = smeared_player_x_bit(y, z, board, F, params)
    return Outcome(
        accept=bool(bit_y and bit_x),
        transcript=Transcript(msg, bit_y, bit_x),
        good_pair=len(base.carry_code) <= params.B,
    )


def exactly_n_smeared(X: int, Y: int, Z: int, params: ProtocolParams, F: ShiftFamily,
                      good: GridSet) -> Outcome:
    N = params.N
    for v in (X, Y, Z):
        if not 0 <= v <= N:
            raise RangeError(f"input {v} outside [0, {N}]")
    return run_smeared(X, Y, N - Z, params, F, good)


# Raw-carry baseline: P_z posts C verbatim and the vector protocol runs on
# (x_q, y_q, zeta).

def baseline_norm_width(params: ProtocolParams) -> int:
    return norm_field_width(params.d, params.q - 1)


def run_baseline(x: int, y: int, z: int, params: ProtocolParams) -> Outcome:
    _check_pair(x, y, params)
    _check_target(z, params)
    d = params.d
    xs, ys = to_digits(x, params), to_digits(y, params)
    C = carry_vector(x, y, params)
    msg = Message(encode_carry_raw(C), uint_bits(sq_dist(xs, ys), baseline_norm_width(params)))
    board = msg.bits
    posted = tuple(int(b) for b in board[:d])
    announced = int(board[d:], 2)
    target = zeta(z, posted, params)
    bit_y = int(announced == sq_dist_scaled(xs, target))
    bit_x = int(announced == sq_dist_scaled(ys, target))
    return Outcome(bool(bit_y and bit_x), Transcript(msg, bit_y, bit_x), True)


# Sweeps and cost measurement

@dataclass
class SweepResult:
    checked: int = 0
    mismatches: int = 0
    first_counterexample: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def sample_triples(N: int, count: int, seed: int = 0) -> np.ndarray:
    """Seeded (X, Y, Z) samples, a third of them on X + Y + Z = N and a third near it."""
    rng = np.random.default_rng(seed)
    X = rng.integers(0, N + 1, count)
    Y = rng.integers(0, N + 1, count)
    Z = rng.integers(0, N + 1, count)
    kind = rng.integers(0, 3, count)
    target = N - X - Y
    jitter = rng.choice(np.array([-2, -1, 1, 2]), count)
    Z = np.where(kind == 1, target, Z)
    Z = np.where(kind == 2, target + jitter, Z)
    Z = np.where((Z < 0) | (Z > N), rng.integers(0, N + 1, count), Z)
    return np.stack([X, Y, Z], axis=1)


def verify_sweep(params: ProtocolParams, samples: int | None = None, seed: int = 0,
                 mode: str = "typical", F: ShiftFamily | None = None,
                 good: GridSet | None = None) -> SweepResult:
    """Check exactly-N correctness against X + Y + Z == N, exhaustively or on samples."""
    N = params.N
    if mode == "smeared":
        if F is None or good is None:
            raise ValueError("smeared sweep needs a shift family and good set")

        def run(X, Y, Z):
            return exactly_n_smeared(X, Y, Z, params, F, good)
    elif mode == "typical":
        def run(X, Y, Z):
            return exactly_n(X, Y, Z, params)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    if samples is None:
        triples = ((X, Y, Z) for X in range(N + 1) for Y in range(N + 1) for Z in range(N + 1))
    else:
        triples = map(tuple, sample_triples(N, samples, seed).tolist())

    result = SweepResult()
    for X, Y, Z in triples:
        result.checked += 1
        if run(X, Y, Z).accept != (X + Y + Z == N):
            result.mismatches += 1
            if result.first_counterexample is None:
                result.first_counterexample = (X, Y, Z)
    return result


@dataclass
class CostReport:
    N: int
    mode: str
    pairs: int
    min_cost: int
    mean_cost: float
    max_cost: int
    max_good_cost: int
    good_fraction: float
    analytic_cost: float
    shift_width: int
    baseline_cost: int
    extra: dict = field(default_factory=dict)

    @property
    def max_over_sqrt_log_n(self) -> float:
        return self.max_good_cost / math.sqrt(math.log2(self.N))

    def as_record(self) -> dict:
        rec = {k: v for k, v in self.__dict__.items() if k != "extra"}
        rec["max_over_sqrt_log_n"] = self.max_over_sqrt_log_n
        rec.update(self.extra)
        return rec


def _pairs(N: int, samples: int | None, seed: int):
    if samples is None:
        return ((x, y) for x in range(N + 1) for y in range(N + 1))
    rng = np.random.default_rng(seed)
    xy = rng.integers(0, N + 1, (samples, 2))
    return map(tuple, xy.tolist())


def measure_costs(params: ProtocolParams, mode: str = "typical", samples: int | None = None,
                  seed: int = 0, F: ShiftFamily | None = None,
                  good: GridSet | None = None) -> CostReport:
    """Transcript-length statistics over all pairs, or over ``samples`` seeded pairs.

    Transcript length depends on (x, y) only, so z is not enumerated.
    """
    N = params.N
    shift_width = 0
    if mode == "smeared":
        if good is None or F is None:
            from .shift_cover import good_set, greedy_cover

            good = good_set(params) if good is None else good
            F = greedy_cover(good) if F is None else F
        shift_width = shift_index_width(F)
    elif mode != "typical":
        raise ValueError(f"unknown mode {mode!r}")

    count = 0
    total = 0
    lo, hi, hi_good = None, 0, 0
    n_good = 0
    for x, y in _pairs(N, samples, seed):
        if mode == "smeared":
            idx = F.find_index(x, y, good)
            if idx is None:
                raise CoverError(f"no shift covers ({x}, {y})")
            d1, d2 = F[idx]
            msg = trans(x - d1, y - d2, params)
            good_pair = (x, y) in good
        else:
            msg = trans(x, y, params)
            good_pair = len(msg.carry_code) <= params.B
        cost = shift_width + len(msg) + 2
        count += 1
        total += cost
        lo = cost if lo is None else min(lo, cost)
        hi = max(hi, cost)
        if good_pair:
            n_good += 1
        if good_pair or mode == "smeared":
            hi_good = max(hi_good, cost)
    return CostReport(
        N=N,
        mode=mode,
        pairs=count,
        min_cost=lo or 0,
        mean_cost=total / count if count else 0.0,
        max_cost=hi,
        max_good_cost=hi_good,
        good_fraction=n_good / count if count else 0.0,
        analytic_cost=params.analytic_cost,
        shift_width=shift_width,
        baseline_cost=params.d + baseline_norm_width(params) + 2,
    )
