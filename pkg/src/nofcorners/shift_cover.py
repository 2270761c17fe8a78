"""Grid subsets of [0, N]^2 and covers of the grid by translates of one subset.

A shift ``(d1, d2)`` covers the point ``p`` when ``p - (d1, d2)`` lies in the
set, i.e. the translate ``S + (d1, d2)`` contains ``p``.  Shifts range over
[-N, N]^2.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .carry_code import rank_width
from .errors import CoverError, ParseError, ShapeError
from .radix import ProtocolParams


class GridSet:
    """Subset of the grid [0, N]^2 stored as a boolean matrix indexed ``[x, y]``."""

    __slots__ = ("N", "membership", "size")

    def __init__(self, N: int, membership: np.ndarray):
        m = np.asarray(membership, dtype=bool)
        if m.shape != (N + 1, N + 1):
            raise ShapeError(f"membership shape {m.shape} does not match N={N}")
        self.N = N
        self.membership = m
        self.size = int(np.count_nonzero(m))

    @classmethod
    def full(cls, N: int) -> "GridSet":
        return cls(N, np.ones((N + 1, N + 1), dtype=bool))

    @classmethod
    def empty(cls, N: int) -> "GridSet":
        return cls(N, np.zeros((N + 1, N + 1), dtype=bool))

    @classmethod
    def from_points(cls, N: int, points: Iterable[Sequence[int]]) -> "GridSet":
        m = np.zeros((N + 1, N + 1), dtype=bool)
        pts = np.asarray(list(points), dtype=np.int64).reshape(-1, 2)
        if pts.size:
            if pts.min() < 0 or pts.max() > N:
                raise ShapeError(f"point outside [0, {N}]^2")
            m[pts[:, 0], pts[:, 1]] = True
        return cls(N, m)

    def __contains__(self, point) -> bool:
        x, y = point
        return 0 <= x <= self.N and 0 <= y <= self.N and bool(self.membership[x, y])

    def __len__(self):
        return self.size

    def __eq__(self, other):
        if not isinstance(other, GridSet):
            return NotImplemented
        return self.N == other.N and np.array_equal(self.membership, other.membership)

    def __repr__(self):
        return f"GridSet(N={self.N}, size={self.size})"

    @property
    def cells(self) -> int:
        return (self.N + 1) ** 2

    @property
    def density(self) -> float:
        return self.size / self.cells

    def points(self) -> np.ndarray:
        """Members as an (size, 2) array in ascending row-major (x, then y) order."""
        return np.argwhere(self.membership)

    def to_text(self) -> str:
        lines = [f"N {self.N}"]
        lines.extend(f"{x} {y}" for x, y in self.points().tolist())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GridSet":
        lines = text.splitlines()
        if not lines:
            raise ParseError("empty grid-set file", 1)
        head = lines[0].split()
        if len(head) != 2 or head[0] != "N" or not head[1].isdigit():
            raise ParseError(f"expected header 'N <value>', got {lines[0]!r}", 1)
        N = int(head[1])
        pts = []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split()
            try:
                x, y = (int(v) for v in parts)
            except ValueError:
                raise ParseError(f"expected 'x y', got {line!r}", lineno) from None
            if not (0 <= x <= N and 0 <= y <= N):
                raise ParseError(f"point ({x}, {y}) outside [0, {N}]^2", lineno)
            pts.append((x, y))
        return cls.from_points(N, pts)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "GridSet":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


class ShiftFamily:
    """Ordered shifts; a shift's position is the index P_z writes on the board."""

    __slots__ = ("shifts",)

    def __init__(self, shifts: Iterable[Sequence[int]] = ()):
        self.shifts = [(int(a), int(b)) for a, b in shifts]

    def __len__(self):
        return len(self.shifts)

    def __getitem__(self, i):
        return self.shifts[i]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.shifts)

    def __eq__(self, other):
        return isinstance(other, ShiftFamily) and self.shifts == other.shifts

    def __repr__(self):
        return f"ShiftFamily({self.shifts!r})"

    def find_index(self, x: int, y: int, good: GridSet) -> Optional[int]:
        for i, (d1, d2) in enumerate(self.shifts):
            if (x - d1, y - d2) in good:
                return i
        return None

    def to_text(self) -> str:
        return "".join(f"{a} {b}\n" for a, b in self.shifts)

    @classmethod
    def from_text(cls, text: str) -> "ShiftFamily":
        shifts = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                a, b = (int(v) for v in line.split())
            except ValueError:
                raise ParseError(f"expected 'd1 d2', got {line!r}", lineno) from None
            shifts.append((a, b))
        return cls(shifts)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ShiftFamily":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def code_length_grid(params: ProtocolParams) -> np.ndarray:
    """Carry-code length for every pair, as an (N+1, N+1) array indexed [x, y]."""
    N, q, d, r = params.N, params.q, params.d, params.r
    vals = np.arange(N + 1, dtype=np.int64)
    digits = np.empty((N + 1, d), dtype=np.int64)
    rest = vals.copy()
    for i in range(d):
        digits[:, i] = rest % q
        rest //= q
    labels = digits * r // q
    sizes = np.zeros((N + 1, r), dtype=np.int64)
    for j in range(r):
        sizes[:, j] = (labels == j).sum(axis=1)
    ones = np.zeros((N + 1, N + 1, r), dtype=np.int64)
    carry = np.zeros((N + 1, N + 1), dtype=np.int64)
    ycols = np.arange(N + 1)
    for i in range(d):
        carry = (digits[:, None, i] + digits[None, :, i] + carry >= q).astype(np.int64)
        ones[:, ycols, labels[:, i]] += carry
    rwidth = np.zeros((d + 1, d + 1), dtype=np.int64)
    for n in range(d + 1):
        for k in range(n + 1):
            rwidth[n, k] = rank_width(n, k)
    cwidth = np.array([n.bit_length() for n in range(d + 1)], dtype=np.int64)
    total = np.zeros((N + 1, N + 1), dtype=np.int64)
    for j in range(r):
        n = sizes[:, j]
        total += cwidth[n][None, :] + rwidth[n[None, :], ones[:, :, j]]
    return total


def good_set(params: ProtocolParams, B: int | float | None = None) -> GridSet:
    """Pairs whose carry code fits in ``B`` bits (default ``params.B``)."""
    budget = params.B if B is None else B
    return GridSet(params.N, code_length_grid(params) <= budget)


def fractional_cover_check(S: GridSet) -> bool:
    """Uniform weight 10/|grid| on every translate is a fractional cover iff |S| >= |grid|/10."""
    return 10 * S.size >= S.cells


def cover_bound(N: int) -> float:
    return 80 * math.log2(N)


def shifted(S: GridSet, d1: int, d2: int) -> np.ndarray:
    """Membership matrix of (S + (d1, d2)) clipped to the grid."""
    n = S.N + 1
    out = np.zeros((n, n), dtype=bool)
    if abs(d1) >= n or abs(d2) >= n:
        return out
    src = S.membership[max(0, -d1):n - max(0, d1), max(0, -d2):n - max(0, d2)]
    out[max(0, d1):max(0, d1) + src.shape[0], max(0, d2):max(0, d2) + src.shape[1]] = src
    return out


def coverage_scores(S: GridSet, uncovered: np.ndarray) -> np.ndarray:
    """Newly covered counts for every shift; entry [d1 + N, d2 + N] is shift (d1, d2)."""
    corr = fftconvolve(uncovered.astype(np.float64),
                       S.membership[::-1, ::-1].astype(np.float64), mode="full")
    return np.rint(corr).astype(np.int64)


def greedy_cover(S: GridSet) -> ShiftFamily:
    """Greedy set cover over all translates, ties to the lexicographically smallest shift."""
    if S.size == 0:
        raise CoverError("cannot cover the grid with translates of an empty set")
    N = S.N
    covered = np.zeros_like(S.membership)
    shifts = []
    while not covered.all():
        scores = coverage_scores(S, ~covered)
        best = scores.max()
        if best <= 0:
            raise CoverError("greedy step made no progress")
        i, j = np.argwhere(scores == best)[0]
        d1, d2 = int(i) - N, int(j) - N
        shifts.append((d1, d2))
        covered |= shifted(S, d1, d2)
    return ShiftFamily(shifts)


def randomized_cover(S: GridSet, seed: int = 0, trials: int = 20, pool: int = 64,
                     max_shifts: int | None = None) -> ShiftFamily:
    """Randomised greedy cover: each round picks a random uncovered point and takes
    the best of ``pool`` shifts that cover it (the identity shift is also tried first).
    """
    if not fractional_cover_check(S):
        raise CoverError("set too sparse for a uniform fractional cover")
    N = S.N
    if max_shifts is None:
        max_shifts = max(1, math.ceil(cover_bound(max(N, 2))))
    rng = np.random.default_rng(seed)
    members = S.points()
    for _ in range(trials):
        covered = np.zeros_like(S.membership)
        shifts: list[tuple[int, int]] = []
        candidates = [(0, 0)]
        while len(shifts) < max_shifts:
            best, best_gain = None, 0
            for d1, d2 in sorted(set(candidates)):
                gain = int(np.count_nonzero(shifted(S, d1, d2) & ~covered))
                if gain > best_gain:
                    best, best_gain = (d1, d2), gain
            if best is not None:
                shifts.append(best)
                covered |= shifted(S, *best)
            if covered.all():
                return ShiftFamily(shifts)
            open_pts = np.argwhere(~covered)
            p = open_pts[rng.integers(len(open_pts))]
            picks = members[rng.integers(len(members), size=min(pool, len(members)))]
            candidates = [tuple(int(v) for v in p - s) for s in picks]
    raise CoverError(f"no cover within {max_shifts} shifts after {trials} trials")


def find_uncovered(S: GridSet, F: Iterable[Sequence[int]]) -> Optional[tuple[int, int]]:
    """First point of the grid (row-major) not covered by any translate, or None."""
    covered = np.zeros_like(S.membership)
    for d1, d2 in F:
        covered |= shifted(S, d1, d2)
    holes = np.argwhere(~covered)
    if len(holes):
        return int(holes[0, 0]), int(holes[0, 1])
    return None


def verify_cover(S: GridSet, F: Iterable[Sequence[int]]) -> bool:
    return find_uncovered(S, F) is None
