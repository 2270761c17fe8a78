"""Corner-free sets from protocol transcripts, and the Behrend baseline.

If a one-round protocol decides x + y = z correctly for every z, the pairs
sharing one P_z message contain no corner (x, y), (x+t, y), (x, y+t) with
t != 0: on input (x, y, x+y+t) each verifier's view coincides with its view on
a true instance, so both would accept.
"""

from __future__ import annotations

from collections.abc import Mapping
from typing import Iterator, Optional

import numpy as np

from .protocol import trans
from .radix import ProtocolParams
from .shift_cover import GridSet, good_set


class TranscriptClassMap(Mapping):
    """Message bits -> GridSet of the good pairs producing that message.

    Classes are kept as point arrays and materialised as GridSets on access.
    """

    def __init__(self, N: int, classes: dict[str, np.ndarray]):
        self.N = N
        self._points = classes

    def __getitem__(self, key: str) -> GridSet:
        return GridSet.from_points(self.N, self._points[key])

    def __iter__(self) -> Iterator[str]:
        return iter(self._points)

    def __len__(self):
        return len(self._points)

    def size_of(self, key: str) -> int:
        return len(self._points[key])

    def sizes(self) -> dict[str, int]:
        return {k: len(v) for k, v in self._points.items()}

    def total(self) -> int:
        return sum(len(v) for v in self._points.values())

    def largest_key(self) -> str:
        if not self._points:
            raise ValueError("no transcript classes")
        return min(self._points, key=lambda k: (-len(self._points[k]), k))


def transcript_classes(params: ProtocolParams, good: GridSet | None = None) -> TranscriptClassMap:
    if good is None:
        good = good_set(params)
    groups: dict[str, list[tuple[int, int]]] = {}
    for x, y in good.points().tolist():
        groups.setdefault(trans(x, y, params).bits, []).append((x, y))
    return TranscriptClassMap(params.N, {k: np.array(v, dtype=np.int64) for k, v in groups.items()})


def largest_class(classes: TranscriptClassMap) -> GridSet:
    """A class of maximum size; ties go to the lexicographically smallest message."""
    return classes[classes.largest_key()]


def find_corner(S: GridSet) -> Optional[tuple[int, int, int]]:
    """First corner (x, y, t) with (x, y), (x+t, y), (x, y+t) all in S, t != 0.

    Points are scanned in row-major order (x, then y) and t ascending.  For a
    fixed row x, every pair of members (x, y), (x, y+t) fixes t, and the third
    point is probed in the membership matrix.
    """
    M = S.membership
    N = S.N
    for x in np.flatnonzero(M.any(axis=1)):
        ys = np.flatnonzero(M[x])
        if len(ys) < 2:
            continue
        y1 = np.repeat(ys, len(ys))
        t = np.tile(ys, len(ys)) - y1
        keep = (t != 0) & (x + t >= 0) & (x + t <= N)
        y1, t = y1[keep], t[keep]
        hit = M[x + t, y1]
        if hit.any():
            # repeat/tile order is already (y, t) ascending
            k = np.flatnonzero(hit)[0]
            return int(x), int(y1[k]), int(t[k])
    return None


def verify_corner_free(S: GridSet) -> bool:
    return find_corner(S) is None


def has_3ap(values) -> Optional[tuple[int, int, int]]:
    """First (a, b, c) with a < b < c, a + c = 2b inside ``values``, or None."""
    vals = sorted(set(int(v) for v in values))
    present = set(vals)
    for i, a in enumerate(vals):
        for c in vals[i + 1:]:
            if (a + c) % 2 == 0 and (a + c) // 2 in present:
                return a, (a + c) // 2, c
    return None


def _behrend_candidates(M: int, b: int, n: int):
    limit = min(M, b ** n)
    m = (b - 1) // 2
    vals = np.arange(limit, dtype=np.int64)
    rest = vals.copy()
    ok = np.ones(limit, dtype=bool)
    norm = np.zeros(limit, dtype=np.int64)
    for _ in range(n):
        digit = rest % b
        rest //= b
        ok &= digit <= m
        norm += digit * digit
    vals, norm = vals[ok], norm[ok]
    if m == 1:
        # digits in {0, 1}: a + c = 2b forces a = c digitwise, no shell needed
        return vals
    counts = np.bincount(norm)
    return vals[norm == int(np.argmax(counts))]


def behrend_ap3_set(M: int, bases=range(2, 41), dims=range(2, 21)) -> tuple[int, ...]:
    """A 3-AP-free subset of [0, M) from Behrend's sphere construction.

    Integers whose base-b digits are at most (b-1)//2 add without carries, so a
    3-AP among them is a 3-AP of digit vectors; restricting to one sphere
    shell |a|^2 = k removes all of those.  The base and digit count with the
    largest best shell win (ties: smaller b, then smaller n).
    """
    if M < 1:
        raise ValueError("M must be positive")
    best: tuple[int, ...] = (0,)
    for b in bases:
        if (b - 1) // 2 == 0:
            continue
        prev_limit = None
        for n in dims:
            limit = min(M, b ** n)
            if limit == prev_limit:
                break
            prev_limit = limit
            cand = _behrend_candidates(M, b, n)
            if len(cand) > len(best):
                best = tuple(int(v) for v in cand)
    return best


def corner_free_from_differences(N: int, D) -> GridSet:
    """{(x, y) in [0, N)^2 : x - y in D}; corner-free whenever D is 3-AP-free."""
    diffs = np.arange(N)[:, None] - np.arange(N)[None, :]
    return GridSet(N - 1, np.isin(diffs, np.fromiter(D, dtype=np.int64)))


def behrend_difference_set(N: int) -> tuple[int, ...]:
    """Translate of a Behrend set inside (-N, N) maximising sum(N - |c|)."""
    A = np.array(behrend_ap3_set(max(1, 2 * N - 1)), dtype=np.int64)
    lo, hi = int(A.max()) - (N - 1), int(A.min()) + (N - 1)
    shifts = np.arange(lo, hi + 1)
    weight = (N - np.abs(A[None, :] - shifts[:, None])).sum(axis=1)
    s = int(shifts[int(np.argmax(weight))])
    return tuple(int(a - s) for a in A)


def behrend_corner_free(N: int) -> GridSet:
    if N < 2:
        raise ValueError("N must be at least 2")
    return corner_free_from_differences(N, behrend_difference_set(N))


def density_report(params: ProtocolParams, verify: bool = True) -> dict:
    """One comparison row: largest protocol class against the Behrend set on [0, N]^2."""
    N = params.N
    good = good_set(params)
    classes = transcript_classes(params, good)
    key = classes.largest_key()
    best = classes[key]
    behrend = behrend_corner_free(N + 1)
    cells = (N + 1) ** 2
    row = {
        "N": N,
        "q": params.q,
        "d": params.d,
        "r": params.r,
        "B": params.B,
        "good_size": good.size,
        "good_fraction": good.size / cells,
        "classes": len(classes),
        "protocol_size": best.size,
        "protocol_density": best.size / cells,
        "behrend_size": behrend.size,
        "behrend_density": behrend.size / cells,
    }
    if verify:
        row["protocol_corner_free"] = verify_corner_free(best)
        row["behrend_corner_free"] = verify_corner_free(behrend)
    return row
