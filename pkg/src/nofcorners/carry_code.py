"""Conditional coding of the carry vector given y.

Positions are split into ``r`` buckets by the value of the y digit
(bucket ``j`` holds the positions with ``j*q/r <= y_i < (j+1)*q/r``, 0-based).
For each bucket, in order, the code holds

* the number ``k`` of carries in the bucket, in ``bit_length(|S_j|)`` bits;
* the colex rank of the carry positions among the ``k``-subsets of the
  bucket, in ``ceil(log2(C(|S_j|, k)))`` bits (zero bits when the subset is
  forced).

All field widths follow from y and the preceding fields, so a party that sees
y (P_x) can parse the code without framing.  Fields are written most
significant bit first.
"""

from __future__ import annotations

import math
from functools import lru_cache
from math import comb
from typing import Sequence, Tuple

import numpy as np

from .bits import BitReader, ceil_log2, uint_bits
from .errors import MalformedCodeError, ShapeError
from .radix import CarryVector, DigitVec, ProtocolParams

BucketPartition = Tuple[Tuple[int, ...], ...]


def binary_entropy(u: float) -> float:
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"binary entropy undefined at {u}")
    if u == 0.0 or u == 1.0:
        return 0.0
    return -u * math.log2(u) - (1.0 - u) * math.log2(1.0 - u)


def entropy_riemann_sum(r: int, midpoint: bool = False) -> float:
    """(1/r) * sum_{j=1..r} h(j/r), or h((j - 1/2)/r) with ``midpoint``."""
    off = 0.5 if midpoint else 0.0
    return sum(binary_entropy((j - off) / r) for j in range(1, r + 1)) / r


def bucket_labels(y_digits: Sequence[int], params: ProtocolParams) -> Tuple[int, ...]:
    q, r = params.q, params.r
    return tuple(yi * r // q for yi in y_digits)


def make_buckets(y_digits: DigitVec, params: ProtocolParams) -> BucketPartition:
    buckets: list[list[int]] = [[] for _ in range(params.r)]
    for i, label in enumerate(bucket_labels(y_digits, params)):
        buckets[label].append(i)
    return tuple(tuple(b) for b in buckets)


@lru_cache(maxsize=None)
def rank_width(n: int, k: int) -> int:
    return ceil_log2(comb(n, k))


def _check_shape(C: Sequence[int], y_digits: Sequence[int], params: ProtocolParams):
    if len(C) != params.d or len(y_digits) != params.d:
        raise ShapeError(f"expected length {params.d}, got C={len(C)}, y={len(y_digits)}")


def encode_carry(C: CarryVector, y_digits: DigitVec, params: ProtocolParams) -> str:
    _check_shape(C, y_digits, params)
    parts = []
    for positions in make_buckets(y_digits, params):
        n = len(positions)
        k = 0
        rank = 0
        for t, i in enumerate(positions):
            if C[i]:
                k += 1
                rank += comb(t, k)
        parts.append(uint_bits(k, n.bit_length()))
        parts.append(uint_bits(rank, rank_width(n, k)))
    return "".join(parts)


def read_carry(reader: BitReader, y_digits: DigitVec, params: ProtocolParams) -> CarryVector:
    """Parse one carry code starting at ``reader.pos``; advances the reader past it."""
    bits = [0] * params.d
    for positions in make_buckets(y_digits, params):
        n = len(positions)
        k = reader.read(n.bit_length())
        if k > n:
            raise MalformedCodeError(f"count {k} exceeds bucket size {n}")
        total = comb(n, k)
        rank = reader.read(rank_width(n, k))
        if rank >= total:
            raise MalformedCodeError(f"rank {rank} out of range for C({n},{k})={total}")
        for t in range(n - 1, -1, -1):
            if k == 0:
                break
            c = comb(t, k)
            if rank >= c:
                bits[positions[t]] = 1
                rank -= c
                k -= 1
    return tuple(bits)


def decode_carry(code: str, y_digits: DigitVec, params: ProtocolParams) -> CarryVector:
    if len(y_digits) != params.d:
        raise ShapeError(f"expected {params.d} digits of y, got {len(y_digits)}")
    reader = BitReader(code)
    C = read_carry(reader, y_digits, params)
    if reader.remaining:
        raise MalformedCodeError(f"{reader.remaining} trailing bits after carry code")
    return C


def carry_code_length(C: CarryVector, y_digits: DigitVec, params: ProtocolParams) -> int:
    """Length of ``encode_carry(C, y_digits, params)`` without building it."""
    _check_shape(C, y_digits, params)
    sizes = [0] * params.r
    ones = [0] * params.r
    for label, c in zip(bucket_labels(y_digits, params), C):
        sizes[label] += 1
        ones[label] += c
    return sum(n.bit_length() + rank_width(n, k) for n, k in zip(sizes, ones))


def rank_bits(C: CarryVector, y_digits: DigitVec, params: ProtocolParams) -> int:
    """Total width of the rank fields alone."""
    sizes = [0] * params.r
    ones = [0] * params.r
    for label, c in zip(bucket_labels(y_digits, params), C):
        sizes[label] += 1
        ones[label] += c
    return sum(rank_width(n, k) for n, k in zip(sizes, ones))


def encode_carry_raw(C: CarryVector) -> str:
    return "".join("1" if c else "0" for c in C)


def entropy_bound_bits(y_digits: DigitVec, params: ProtocolParams,
                       midpoint: bool | None = None) -> float:
    """sum_j |S_j| * h(j/r): the conditional-entropy bound in total bits.

    With ``r == 1`` the plain bound degenerates to d*h(1) = 0, so by default
    bucket ``j`` is then evaluated at its midpoint (j - 1/2)/r instead.
    """
    if midpoint is None:
        midpoint = params.r == 1
    off = 0.5 if midpoint else 0.0
    r = params.r
    return sum(len(s) * binary_entropy((j + 1 - off) / r)
               for j, s in enumerate(make_buckets(y_digits, params)))


# Vectorised codec, bit-exact with the scalar one, for exhaustive sweeps.
# Codes are packed into int64 so the total length must stay below 63 bits.

_MAX_PACKED = 62


def _tables(d: int):
    if d > 62:
        raise ValueError("batch codec supports d <= 62")
    dt = np.int32 if d <= 30 else np.int64
    binom = np.zeros((d + 1, d + 1), dtype=dt)
    rwidth = np.zeros((d + 1, d + 1), dtype=dt)
    for n in range(d + 1):
        for k in range(n + 1):
            binom[n, k] = comb(n, k)
            rwidth[n, k] = rank_width(n, k)
    cwidth = np.array([n.bit_length() for n in range(d + 1)], dtype=dt)
    return binom, rwidth, cwidth


def encode_carry_batch(C: np.ndarray, labels: np.ndarray, r: int):
    """Encode many carry vectors at once.

    ``C`` and ``labels`` are (M, d) integer arrays; ``labels`` holds 0-based
    bucket indices as produced by :func:`bucket_labels`.  Returns
    ``(codes, lengths)`` where ``codes[m]`` read as a ``lengths[m]``-bit
    big-endian integer equals the scalar code.
    """
    labels = np.asarray(labels)
    M, d = labels.shape
    binom, rwidth, cwidth = _tables(d)
    C = np.asarray(C, dtype=binom.dtype)
    codes = np.zeros(M, dtype=np.int64)
    lengths = np.zeros(M, dtype=np.int64)
    for j in range(r):
        member = (labels == j).astype(binom.dtype)
        t = np.cumsum(member, axis=1, dtype=member.dtype) - member   # index within the bucket
        hits = C * member
        k_upto = np.cumsum(hits, axis=1, dtype=hits.dtype)   # 1-based index of each carry
        rank = (hits * binom[t, k_upto]).sum(axis=1, dtype=np.int64)
        n = member.sum(axis=1)
        k = k_upto[:, -1]
        cw = cwidth[n]
        rw = rwidth[n, k]
        codes = (codes << cw.astype(np.int64)) | k
        codes = (codes << rw.astype(np.int64)) | rank
        lengths += cw + rw
    if lengths.size and lengths.max() > _MAX_PACKED:
        raise ValueError("carry code too long for packed batch encoding")
    return codes, lengths


def decode_carry_batch(codes: np.ndarray, lengths: np.ndarray, labels: np.ndarray, r: int):
    """Inverse of :func:`encode_carry_batch`.

    Returns ``(C, ok)``; ``ok[m]`` is False where the code is malformed
    (count or rank out of range, or length not consumed exactly).
    """
    codes = np.asarray(codes, dtype=np.int64)
    lengths = np.asarray(lengths, dtype=np.int64)
    labels = np.asarray(labels)
    M, d = labels.shape
    binom, rwidth, cwidth = _tables(d)
    ok = np.ones(M, dtype=bool)
    pos = np.zeros(M, dtype=np.int64)
    out = np.zeros((M, d), dtype=np.int64)

    def take(width):
        nonlocal pos
        shift = lengths - pos - width
        ok[shift < 0] = False
        val = (codes >> np.maximum(shift, 0)) & ((np.int64(1) << width) - 1)
        pos = pos + width
        return val.astype(binom.dtype)

    for j in range(r):
        member = labels == j
        t = (np.cumsum(member, axis=1, dtype=binom.dtype) - member).astype(binom.dtype)
        n = member.sum(axis=1, dtype=binom.dtype)
        k = take(cwidth[n])
        bad = k > n
        ok[bad] = False
        k = np.where(bad, 0, k)
        rank = take(rwidth[n, k])
        bad = rank >= binom[n, k]
        ok[bad] = False
        rank = np.where(bad, 0, rank)
        for i in range(d - 1, -1, -1):
            c = binom[t[:, i], k]
            hit = member[:, i] & (k > 0) & (rank >= c)
            rank = rank - np.where(hit, c, 0)
            k = k - hit
            out[:, i] |= hit
    ok &= pos == lengths
    return out, ok
