import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from nofcorners.bits import BitReader
from nofcorners.carry_code import (binary_entropy, bucket_labels, carry_code_length,
                                   decode_carry, decode_carry_batch, encode_carry,
                                   encode_carry_batch, encode_carry_raw, entropy_bound_bits,
                                   entropy_riemann_sum, make_buckets, rank_bits, read_carry)
from nofcorners.errors import MalformedCodeError
from nofcorners.radix import LAMBDA, ProtocolParams, default_budget

from oracles import colex_subsets


def params(q, d, r=None):
    # the codec only reads q, d and r; q=2, d=1 cannot hold any valid N
    q = max(q, 3) if d == 1 else q
    r = r if r is not None else max(1, round(math.sqrt(d)))
    return ProtocolParams(N=max(1, (q ** d - 1) // 2), q=q, d=d, r=r, B=default_budget(d))


def h_oracle(u):
    return 0.0 if u in (0, 1) else -(u * math.log(u) + (1 - u) * math.log(1 - u)) / math.log(2)


def test_binary_entropy_values():
    assert binary_entropy(0) == 0 and binary_entropy(1) == 0
    assert binary_entropy(0.5) == 1
    for u in np.linspace(0, 1, 101):
        assert binary_entropy(float(u)) == pytest.approx(h_oracle(float(u)), abs=1e-12)
    with pytest.raises(ValueError):
        binary_entropy(1.5)


def test_entropy_integral_is_lambda():
    val, _ = quad(binary_entropy, 0, 1, epsabs=1e-12, epsrel=1e-12)
    assert val == pytest.approx(0.7213475204444817, abs=1e-6)
    assert LAMBDA == pytest.approx(0.7213475204444817, abs=1e-15)


def test_make_buckets_examples():
    p = params(4, 4, r=2)
    assert make_buckets((0, 0, 3, 3), p) == ((0, 1), (2, 3))
    assert make_buckets((0, 0, 0, 0), p) == ((0, 1, 2, 3), ())
    p1 = params(4, 4, r=1)
    assert make_buckets((3, 1, 2, 0), p1) == ((0, 1, 2, 3),)


def test_bucket_rule_matches_interval_definition():
    for q in range(2, 17):
        for r in range(1, 7):
            for y in range(q):
                j = y * r // q
                # bucket j (0-based) is q*j/r <= y < q*(j+1)/r
                assert q * j <= y * r < q * (j + 1)


def test_encode_examples():
    p = params(4, 4, r=2)
    y = (0, 0, 3, 3)
    code = encode_carry((0, 0, 1, 0), y, p)
    assert code == "00" + "" + "01" + "0"
    assert len(code) == 5
    assert decode_carry(code, y, p) == (0, 0, 1, 0)
    zero = encode_carry((0, 0, 0, 0), y, p)
    assert zero == "0000"
    assert decode_carry(zero, y, p) == (0, 0, 0, 0)


def test_decode_rejects_malformed():
    p = params(4, 4, r=2)
    y = (0, 0, 3, 3)
    with pytest.raises(MalformedCodeError):
        decode_carry("11" + "00", y, p)        # count 3 in a bucket of 2
    with pytest.raises(MalformedCodeError):
        decode_carry("0001", y, p)             # truncated rank field
    with pytest.raises(MalformedCodeError):
        decode_carry("000100", y, p)           # trailing bit
    p3 = params(4, 6, r=1)
    # C(6, 3) = 20 needs 5 bits; rank 31 is out of range
    with pytest.raises(MalformedCodeError):
        decode_carry("011" + "11111", (0,) * 6, p3)


def test_colex_rank_matches_enumeration():
    for n in range(0, 9):
        p = params(2, max(n, 1), r=1)
        for k in range(n + 1):
            if n == 0:
                continue
            for rank, subset in enumerate(colex_subsets(n, k)):
                C = tuple(1 if i in subset else 0 for i in range(n))
                code = encode_carry(C, (0,) * n, p)
                width = math.comb(n, k) - 1
                assert code == format(k, f"0{n.bit_length()}b") + (
                    format(rank, f"0{width.bit_length()}b") if width else "")


def test_layout_length_formula_random():
    rng = random.Random(5)
    for _ in range(3000):
        q, d = rng.randint(2, 16), rng.randint(1, 40)
        r = rng.randint(1, d)
        p = params(q, d, r)
        q = p.q
        y = tuple(rng.randrange(q) for _ in range(d))
        C = tuple(rng.randint(0, 1) for _ in range(d))
        code = encode_carry(C, y, p)
        S = make_buckets(y, p)
        ks = [sum(C[i] for i in s) for s in S]
        expect = sum(math.ceil(math.log2(len(s) + 1)) for s in S) + sum(
            math.ceil(math.log2(math.comb(len(s), k))) for s, k in zip(S, ks))
        assert len(code) == expect == carry_code_length(C, y, p)
        assert decode_carry(code, y, p) == C


@settings(max_examples=400, deadline=None)
@given(st.integers(2, 16), st.integers(1, 64), st.data())
def test_round_trip_property(q, d, data):
    r = data.draw(st.integers(1, d))
    p = params(q, d, r)
    q = p.q
    y = tuple(data.draw(st.lists(st.integers(0, q - 1), min_size=d, max_size=d)))
    C = tuple(data.draw(st.lists(st.integers(0, 1), min_size=d, max_size=d)))
    assert decode_carry(encode_carry(C, y, p), y, p) == C


def test_read_carry_stops_at_code_end():
    p = params(4, 4, r=2)
    y = (0, 0, 3, 3)
    reader = BitReader(encode_carry((0, 0, 1, 0), y, p) + "1011")
    assert read_carry(reader, y, p) == (0, 0, 1, 0)
    assert reader.remaining == 4


def test_decoder_never_needs_x():
    # the decoder's only inputs are the code, y and the public params
    import inspect
    assert list(inspect.signature(decode_carry).parameters) == ["code", "y_digits", "params"]


def test_raw_encoding():
    assert encode_carry_raw((0, 0, 0)) == "000"
    assert encode_carry_raw((1, 0, 1)) == "101"
    assert len(encode_carry_raw((1,) * 17)) == 17


def test_entropy_bound_examples():
    p1 = params(4, 8, r=1)
    assert entropy_bound_bits((0,) * 8, p1) == pytest.approx(8.0)
    assert entropy_bound_bits((0,) * 8, p1, midpoint=False) == 0.0
    # d = 100, r = 10, ten positions per bucket
    p = params(10, 100, r=10)
    y = tuple(i % 10 for i in range(100))
    plain = 10 * sum(h_oracle(j / 10) for j in range(1, 11))
    mid = 10 * sum(h_oracle((j - 0.5) / 10) for j in range(1, 11))
    assert plain == pytest.approx(70.8633, abs=1e-4)
    assert mid == pytest.approx(72.6872, abs=1e-4)
    assert entropy_bound_bits(y, p) == pytest.approx(plain, abs=1e-9)
    assert entropy_bound_bits(y, p, midpoint=True) == pytest.approx(mid, abs=1e-9)


def test_riemann_sum_limit():
    assert abs(entropy_riemann_sum(2048) - LAMBDA) < 1e-3
    assert abs(entropy_riemann_sum(2048, midpoint=True) - LAMBDA) < 1e-5


def test_batch_codec_bit_exact_with_scalar():
    rng = np.random.default_rng(9)
    for q, d in [(2, 6), (3, 9), (4, 10), (16, 20)]:
        r = max(1, round(math.sqrt(d)))
        p = params(q, d, r)
        Y = rng.integers(0, q, (2000, d))
        C = rng.integers(0, 2, (2000, d))
        labels = Y * r // q
        codes, lengths = encode_carry_batch(C, labels, r)
        for m in range(len(C)):
            s = encode_carry(tuple(C[m]), tuple(Y[m]), p)
            assert len(s) == lengths[m]
            assert (int(s, 2) if s else 0) == codes[m]
            assert tuple(labels[m]) == bucket_labels(tuple(Y[m]), p)
        out, ok = decode_carry_batch(codes, lengths, labels, r)
        assert ok.all() and np.array_equal(out, C)


def test_batch_decoder_flags_malformed():
    labels = np.array([[0, 0, 1, 1]] * 3)
    codes = np.array([0b1100, 0b0001, 0b000100])
    lengths = np.array([4, 4, 6])
    _, ok = decode_carry_batch(codes, lengths, labels, 2)
    assert not ok.any()


def test_code_shorter_than_raw_on_average():
    rng = random.Random(2)
    d, q = 64, 16
    p = params(q, d, 8)
    total = 0
    trials = 500
    for _ in range(trials):
        while True:
            x, y = rng.randrange(q ** d), rng.randrange(q ** d)
            if x + y < q ** d:
                break
        from nofcorners.radix import carry_vector, to_digits
        C = carry_vector(x, y, p)
        total += carry_code_length(C, to_digits(y, p), p)
    assert total / trials < d


def test_rank_bits_is_code_minus_counts():
    p = params(4, 4, r=2)
    y = (0, 0, 3, 3)
    assert rank_bits((0, 0, 1, 0), y, p) == 1
