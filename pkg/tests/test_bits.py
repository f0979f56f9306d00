import numpy as np
import pytest
from hypothesis import given, strategies as st

from framesync import (
    complement,
    correlate,
    gen_sync_word,
    make_params,
    pack_bits,
    unpack_bits,
)

from conftest import bits, brute_correlate

bit_lists = st.lists(st.integers(0, 1), min_size=0, max_size=200)


class TestMakeParams:
    def test_paper_configuration(self):
        p = make_params(540, 60, 300, 351)
        assert (p.n, p.q, p.k, p.theta) == (540, 60, 300, 351)
        assert p.frame_bits == 18000
        assert p.window_bits == 540 + 120
        assert p.slots == 11

    def test_n_equals_q_edge(self):
        p = make_params(8, 8, 1, 8)
        assert p.slots == 3

    @pytest.mark.parametrize(
        "n,q,k,theta",
        [
            (540, 7, 300, 351),  # n not multiple of q
            (8, 16, 1, 4),       # q > n
            (8, 4, 1, 0),        # theta floor
            (8, 4, 1, 9),        # theta above n
            (8, 4, 0, 4),        # k floor
            (8, 0, 1, 4),        # q floor
        ],
    )
    def test_rejects(self, n, q, k, theta):
        with pytest.raises(ValueError):
            make_params(n, q, k, theta)


class TestGenSyncWord:
    def test_deterministic(self):
        assert np.array_equal(gen_sync_word(540, 17), gen_sync_word(540, 17))

    def test_distinct_seeds_differ(self):
        assert not np.array_equal(gen_sync_word(540, 17), gen_sync_word(540, 18))

    def test_values_and_length(self):
        w = gen_sync_word(1020, 3)
        assert w.size == 1020
        assert set(np.unique(w)) <= {0, 1}

    def test_mean_near_half(self):
        w = gen_sync_word(10**6, 99)
        assert abs(float(w.mean()) - 0.5) < 0.01

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            gen_sync_word(0, 1)


class TestCorrelate:
    def test_table_values(self):
        assert correlate(bits("110101"), bits("100001")) == 4

    def test_identity(self, rng):
        x = rng.integers(0, 2, 73, dtype=np.uint8)
        assert correlate(x, x) == 73

    def test_complement_is_zero(self, rng):
        x = rng.integers(0, 2, 50, dtype=np.uint8)
        assert correlate(x, complement(x)) == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            correlate(bits("101"), bits("10"))

    @given(bit_lists, bit_lists)
    def test_symmetric_and_bounded(self, a, b):
        m = min(len(a), len(b))
        a, b = a[:m], b[:m]
        c = correlate(a, b)
        assert c == correlate(b, a)
        assert 0 <= c <= m
        assert c == brute_correlate(a, b)

    @given(bit_lists)
    def test_complement_partition(self, a):
        b = np.random.default_rng(0).integers(0, 2, len(a), dtype=np.uint8)
        assert correlate(a, b) + correlate(a, complement(b)) == len(a)


class TestPackedBits:
    def test_forced_byte_value(self):
        assert pack_bits(bits("1011")) == b"\x0d"

    def test_empty(self):
        assert pack_bits([]) == b""
        assert unpack_bits(b"", 0).size == 0

    def test_roundtrip_all_lengths(self, rng):
        for length in range(0, 130):
            v = rng.integers(0, 2, length, dtype=np.uint8)
            assert np.array_equal(unpack_bits(pack_bits(v), length), v)

    @given(bit_lists)
    def test_roundtrip_property(self, v):
        assert np.array_equal(unpack_bits(pack_bits(v), len(v)), np.array(v, dtype=np.uint8))

    def test_partial_byte_pads_high_bits(self):
        # single 1 bit -> byte 0x01, pad lives in the high bits
        assert pack_bits([1]) == b"\x01"
        assert pack_bits([0, 0, 0, 0, 0, 0, 0, 1]) == b"\x80"

    def test_unpack_overflow_rejected(self):
        with pytest.raises(ValueError):
            unpack_bits(b"\xff", 9)
