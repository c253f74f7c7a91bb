"""Gray transforms, the fixed-point quantizer, and requantization."""

import random

import pytest

from dgo import (Quantizer, as_bits, decode_point, encode_point, from_gray,
                 requantize, slice_indices, to_gray)


def int_to_bits(value: int, width: int) -> tuple[int, ...]:
    """Independent MSB-first expansion used as the test-side oracle."""
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


def bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


class TestGrayTransforms:
    def test_zero_is_fixed_point(self):
        assert to_gray((0, 0, 0, 0)) == (0, 0, 0, 0)
        assert from_gray((0, 0, 0, 0)) == (0, 0, 0, 0)

    def test_hand_computed_pair(self):
        # g[k] = s[k-1] xor s[k] applied by hand
        assert to_gray((1, 0, 1)) == (1, 1, 1)
        assert from_gray((1, 1, 1)) == (1, 0, 1)

    def test_roundtrip_exhaustive_small(self):
        for width in range(1, 11):
            for value in range(1 << width):
                s = int_to_bits(value, width)
                assert from_gray(to_gray(s)) == s
                assert to_gray(from_gray(s)) == s

    def test_roundtrip_randomized_long(self):
        rng = random.Random(7)
        samples = 0
        for width in (17, 33, 64, 128, 257, 512, 1024):
            for _ in range(1500):
                s = tuple(rng.randint(0, 1) for _ in range(width))
                assert from_gray(to_gray(s)) == s
                assert to_gray(from_gray(s)) == s
                samples += 1
        assert samples >= 10_000

    def test_adjacency_of_consecutive_codes(self):
        """Consecutive integers map to gray codes differing in one bit."""
        width = 12
        prev = to_gray(int_to_bits(0, width))
        for value in range(1, 1 << width):
            cur = to_gray(int_to_bits(value, width))
            assert sum(a != b for a, b in zip(prev, cur)) == 1
            prev = cur


class TestAsBits:
    def test_accepts_zeros_and_ones(self):
        assert as_bits([1, 0, 1]) == (1, 0, 1)

    @pytest.mark.parametrize("bad", [[], [2], [0, -1], [0.5, 0]])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ValueError):
            as_bits(bad)


class TestQuantizer:
    def test_basic_properties(self):
        q = Quantizer(3, 4, ((-1.0, 1.0),) * 3)
        assert q.n_bits == 12
        assert q.max_index == 15
        assert q.grid_step == (2.0 / 15,) * 3

    def test_single_pair_broadcasts(self):
        q = Quantizer(5, 2, (-1.0, 1.0))
        assert q.bounds == ((-1.0, 1.0),) * 5

    @pytest.mark.parametrize("dims,bits,bounds", [
        (0, 4, ((-1.0, 1.0),)),
        (1, 0, ((-1.0, 1.0),)),
        (1, 4, ((1.0, 1.0),)),
        (1, 4, ((2.0, -2.0),)),
        (2, 4, ((-1.0, 1.0),)),
    ])
    def test_rejects_bad_construction(self, dims, bits, bounds):
        with pytest.raises(ValueError):
            Quantizer(dims, bits, bounds)

    def test_with_bits_per_var(self):
        q = Quantizer(2, 4, ((-1.0, 1.0),) * 2)
        q2 = q.with_bits_per_var(5)
        assert q2.bits_per_var == 5
        assert q2.bounds == q.bounds
        assert q == Quantizer(2, 4, ((-1.0, 1.0),) * 2)


class TestEncodePoint:
    def test_endpoints(self):
        q = Quantizer(1, 4, ((-1.0, 1.0),))
        assert encode_point((-1.0,), q) == (0, 0, 0, 0)
        assert encode_point((1.0,), q) == (1, 1, 1, 1)

    def test_affine_rounding(self):
        # round(0.66 / 2 * 3) = 1 -> bits 01
        q = Quantizer(1, 2, ((-1.0, 1.0),))
        assert encode_point((-0.34,), q) == (0, 1)

    def test_out_of_range_clamps(self):
        q = Quantizer(2, 3, ((-1.0, 1.0),) * 2)
        assert encode_point((-99.0, 99.0), q) == encode_point((-1.0, 1.0), q)

    def test_wrong_arity_rejected(self):
        q = Quantizer(2, 3, ((-1.0, 1.0),) * 2)
        with pytest.raises(ValueError):
            encode_point((0.0,), q)


class TestDecodePoint:
    def test_endpoints(self):
        q = Quantizer(1, 4, ((-1.0, 1.0),))
        assert decode_point((0, 0, 0, 0), q) == (-1.0,)
        assert decode_point((1, 1, 1, 1), q) == (1.0,)

    def test_affine_formula(self):
        q = Quantizer(1, 2, ((-1.0, 1.0),))
        assert decode_point((0, 1), q) == (-1.0 + 1 * (2.0 / 3),)

    def test_wrong_length_rejected(self):
        q = Quantizer(2, 4, ((-1.0, 1.0),) * 2)
        with pytest.raises(ValueError):
            decode_point((0, 1, 0), q)

    def test_multidimensional_slices(self):
        q = Quantizer(2, 2, ((0.0, 3.0), (0.0, 30.0)))
        bits = (0, 1, 1, 0)  # indices 1 and 2
        assert slice_indices(bits, q) == (1, 2)
        assert decode_point(bits, q) == (1.0, 20.0)


class TestCodecRoundtrip:
    @pytest.mark.parametrize("dims,bits", [(1, 8), (2, 8), (4, 4), (2, 2), (1, 12)])
    def test_encode_decode_identity_exhaustive(self, dims, bits):
        """encode(decode(s)) == s for every bit string, L <= 16."""
        q = Quantizer(dims, bits, ((-1.5, 2.5),) * dims)
        width = dims * bits
        for value in range(1 << width):
            s = int_to_bits(value, width)
            assert encode_point(decode_point(s, q), q) == s

    def test_decode_encode_within_half_step(self):
        rng = random.Random(11)
        q = Quantizer(3, 6, ((-2.0, 1.0), (0.0, 10.0), (-5.0, 5.0)))
        for _ in range(2000):
            x = [rng.uniform(lo - 1, hi + 1) for lo, hi in q.bounds]
            decoded = decode_point(encode_point(x, q), q)
            for xj, dj, (lo, hi), step in zip(x, decoded, q.bounds, q.grid_step):
                clamped = min(max(xj, lo), hi)
                assert abs(dj - clamped) <= step / 2 + 1e-12


class TestRequantize:
    def test_endpoints_exact_at_all_resolutions(self):
        q4 = Quantizer(1, 4, ((-1.0, 1.0),))
        q5 = q4.with_bits_per_var(5)
        assert requantize((0,) * 4, q4, q5) == (0,) * 5
        assert requantize((1,) * 4, q4, q5) == (1,) * 5

    def test_affine_requantization(self):
        # index 1 at b=2 over (0,1) is x=1/3; round(1/3 * 7) = 2 at b=3
        q2 = Quantizer(1, 2, ((0.0, 1.0),))
        q3 = q2.with_bits_per_var(3)
        assert requantize((0, 1), q2, q3) == int_to_bits(2, 3)

    def test_error_bound_randomized(self):
        rng = random.Random(23)
        q_old = Quantizer(2, 5, ((-3.0, 4.0),) * 2)
        q_new = q_old.with_bits_per_var(9)
        for _ in range(500):
            s = tuple(rng.randint(0, 1) for _ in range(q_old.n_bits))
            before = decode_point(s, q_old)
            after = decode_point(requantize(s, q_old, q_new), q_new)
            for b, a, step in zip(before, after, q_new.grid_step):
                assert abs(a - b) <= step / 2 + 1e-12

    def test_preconditions(self):
        q4 = Quantizer(1, 4, ((-1.0, 1.0),))
        with pytest.raises(ValueError):
            requantize((0,) * 4, q4, q4)
        with pytest.raises(ValueError):
            requantize((0,) * 4, q4, Quantizer(1, 5, ((-2.0, 1.0),)))
