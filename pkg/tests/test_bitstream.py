import random

import pytest
from hypothesis import given, strategies as st

from acnkit.bitstream import BitStream, bit_ranges_equal, MAX_CAPACITY_BYTES
from acnkit.errors import BoundsError, CapacityError, ValueWidthError

from refmodel import BitModel, bits_to_bytes


def stream_bits(s: BitStream) -> list[bool]:
    return [bool((s.buf[k // 8] >> (7 - k % 8)) & 1) for k in range(s.capacity_bits)]


class TestConstruction:
    def test_empty(self):
        s = BitStream(0)
        assert s.bit_index == 0
        assert s.remaining_bits() == 0

    def test_two_bytes(self):
        s = BitStream(2)
        assert s.bit_index == 0
        assert s.remaining_bits() == 16

    def test_capacity_cap(self):
        with pytest.raises(CapacityError):
            BitStream(MAX_CAPACITY_BYTES + 1)

    def test_negative_capacity(self):
        with pytest.raises(CapacityError):
            BitStream(-1)


class TestCursor:
    def test_validate_offset(self):
        s = BitStream(1)
        assert s.validate_offset_bits(8)
        assert not s.validate_offset_bits(9)

    def test_remaining_after_append(self):
        s = BitStream(1)
        s.append_bit(True)
        assert s.remaining_bits() == 7

    def test_move_to_middle_of_byte(self):
        s = BitStream(2)
        s.move_bit_index(11)
        assert (s.current_byte, s.current_bit) == (1, 3)

    def test_move_zero(self):
        s = BitStream(2)
        s.move_bit_index(5)
        s.move_bit_index(0)
        assert s.bit_index == 5

    def test_move_out_of_range(self):
        s = BitStream(1)
        with pytest.raises(BoundsError):
            s.move_bit_index(9)
        with pytest.raises(BoundsError):
            s.move_bit_index(-1)

    def test_cursor_may_rest_one_past_end(self):
        s = BitStream(1)
        s.move_bit_index(8)
        s.check_invariant()
        assert (s.current_byte, s.current_bit) == (1, 0)


class TestResetAt:
    def test_identity(self):
        s = BitStream(2)
        s.append_byte(0xAB)
        r = s.reset_at(s)
        assert r.buf == s.buf and r.bit_index == s.bit_index
        r.append_bit(True)  # copies do not alias
        assert r.buf != s.buf

    def test_rewind(self):
        s = BitStream(2)
        s.move_bit_index(10)
        r = s.reset_at(BitStream(2))
        assert r.bit_index == 0 and r.buf == s.buf

    def test_cursor_beyond_capacity(self):
        small, big = BitStream(1), BitStream(4)
        big.move_bit_index(12)
        with pytest.raises(BoundsError):
            small.reset_at(big)


class TestAppendBit:
    def test_one(self):
        s = BitStream(1)
        s.append_bit(True)
        assert s.buf == b"\x80" and s.bit_index == 1

    def test_zero(self):
        s = BitStream(1)
        s.append_bit(False)
        assert s.buf == b"\x00" and s.bit_index == 1

    def test_full(self):
        with pytest.raises(BoundsError):
            BitStream(0).append_bit(True)

    def test_one_zero_helpers(self):
        s = BitStream(1)
        s.append_bit_one()
        s.append_bit_zero()
        s.append_bit_one()
        assert s.buf == b"\xa0" and s.bit_index == 3


class TestAppendNBits:
    def test_three_ones(self):
        s = BitStream(1)
        s.append_n_bits(True, 3)
        assert s.buf == b"\xe0" and s.bit_index == 3

    def test_zero_count_is_noop(self):
        s = BitStream(1)
        s.append_n_bits(True, 0)
        assert s.buf == b"\x00" and s.bit_index == 0

    def test_overflow(self):
        with pytest.raises(BoundsError):
            BitStream(1).append_n_bits(False, 9)


class TestAppendBitFromByte:
    def test_msb(self):
        s = BitStream(1)
        s.append_bit_from_byte(0b1000_0000, 0)
        assert stream_bits(s)[0] is True

    def test_lsb(self):
        s = BitStream(1)
        s.append_bit_from_byte(0b1000_0000, 7)
        assert stream_bits(s)[0] is False

    def test_all_ones(self):
        s = BitStream(1)
        s.append_bit_from_byte(0xFF, 3)
        assert stream_bits(s)[0] is True

    def test_position_range(self):
        with pytest.raises(BoundsError):
            BitStream(1).append_bit_from_byte(0xFF, 8)


class TestAppendBitsMSBFirst:
    def test_three_bits(self):
        s = BitStream(1)
        s.append_bits_msb_first(b"\xb0", 3)
        assert stream_bits(s)[:3] == [True, False, True]
        assert s.bit_index == 3

    def test_zero_bits(self):
        s = BitStream(1)
        s.append_bits_msb_first(b"\xff", 0)
        assert s.buf == b"\x00" and s.bit_index == 0

    def test_sixteen_bit_roundtrip(self):
        s = BitStream(2)
        s.append_bits_msb_first(b"\xab\xcd", 16)
        r = s.reset_at(BitStream(2))
        assert r.read_bits(16) == b"\xab\xcd"

    def test_from_offset(self):
        # bits 4..9 of ab cd: 1011 1100  ->  taking [4, 10) gives 101111
        s = BitStream(2)
        s.append_bits_msb_first(b"\xab\xcd", 6, from_bit=4)
        assert stream_bits(s)[:6] == [True, False, True, True, True, True]

    def test_source_range_error(self):
        with pytest.raises(BoundsError):
            BitStream(4).append_bits_msb_first(b"\xab", 9)


class TestLsbBitsMsbFirst:
    def test_append_five(self):
        s = BitStream(1)
        s.append_lsb_bits_msb_first(5, 3)
        assert stream_bits(s)[:3] == [True, False, True]

    def test_roundtrip_five(self):
        s = BitStream(1)
        s.append_lsb_bits_msb_first(5, 3)
        assert s.reset_at(BitStream(1)).read_n_lsb_bits_msb_first(3) == 5

    def test_zero_width(self):
        s = BitStream(1)
        s.append_lsb_bits_msb_first(0, 0)
        assert s.bit_index == 0
        assert s.read_n_lsb_bits_msb_first(0) == 0

    def test_value_too_wide(self):
        with pytest.raises(ValueWidthError):
            BitStream(1).append_lsb_bits_msb_first(4, 2)


class TestBitsLsbFirst:
    def test_order_vs_msb_variant(self):
        # 0b110: MSB-first emits 1,1,0; LSB-first emits 0,1,1.
        a, b = BitStream(1), BitStream(1)
        a.append_lsb_bits_msb_first(0b110, 3)
        b.append_bits_lsb_first(0b110, 3)
        assert stream_bits(a)[:3] == [True, True, False]
        assert stream_bits(b)[:3] == [False, True, True]

    def test_single_bit_roundtrip(self):
        s = BitStream(1)
        s.append_bits_lsb_first(1, 1)
        assert s.reset_at(BitStream(1)).read_n_bits_lsb_first(1) == 1

    def test_random_roundtrips(self):
        rng = random.Random(101)
        for _ in range(1000):
            n = rng.randint(0, 64)
            v = rng.getrandbits(n) if n else 0
            s = BitStream(9)
            s.append_bits_lsb_first(v, n)
            assert s.reset_at(BitStream(9)).read_n_bits_lsb_first(n) == v


class TestPartialByte:
    def test_three_bits(self):
        s = BitStream(1)
        s.append_partial_byte(0b1010_0000, 3)
        assert stream_bits(s)[:3] == [True, False, True]

    def test_full_byte_equivalence(self):
        a, b = BitStream(1), BitStream(1)
        a.append_partial_byte(0xC5, 8)
        b.append_byte(0xC5)
        assert a.buf == b.buf and a.bit_index == b.bit_index

    def test_unaligned_roundtrip(self):
        rng = random.Random(77)
        for _ in range(200):
            n = rng.randint(1, 8)
            byte = rng.randrange(256) & ~((1 << (8 - n)) - 1)  # top n bits only
            s = BitStream(3)
            s.move_bit_index(5)
            mark = s.copy()
            s.append_partial_byte(byte, n)
            assert s.reset_at(mark).read_partial_byte(n) == byte


class TestBytes:
    def test_aligned_append(self):
        s = BitStream(2)
        s.append_byte(0xAB)
        assert s.buf == b"\xab\x00" and s.bit_index == 8

    def test_straddling_append(self):
        s = BitStream(2)
        s.move_bit_index(4)
        mark = s.copy()
        s.append_byte(0xAB)
        assert s.buf == b"\x0a\xb0"
        assert s.reset_at(mark).read_byte() == 0xAB

    def test_byte_array_roundtrip(self):
        s = BitStream(2)
        s.append_byte_array(b"\x01\x02")
        assert s.reset_at(BitStream(2)).read_byte_array(2) == b"\x01\x02"

    def test_byte_value_range(self):
        with pytest.raises(ValueWidthError):
            BitStream(1).append_byte(256)


class TestReads:
    def test_read_bits_packs_msb_first(self):
        s = BitStream(1)
        for bit in (True, False, True):
            s.append_bit(bit)
        assert s.reset_at(BitStream(1)).read_bits(3) == b"\xa0"

    def test_peek_then_read(self):
        s = BitStream(1)
        s.append_bit(True)
        r = s.reset_at(BitStream(1))
        assert r.peek_bit() is True and r.bit_index == 0
        assert r.read_bit() is True and r.bit_index == 1

    def test_read_zero_bits(self):
        assert BitStream(1).read_bits(0) == b""

    def test_read_past_end(self):
        with pytest.raises(BoundsError):
            BitStream(1).read_bits(9)


class TestPrefixAndRanges:
    def test_identical_buffers(self):
        assert bit_ranges_equal(b"\xab\xcd", b"\xab\xcd", 0, 16)
        assert bit_ranges_equal(b"\xab", b"\xab", 3, 3)

    def test_difference_at_bit_nine(self):
        a = bytearray(b"\x55\x55")
        b = bytearray(a)
        b[1] ^= 0x40  # flip bit 9
        assert bit_ranges_equal(a, b, 0, 9)
        assert not bit_ranges_equal(a, b, 0, 10)

    def test_range_bounds(self):
        with pytest.raises(BoundsError):
            bit_ranges_equal(b"\x00", b"\x00", 0, 9)

    def test_rewound_prefix(self):
        s = BitStream(2)
        s.append_byte(0x5A)
        rewound = s.copy()
        rewound.move_bit_index(-3)
        assert rewound.is_prefix_of(s)
        assert not s.is_prefix_of(rewound)

    def test_prefix_requires_equal_lengths(self):
        with pytest.raises(BoundsError):
            BitStream(1).is_prefix_of(BitStream(2))

    def test_append_preserves_prefix(self):
        s = BitStream(4)
        s.append_byte(0xF0)
        old = s.copy()
        s.append_lsb_bits_msb_first(0x15, 7)
        assert old.is_prefix_of(s)


class TestDump:
    def test_format(self):
        s = BitStream(2)
        s.append_byte(0xAB)
        s.append_bit(True)
        assert s.dump() == "ab 80 @1:1"


# ---------------------------------------------------------------------------
# Differential harness against the bit-list reference model
# ---------------------------------------------------------------------------

OPS = (
    "append_bit",
    "append_n_bits",
    "append_bit_from_byte",
    "append_bits_msb_first",
    "append_lsb_bits_msb_first",
    "append_bits_lsb_first",
    "append_partial_byte",
    "append_byte",
    "append_byte_array",
    "read_bit",
    "peek_bit",
    "read_bits",
    "read_n_lsb_bits_msb_first",
    "read_n_bits_lsb_first",
    "read_partial_byte",
    "read_byte",
    "read_byte_array",
    "move",
)


def run_differential_sequence(rng: random.Random, n_ops: int, capacity: int) -> None:
    """Mirror a random op sequence on BitStream and BitModel, comparing state."""
    impl = BitStream(capacity)
    model = BitModel(capacity)
    for _ in range(n_ops):
        op = rng.choice(OPS)
        if op == "append_bit":
            bit = rng.random() < 0.5
            if model.remaining() >= 1:
                impl.append_bit(bit)
                model.append_bit(bit)
        elif op == "append_n_bits":
            n = rng.randint(0, 20)
            bit = rng.random() < 0.5
            if model.remaining() >= n:
                impl.append_n_bits(bit, n)
                model.append_n_bits(bit, n)
        elif op == "append_bit_from_byte":
            byte, i = rng.randrange(256), rng.randrange(8)
            if model.remaining() >= 1:
                impl.append_bit_from_byte(byte, i)
                model.append_bit_from_byte(byte, i)
        elif op == "append_bits_msb_first":
            src = bytes(rng.randrange(256) for _ in range(rng.randint(0, 4)))
            hi = len(src) * 8
            from_bit = rng.randint(0, hi)
            n = rng.randint(0, hi - from_bit)
            if model.remaining() >= n:
                impl.append_bits_msb_first(src, n, from_bit)
                model.append_bits_msb_first(src, n, from_bit)
        elif op == "append_lsb_bits_msb_first":
            n = rng.randint(0, 64)
            v = rng.getrandbits(n) if n else 0
            if model.remaining() >= n:
                impl.append_lsb_bits_msb_first(v, n)
                model.append_lsb_bits_msb_first(v, n)
        elif op == "append_bits_lsb_first":
            n = rng.randint(0, 64)
            v = rng.getrandbits(n) if n else 0
            if model.remaining() >= n:
                impl.append_bits_lsb_first(v, n)
                model.append_bits_lsb_first(v, n)
        elif op == "append_partial_byte":
            n = rng.randint(1, 8)
            byte = rng.randrange(256) & ~((1 << (8 - n)) - 1)
            if model.remaining() >= n:
                impl.append_partial_byte(byte, n)
                model.append_partial_byte(byte, n)
        elif op == "append_byte":
            byte = rng.randrange(256)
            if model.remaining() >= 8:
                impl.append_byte(byte)
                model.append_byte(byte)
        elif op == "append_byte_array":
            data = bytes(rng.randrange(256) for _ in range(rng.randint(0, 4)))
            if model.remaining() >= 8 * len(data):
                impl.append_byte_array(data)
                model.append_byte_array(data)
        elif op == "read_bit":
            if model.remaining() >= 1:
                assert impl.read_bit() == model.read_bit()
        elif op == "peek_bit":
            if model.remaining() >= 1:
                assert impl.peek_bit() == model.peek_bit()
        elif op == "read_bits":
            n = rng.randint(0, min(40, model.remaining()))
            assert impl.read_bits(n) == model.read_bits(n)
        elif op == "read_n_lsb_bits_msb_first":
            n = rng.randint(0, min(64, model.remaining()))
            assert impl.read_n_lsb_bits_msb_first(n) == model.read_n_lsb_bits_msb_first(n)
        elif op == "read_n_bits_lsb_first":
            n = rng.randint(0, min(64, model.remaining()))
            assert impl.read_n_bits_lsb_first(n) == model.read_n_bits_lsb_first(n)
        elif op == "read_partial_byte":
            n = rng.randint(1, 8)
            if model.remaining() >= n:
                assert impl.read_partial_byte(n) == model.read_partial_byte(n)
        elif op == "read_byte":
            if model.remaining() >= 8:
                assert impl.read_byte() == model.read_byte()
        elif op == "read_byte_array":
            n = rng.randint(0, model.remaining() // 8)
            assert impl.read_byte_array(n) == model.read_byte_array(n)
        elif op == "move":
            offset = rng.randint(-model.pos, model.remaining())
            impl.move_bit_index(offset)
            model.move(offset)
        impl.check_invariant()
        assert impl.bit_index == model.pos
    assert bytes(impl.buf) == model.to_bytes()


def test_differential_smoke():
    rng = random.Random(2024)
    for _ in range(200):
        run_differential_sequence(rng, rng.randint(1, 60), rng.randint(1, 16))


@given(st.binary(max_size=24), st.integers(0, 200))
def test_append_then_read_everything(data, extra_bits):
    total = len(data) * 8 + extra_bits
    s = BitStream((total + 7) // 8 + 1)
    s.append_byte_array(data)
    rng = random.Random(extra_bits)
    appended = []
    for _ in range(extra_bits):
        bit = rng.random() < 0.5
        appended.append(bit)
        s.append_bit(bit)
    r = s.reset_at(BitStream(len(s.buf)))
    assert r.read_byte_array(len(data)) == data
    assert [r.read_bit() for _ in range(extra_bits)] == appended


@given(st.integers(0, 2**64 - 1), st.integers(0, 64))
def test_lsb_msb_first_word_roundtrip(v, n):
    v &= (1 << n) - 1 if n else 0
    s = BitStream(9)
    s.append_lsb_bits_msb_first(v, n)
    assert s.bit_index == n
    assert s.reset_at(BitStream(9)).read_n_lsb_bits_msb_first(n) == v


def test_frame_independence():
    """Appends never disturb bits before the starting cursor."""
    rng = random.Random(5)
    for _ in range(100):
        s = BitStream(8)
        s.append_byte_array(bytes(rng.randrange(256) for _ in range(3)))
        s.move_bit_index(rng.randint(-5, 0))
        before = bytes(s.buf)
        start = s.bit_index
        s.append_lsb_bits_msb_first(rng.getrandbits(11), 11)
        assert bit_ranges_equal(before, s.buf, 0, start)
