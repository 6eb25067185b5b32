"""Bit-exact append/read stream over a fixed-capacity byte buffer.

Bit order convention: bit 0 of a byte is its most significant bit (network
order).  The cursor is a ``(current_byte, current_bit)`` pair; it may rest
exactly one byte past the end of the buffer, but only at bit 0.  The buffer
never grows or shrinks after construction.

All operations validate space before touching the buffer and advance the
cursor by exactly the number of bits they declare.  Bulk operations splice
bits through an integer window over the affected byte range rather than
looping per bit; the bit-level semantics are identical.
"""

from __future__ import annotations

from .errors import BoundsError, CapacityError, ValueWidthError

#: Hard cap on buffer allocation, in bytes.
MAX_CAPACITY_BYTES = 1 << 28


class BitStream:
    """Mutable bit stream with an explicit byte/bit cursor.

    Single-writer: instances may move between threads but must not be
    mutated concurrently.
    """

    __slots__ = ("buf", "current_byte", "current_bit")

    def __init__(self, capacity_bytes: int):
        if capacity_bytes < 0:
            raise CapacityError(f"negative capacity: {capacity_bytes}")
        if capacity_bytes > MAX_CAPACITY_BYTES:
            raise CapacityError(
                f"capacity {capacity_bytes} exceeds hard cap {MAX_CAPACITY_BYTES}"
            )
        self.buf = bytearray(capacity_bytes)
        self.current_byte = 0
        self.current_bit = 0

    # ------------------------------------------------------------------
    # Cursor and space predicates
    # ------------------------------------------------------------------

    @property
    def bit_index(self) -> int:
        return self.current_byte * 8 + self.current_bit

    @property
    def capacity_bits(self) -> int:
        return len(self.buf) * 8

    def remaining_bits(self) -> int:
        return self.capacity_bits - self.bit_index

    def validate_offset_bits(self, n_bits: int) -> bool:
        if n_bits < 0:
            raise BoundsError(f"negative bit count: {n_bits}")
        return self.remaining_bits() >= n_bits

    def validate_offset_bytes(self, n_bytes: int) -> bool:
        return self.validate_offset_bits(n_bytes * 8)

    def check_invariant(self) -> None:
        """Raise if the cursor invariant is broken (test/debug hook)."""
        ok = (
            0 <= self.current_bit < 8
            and self.current_byte >= 0
            and (
                self.current_byte < len(self.buf)
                or (self.current_bit == 0 and self.current_byte == len(self.buf))
            )
        )
        if not ok:
            raise BoundsError(
                f"cursor invariant violated: byte={self.current_byte} "
                f"bit={self.current_bit} len={len(self.buf)}"
            )

    def _require_space(self, n_bits: int) -> None:
        if not self.validate_offset_bits(n_bits):
            raise BoundsError(
                f"need {n_bits} bits, only {self.remaining_bits()} remain"
            )

    def _set_bit_index(self, bits: int) -> None:
        self.current_byte, self.current_bit = divmod(bits, 8)

    def move_bit_index(self, offset: int) -> None:
        """Move the cursor by a signed number of bits."""
        target = self.bit_index + offset
        if target < 0 or target > self.capacity_bits:
            raise BoundsError(
                f"move by {offset} puts cursor at {target}, "
                f"outside [0, {self.capacity_bits}]"
            )
        self._set_bit_index(target)

    def copy(self) -> "BitStream":
        dup = BitStream.__new__(BitStream)
        dup.buf = bytearray(self.buf)
        dup.current_byte = self.current_byte
        dup.current_bit = self.current_bit
        return dup

    def reset_at(self, other: "BitStream") -> "BitStream":
        """A copy of this stream's buffer with ``other``'s cursor."""
        if other.bit_index > self.capacity_bits:
            raise BoundsError(
                f"cursor {other.bit_index} beyond capacity {self.capacity_bits}"
            )
        dup = self.copy()
        dup._set_bit_index(other.bit_index)
        return dup

    # ------------------------------------------------------------------
    # Integer-window splicing (internal)
    # ------------------------------------------------------------------

    def _write_bits(self, value: int, n_bits: int) -> None:
        """Write n_bits of ``value`` at the cursor, most significant first.

        Caller guarantees space and 0 <= value < 2**n_bits.
        """
        if n_bits == 0:
            return
        start = self.bit_index
        first, last = start // 8, (start + n_bits + 7) // 8
        window = int.from_bytes(self.buf[first:last], "big")
        shift = (last - first) * 8 - (start - first * 8) - n_bits
        mask = ((1 << n_bits) - 1) << shift
        window = (window & ~mask) | (value << shift)
        self.buf[first:last] = window.to_bytes(last - first, "big")
        self._set_bit_index(start + n_bits)

    def _read_bits_value(self, n_bits: int) -> int:
        """Read n_bits at the cursor as an integer, most significant first."""
        if n_bits == 0:
            return 0
        start = self.bit_index
        first, last = start // 8, (start + n_bits + 7) // 8
        window = int.from_bytes(self.buf[first:last], "big")
        shift = (last - first) * 8 - (start - first * 8) - n_bits
        self._set_bit_index(start + n_bits)
        return (window >> shift) & ((1 << n_bits) - 1)

    # ------------------------------------------------------------------
    # Bit-level appends
    # ------------------------------------------------------------------

    def append_bit(self, bit: bool) -> None:
        self._require_space(1)
        if bit:
            self.buf[self.current_byte] |= 0x80 >> self.current_bit
        else:
            self.buf[self.current_byte] &= ~(0x80 >> self.current_bit) & 0xFF
        self._set_bit_index(self.bit_index + 1)

    def append_bit_one(self) -> None:
        self.append_bit(True)

    def append_bit_zero(self) -> None:
        self.append_bit(False)

    def append_n_bits(self, bit: bool, n_bits: int) -> None:
        self._require_space(n_bits)
        self._write_bits((1 << n_bits) - 1 if bit else 0, n_bits)

    def append_bit_from_byte(self, byte: int, i: int) -> None:
        """Append bit ``i`` of ``byte``, where i=0 is the MSB."""
        if not 0 <= i <= 7:
            raise BoundsError(f"bit position {i} outside 0..7")
        self.append_bit(bool((byte >> (7 - i)) & 1))

    def append_bits_msb_first(self, src: bytes, n_bits: int, from_bit: int = 0) -> None:
        """Append bits [from_bit, from_bit + n_bits) of ``src``, MSB-first indexed."""
        if from_bit < 0 or n_bits < 0:
            raise BoundsError("negative offset or bit count")
        if from_bit + n_bits > len(src) * 8:
            raise BoundsError(
                f"source range [{from_bit}, {from_bit + n_bits}) exceeds "
                f"{len(src) * 8} source bits"
            )
        self._require_space(n_bits)
        if n_bits == 0:
            return
        first, last = from_bit // 8, (from_bit + n_bits + 7) // 8
        window = int.from_bytes(src[first:last], "big")
        shift = (last - first) * 8 - (from_bit - first * 8) - n_bits
        self._write_bits((window >> shift) & ((1 << n_bits) - 1), n_bits)

    def append_lsb_bits_msb_first(self, value: int, n_bits: int) -> None:
        """Append the n_bits low bits of ``value``, most significant first."""
        self._check_word(value, n_bits)
        self._require_space(n_bits)
        self._write_bits(value, n_bits)

    def append_bits_lsb_first(self, value: int, n_bits: int) -> None:
        """Append the n_bits low bits of ``value``, least significant first."""
        self._check_word(value, n_bits)
        self._require_space(n_bits)
        if n_bits:
            self._write_bits(int(format(value, f"0{n_bits}b")[::-1], 2), n_bits)

    @staticmethod
    def _check_word(value: int, n_bits: int) -> None:
        if not 0 <= n_bits <= 64:
            raise BoundsError(f"bit count {n_bits} outside 0..64")
        if value < 0 or value >> n_bits:
            raise ValueWidthError(f"value {value} does not fit in {n_bits} bits")

    # ------------------------------------------------------------------
    # Byte-level appends
    # ------------------------------------------------------------------

    def append_partial_byte(self, byte: int, n_bits: int) -> None:
        """Append the n_bits most significant bits of ``byte``."""
        if not 1 <= n_bits <= 8:
            raise BoundsError(f"partial byte width {n_bits} outside 1..8")
        if not 0 <= byte <= 0xFF:
            raise ValueWidthError(f"byte value {byte} outside 0..255")
        self._require_space(n_bits)
        self._write_bits(byte >> (8 - n_bits), n_bits)

    def append_byte(self, byte: int) -> None:
        if not 0 <= byte <= 0xFF:
            raise ValueWidthError(f"byte value {byte} outside 0..255")
        self._require_space(8)
        self._write_bits(byte, 8)

    def append_byte_array(self, data: bytes) -> None:
        self._require_space(len(data) * 8)
        if data:
            self._write_bits(int.from_bytes(data, "big"), len(data) * 8)

    # ------------------------------------------------------------------
    # Reads
    # ------------------------------------------------------------------

    def peek_bit(self) -> bool:
        self._require_space(1)
        return bool((self.buf[self.current_byte] >> (7 - self.current_bit)) & 1)

    def read_bit(self) -> bool:
        bit = self.peek_bit()
        self._set_bit_index(self.bit_index + 1)
        return bit

    def read_bits(self, n_bits: int) -> bytes:
        """Read n_bits as ceil(n/8) bytes, MSB-first packed, pad bits zero."""
        self._require_space(n_bits)
        n_bytes = (n_bits + 7) // 8
        value = self._read_bits_value(n_bits) << (n_bytes * 8 - n_bits)
        return value.to_bytes(n_bytes, "big")

    def read_n_lsb_bits_msb_first(self, n_bits: int) -> int:
        if not 0 <= n_bits <= 64:
            raise BoundsError(f"bit count {n_bits} outside 0..64")
        self._require_space(n_bits)
        return self._read_bits_value(n_bits)

    def read_n_bits_lsb_first(self, n_bits: int) -> int:
        if not 0 <= n_bits <= 64:
            raise BoundsError(f"bit count {n_bits} outside 0..64")
        self._require_space(n_bits)
        value = self._read_bits_value(n_bits)
        if n_bits == 0:
            return 0
        return int(format(value, f"0{n_bits}b")[::-1], 2)

    def read_partial_byte(self, n_bits: int) -> int:
        """Read n_bits and return them left-aligned in a byte, low bits zero."""
        if not 1 <= n_bits <= 8:
            raise BoundsError(f"partial byte width {n_bits} outside 1..8")
        self._require_space(n_bits)
        return self._read_bits_value(n_bits) << (8 - n_bits)

    def read_byte(self) -> int:
        self._require_space(8)
        return self._read_bits_value(8)

    def read_byte_array(self, n_bytes: int) -> bytes:
        self._require_space(n_bytes * 8)
        if n_bytes == 0:
            return b""
        return self._read_bits_value(n_bytes * 8).to_bytes(n_bytes, "big")

    # ------------------------------------------------------------------
    # Comparison
    # ------------------------------------------------------------------

    def is_prefix_of(self, other: "BitStream") -> bool:
        """True when this stream's bits [0, bit_index) agree with ``other``'s."""
        if len(self.buf) != len(other.buf):
            raise BoundsError("is_prefix_of requires equal buffer lengths")
        return self.bit_index <= other.bit_index and bit_ranges_equal(
            self.buf, other.buf, 0, self.bit_index
        )

    def dump(self) -> str:
        """Debug format: hex bytes plus cursor as byte:bit."""
        hexbytes = " ".join(f"{b:02x}" for b in self.buf)
        return f"{hexbytes} @{self.current_byte}:{self.current_bit}"


def bit_ranges_equal(buf1: bytes, buf2: bytes, from_bit: int, to_bit: int) -> bool:
    """True when bits [from_bit, to_bit) are identical in both buffers."""
    limit = 8 * min(len(buf1), len(buf2))
    if not 0 <= from_bit <= to_bit <= limit:
        raise BoundsError(f"bit range [{from_bit}, {to_bit}) outside [0, {limit}]")
    if from_bit == to_bit:
        return True
    first, last = from_bit // 8, (to_bit + 7) // 8
    w1 = int.from_bytes(buf1[first:last], "big")
    w2 = int.from_bytes(buf2[first:last], "big")
    head = from_bit - first * 8
    tail = last * 8 - to_bit
    mask = ((1 << (to_bit - from_bit)) - 1) << tail
    return (w1 ^ w2) & mask == 0 if head or tail else w1 == w2
