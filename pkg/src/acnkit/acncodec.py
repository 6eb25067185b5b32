"""ACN primitive encoders/decoders layered on :class:`BitStream`.

Each encode operation is paired with an exact inverse decode at the same
cursor.  Integers are big-endian, MSB-first; floats travel as uninterpreted
bit patterns so that NaN payloads survive the roundtrip untouched.
"""

from __future__ import annotations

from .bitstream import BitStream
from .errors import ConstraintError, DecodeError, ValueWidthError

U64_MAX = (1 << 64) - 1

ALIGNED_WIDTHS = (8, 16, 32, 64)


def bits_needed(r: int) -> int:
    """Smallest n with r < 2**n; 0 when r == 0."""
    if r < 0:
        raise ValueError(f"negative range span: {r}")
    return r.bit_length()


def uint2int(value: int, num_bytes: int) -> int:
    """Interpret the low 8*num_bytes bits of ``value`` as two's complement.

    Higher bits of ``value`` are ignored.  Unrolled over the eight byte
    widths; each arm is a plain mask-and-subtract.
    """
    if num_bytes == 1:
        v = value & 0xFF
        return v - 0x100 if v >= 0x80 else v
    if num_bytes == 2:
        v = value & 0xFFFF
        return v - 0x1_0000 if v >= 0x8000 else v
    if num_bytes == 3:
        v = value & 0xFF_FFFF
        return v - 0x100_0000 if v >= 0x80_0000 else v
    if num_bytes == 4:
        v = value & 0xFFFF_FFFF
        return v - 0x1_0000_0000 if v >= 0x8000_0000 else v
    if num_bytes == 5:
        v = value & 0xFF_FFFF_FFFF
        return v - 0x100_0000_0000 if v >= 0x80_0000_0000 else v
    if num_bytes == 6:
        v = value & 0xFFFF_FFFF_FFFF
        return v - 0x1_0000_0000_0000 if v >= 0x8000_0000_0000 else v
    if num_bytes == 7:
        v = value & 0xFF_FFFF_FFFF_FFFF
        return v - 0x100_0000_0000_0000 if v >= 0x80_0000_0000_0000 else v
    if num_bytes == 8:
        v = value & 0xFFFF_FFFF_FFFF_FFFF
        return v - 0x1_0000_0000_0000_0000 if v >= 0x8000_0000_0000_0000 else v
    raise ValueError(f"num_bytes {num_bytes} outside 1..8")


def int2uint(value: int, num_bytes: int) -> int:
    """Mask a signed value back to its low 8*num_bytes two's-complement bits."""
    if not 1 <= num_bytes <= 8:
        raise ValueError(f"num_bytes {num_bytes} outside 1..8")
    return value & ((1 << (8 * num_bytes)) - 1)


class Alphabet:
    """Ordered set of distinct 7-bit character codes for char-index strings."""

    def __init__(self, chars: bytes | str):
        if isinstance(chars, str):
            chars = chars.encode("ascii")
        if not chars:
            raise ValueError("alphabet must be non-empty")
        if len(set(chars)) != len(chars):
            raise ValueError("alphabet characters must be distinct")
        if any(c > 127 for c in chars):
            raise ValueError("alphabet characters must be 7-bit")
        self.chars = bytes(chars)
        self._index = {c: i for i, c in enumerate(self.chars)}

    def __len__(self) -> int:
        return len(self.chars)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and self.chars == other.chars

    def index_of(self, char: int) -> int:
        try:
            return self._index[char]
        except KeyError:
            raise ConstraintError(
                f"character {char!r} not in alphabet"
            ) from None

    @property
    def index_bits(self) -> int:
        return bits_needed(len(self.chars) - 1)


#: The full IA5 character set (codes 0..127).
IA5_ALPHABET = Alphabet(bytes(range(128)))


class AcnCodec:
    """Decorator over a BitStream exposing the ACN primitive catalog."""

    __slots__ = ("stream",)

    def __init__(self, stream: BitStream):
        self.stream = stream

    # Pass-throughs kept thin so callers can treat a codec as a cursor.
    @property
    def bit_index(self) -> int:
        return self.stream.bit_index

    def remaining_bits(self) -> int:
        return self.stream.remaining_bits()

    def validate_offset_bits(self, n_bits: int) -> bool:
        return self.stream.validate_offset_bits(n_bits)

    def move_bit_index(self, offset: int) -> None:
        self.stream.move_bit_index(offset)

    def copy(self) -> "AcnCodec":
        return AcnCodec(self.stream.copy())

    def reset_at(self, other: "AcnCodec") -> "AcnCodec":
        return AcnCodec(self.stream.reset_at(other.stream))

    # ------------------------------------------------------------------
    # Constrained whole numbers
    # ------------------------------------------------------------------

    def encode_constrained_pos_whole_number(self, v: int, lo: int, hi: int) -> None:
        _check_u64_range(lo, hi)
        if not lo <= v <= hi:
            raise ConstraintError(f"value {v} outside [{lo}, {hi}]")
        self.stream.append_lsb_bits_msb_first(v - lo, bits_needed(hi - lo))

    def decode_constrained_pos_whole_number(self, lo: int, hi: int) -> int:
        _check_u64_range(lo, hi)
        v = lo + self.stream.read_n_lsb_bits_msb_first(bits_needed(hi - lo))
        if v > hi:
            raise ConstraintError(f"decoded value {v} outside [{lo}, {hi}]")
        return v

    # ------------------------------------------------------------------
    # Unsigned integers
    # ------------------------------------------------------------------

    def encode_uint_const_size_aligned(
        self, v: int, width: int, endianness: str = "big"
    ) -> None:
        _check_aligned(width, endianness)
        if v < 0 or v >> width:
            raise ValueWidthError(f"value {v} does not fit in {width} bits")
        self.stream.append_byte_array(v.to_bytes(width // 8, "big"))

    def decode_uint_const_size_aligned(self, width: int, endianness: str = "big") -> int:
        _check_aligned(width, endianness)
        return int.from_bytes(self.stream.read_byte_array(width // 8), "big")

    def encode_uint_const_size(self, v: int, n_bits: int) -> None:
        if not 1 <= n_bits <= 64:
            raise ValueError(f"bit width {n_bits} outside 1..64")
        self.stream.append_lsb_bits_msb_first(v, n_bits)

    def decode_uint_const_size(self, n_bits: int) -> int:
        if not 1 <= n_bits <= 64:
            raise ValueError(f"bit width {n_bits} outside 1..64")
        return self.stream.read_n_lsb_bits_msb_first(n_bits)

    # ------------------------------------------------------------------
    # Two's-complement integers
    # ------------------------------------------------------------------

    def encode_int_twos_complement_const_size_aligned(
        self, v: int, width: int, endianness: str = "big"
    ) -> None:
        _check_aligned(width, endianness)
        _check_signed(v, width)
        self.stream.append_byte_array(
            int2uint(v, width // 8).to_bytes(width // 8, "big")
        )

    def decode_int_twos_complement_const_size_aligned(
        self, width: int, endianness: str = "big"
    ) -> int:
        _check_aligned(width, endianness)
        raw = int.from_bytes(self.stream.read_byte_array(width // 8), "big")
        return uint2int(raw, width // 8)

    def encode_int_twos_complement_const_size(self, v: int, n_bits: int) -> None:
        if not 1 <= n_bits <= 64:
            raise ValueError(f"bit width {n_bits} outside 1..64")
        _check_signed(v, n_bits)
        self.stream.append_lsb_bits_msb_first(v & ((1 << n_bits) - 1), n_bits)

    def decode_int_twos_complement_const_size(self, n_bits: int) -> int:
        if not 1 <= n_bits <= 64:
            raise ValueError(f"bit width {n_bits} outside 1..64")
        raw = self.stream.read_n_lsb_bits_msb_first(n_bits)
        return raw - (1 << n_bits) if raw >> (n_bits - 1) else raw

    # ------------------------------------------------------------------
    # Reals (uninterpreted IEEE-754 bit patterns)
    # ------------------------------------------------------------------

    def encode_real_ieee754(self, pattern: int, width: int, endianness: str) -> None:
        _check_real(width, endianness)
        if pattern < 0 or pattern >> width:
            raise ValueWidthError(f"pattern 0x{pattern:x} wider than {width} bits")
        self.stream.append_byte_array(pattern.to_bytes(width // 8, endianness))

    def decode_real_ieee754(self, width: int, endianness: str) -> int:
        _check_real(width, endianness)
        return int.from_bytes(self.stream.read_byte_array(width // 8), endianness)

    # ------------------------------------------------------------------
    # Strings
    # ------------------------------------------------------------------

    def encode_string_ascii_null_terminated(
        self, s: bytes, max_len: int, null_pattern: bytes
    ) -> None:
        _check_null_pattern(null_pattern)
        if len(s) > max_len:
            raise ConstraintError(f"string length {len(s)} exceeds {max_len}")
        bad = next((c for c in s if c > 127), None)
        if bad is not None:
            raise ConstraintError(f"character {bad} outside 7-bit range")
        if null_pattern in s:
            raise ConstraintError("string contains the termination pattern")
        self.stream.append_byte_array(s + null_pattern)

    def decode_string_ascii_null_terminated(
        self, max_len: int, null_pattern: bytes
    ) -> bytes:
        _check_null_pattern(null_pattern)
        seen = bytearray()
        limit = max_len + len(null_pattern)
        while len(seen) < limit:
            seen.append(self.stream.read_byte())
            if seen.endswith(null_pattern):
                content = bytes(seen[: -len(null_pattern)])
                bad = next((c for c in content if c > 127), None)
                if bad is not None:
                    raise DecodeError(f"decoded character {bad} outside 7-bit range")
                return content
        raise DecodeError(
            f"termination pattern not found within {max_len} characters"
        )

    def encode_string_char_index_internal(
        self, s: bytes, alphabet: Alphabet, min_len: int, max_len: int
    ) -> None:
        if not min_len <= len(s) <= max_len:
            raise ConstraintError(
                f"string length {len(s)} outside [{min_len}, {max_len}]"
            )
        self.encode_constrained_pos_whole_number(len(s), min_len, max_len)
        self._encode_char_indices(s, alphabet)

    def decode_string_char_index_internal(
        self, alphabet: Alphabet, min_len: int, max_len: int
    ) -> bytes:
        length = self.decode_constrained_pos_whole_number(min_len, max_len)
        return self._decode_char_indices(alphabet, length)

    def encode_string_char_index_external(
        self, s: bytes, alphabet: Alphabet, max_len: int, ext_len: int
    ) -> None:
        if len(s) != ext_len:
            raise ConstraintError(
                f"string length {len(s)} does not match determinant {ext_len}"
            )
        if ext_len > max_len:
            raise ConstraintError(f"determinant {ext_len} exceeds max {max_len}")
        self._encode_char_indices(s, alphabet)

    def decode_string_char_index_external(
        self, alphabet: Alphabet, max_len: int, ext_len: int
    ) -> bytes:
        if ext_len > max_len:
            raise ConstraintError(f"determinant {ext_len} exceeds max {max_len}")
        return self._decode_char_indices(alphabet, ext_len)

    def _encode_char_indices(self, s: bytes, alphabet: Alphabet) -> None:
        width = alphabet.index_bits
        for c in s:
            self.stream.append_lsb_bits_msb_first(alphabet.index_of(c), width)

    def _decode_char_indices(self, alphabet: Alphabet, length: int) -> bytes:
        width = alphabet.index_bits
        out = bytearray()
        for _ in range(length):
            idx = self.stream.read_n_lsb_bits_msb_first(width)
            if idx >= len(alphabet):
                raise DecodeError(f"character index {idx} outside alphabet")
            out.append(alphabet.chars[idx])
        return bytes(out)


def _check_u64_range(lo: int, hi: int) -> None:
    if not 0 <= lo <= hi <= U64_MAX:
        raise ConstraintError(f"invalid unsigned range [{lo}, {hi}]")


def _check_aligned(width: int, endianness: str) -> None:
    if width not in ALIGNED_WIDTHS:
        raise ValueError(f"width {width} not one of {ALIGNED_WIDTHS}")
    if endianness != "big":
        raise ValueError(f"unsupported integer endianness {endianness!r}")


def _check_signed(v: int, n_bits: int) -> None:
    lo, hi = -(1 << (n_bits - 1)), (1 << (n_bits - 1)) - 1
    if not lo <= v <= hi:
        raise ValueWidthError(f"value {v} outside [{lo}, {hi}]")


def _check_real(width: int, endianness: str) -> None:
    if width not in (32, 64):
        raise ValueError(f"real width {width} not 32 or 64")
    if endianness not in ("big", "little"):
        raise ValueError(f"unknown endianness {endianness!r}")


def _check_null_pattern(null_pattern: bytes) -> None:
    if not 1 <= len(null_pattern) <= 8:
        raise ValueError("termination pattern must be 1..8 bytes")
