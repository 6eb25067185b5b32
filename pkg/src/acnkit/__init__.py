"""acnkit: schema-driven ASN.1/ACN binary codec toolkit.

Pipeline: parse ASN.1 + ACN sources, resolve determinant wiring, compile to
an immutable codec plan with static size bounds, then encode/decode generic
values against the plan with executable roundtrip contracts.
"""

from .bitstream import BitStream, bit_ranges_equal
from .acncodec import AcnCodec, Alphabet, bits_needed, int2uint, uint2int
from .errors import (
    BoundsError,
    CapacityError,
    CodecError,
    ConstraintError,
    DecodeError,
    Diagnostic,
    DiagnosticError,
    PlanFormatError,
    ShapeError,
    ValueWidthError,
)

__version__ = "0.1.0"

__all__ = [
    "AcnCodec",
    "Alphabet",
    "BitStream",
    "BoundsError",
    "CapacityError",
    "CodecError",
    "ConstraintError",
    "DecodeError",
    "Diagnostic",
    "DiagnosticError",
    "PlanFormatError",
    "ShapeError",
    "ValueWidthError",
    "bit_ranges_equal",
    "bits_needed",
    "int2uint",
    "uint2int",
]
