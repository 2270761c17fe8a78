"""Fixed-width bit fields over '0'/'1' strings, most significant bit first."""

from __future__ import annotations

from .errors import MalformedCodeError


def uint_bits(value: int, width: int) -> str:
    if width == 0:
        if value != 0:
            raise ValueError(f"value {value} does not fit in 0 bits")
        return ""
    if value < 0 or value >> width:
        raise ValueError(f"value {value} does not fit in {width} bits")
    return format(value, f"0{width}b")


def ceil_log2(m: int) -> int:
    """Smallest w with 2**w >= m, for m >= 1."""
    if m < 1:
        raise ValueError("ceil_log2 needs m >= 1")
    return (m - 1).bit_length()


class BitReader:
    __slots__ = ("bits", "pos")

    def __init__(self, bits: str, pos: int = 0):
        self.bits = bits
        self.pos = pos

    def read(self, width: int) -> int:
        if width == 0:
            return 0
        end = self.pos + width
        if end > len(self.bits):
            raise MalformedCodeError(
                f"truncated: need {width} bits at offset {self.pos}, have {len(self.bits) - self.pos}"
            )
        value = int(self.bits[self.pos:end], 2)
        self.pos = end
        return value

    @property
    def remaining(self) -> int:
        return len(self.bits) - self.pos
