from __future__ import annotations
from typing import Iterable, Iterator

import numpy as np


class BitVector:
    """
    A fixed-width set of sample indices.

    Bit i is sample i.  The bits live in a single Python int, which CPython stores
    as an array of machine-sized digits, so and/or/andnot run block-wise and
    popcount is a single call to int.bit_count().

    Every vector taking part in a binary operation must have the same length.
    """

    __slots__ = ("bits", "length")

    def __init__(self, bits: int, length: int) -> None:
        if length < 0:
            raise ValueError("BitVector length must be non-negative")
        if bits < 0 or bits >> length:
            raise ValueError(f"Bits set outside of a vector of length {length}")
        self.bits = bits
        self.length = length

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(0, length)

    @classmethod
    def ones(cls, length: int) -> BitVector:
        return cls((1 << length) - 1, length)

    @classmethod
    def from_bools(cls, values: Iterable[bool]) -> BitVector:
        bits = 0
        length = 0
        for i, value in enumerate(values):
            if value:
                bits |= 1 << i
            length = i + 1
        return cls(bits, length)

    @classmethod
    def from_numpy(cls, array: np.ndarray) -> BitVector:
        """Pack a boolean (or 0/1) array, element i becoming bit i."""
        array = np.asarray(array, dtype=bool).ravel()
        packed = np.packbits(array, bitorder="little")
        return cls(int.from_bytes(packed.tobytes(), "little"), int(array.shape[0]))

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> BitVector:
        """Build a vector from '0'/'1' tokens, as found in rule files."""
        bits = 0
        length = 0
        for i, token in enumerate(tokens):
            if token == "1":
                bits |= 1 << i
            elif token != "0":
                raise ValueError(f"Expected '0' or '1' but found '{token}' at position {i}")
            length = i + 1
        return cls(bits, length)

    def to_numpy(self) -> np.ndarray:
        n_bytes = (self.length + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(n_bytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, count=self.length, bitorder="little").astype(bool)

    def to_tokens(self) -> str:
        return " ".join("1" if self.bits >> i & 1 else "0" for i in range(self.length))

    def popcount(self) -> int:
        return self.bits.bit_count()

    def _check(self, other: BitVector) -> None:
        if self.length != other.length:
            raise ValueError(f"BitVector length mismatch ({self.length} != {other.length})")

    def __and__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self.bits & other.bits, self.length)

    def __or__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self.bits | other.bits, self.length)

    def andnot(self, other: BitVector) -> BitVector:
        """Bits set here and clear in other."""
        self._check(other)
        return BitVector(self.bits & ~other.bits, self.length)

    def __invert__(self) -> BitVector:
        return BitVector(~self.bits & ((1 << self.length) - 1), self.length)

    def __getitem__(self, index: int) -> bool:
        if not 0 <= index < self.length:
            raise IndexError(index)
        return bool(self.bits >> index & 1)

    def __iter__(self) -> Iterator[bool]:
        return (bool(self.bits >> i & 1) for i in range(self.length))

    def __len__(self) -> int:
        return self.length

    def __eq__(self, __o: object) -> bool:
        return isinstance(__o, BitVector) and self.length == __o.length and self.bits == __o.bits

    def __hash__(self) -> int:
        return hash((self.bits, self.length))

    def __repr__(self) -> str:
        return f"<BitVector {self.popcount()}/{self.length}>"
