"""Finite binary relations as packed bit matrices.

A relation between carriers ``X`` and ``Y`` is stored row-major: row ``x``
is a Python int whose bit ``y`` is set iff ``(x, y)`` is in the relation.
Python ints give word-parallel boolean algebra for free; the heavy
operations (composition, transitive closure) go through the kernel
backend.

Composition convention, fixed globally: ``r.compose(s)`` is "r then s",
i.e. ``(x, z)`` iff there is a ``y`` with ``(x, y) in r`` and
``(y, z) in s``.  The permutability-style verdicts computed downstream
are invariant under the opposite convention; raw composite matrices in
reports are not, which is why the convention is pinned here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .kernels import compose_bits, transitive_closure_bits


@dataclass(frozen=True)
class Carrier:
    """A finite carrier {0, ..., size-1} with optional display labels."""

    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.size < 0:
            raise InputError(f"carrier size must be >= 0, got {self.size}")
        if self.labels is not None and len(self.labels) != self.size:
            raise InputError(
                f"carrier has {self.size} elements but {len(self.labels)} labels")

    def label(self, i: int) -> str:
        if self.labels is not None:
            return self.labels[i]
        return str(i)


@dataclass(frozen=True)
class BinRel:
    src: Carrier
    dst: Carrier
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.src.size:
            raise InputError(
                f"relation has {len(self.rows)} rows for a {self.src.size}-element source")
        mask = (1 << self.dst.size) - 1
        for x, row in enumerate(self.rows):
            if row < 0 or row & ~mask:
                raise InputError(f"row {x} sets bits outside the target carrier")

    @staticmethod
    def from_pairs(src: Carrier, dst: Carrier, pairs) -> "BinRel":
        rows = [0] * src.size
        for x, y in pairs:
            if not (0 <= x < src.size and 0 <= y < dst.size):
                raise InputError(f"pair ({x}, {y}) outside {src.size}x{dst.size}")
            rows[x] |= 1 << y
        return BinRel(src, dst, tuple(rows))

    @staticmethod
    def identity(carrier: Carrier) -> "BinRel":
        return BinRel(carrier, carrier, tuple(1 << x for x in range(carrier.size)))

    @staticmethod
    def empty(src: Carrier, dst: Carrier) -> "BinRel":
        return BinRel(src, dst, (0,) * src.size)

    @staticmethod
    def full(src: Carrier, dst: Carrier) -> "BinRel":
        row = (1 << dst.size) - 1
        return BinRel(src, dst, (row,) * src.size)

    def holds(self, x: int, y: int) -> bool:
        return bool(self.rows[x] >> y & 1)

    def pairs(self):
        for x, row in enumerate(self.rows):
            while row:
                low = row & -row
                yield x, low.bit_length() - 1
                row ^= low

    def count(self) -> int:
        return sum(row.bit_count() for row in self.rows)

    def compose(self, other: "BinRel") -> "BinRel":
        """Relational composite, self first: (x,z) iff x self y and y other z."""
        if self.dst.size != other.src.size:
            raise InputError(
                f"cannot compose: middle carriers differ "
                f"({self.dst.size} vs {other.src.size})")
        rows = compose_bits(list(self.rows), list(other.rows), other.dst.size)
        return BinRel(self.src, other.dst, tuple(rows))

    def opposite(self) -> "BinRel":
        cols = [0] * self.dst.size
        for x, row in enumerate(self.rows):
            bit = 1 << x
            while row:
                low = row & -row
                cols[low.bit_length() - 1] |= bit
                row ^= low
        return BinRel(self.dst, self.src, tuple(cols))

    def _check_same_type(self, other: "BinRel", what: str):
        if self.src.size != other.src.size or self.dst.size != other.dst.size:
            raise InputError(
                f"cannot {what} relations of different types "
                f"({self.src.size}x{self.dst.size} vs {other.src.size}x{other.dst.size})")

    def meet(self, other: "BinRel") -> "BinRel":
        self._check_same_type(other, "meet")
        return BinRel(self.src, self.dst,
                      tuple(a & b for a, b in zip(self.rows, other.rows)))

    def union(self, other: "BinRel") -> "BinRel":
        self._check_same_type(other, "join")
        return BinRel(self.src, self.dst,
                      tuple(a | b for a, b in zip(self.rows, other.rows)))

    def is_contained(self, other: "BinRel"):
        """Inclusion test; returns (True, None) or (False, witness_pair)."""
        self._check_same_type(other, "compare")
        for x, (a, b) in enumerate(zip(self.rows, other.rows)):
            extra = a & ~b
            if extra:
                low = extra & -extra
                return False, (x, low.bit_length() - 1)
        return True, None

    def transitive_closure(self) -> "BinRel":
        if self.src.size != self.dst.size:
            raise InputError("transitive closure needs a square relation")
        rows = transitive_closure_bits(list(self.rows))
        return BinRel(self.src, self.dst, tuple(rows))

    def is_reflexive(self) -> bool:
        return all(row >> x & 1 for x, row in enumerate(self.rows))
