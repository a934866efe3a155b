from dataclasses import dataclass
from typing import Iterable, Iterator, List, Tuple

from ..core.exceptions import DimensionError, PreconditionError
from ..utils.bitmask import iter_bits, mask_of


@dataclass(frozen=True, order=True)
class ItemSet:
    """
    A subset of the ground set {0, ..., n-1} stored as a bitmask.

    Ordering compares (bits, n), so sorting sets over one ground set sorts them by
    bitmask value, which is the toolkit's deterministic tie-break.
    """

    bits: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError(f"Ground-set size must be non-negative, got {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise DimensionError(f"Bitmask {self.bits:#x} has bits outside a ground set of size {self.n}")

    @classmethod
    def empty(cls, n: int) -> "ItemSet":
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> "ItemSet":
        return cls((1 << n) - 1, n)

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> "ItemSet":
        indices = list(indices)
        for i in indices:
            if not 0 <= i < n:
                raise DimensionError(f"Index {i} outside ground set of size {n}")
        return cls(mask_of(indices), n)

    @classmethod
    def from_one_based(cls, indices: Iterable[int], n: int) -> "ItemSet":
        """Build from the 1-based index lists used in JSON documents."""
        return cls.from_indices((i - 1 for i in indices), n)

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.n and bool(self.bits >> i & 1)

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> Tuple[int, ...]:
        return tuple(iter_bits(self.bits))

    def one_based(self) -> List[int]:
        return [i + 1 for i in iter_bits(self.bits)]

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise DimensionError(f"Index {i} outside ground set of size {self.n}")

    def _check_same(self, other: "ItemSet") -> None:
        if other.n != self.n:
            raise DimensionError(f"Ground-set mismatch: {self.n} vs {other.n}")

    def with_item(self, i: int) -> "ItemSet":
        self._check_index(i)
        return ItemSet(self.bits | 1 << i, self.n)

    def without_item(self, i: int) -> "ItemSet":
        self._check_index(i)
        if i not in self:
            raise PreconditionError(f"Item {i} is not in the set")
        return ItemSet(self.bits & ~(1 << i), self.n)

    def union(self, other: "ItemSet") -> "ItemSet":
        self._check_same(other)
        return ItemSet(self.bits | other.bits, self.n)

    def intersection(self, other: "ItemSet") -> "ItemSet":
        self._check_same(other)
        return ItemSet(self.bits & other.bits, self.n)

    def difference(self, other: "ItemSet") -> "ItemSet":
        self._check_same(other)
        return ItemSet(self.bits & ~other.bits, self.n)

    def issubset(self, other: "ItemSet") -> bool:
        self._check_same(other)
        return self.bits & ~other.bits == 0

    def __str__(self) -> str:
        return "{" + ", ".join(str(i + 1) for i in self) + "}"
