"""
Success-probability set functions with value, marginal and demand oracles.

Every variant evaluates single sets directly and can also materialize its full
2^n value table (cached, built by vectorized doubling where the structure allows).
Exhaustive operations (demand, class checks, solvers) work on that table.
"""
import logging
import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import settings
from ..core.exceptions import DimensionError, InvalidInstanceError, PreconditionError
from ..core.numeric import (
    INT64_SAFE,
    Number,
    all_exact,
    exact_or_float,
    int_array,
    is_exact,
    lcm_denominator,
    safe_mul,
    safe_sub,
    to_fraction,
)
from ..utils.bitmask import all_masks, ensure_cap, iter_bits, popcount_array, popcounts
from .itemset import ItemSet

logger = logging.getLogger(__name__)


class ValueTable:
    """
    Values of a set function on every bitmask in [0, 2^n).

    In exact mode ``data`` holds integer numerators (int64, or Python ints in an
    object array when they grow too large) over the shared ``denominator``, so exact
    comparisons are plain integer comparisons. In real mode ``data`` is float64.
    """

    __slots__ = ("data", "denominator", "exact", "_floats")

    def __init__(self, data: np.ndarray, denominator: int = 1, exact: bool = True):
        self.data = data
        self.denominator = int(denominator)
        self.exact = exact
        self._floats: Optional[np.ndarray] = None

    @classmethod
    def from_numbers(cls, values: Sequence[Number]) -> "ValueTable":
        values = list(values)
        if all_exact(values):
            denominator = lcm_denominator(values)
            numerators = int_array(int(to_fraction(v) * denominator) for v in values)
            return cls(numerators, denominator, True)
        return cls(np.array([float(v) for v in values], dtype=np.float64), 1, False)

    def __len__(self) -> int:
        return len(self.data)

    def __getitem__(self, bits: int) -> Number:
        if self.exact:
            return Fraction(int(self.data[bits]), self.denominator)
        return float(self.data[bits])

    def as_float(self) -> np.ndarray:
        if self._floats is None:
            if not self.exact:
                self._floats = self.data
            elif self.data.dtype == object:
                self._floats = np.array([int(x) / self.denominator for x in self.data], dtype=np.float64)
            else:
                self._floats = self.data.astype(np.float64) / self.denominator
        return self._floats

    def divided_by(self, scalar: Number) -> "ValueTable":
        if self.exact and is_exact(scalar):
            s = to_fraction(scalar)
            return ValueTable(safe_mul(self.data, s.denominator), self.denominator * s.numerator, True)
        return ValueTable(self.as_float() / float(scalar), 1, False)


def common_numerators(a: ValueTable, b: ValueTable) -> Tuple[np.ndarray, np.ndarray, int]:
    """Rescale two exact tables to one denominator; returns (numerators_a, numerators_b, denominator)."""
    denominator = math.lcm(a.denominator, b.denominator)
    return (
        safe_mul(a.data, denominator // a.denominator),
        safe_mul(b.data, denominator // b.denominator),
        denominator,
    )


def additive_table(weights: Sequence[Number]) -> ValueTable:
    """Table of S -> sum of weights over S, by doubling."""
    if all_exact(weights):
        denominator = lcm_denominator(weights)
        scaled = [int(to_fraction(w) * denominator) for w in weights]
        dtype = np.int64 if sum(abs(w) for w in scaled) < INT64_SAFE else object
        table = np.zeros(1, dtype=dtype)
        for w in scaled:
            table = np.concatenate([table, table + w])
        return ValueTable(table, denominator, True)
    table = np.zeros(1, dtype=np.float64)
    for w in weights:
        table = np.concatenate([table, table + float(w)])
    return ValueTable(table, 1, False)


class SetFunction(ABC):
    """
    A set function f over the ground set {0, ..., n-1}, divided by a normalization scalar.

    Values are immutable after construction, so every oracle is safe to call from
    many threads. The value table is built once under a lock.
    """

    kind: ClassVar[str] = "abstract"

    def __init__(self, n: int, normalize_by: Number = 1):
        if n < 0:
            raise DimensionError(f"Ground-set size must be non-negative, got {n}")
        if isinstance(normalize_by, bool) or not normalize_by > 0:
            raise InvalidInstanceError(f"Normalization scalar must be positive, got {normalize_by}")
        self._n = n
        self._normalize_by = exact_or_float(normalize_by)
        self._table: Optional[ValueTable] = None
        self._table_lock = threading.Lock()

    @property
    def n(self) -> int:
        return self._n

    @property
    def normalize_by(self) -> Number:
        return self._normalize_by

    @property
    def exact(self) -> bool:
        """True when every value is a rational number."""
        return self._data_exact() and (self._normalize_by == 1 or is_exact(self._normalize_by))

    @abstractmethod
    def _data_exact(self) -> bool:
        ...

    @abstractmethod
    def _evaluate(self, bits: int) -> Number:
        """Unnormalized value of the set encoded by `bits`."""

    def _build_table(self) -> ValueTable:
        return ValueTable.from_numbers([self._evaluate(bits) for bits in range(1 << self._n)])

    def _normalize(self, raw: Number) -> Number:
        if self._normalize_by == 1:
            return raw
        if is_exact(raw) and is_exact(self._normalize_by):
            return to_fraction(raw) / self._normalize_by
        return float(raw) / float(self._normalize_by)

    def _check_set(self, S: ItemSet) -> None:
        if S.n != self._n:
            raise DimensionError(f"Set over {S.n} items passed to a function over {self._n} items")

    def value_bits(self, bits: int) -> Number:
        return self._normalize(self._evaluate(bits))

    def value(self, S: ItemSet) -> Number:
        """
        Value of f at S.

        Args:
            S: set over the same ground set

        Returns:
            Number: f(S), a Fraction in exact mode

        Raises:
            DimensionError: if S is over a different ground set
        """
        self._check_set(S)
        return self.value_bits(S.bits)

    def marginal(self, i: int, S: ItemSet) -> Number:
        """f(S + i) - f(S) for an item i outside S."""
        self._check_set(S)
        if i in S:
            raise PreconditionError(f"Item {i} is already in S")
        return self.value(S.with_item(i)) - self.value(S)

    def table(self) -> ValueTable:
        if self._table is None:
            with self._table_lock:
                if self._table is None:
                    ensure_cap(self._n, what=f"{self.kind} value table")
                    table = self._build_table()
                    if self._normalize_by != 1:
                        table = table.divided_by(self._normalize_by)
                    logger.debug(f"Built {self.kind} value table over n={self._n} (exact={table.exact})")
                    self._table = table
        return self._table

    def demand(self, prices: Sequence[Number]) -> ItemSet:
        """
        Demand oracle: a set maximizing f(S) - sum of prices over S.

        Ties go to the smallest bitmask.

        Args:
            prices: one non-negative price per item

        Returns:
            ItemSet: the demanded set

        Raises:
            DimensionError: if the price vector has the wrong length
            CapExceededError: if n is above the enumeration cap
        """
        if len(prices) != self._n:
            raise DimensionError(f"Expected {self._n} prices, got {len(prices)}")
        if any(p < 0 for p in prices):
            raise PreconditionError("Prices must be non-negative")
        ensure_cap(self._n, what="demand")
        values = self.table()
        costs = additive_table([exact_or_float(p) for p in prices])
        if values.exact and costs.exact:
            f_num, p_num, _ = common_numerators(values, costs)
            best = int(np.argmax(safe_sub(f_num, p_num)))
        else:
            surplus = values.as_float() - costs.as_float()
            best = int(np.flatnonzero(surplus >= surplus.max() - settings.tolerance)[0])
        return ItemSet(best, self._n)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self._n}, normalize_by={self._normalize_by})"


class AdditiveFn(SetFunction):
    """f(S) = sum of v_i over S."""

    kind = "additive"

    def __init__(self, weights: Sequence[Number], normalize_by: Number = 1):
        weights = tuple(exact_or_float(w) for w in weights)
        if any(w < 0 for w in weights):
            raise InvalidInstanceError("Additive weights must be non-negative")
        super().__init__(len(weights), normalize_by)
        self.weights = weights

    def _data_exact(self) -> bool:
        return all_exact(self.weights)

    def _evaluate(self, bits: int) -> Number:
        start = Fraction(0) if self._data_exact() else 0.0
        return sum((self.weights[i] for i in iter_bits(bits)), start)

    def _build_table(self) -> ValueTable:
        return additive_table(self.weights)


class CoverageFn(SetFunction):
    """
    Normalized unweighted coverage: f(S) = |union of h(i) over S| / |U|.

    Covers are bitmasks over the universe {0, ..., |U|-1}.
    """

    kind = "coverage"

    def __init__(self, universe_size: int, covers: Sequence[int], normalize_by: Number = 1):
        if universe_size < 1:
            raise InvalidInstanceError(f"Universe must be non-empty, got size {universe_size}")
        covers = tuple(int(c) for c in covers)
        for i, cover in enumerate(covers):
            if cover < 0 or cover >> universe_size:
                raise InvalidInstanceError(f"Cover of item {i} leaves the universe of size {universe_size}")
        super().__init__(len(covers), normalize_by)
        self.universe_size = universe_size
        self.covers = covers

    @classmethod
    def from_element_lists(
        cls, universe_size: int, element_lists: Sequence[Sequence[int]], normalize_by: Number = 1
    ) -> "CoverageFn":
        covers = []
        for elements in element_lists:
            cover = 0
            for u in elements:
                if not 0 <= u < universe_size:
                    raise InvalidInstanceError(f"Element {u} outside universe of size {universe_size}")
                cover |= 1 << u
            covers.append(cover)
        return cls(universe_size, covers, normalize_by)

    def element_lists(self) -> List[List[int]]:
        return [list(iter_bits(cover)) for cover in self.covers]

    def covered(self, S: ItemSet) -> int:
        self._check_set(S)
        union = 0
        for i in S:
            union |= self.covers[i]
        return union

    def _data_exact(self) -> bool:
        return True

    def _evaluate(self, bits: int) -> Number:
        union = 0
        for i in iter_bits(bits):
            union |= self.covers[i]
        return Fraction(union.bit_count(), self.universe_size)

    def _build_table(self) -> ValueTable:
        if self.universe_size <= 62:
            unions = np.zeros(1, dtype=np.int64)
            for cover in self.covers:
                unions = np.concatenate([unions, unions | cover])
            counts = popcount_array(unions)
        else:
            big_unions = [0]
            for cover in self.covers:
                big_unions.extend([u | cover for u in big_unions])
            counts = int_array(u.bit_count() for u in big_unions)
        return ValueTable(counts, self.universe_size, True)


class XosFn(SetFunction):
    """f(S) = max over clauses a of a(S), every clause a non-negative additive function."""

    kind = "xos"

    def __init__(self, clauses: Sequence[Sequence[Number]], normalize_by: Number = 1):
        if not clauses:
            raise InvalidInstanceError("An XOS function needs at least one clause")
        clauses = tuple(tuple(exact_or_float(a) for a in clause) for clause in clauses)
        n = len(clauses[0])
        if any(len(clause) != n for clause in clauses):
            raise DimensionError("All XOS clauses must have the same length")
        if any(a < 0 for clause in clauses for a in clause):
            raise InvalidInstanceError("XOS clause entries must be non-negative")
        super().__init__(n, normalize_by)
        self.clauses = clauses

    def _data_exact(self) -> bool:
        return all(all_exact(clause) for clause in self.clauses)

    def _clause_sum(self, clause: Sequence[Number], bits: int) -> Number:
        start = Fraction(0) if self._data_exact() else 0.0
        return sum((clause[i] for i in iter_bits(bits)), start)

    def clause_values(self, S: ItemSet) -> List[Number]:
        """Every clause evaluated at S (normalized like value)."""
        self._check_set(S)
        return [self._normalize(self._clause_sum(clause, S.bits)) for clause in self.clauses]

    def _evaluate(self, bits: int) -> Number:
        return max(self._clause_sum(clause, bits) for clause in self.clauses)

    def _build_table(self) -> ValueTable:
        if self._data_exact():
            denominator = lcm_denominator(a for clause in self.clauses for a in clause)
            tables = [additive_table([to_fraction(a) * denominator for a in clause]).data
                      for clause in self.clauses]
            return ValueTable(np.maximum.reduce(tables), denominator, True)
        tables = [additive_table([float(a) for a in clause]).data for clause in self.clauses]
        return ValueTable(np.maximum.reduce(tables), 1, False)


class TableFn(SetFunction):
    """Explicit value table indexed by bitmask; f(empty) is whatever the table declares."""

    kind = "table"

    def __init__(self, values: Sequence[Number], empty_value: Optional[Number] = None,
                 normalize_by: Number = 1):
        values = tuple(exact_or_float(v) for v in values)
        size = len(values)
        n = size.bit_length() - 1
        if size == 0 or 1 << n != size:
            raise InvalidInstanceError(f"Table length must be a power of two, got {size}")
        if any(v < 0 for v in values):
            raise InvalidInstanceError("Table values must be non-negative")
        if empty_value is not None and values[0] != empty_value:
            raise InvalidInstanceError(f"Table declares f(empty) = {empty_value} but stores {values[0]}")
        super().__init__(n, normalize_by)
        self.values = values

    def _data_exact(self) -> bool:
        return all_exact(self.values)

    def _evaluate(self, bits: int) -> Number:
        return self.values[bits]


@dataclass(frozen=True)
class ClassReport:
    """Outcome of the exhaustive monotonicity and submodularity checks."""

    monotone: bool
    submodular: bool
    monotone_witness: Optional[Tuple[int, ItemSet]] = None
    submodular_witness: Optional[Tuple[int, ItemSet, ItemSet]] = None


def check_classes(f: SetFunction, cap: Optional[int] = None) -> ClassReport:
    """
    Exhaustively test monotonicity and submodularity.

    Submodularity is checked in its local form f(i|S) >= f(i|S+j) over all i != j
    and S avoiding both, which is equivalent to the nested-pair definition. The
    witness (i, S, S') has S' = S + j.

    Args:
        f: set function
        cap: largest n allowed (defaults to settings.class_check_cap_n)

    Returns:
        ClassReport: flags plus the first violating witness of each kind
    """
    ensure_cap(f.n, settings.class_check_cap_n if cap is None else cap, "class check")
    table = f.table()
    data = table.data if table.exact else table.as_float()
    tol = 0 if table.exact else settings.tolerance
    n = f.n
    masks = all_masks(n)

    monotone_witness = None
    for i in range(n):
        bit = 1 << i
        base = masks[(masks & bit) == 0]
        gain = data[base | bit] - data[base]
        bad = np.flatnonzero(gain < -tol)
        if bad.size:
            monotone_witness = (i, ItemSet(int(base[bad[0]]), n))
            break

    submodular_witness = None
    for i in range(n):
        for j in range(i + 1, n):
            bi, bj = 1 << i, 1 << j
            base = masks[(masks & (bi | bj)) == 0]
            lhs = data[base | bi] - data[base]
            rhs = data[base | bi | bj] - data[base | bj]
            bad = np.flatnonzero(lhs < rhs - tol)
            if bad.size:
                s = int(base[bad[0]])
                submodular_witness = (i, ItemSet(s, n), ItemSet(s | bj, n))
                break
        if submodular_witness is not None:
            break

    report = ClassReport(
        monotone=monotone_witness is None,
        submodular=submodular_witness is None,
        monotone_witness=monotone_witness,
        submodular_witness=submodular_witness,
    )
    logger.debug(f"Class check on {f!r}: monotone={report.monotone}, submodular={report.submodular}")
    return report


def best_set_of_size(f: SetFunction, size: int) -> Tuple[Number, ItemSet]:
    """Maximum of f over sets with exactly `size` items (smallest bitmask on ties)."""
    if not 0 <= size <= f.n:
        raise PreconditionError(f"Size {size} outside [0, {f.n}]")
    table = f.table()
    candidates = np.flatnonzero(popcounts(f.n) == size)
    values = table.data[candidates] if table.exact else table.as_float()[candidates]
    best = int(candidates[int(np.argmax(values))])
    return table[best], ItemSet(best, f.n)
