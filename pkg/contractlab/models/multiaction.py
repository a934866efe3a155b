"""
Multi-action linear contracts.

The agent picks a set of actions S to maximize alpha * f(S) - c(S), breaking ties
toward larger f(S) and then the smaller bitmask; the principal keeps
u_P(alpha) = f(S_alpha) * (1 - alpha). Each set is a line in alpha, so the agent's
utility is the upper envelope of those lines and u_P is decreasing inside every
envelope segment.
"""
import bisect
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import settings
from ..core.exceptions import CapExceededError, DimensionError, InvalidInstanceError, PreconditionError
from ..core.numeric import (
    Number,
    all_exact,
    exact_or_float,
    is_exact,
    safe_mul,
    safe_sub,
    to_fraction,
)
from ..utils.bitmask import ensure_cap
from ..utils.parallel import map_ranges
from .itemset import ItemSet
from .setfn import SetFunction, ValueTable, additive_table, common_numerators

logger = logging.getLogger(__name__)

RATIONAL = "rational"
REAL = "real"


@dataclass(frozen=True)
class MultiActionInstance:
    """Actions 0..n-1 with costs, a success function f, and a numeric mode."""

    costs: Tuple[Number, ...]
    f: SetFunction
    numeric: Optional[str] = None

    def __post_init__(self):
        costs = tuple(exact_or_float(c) for c in self.costs)
        object.__setattr__(self, "costs", costs)
        if len(costs) != self.f.n:
            raise DimensionError(f"{len(costs)} costs for a function over {self.f.n} actions")
        if any(c < 0 for c in costs):
            raise InvalidInstanceError("Action costs must be non-negative")
        data_exact = self.f.exact and all_exact(costs)
        if self.numeric is None:
            object.__setattr__(self, "numeric", RATIONAL if data_exact else REAL)
        elif self.numeric == RATIONAL and not data_exact:
            raise InvalidInstanceError("Rational mode needs rational success values and costs")
        elif self.numeric not in (RATIONAL, REAL):
            raise InvalidInstanceError(f"Unknown numeric mode {self.numeric!r}")

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def exact(self) -> bool:
        return self.numeric == RATIONAL

    def cost_of(self, S: ItemSet) -> Number:
        start = Fraction(0) if self.exact else 0.0
        return sum((self.costs[i] for i in S), start)

    def value_table(self) -> ValueTable:
        table = self.f.table()
        return table if self.exact else ValueTable(table.as_float(), 1, False)

    def cost_table(self) -> ValueTable:
        costs = self.costs if self.exact else [float(c) for c in self.costs]
        return additive_table(costs)


@dataclass(frozen=True)
class MultiActionSolution:
    alpha: Number
    best_response: ItemSet
    principal_utility: Number


@dataclass(frozen=True)
class EnvelopeSegment:
    """The agent's best response on [start, next segment's start)."""

    start: Number
    best_response: ItemSet
    value: Number
    cost: Number


def _alpha(inst: MultiActionInstance, alpha: Number) -> Number:
    alpha = exact_or_float(alpha)
    if not 0 <= alpha <= 1:
        raise PreconditionError(f"alpha must lie in [0, 1], got {alpha}")
    if not inst.exact:
        return float(alpha)
    if not is_exact(alpha):
        return Fraction(repr(alpha))
    return alpha


def agent_utility(inst: MultiActionInstance, S: ItemSet, alpha: Number) -> Number:
    alpha = _alpha(inst, alpha)
    return alpha * inst.f.value(S) - inst.cost_of(S)


def agent_best_response(inst: MultiActionInstance, alpha: Number) -> ItemSet:
    """
    Exhaustive best response at alpha.

    Maximizes alpha * f(S) - c(S); among maximizers picks the largest f(S), then the
    smallest bitmask.

    Args:
        inst: multi-action instance
        alpha: contract in [0, 1]

    Returns:
        ItemSet: the agent's chosen actions

    Raises:
        CapExceededError: if n is above the enumeration cap
    """
    ensure_cap(inst.n, what="agent best response")
    alpha = _alpha(inst, alpha)
    values, costs = inst.value_table(), inst.cost_table()
    if inst.exact:
        f_num, c_num, _ = common_numerators(values, costs)
        a = to_fraction(alpha)
        utility = safe_sub(safe_mul(f_num, a.numerator), safe_mul(c_num, a.denominator))
        top = utility.max()
        tied = np.flatnonzero(utility == top)
        tied_f = f_num[tied]
        best = tied[np.flatnonzero(tied_f == tied_f.max())[0]]
    else:
        f_val, c_val = values.as_float(), costs.as_float()
        utility = alpha * f_val - c_val
        tol = settings.tolerance
        tied = np.flatnonzero(utility >= utility.max() - tol)
        tied_f = f_val[tied]
        best = tied[np.flatnonzero(tied_f >= tied_f.max() - tol)[0]]
    return ItemSet(int(best), inst.n)


def principal_utility(inst: MultiActionInstance, alpha: Number) -> Number:
    """u_P(alpha) = f(S_alpha) * (1 - alpha)."""
    alpha = _alpha(inst, alpha)
    return inst.f.value(agent_best_response(inst, alpha)) * (1 - alpha)


@dataclass(frozen=True)
class _LineArrays:
    """Distinct lines as parallel arrays; exact mode keeps integer numerators."""

    f_key: np.ndarray
    c_key: np.ndarray
    masks: np.ndarray
    f_den: int
    c_den: int
    exact: bool

    def f_of(self, k: int) -> Number:
        return Fraction(int(self.f_key[k]), self.f_den) if self.exact else float(self.f_key[k])

    def c_of(self, k: int) -> Number:
        return Fraction(int(self.c_key[k]), self.c_den) if self.exact else float(self.c_key[k])

    def __len__(self) -> int:
        return len(self.masks)


def _line_arrays(inst: MultiActionInstance, per_value: bool) -> _LineArrays:
    """
    Distinct lines sorted by (f, c, mask), each keeping its smallest mask.

    With per_value only the cheapest set per f value survives (the others are
    dominated for every alpha); otherwise every distinct (f, c) pair is kept.
    """
    values, costs = inst.value_table(), inst.cost_table()
    if inst.exact:
        f_key, c_key, f_den, c_den = values.data, costs.data, values.denominator, costs.denominator
    else:
        f_key, c_key, f_den, c_den = values.as_float(), costs.as_float(), 1, 1
    masks = np.arange(1 << inst.n, dtype=np.int64)

    if f_key.dtype != object and c_key.dtype != object:
        order = np.lexsort((masks, c_key, f_key))
        f_sorted, c_sorted = f_key[order], c_key[order]
        first = np.ones(len(order), dtype=bool)
        first[1:] = f_sorted[1:] != f_sorted[:-1]
        if not per_value:
            first[1:] |= c_sorted[1:] != c_sorted[:-1]
        keep = order[first]
        return _LineArrays(f_key[keep], c_key[keep], keep, f_den, c_den, inst.exact)

    best = {}
    for m in range(1 << inst.n):
        f_m, c_m = int(f_key[m]), int(c_key[m])
        key = f_m if per_value else (f_m, c_m)
        if key not in best or (c_m, m) < best[key][1:]:
            best[key] = (f_m, c_m, m)
    rows = sorted(best.values())
    return _LineArrays(
        np.array([r[0] for r in rows], dtype=object),
        np.array([r[1] for r in rows], dtype=object),
        np.array([r[2] for r in rows], dtype=np.int64),
        f_den, c_den, inst.exact,
    )


def upper_envelope(inst: MultiActionInstance) -> List[EnvelopeSegment]:
    """
    The agent's best-response segments over alpha >= 0.

    Lines are added by increasing slope f. A line whose segment would be empty is
    dropped, including lines that only touch the envelope at a single point, since
    there the steeper line wins the principal-favoring tie. Segment k is active on
    [start_k, start_{k+1}); the first one starts at 0.
    """
    ensure_cap(inst.n, what="upper envelope")
    lines = _line_arrays(inst, per_value=True)
    zero: Number = Fraction(0) if inst.exact else 0.0
    hull: List[int] = []
    starts: List[Number] = []
    for k in range(len(lines)):
        f_val, c_val = lines.f_of(k), lines.c_of(k)
        start = zero
        while hull:
            last = hull[-1]
            cross = (c_val - lines.c_of(last)) / (f_val - lines.f_of(last))
            if cross <= starts[-1]:
                hull.pop()
                starts.pop()
                continue
            start = cross
            break
        hull.append(k)
        starts.append(start)
    return [
        EnvelopeSegment(start=s, best_response=ItemSet(int(lines.masks[k]), inst.n),
                        value=lines.f_of(k), cost=lines.c_of(k))
        for s, k in zip(starts, hull)
    ]


def envelope_response(segments: Sequence[EnvelopeSegment], alpha: Number) -> EnvelopeSegment:
    """Segment active at alpha (right-continuous)."""
    starts = [segment.start for segment in segments]
    return segments[bisect.bisect_right(starts, alpha) - 1]


def breakpoints(inst: MultiActionInstance) -> List[Number]:
    """
    Every alpha in [0, 1] where two sets with different f tie, plus 0 and 1.

    Works over distinct (f, c) lines, whose number is capped at
    2^breakpoint_cap_n. Rational mode deduplicates exactly.
    """
    ensure_cap(inst.n, what="breakpoint enumeration")
    lines = _line_arrays(inst, per_value=False)
    cap = 1 << settings.breakpoint_cap_n
    if len(lines) > cap:
        raise CapExceededError(f"{len(lines)} distinct lines exceed the breakpoint cap of {cap}")

    if inst.exact:
        pairs = set()
        for s in range(len(lines) - 1):
            df = safe_sub(lines.f_key[s + 1:], lines.f_key[s:s + 1])
            dc = safe_sub(lines.c_key[s + 1:], lines.c_key[s:s + 1])
            ok = df != 0
            df, dc = df[ok], dc[ok]
            if df.dtype != object and dc.dtype != object:
                g = np.gcd(dc, df)
                dc, df = dc // g, df // g
                flip = df < 0
                dc[flip], df[flip] = -dc[flip], -df[flip]
            pairs.update(zip(dc.tolist(), df.tolist()))
        found = {Fraction(0), Fraction(1)}
        for top, bottom in pairs:
            alpha = Fraction(int(top) * lines.f_den, int(bottom) * lines.c_den)
            if 0 <= alpha <= 1:
                found.add(alpha)
        return sorted(found)

    collected = [np.array([0.0, 1.0])]
    for s in range(len(lines) - 1):
        df = lines.f_key[s + 1:] - lines.f_key[s]
        dc = lines.c_key[s + 1:] - lines.c_key[s]
        ok = df != 0
        alphas = dc[ok] / df[ok]
        collected.append(alphas[(alphas >= 0) & (alphas <= 1)])
    values = np.unique(np.concatenate(collected))
    merged = [float(values[0])]
    for v in values[1:]:
        if v - merged[-1] > settings.tolerance:
            merged.append(float(v))
    return merged


def solve_exact(inst: MultiActionInstance) -> MultiActionSolution:
    """
    Optimal linear contract.

    u_P is evaluated at every start of an upper-envelope segment inside [0, 1] and
    at 1. Those starts are exactly the breakpoints where the best response changes,
    and u_P decreases inside each segment, so the maximum is attained there. Ties go
    to the smaller alpha.

    Args:
        inst: multi-action instance

    Returns:
        MultiActionSolution: alpha*, the best response there, and u_P(alpha*)
    """
    segments = upper_envelope(inst)
    one = Fraction(1) if inst.exact else 1.0
    candidates = [segment.start for segment in segments if segment.start <= 1] + [one]

    best: Optional[MultiActionSolution] = None
    for alpha in candidates:
        segment = envelope_response(segments, alpha)
        utility = segment.value * (1 - alpha)
        if best is None or utility > best.principal_utility:
            best = MultiActionSolution(alpha=alpha, best_response=segment.best_response,
                                       principal_utility=utility)
    logger.info(
        f"Multi-action optimum over {len(segments)} envelope segments: "
        f"alpha={best.alpha}, S={best.best_response}, u_P={best.principal_utility}"
    )
    return best


def principal_utility_grid(inst: MultiActionInstance, alphas: Sequence[float]) -> np.ndarray:
    """
    Float u_P at each grid point by brute force over all sets.

    Grid chunks are scanned in parallel; inside a chunk, blocks of grid points are
    evaluated against every set at once.
    """
    ensure_cap(inst.n, what="grid scan")
    f_val = inst.value_table().as_float()
    c_val = inst.cost_table().as_float()
    grid = np.asarray(alphas, dtype=np.float64)
    tol = settings.tolerance
    block = max(1, (1 << 16) >> inst.n)

    def scan(start: int, stop: int) -> np.ndarray:
        out = []
        for lo in range(start, stop, block):
            a = grid[lo:min(stop, lo + block)]
            utility = a[:, None] * f_val[None, :] - c_val[None, :]
            tied = utility >= utility.max(axis=1, keepdims=True) - tol
            best_f = np.where(tied, f_val[None, :], -np.inf).max(axis=1)
            out.append(best_f * (1 - a))
        return np.concatenate(out) if out else np.empty(0)

    return np.concatenate(map_ranges(scan, len(grid), min_chunk=block))
