from itertools import combinations
from typing import Iterator, List, Optional

import numpy as np

from ..config.settings import settings
from ..core.exceptions import CapExceededError

_BYTE_POPCOUNT = np.array([bin(b).count("1") for b in range(256)], dtype=np.uint8)


def ensure_cap(n: int, cap: Optional[int] = None, what: str = "exhaustive enumeration") -> None:
    """
    Raise CapExceededError when n exceeds the cap for an exhaustive operation.

    Args:
        n: ground-set size
        cap: explicit cap; defaults to settings.enumeration_cap_n
        what: operation name used in the error message
    """
    cap = settings.enumeration_cap_n if cap is None else cap
    if n > cap:
        raise CapExceededError(f"{what} needs n <= {cap}, got n = {n}")


def iter_bits(bits: int) -> Iterator[int]:
    """Indices of set bits in ascending order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def mask_of(indices) -> int:
    bits = 0
    for i in indices:
        bits |= 1 << i
    return bits


def all_masks(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def popcounts(n: int) -> np.ndarray:
    """Popcount of every mask in [0, 2^n), built by doubling."""
    counts = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        counts = np.concatenate([counts, counts + 1])
    return counts


def popcount_array(words: np.ndarray) -> np.ndarray:
    """Popcount of each entry of a non-negative int64 array."""
    as_bytes = np.ascontiguousarray(words, dtype=np.int64).view(np.uint8).reshape(-1, 8)
    return _BYTE_POPCOUNT[as_bytes].sum(axis=1, dtype=np.int64)


def masks_of_size(n: int, size: int) -> List[int]:
    """All masks over n items with exactly `size` bits set, in increasing combination order."""
    return [mask_of(combo) for combo in combinations(range(n), size)]


def masks_up_to_size(n: int, size: int) -> List[int]:
    masks: List[int] = []
    for s in range(min(size, n) + 1):
        masks.extend(masks_of_size(n, s))
    return masks
