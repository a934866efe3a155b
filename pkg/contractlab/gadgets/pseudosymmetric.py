import logging
from fractions import Fraction
from typing import List, Optional

import numpy as np

from ..core.exceptions import GadgetConstructionError
from ..models.itemset import ItemSet
from ..models.multiagent import MultiAgentInstance, PseudoSymmetricSpec

logger = logging.getLogger(__name__)


def _bonus_limit(increments: List[int], size: int, scale: int) -> Fraction:
    """
    Largest bonus on a special set of `size` items that keeps f monotone,
    submodular and at most 1.

    With D_t = h(t) - h(t-1) the binding constraints are v <= D_{t-1} - D_t,
    v <= D_{t+1} - D_{t+2}, v <= D_{t+1} and v <= 1 - h(t); terms that refer
    to sizes outside 1..n drop out.
    """
    n = len(increments)

    def delta(t: int) -> int:
        return increments[t - 1]

    limits = [scale - sum(increments[:size])]
    if size >= 2:
        limits.append(delta(size - 1) - delta(size))
    if size + 1 <= n:
        limits.append(delta(size + 1))
    if size + 2 <= n:
        limits.append(delta(size + 1) - delta(size + 2))
    return Fraction(max(0, min(limits)), scale)


def random_pseudosymmetric_spec(n: int, rng: np.random.Generator, symmetric: bool = False) -> PseudoSymmetricSpec:
    """
    Seeded valid pseudo-symmetric spec.

    The profile has non-increasing non-negative integer increments over a common
    denominator (so h is concave, starts at 0 and ends at or below 1). The bonus is a
    random multiple of a quarter of the largest valid bonus, and 0 when symmetric.
    """
    if n < 1:
        raise GadgetConstructionError(f"n must be positive, got {n}")
    raw = sorted((int(x) for x in rng.integers(0, 4 * n + 1, size=n)), reverse=True)
    raw[0] = max(raw[0], 1)
    scale = sum(raw) + int(rng.integers(0, 2 * n + 1))
    profile = [Fraction(0)]
    for step in raw:
        profile.append(profile[-1] + Fraction(step, scale))

    size = int(rng.integers(1, n + 1))
    special = ItemSet.from_indices((int(i) for i in rng.choice(n, size=size, replace=False)), n)
    bonus = Fraction(0)
    if not symmetric:
        bonus = _bonus_limit(raw, size, scale) * Fraction(int(rng.integers(0, 5)), 4)
    return PseudoSymmetricSpec(profile=tuple(profile), special_set=special, bonus=bonus)


def pseudosymmetric_instance(n: int, seed: Optional[int] = None, symmetric: bool = False) -> MultiAgentInstance:
    """Random multi-agent instance over a valid pseudo-symmetric submodular f with rational costs."""
    if n < 1:
        raise GadgetConstructionError(f"n must be positive, got {n}")
    rng = np.random.default_rng(seed)
    spec = random_pseudosymmetric_spec(n, rng, symmetric=symmetric)
    costs = tuple(Fraction(int(c), 20 * n * n) for c in rng.integers(1, 11, size=n))
    logger.info(f"Pseudo-symmetric instance: n={n}, |T|={len(spec.special_set)}, v={spec.bonus}")
    return MultiAgentInstance(costs=costs, f=spec.function())
