import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.stats import beta, hypergeom

from ..config.settings import settings
from ..core.exceptions import PreconditionError
from ..gadgets.hidden_set import cube_root
from ..models.schemas import SuccessEstimateDocument
from ..utils.parallel import map_items

logger = logging.getLogger(__name__)

# Trials per independently seeded batch; fixed so results do not depend on the thread count.
BATCH_TRIALS = 4096
# The tail bound is only claimed from this size on.
BOUND_MIN_N = 512


def confidence_interval(successes: int, trials: int, level: float = 0.95) -> Tuple[float, float]:
    """Clopper-Pearson interval for a binomial rate."""
    if trials == 0:
        return 0.0, 1.0
    tail = (1 - level) / 2
    low = beta.ppf(tail, successes, trials - successes + 1) if successes > 0 else 0.0
    high = beta.ppf(1 - tail, successes + 1, trials - successes) if successes < trials else 1.0
    return float(low), float(high)


def exact_success_probability(n: int, set_size: int) -> float:
    """
    Pr[S is a successful query] for a fixed S of `set_size` agents and a uniform hidden set.

    |S & G| is hypergeometric; success needs |S|^2 <= n and |S & G|^2 > m.
    """
    m = cube_root(n)
    if set_size * set_size > n:
        return 0.0
    return float(hypergeom.sf(math.isqrt(m), n, m, set_size))


class EstimationService:
    """
    Service class for Monte Carlo estimates of how often a value query finds the hidden set.
    """

    def estimate_success(self, n: int, set_size: Optional[int] = None, trials: int = 100_000,
                         seed: Optional[int] = None) -> SuccessEstimateDocument:
        """
        Estimate Pr[is_successful_query] for a fixed S over uniformly drawn hidden sets G.

        S is the first `set_size` agents; by symmetry any fixed set of that size has
        the same rate. Trials run in batches seeded from one SeedSequence, so a seed
        fixes the result whatever the worker count.

        Args:
            n: agent count, a perfect cube
            set_size: |S|, defaults to floor(m^1.5)
            trials: number of hidden sets drawn
            seed: master seed (defaults to settings.default_seed)

        Returns:
            SuccessEstimateDocument: rate, stderr, interval, exact tail and the bound when it applies

        Raises:
            GadgetConstructionError: if n is not a cube
            PreconditionError: on a set size outside 0..n or a negative trial count
        """
        m = cube_root(n)
        set_size = math.isqrt(n) if set_size is None else set_size
        seed = settings.default_seed if seed is None else seed
        if not 0 <= set_size <= n:
            raise PreconditionError(f"set_size must lie in 0..{n}, got {set_size}")
        if trials < 0:
            raise PreconditionError(f"trials must be non-negative, got {trials}")

        sizes = [BATCH_TRIALS] * (trials // BATCH_TRIALS)
        if trials % BATCH_TRIALS:
            sizes.append(trials % BATCH_TRIALS)
        streams = np.random.SeedSequence(seed).spawn(len(sizes))
        size_ok = set_size * set_size <= n
        threshold = math.isqrt(m)

        def run(batch) -> int:
            count, stream = batch
            if not size_ok or set_size == 0:
                return 0
            rng = np.random.default_rng(stream)
            # the m smallest keys of a uniform row are a uniform m-subset
            good = np.argpartition(rng.random((count, n)), m - 1, axis=1)[:, :m]
            hits = (good < set_size).sum(axis=1)
            return int((hits > threshold).sum())

        successes = sum(map_items(run, zip(sizes, streams)))
        rate = successes / trials if trials else 0.0
        stderr = math.sqrt(rate * (1 - rate) / trials) if trials else 0.0
        low, high = confidence_interval(successes, trials)
        exact = exact_success_probability(n, set_size)

        bound = within = None
        if n >= BOUND_MIN_N:
            bound = math.exp(-math.sqrt(m) / 4)
            within = rate <= bound
        else:
            logger.warning(f"n={n} < {BOUND_MIN_N}: the tail bound e^(-sqrt(m)/4) is not claimed")

        logger.info(
            f"Successful-query rate for n={n}, |S|={set_size}: {rate:.5f} ± {stderr:.5f} "
            f"over {trials} trials (exact {exact:.5f}, bound {bound})"
        )
        return SuccessEstimateDocument(
            n=n, m=m, set_size=set_size, trials=trials, seed=seed,
            successes=successes, rate=rate, stderr=stderr, ci_low=low, ci_high=high,
            exact_tail=exact, bound=bound, within_bound=within,
        )
