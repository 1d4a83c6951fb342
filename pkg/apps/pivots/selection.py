"""
pivotbench Pivots App - Pivot Selection

Random selection is the baseline. Incremental selection grows the pivot set
greedily: at every step it draws N candidates and keeps the one that most
raises the mean lower bound rho_{p_1..p_i}(x, y) over a sample of A pairs.
The per-pair running maxima are cached, so a step costs at most 2 * A * N
metric evaluations.
"""

import logging
from dataclasses import dataclass

import numpy as np

from apps.metrics.distances import DistanceCounter, distances_to, paired_distances
from common.exceptions import PivotError, ValidationError
from common.utils import (
    STREAM_CANDIDATES,
    STREAM_PAIRS,
    STREAM_PIVOTS,
    check_seed,
    make_rng,
    parallel_map,
)

logger = logging.getLogger(__name__)

PAIRS_RANDOM = 'random'
PAIRS_SMART = 'smart'

PAIR_MODE_CHOICES = (PAIRS_RANDOM, PAIRS_SMART)


def _positive(name, value):
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise ValidationError(f'{name} must be an integer >= 1, got {value!r}')
    return int(value)


@dataclass(frozen=True)
class SelectionConfig:
    """Parameters of incremental selection."""

    k: int
    pairs: int = 5000
    candidates: int = 40
    seed: int = 0
    pair_mode: str = PAIRS_RANDOM
    neighbour_rank: int = 20

    def __post_init__(self):
        for name in ('k', 'pairs', 'candidates', 'neighbour_rank'):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))
        check_seed(self.seed)
        if self.pair_mode not in PAIR_MODE_CHOICES:
            raise ValidationError(f'pair mode must be one of {", ".join(PAIR_MODE_CHOICES)}')

    @property
    def label(self):
        if self.pair_mode == PAIRS_SMART:
            return f'incremental-smart{self.neighbour_rank}'
        return 'incremental'


@dataclass(frozen=True)
class PairSample:
    """A ids (x, y) into one dataset; x != y for every pair."""

    left: np.ndarray
    right: np.ndarray

    def __len__(self):
        return len(self.left)

    @property
    def pairs(self):
        return list(zip(self.left.tolist(), self.right.tolist()))

    @classmethod
    def from_pairs(cls, pairs, n):
        """Validate explicit (x, y) pairs against a dataset of size n."""
        pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if pairs.shape[0] < 1:
            raise ValidationError('a pair sample needs at least one pair')
        if np.any(pairs < 0) or np.any(pairs >= n):
            raise ValidationError(f'pair ids must lie in [0, {n})')
        if np.any(pairs[:, 0] == pairs[:, 1]):
            raise ValidationError('a pair must join two distinct points')
        return cls(pairs[:, 0].copy(), pairs[:, 1].copy())


def random_pairs(ds, count, seed):
    """
    count pairs drawn uniformly with replacement, never joining a point to itself.

    The second id is drawn from the n - 1 other ids directly, which has the
    same distribution as redrawing on a collision.
    """
    count = _positive('pair count', count)
    if ds.n < 2:
        raise ValidationError('pair sampling needs at least 2 points')
    rng = make_rng(seed, STREAM_PAIRS)
    left = rng.integers(ds.n, size=count)
    right = rng.integers(ds.n - 1, size=count)
    right += right >= left
    return PairSample(left.astype(np.int64), right.astype(np.int64))


def jth_neighbour(ds, center, rank, counter):
    """
    Id of the rank-th nearest other point of center, ties by lower id.

    Brute force; charges n - 1.
    """
    others = np.concatenate((np.arange(center), np.arange(center + 1, ds.n)))
    dists = distances_to(ds.metric, ds.points[center], ds.points[others], counter)
    kth = np.partition(dists, rank - 1)[rank - 1]
    closer = np.count_nonzero(dists < kth)
    tied = others[dists == kth]
    return int(tied[rank - 1 - closer])


def smart_pairs(ds, count, rank, seed, counter):
    """count random centres from X, each paired with its rank-th nearest neighbour."""
    count = _positive('pair count', count)
    rank = _positive('neighbour rank', rank)
    if rank >= ds.n:
        raise ValidationError(f'neighbour rank {rank} needs more than {ds.n} points')
    rng = make_rng(seed, STREAM_PAIRS)
    left = rng.integers(ds.n, size=count).astype(np.int64)
    partners = {}
    for center in np.unique(left).tolist():
        partners[center] = jth_neighbour(ds, center, rank, counter)
    right = np.array([partners[c] for c in left.tolist()], dtype=np.int64)
    logger.debug(f'Sampled {count} {rank}-NN pairs over {len(partners)} centres')
    return PairSample(left, right)


def select_random(ds, k, seed):
    """k distinct uniform ids."""
    k = _positive('k', k)
    if k > ds.n:
        raise PivotError(f'cannot pick {k} pivots from {ds.n} points')
    rng = make_rng(seed, STREAM_PIVOTS)
    return [int(p) for p in rng.choice(ds.n, size=k, replace=False)]


def score_candidate(ds, pairs, maxima, candidate, counter):
    """
    Mean of max(current bound, |rho(x, c) - rho(y, c)|) over the pairs.

    Returns:
        (mean, lifted per-pair maxima); charges 2 * A
    """
    point = ds.points[candidate]
    near = distances_to(ds.metric, point, ds.points[pairs.left], counter)
    far = distances_to(ds.metric, point, ds.points[pairs.right], counter)
    lifted = np.maximum(maxima, np.abs(near - far))
    return float(np.mean(lifted)), lifted


def score_candidates(ds, pairs, maxima, candidate_ids, counter):
    """
    Score each distinct candidate once, in parallel.

    Returns:
        dict candidate id -> (mean, lifted maxima)
    """
    distinct = list(dict.fromkeys(int(c) for c in candidate_ids))

    def score(candidate):
        local = DistanceCounter()
        return score_candidate(ds, pairs, maxima, candidate, local), local

    results = parallel_map(score, distinct)
    counter.charge(DistanceCounter.merged(local for _, local in results).count)
    return {c: scored for c, (scored, _) in zip(distinct, results)}


def best_candidate(scores):
    """Largest mean, ties to the lowest id."""
    return min(scores, key=lambda c: (-scores[c][0], c))


def select_incremental(ds, cfg, counter, pairs=None, trace=None):
    """
    Greedy pivot selection maximizing the mean pair lower bound.

    Args:
        ds: Dataset
        cfg: SelectionConfig
        counter: DistanceCounter charged for pair sampling, the initial pass
            and every candidate evaluation
        pairs: optional PairSample overriding cfg.pair_mode
        trace: optional list receiving (pivot id, objective, counter count)
            after each step

    Returns:
        list of k pivot ids in selection order
    """
    if cfg.k >= ds.n:
        raise PivotError(f'incremental selection needs n > k, got n={ds.n}, k={cfg.k}')
    if pairs is None:
        if cfg.pair_mode == PAIRS_SMART:
            pairs = smart_pairs(ds, cfg.pairs, cfg.neighbour_rank, cfg.seed, counter)
        else:
            pairs = random_pairs(ds, cfg.pairs, cfg.seed)

    true = paired_distances(ds.metric, ds.points[pairs.left], ds.points[pairs.right], counter)
    true_mean = float(np.mean(true))

    rng = make_rng(cfg.seed, STREAM_CANDIDATES)
    maxima = np.zeros(len(pairs))
    chosen = []
    for step in range(cfg.k):
        available = np.setdiff1d(np.arange(ds.n), chosen)
        draws = available[rng.integers(available.size, size=cfg.candidates)]
        scores = score_candidates(ds, pairs, maxima, draws, counter)
        pivot = best_candidate(scores)
        objective, maxima = scores[pivot]
        chosen.append(pivot)
        if trace is not None:
            trace.append((pivot, objective, counter.count))
        ratio = objective / true_mean if true_mean > 0 else 1.0
        logger.debug(f'Step {step + 1}/{cfg.k}: pivot {pivot}, mean bound {objective:.6g} ({ratio:.3f} of true)')

    logger.info(f'Selected {cfg.k} pivots incrementally ({cfg.label}) on {ds}')
    return chosen


def pair_objective(ds, pairs, pivot_ids, counter):
    """
    Mean rho_{p_1..p_i} over the pairs for every prefix of pivot_ids.

    Returns:
        (list of k prefix means, mean true pair distance); charges 2 * A * k + A
    """
    true = paired_distances(ds.metric, ds.points[pairs.left], ds.points[pairs.right], counter)
    maxima = np.zeros(len(pairs))
    means = []
    for pivot in pivot_ids:
        mean, maxima = score_candidate(ds, pairs, maxima, int(pivot), counter)
        means.append(mean)
    return means, float(np.mean(true))
