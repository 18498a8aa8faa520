"""Epoch plans for the six curriculum strategies and the two baselines.

- E2D / D2E: walk the ranked list in order.
- SME / SMD: square-law rank weights, weighted permutation.
- PME / PMD: each batch takes its first partition under the square law and its
  second under the complement-square law, from one pool shared by the epoch.
- Random / Length: uniform permutation / shortest first.
"""

import logging
import math

import numpy as np

from scoring.difficulty import rank_examples

from .exceptions import DirectionMismatch, EmptyPlan, MissingScores, PartitionMismatch
from .models import EpochPlan, PartitionTag, SORT_DIRECTION, Strategy, WeightLaw
from .weights import WeightedPool, rank_weights, weighted_permutation

logger = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 16
DEFAULT_PARTITION = (9, 7)
PLAN_STREAM = 1


def epoch_rng(seed, epoch, stream=PLAN_STREAM):
    """Generator for one epoch's plan; adding epochs never changes earlier epochs' draws."""
    return np.random.default_rng([seed, epoch, stream])


def _whole(size):
    return (PartitionTag.WHOLE,) * size


def _check_direction(ranked, which):
    expected = SORT_DIRECTION[which]
    if ranked.direction is not expected:
        raise DirectionMismatch(
            detail=f'{which.value} needs a {expected.value} ranking, got {ranked.direction.value}'
        )


def sequential_plan(ranked, which, batch_size=DEFAULT_BATCH_SIZE, seed=0, epoch=1):
    which = Strategy.parse(which)
    if which not in (Strategy.E2D, Strategy.D2E):
        raise ValueError(f'sequential plans are E2D or D2E, not {which.value}')
    _check_direction(ranked, which)
    order = np.array(ranked.order, dtype=np.int64)
    return EpochPlan(order=order, provenance=_whole(len(order)), strategy=which, batch_size=batch_size,
                     seed=seed, epoch=epoch)


def probability_plan(ranked, which, rng, batch_size=DEFAULT_BATCH_SIZE, seed=0, epoch=1):
    which = Strategy.parse(which)
    if which not in (Strategy.SME, Strategy.SMD):
        raise ValueError(f'probability plans are SME or SMD, not {which.value}')
    _check_direction(ranked, which)
    weights = rank_weights(len(ranked), WeightLaw.SQUARE).for_ids(ranked)
    order = weighted_permutation(weights, rng)
    return EpochPlan(order=order, provenance=_whole(len(order)), strategy=which, batch_size=batch_size,
                     seed=seed, epoch=epoch)


def partition_sizes(batch_length, batch_size, split):
    """(B1, B2) sizes for a batch; a ragged batch splits proportionally, rounding B1 up."""
    if batch_length == batch_size:
        return split
    first = min(batch_length, math.ceil(batch_length * split[0] / batch_size))
    return first, batch_length - first


def partitioned_draws(ranked, rng, count, batch_size=DEFAULT_BATCH_SIZE, split=DEFAULT_PARTITION):
    """First `count` ids of a partitioned schedule and their tags (the whole epoch when count = N)."""
    size = len(ranked)
    laws = {
        PartitionTag.B1: rank_weights(size, WeightLaw.SQUARE).for_ids(ranked),
        PartitionTag.B2: rank_weights(size, WeightLaw.COMPLEMENT_SQUARE).for_ids(ranked),
    }
    pool = WeightedPool(laws, rng)
    order, tags = [], []
    for start in range(0, count, batch_size):
        batch_length = min(batch_size, count - start)
        first, second = partition_sizes(batch_length, batch_size, split)
        for tag, wanted in ((PartitionTag.B1, first), (PartitionTag.B2, second)):
            drawn = pool.draw(tag, wanted)
            order.extend(drawn)
            tags.extend([tag] * len(drawn))
    return np.array(order, dtype=np.int64), tuple(tags)


def partitioned_plan(ranked, which, rng, batch_size=DEFAULT_BATCH_SIZE, split=DEFAULT_PARTITION, seed=0, epoch=1):
    which = Strategy.parse(which)
    if which not in (Strategy.PME, Strategy.PMD):
        raise ValueError(f'partitioned plans are PME or PMD, not {which.value}')
    split = tuple(int(part) for part in split)
    if len(split) != 2 or sum(split) != batch_size or min(split) < 0:
        raise PartitionMismatch(detail=f'partition {split} does not sum to batch size {batch_size}')
    if len(ranked) == 0:
        raise EmptyPlan()
    _check_direction(ranked, which)
    order, tags = partitioned_draws(ranked, rng, len(ranked), batch_size=batch_size, split=split)
    return EpochPlan(order=order, provenance=tags, strategy=which, batch_size=batch_size, seed=seed, epoch=epoch)


def length_order(length_index):
    lengths = np.asarray(length_index.lengths)
    return np.lexsort((np.arange(len(lengths)), lengths))


def baseline_plan(dataset, which, rng, length_index=None, batch_size=DEFAULT_BATCH_SIZE, seed=0, epoch=1):
    which = Strategy.parse(which)
    if which is Strategy.RANDOM:
        order = rng.permutation(len(dataset)).astype(np.int64)
    elif which is Strategy.LENGTH:
        if length_index is None:
            raise ValueError('the Length baseline needs a token length index')
        order = length_order(length_index)
    else:
        raise ValueError(f'baselines are Random or Length, not {which.value}')
    return EpochPlan(order=order, provenance=_whole(len(order)), strategy=which, batch_size=batch_size,
                     seed=seed, epoch=epoch)


def make_plan(strategy, score_table, dataset, rng, length_index=None, batch_size=DEFAULT_BATCH_SIZE,
              split=DEFAULT_PARTITION, seed=0, epoch=1):
    """Build one epoch's plan, sorting the scores the way the strategy requires."""
    strategy = Strategy.parse(strategy)
    if len(dataset) == 0:
        raise EmptyPlan()
    if strategy.is_baseline:
        return baseline_plan(dataset, strategy, rng, length_index=length_index, batch_size=batch_size,
                             seed=seed, epoch=epoch)
    if score_table is None:
        raise MissingScores(detail=f'{strategy.value} needs difficulty scores (external file or probe)')
    if len(score_table) != len(dataset):
        raise MissingScores(detail=f'{len(score_table)} scores for {len(dataset)} examples')

    ranked = rank_examples(score_table, strategy.direction)
    if strategy in (Strategy.E2D, Strategy.D2E):
        plan = sequential_plan(ranked, strategy, batch_size=batch_size, seed=seed, epoch=epoch)
    elif strategy in (Strategy.SME, Strategy.SMD):
        plan = probability_plan(ranked, strategy, rng, batch_size=batch_size, seed=seed, epoch=epoch)
    else:
        plan = partitioned_plan(ranked, strategy, rng, batch_size=batch_size, split=split, seed=seed, epoch=epoch)
    logger.debug('Planned %s epoch %d (seed %d) over %d examples', strategy.value, epoch, seed, len(plan))
    return plan
