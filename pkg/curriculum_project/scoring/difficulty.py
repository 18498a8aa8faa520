"""Difficulty scores from class probabilities, and difficulty rankings.

The score is the margin between the two largest class probabilities. For two
classes that is |p0 - p1|. It needs no parameter updates, only probabilities.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .exceptions import InvalidDistribution, ProviderFailure
from .models import ClassDistribution, Direction, RankedList, ScoreSource, ScoreTable

logger = logging.getLogger(__name__)


def normalize_restricted(raw):
    """Divide non-negative class values (e.g. verbalizer token probabilities) by their sum."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 1 or not np.all(np.isfinite(raw)) or np.any(raw < 0):
        raise InvalidDistribution(detail='restricted probabilities must be finite and non-negative')
    total = raw.sum()
    if total <= 0:
        raise InvalidDistribution(detail='cannot normalize an all-zero vector')
    return ClassDistribution(raw / total)


def difficulty_scores(probs):
    """Row-wise top-2 margin of an (N, C) probability matrix."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[1] < 2:
        raise InvalidDistribution(detail=f'difficulty needs at least two classes, got shape {probs.shape}')
    top_two = np.sort(probs, axis=1)[:, -2:]
    return top_two[:, 1] - top_two[:, 0]


def difficulty_score(dist):
    """p_max - p_second_max of one distribution: 0 is hardest, 1 easiest."""
    return float(difficulty_scores(dist.probs[np.newaxis, :])[0])


def build_score_table(probs, source=ScoreSource.EXTERNAL):
    probs = np.asarray(probs, dtype=np.float64)
    for row in probs:
        ClassDistribution(row)
    return ScoreTable(scores=difficulty_scores(probs), probs=probs, source=ScoreSource(source))


def _distribution_of(provider, example):
    try:
        dist = provider.distribution(example)
    except Exception as exc:
        raise ProviderFailure(example.id, detail=str(exc) or type(exc).__name__) from exc
    if not isinstance(dist, ClassDistribution):
        dist = ClassDistribution(dist)
    return dist.probs


def score_dataset(provider, dataset, source=ScoreSource.EXTERNAL, jobs=1):
    """Score every example with `provider` (anything with `distribution(example)`).

    With jobs > 1 examples are evaluated on a thread pool; results are still
    stored in id order.
    """
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda example: _distribution_of(provider, example), dataset))
    else:
        rows = [_distribution_of(provider, example) for example in dataset]
    if not rows:
        raise ProviderFailure(None, detail='nothing to score')

    probs = np.vstack(rows)
    if probs.shape[1] != dataset.class_count:
        raise InvalidDistribution(
            detail=f'provider returned {probs.shape[1]} classes, dataset declares {dataset.class_count}'
        )
    table = ScoreTable(scores=difficulty_scores(probs), probs=probs, source=ScoreSource(source))
    logger.info('Scored %d examples (%s): mean difficulty score %.4f', len(table), table.source.value,
                float(table.scores.mean()))
    return table


def rank_examples(table, direction):
    """Stable sort of example ids by score in `direction`, ties broken by ascending id."""
    direction = Direction(direction)
    ids = np.arange(len(table.scores))
    keys = table.scores if direction is Direction.ASCENDING else -table.scores
    # lexsort sorts by the last key first.
    return RankedList(order=np.lexsort((ids, keys)), direction=direction)


class TableProvider:
    """Serves the distributions of an existing ScoreTable, e.g. one read from an external file."""

    def __init__(self, table):
        self.table = table

    def distribution(self, example):
        return self.table.distribution(example.id)
