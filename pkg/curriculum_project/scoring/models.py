"""Data types of the scoring app:
- ClassDistribution
- ScoreTable
- RankedList
- HistogramReport
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import InvalidDistribution

SUM_TOLERANCE = 1e-9


class ScoreSource(str, Enum):
    EXTERNAL = 'external'
    PROBE_MODEL = 'probe_model'
    TRAINED_MODEL = 'trained_model'


class Direction(str, Enum):
    ASCENDING = 'ascending'
    DESCENDING = 'descending'


@dataclass(frozen=True)
class ClassDistribution:
    """Normalized probabilities over the task labels."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or len(probs) == 0:
            raise InvalidDistribution(detail=f'expected a probability vector, got shape {probs.shape}')
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise InvalidDistribution(detail='probabilities must be finite and non-negative')
        if abs(probs.sum() - 1.0) > SUM_TOLERANCE:
            raise InvalidDistribution(detail=f'probabilities sum to {probs.sum()!r}, not 1')
        object.__setattr__(self, 'probs', probs)

    def __len__(self):
        return len(self.probs)

    def __eq__(self, other):
        return isinstance(other, ClassDistribution) and np.array_equal(self.probs, other.probs)

    @property
    def argmax(self):
        # np.argmax returns the first maximum: ties go to the lowest class index.
        return int(np.argmax(self.probs))


@dataclass(frozen=True)
class ScoreTable:
    """Difficulty scores of N examples plus the (N, C) probabilities that produced them.

    A score of 0 is the hardest example, 1 the easiest.
    """

    scores: np.ndarray = field(repr=False)
    probs: np.ndarray = field(repr=False)
    source: ScoreSource = ScoreSource.EXTERNAL

    def __len__(self):
        return len(self.scores)

    @property
    def class_count(self):
        return self.probs.shape[1]

    def distribution(self, example_id):
        return ClassDistribution(self.probs[example_id])

    @property
    def predictions(self):
        return np.argmax(self.probs, axis=1)

    def subset(self, ids):
        """Rows for `ids` in ascending id order, matching `Dataset.subset`."""
        keep = np.array(sorted(set(int(i) for i in ids)), dtype=np.int64)
        return ScoreTable(scores=self.scores[keep], probs=self.probs[keep], source=self.source)


@dataclass(frozen=True)
class RankedList:
    """Example ids sorted by score in `direction`, ties by ascending id."""

    order: np.ndarray
    direction: Direction

    def __len__(self):
        return len(self.order)

    def ranks(self):
        """1-based rank of every example id (rank 1 is `order[0]`)."""
        ranks = np.empty(len(self.order), dtype=np.int64)
        ranks[self.order] = np.arange(1, len(self.order) + 1)
        return ranks


@dataclass(frozen=True)
class HistogramReport:
    """Score histogram split by prediction correctness.

    Without predictions every example counts in `correct` and `grouped` is False.
    """

    bin_edges: np.ndarray
    correct: np.ndarray
    incorrect: np.ndarray
    epoch_tag: int = 0
    grouped: bool = True

    @property
    def bins(self):
        return len(self.bin_edges) - 1

    @property
    def total(self):
        return int(self.correct.sum() + self.incorrect.sum())

    def rows(self):
        for index in range(self.bins):
            yield {
                'bin_lo': float(self.bin_edges[index]),
                'bin_hi': float(self.bin_edges[index + 1]),
                'correct_count': int(self.correct[index]),
                'incorrect_count': int(self.incorrect[index]),
                'epoch_tag': self.epoch_tag,
            }
