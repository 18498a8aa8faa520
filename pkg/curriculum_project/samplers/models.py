"""Data types of the samplers app:
- Strategy
- RankWeights
- EpochPlan
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from scoring.models import Direction

from .exceptions import UnknownStrategy, ZeroWeights


class Strategy(str, Enum):
    RANDOM = 'Random'
    LENGTH = 'Length'
    E2D = 'E2D'
    D2E = 'D2E'
    SME = 'SME'
    SMD = 'SMD'
    PME = 'PME'
    PMD = 'PMD'

    @classmethod
    def parse(cls, name):
        if isinstance(name, Strategy):
            return name
        try:
            return cls(name)
        except ValueError:
            raise UnknownStrategy(name)

    @classmethod
    def names(cls):
        return [strategy.value for strategy in cls]

    @property
    def is_baseline(self):
        return self in (Strategy.RANDOM, Strategy.LENGTH)

    @property
    def direction(self):
        """Sort direction of the ranked list each curriculum strategy walks or samples from."""
        return SORT_DIRECTION.get(self)


# E2D walks easy -> hard, so scores descend; SME/PME put the easiest examples at the
# highest ranks, so scores ascend. SMD/PMD/D2E mirror them.
SORT_DIRECTION = {
    Strategy.E2D: Direction.DESCENDING,
    Strategy.D2E: Direction.ASCENDING,
    Strategy.SME: Direction.ASCENDING,
    Strategy.SMD: Direction.DESCENDING,
    Strategy.PME: Direction.ASCENDING,
    Strategy.PMD: Direction.DESCENDING,
}


class WeightLaw(str, Enum):
    SQUARE = 'square'
    COMPLEMENT_SQUARE = 'complement_square'


class PartitionTag(str, Enum):
    B1 = 'B1'
    B2 = 'B2'
    WHOLE = 'whole'


@dataclass(frozen=True)
class RankWeights:
    """Raw weights indexed by rank - 1, with their own sum used for normalization."""

    weights: np.ndarray
    law: WeightLaw

    @property
    def total(self):
        return float(self.weights.sum())

    @property
    def probabilities(self):
        if self.total <= 0:
            raise ZeroWeights(detail=f'{self.law.value} weights of {len(self.weights)} ranks sum to zero')
        return self.weights / self.total

    def for_ids(self, ranked):
        """Weight of every example id, looked up through its rank in `ranked`."""
        return self.weights[ranked.ranks() - 1]


@dataclass(frozen=True)
class EpochPlan:
    """One epoch's schedule: every example id exactly once, with its partition tag."""

    order: np.ndarray
    provenance: tuple = field(repr=False)
    strategy: Strategy
    batch_size: int = 16
    seed: int = 0
    epoch: int = 1

    def __len__(self):
        return len(self.order)

    def batches(self):
        for start in range(0, len(self.order), self.batch_size):
            yield self.order[start:start + self.batch_size]

    def is_permutation(self):
        return bool(np.array_equal(np.sort(self.order), np.arange(len(self.order))))

    def rows(self):
        for position, (example_id, tag) in enumerate(zip(self.order, self.provenance)):
            yield {
                'epoch': self.epoch,
                'position': position,
                'example_id': int(example_id),
                'partition_tag': tag.value,
            }
