"""Data types of the toymodel app:
- FeatureVector
- LinearModel
- OptimizerConfig / OptimizerState
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np


def is_power_of_two(value):
    return value > 0 and value & (value - 1) == 0


@dataclass(frozen=True)
class FeatureVector:
    """Sparse term counts: strictly increasing hashed indices and their positive counts."""

    indices: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.indices)

    def __eq__(self, other):
        return (isinstance(other, FeatureVector) and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.values, other.values))


@dataclass
class LinearModel:
    """Softmax regression over hashed features: logits = weights @ x + bias."""

    weights: np.ndarray = field(repr=False)
    bias: np.ndarray = field(repr=False)

    @classmethod
    def zeros(cls, class_count, dim):
        if not is_power_of_two(dim):
            raise ValueError(f'feature dimension must be a power of two, got {dim}')
        return cls(weights=np.zeros((class_count, dim)), bias=np.zeros(class_count))

    @property
    def class_count(self):
        return self.weights.shape[0]

    @property
    def dim(self):
        return self.weights.shape[1]

    def copy(self):
        return LinearModel(weights=self.weights.copy(), bias=self.bias.copy())

    def is_finite(self):
        return bool(np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias)))

    def __eq__(self, other):
        return (isinstance(other, LinearModel) and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.bias, other.bias))


@dataclass
class Gradients:
    weights: np.ndarray = field(repr=False)
    bias: np.ndarray = field(repr=False)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias)))


class OptimizerKind(str, Enum):
    SGD = 'sgd'
    ADAMW = 'adamw'


# peak learning rate when none is configured
DEFAULT_LR = {OptimizerKind.SGD: 0.1, OptimizerKind.ADAMW: 0.01}


@dataclass(frozen=True)
class OptimizerConfig:
    kind: OptimizerKind = OptimizerKind.ADAMW
    lr: Optional[float] = None
    weight_decay: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, 'kind', OptimizerKind(self.kind))
        if self.lr is None:
            object.__setattr__(self, 'lr', DEFAULT_LR[self.kind])


@dataclass
class OptimizerState:
    """Step counter, linear decay schedule and (AdamW only) moment accumulators."""

    config: OptimizerConfig
    total_steps: int
    step: int = 0
    first_moment: Optional[Gradients] = None
    second_moment: Optional[Gradients] = None

    @classmethod
    def create(cls, config, total_steps, model):
        state = cls(config=config, total_steps=max(1, int(total_steps)))
        if config.kind is OptimizerKind.ADAMW:
            state.first_moment = Gradients(np.zeros_like(model.weights), np.zeros_like(model.bias))
            state.second_moment = Gradients(np.zeros_like(model.weights), np.zeros_like(model.bias))
        return state

    def lr_at(self, step):
        """Linear decay to zero over total_steps, no warm-up."""
        return self.config.lr * max(0.0, 1.0 - step / self.total_steps)

    @property
    def current_lr(self):
        return self.lr_at(self.step)

    def __eq__(self, other):
        if not isinstance(other, OptimizerState):
            return False
        same = (self.config == other.config and self.total_steps == other.total_steps
                and self.step == other.step)
        for mine, theirs in ((self.first_moment, other.first_moment), (self.second_moment, other.second_moment)):
            if (mine is None) != (theirs is None):
                return False
            if mine is not None:
                same = same and np.array_equal(mine.weights, theirs.weights) and np.array_equal(
                    mine.bias, theirs.bias)
        return same
