"""Data types of the trainer app:
- TrainConfig
- Metrics
- CheckpointEntry
- RunReport
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from samplers.models import Strategy
from toymodel.models import LinearModel, OptimizerConfig

DEFAULT_SEEDS = (66, 88, 99)


@dataclass(frozen=True)
class TrainConfig:
    strategy: Strategy = Strategy.RANDOM
    epochs: int = 5
    batch_size: int = 16
    partition: Tuple[int, int] = (9, 7)
    checkpoint_fraction: float = 0.1
    seeds: Tuple[int, ...] = DEFAULT_SEEDS
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    dim: int = 2 ** 16
    max_tokens: Optional[int] = None
    preset: Optional[str] = None
    scores_path: Optional[str] = None
    probe_fraction: float = 0.1
    probe_epochs: int = 1
    rescore: bool = False
    rescore_split: str = 'train'
    bins: int = 20

    def __post_init__(self):
        object.__setattr__(self, 'strategy', Strategy.parse(self.strategy))
        object.__setattr__(self, 'seeds', tuple(int(seed) for seed in self.seeds))
        object.__setattr__(self, 'partition', tuple(int(part) for part in self.partition))
        if not 0 < self.checkpoint_fraction <= 1:
            raise ValueError(f'checkpoint_fraction must be in (0, 1], got {self.checkpoint_fraction}')
        if self.epochs < 1:
            raise ValueError(f'epochs must be at least 1, got {self.epochs}')
        if self.batch_size < 1:
            raise ValueError(f'batch_size must be at least 1, got {self.batch_size}')


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class Metrics:
    """Accuracy plus macro-averaged precision/recall/F1 (zero-support classes count as 0)."""

    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: Tuple[ClassMetrics, ...] = ()

    def headline(self):
        return {
            'accuracy': self.accuracy,
            'macro_f1': self.macro_f1,
            'macro_precision': self.macro_precision,
            'macro_recall': self.macro_recall,
        }


@dataclass(frozen=True)
class CheckpointEntry:
    epoch: int
    mark: int
    step: int
    fraction_seen: float
    metrics: Metrics
    loss: float


@dataclass
class RunReport:
    strategy: Strategy
    seed: int
    checkpoints: List[CheckpointEntry] = field(default_factory=list)
    best_index: Optional[int] = None
    test_metrics: Optional[Metrics] = None
    test_loss: Optional[float] = None
    histograms: list = field(default_factory=list)
    train_size: int = 0
    selected_ids: Optional[List[int]] = None
    # mean training-batch loss of every epoch
    epoch_losses: List[float] = field(default_factory=list)
    # best-validation parameters, written as the run's model checkpoint
    model: Optional[LinearModel] = field(default=None, repr=False, compare=False)

    @property
    def best_checkpoint(self):
        return None if self.best_index is None else self.checkpoints[self.best_index]
