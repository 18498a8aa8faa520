"""Data types of the corpus app:
- Example
- Dataset
- TokenLengthIndex
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np


class SplitTag(str, Enum):
    TRAIN = 'train'
    VALIDATION = 'validation'
    TEST = 'test'


@dataclass(frozen=True)
class Example:
    """One labeled text, with an optional second text (premise/hypothesis tasks)."""

    id: int
    text: str
    label: int
    text_pair: Optional[str] = None

    @property
    def is_pair(self):
        return self.text_pair is not None


@dataclass(frozen=True)
class Dataset:
    """Labeled examples with dense ids 0..N-1 in file order."""

    examples: Tuple[Example, ...]
    label_names: Tuple[str, ...]
    split_tag: SplitTag = SplitTag.TRAIN

    def __post_init__(self):
        object.__setattr__(self, 'examples', tuple(self.examples))
        object.__setattr__(self, 'label_names', tuple(self.label_names))
        if len(set(self.label_names)) != len(self.label_names):
            raise ValueError(f'label names must be distinct: {self.label_names}')
        if len(self.label_names) < 2:
            raise ValueError('a dataset needs at least two classes')

    @property
    def class_count(self):
        return len(self.label_names)

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, index):
        return self.examples[index]

    @property
    def ids(self):
        return [example.id for example in self.examples]

    @property
    def labels(self):
        return np.fromiter((example.label for example in self.examples), dtype=np.int64, count=len(self.examples))

    def with_tag(self, split_tag):
        return replace(self, split_tag=SplitTag(split_tag))

    def subset(self, ids: Sequence[int], split_tag=None):
        """Examples for `ids`, kept in their original order and renumbered densely."""
        keep = sorted(set(int(i) for i in ids))
        examples = tuple(replace(self.examples[old], id=new) for new, old in enumerate(keep))
        return Dataset(examples=examples, label_names=self.label_names,
                       split_tag=SplitTag(split_tag) if split_tag else self.split_tag)


@dataclass(frozen=True)
class TokenLengthIndex:
    """Per-example token counts, aligned with dataset ids."""

    lengths: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.lengths)

    def __getitem__(self, example_id):
        return int(self.lengths[example_id])
