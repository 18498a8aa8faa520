"""Synthetic labeled corpora for desk-scale runs and tests.

Every class owns a disjoint vocabulary. Each example draws a signal strength s;
each of its tokens comes from its own class vocabulary with probability s and
from the union of all vocabularies otherwise. With s = 1 for every example the
corpus is linearly separable; low-s examples are genuinely ambiguous.
"""

import numpy as np

from .models import Dataset, Example, SplitTag


def class_vocabulary(label, size):
    return [f'c{label}w{index}' for index in range(size)]


def make_corpus(size, class_count=2, signal=(1.0, 1.0), noise=0.0, length=(5, 15),
                vocabulary_size=40, pair=False, seed=0, split_tag=SplitTag.TRAIN):
    """Build a balanced synthetic Dataset.

    signal: (low, high) range of the per-example signal strength.
    noise: fraction of labels flipped to another class after the text is drawn.
    pair: also draw a second text (same label signal) into `text_pair`.
    """
    rng = np.random.default_rng(seed)
    vocabularies = [class_vocabulary(label, vocabulary_size) for label in range(class_count)]
    everything = [word for vocabulary in vocabularies for word in vocabulary]

    def draw_text(label, strength):
        words = []
        for _ in range(int(rng.integers(length[0], length[1] + 1))):
            if rng.random() < strength:
                words.append(vocabularies[label][rng.integers(vocabulary_size)])
            else:
                words.append(everything[rng.integers(len(everything))])
        return ' '.join(words)

    labels = rng.permutation(np.arange(size) % class_count)
    examples = []
    for position, label in enumerate(labels):
        label = int(label)
        strength = float(rng.uniform(signal[0], signal[1]))
        text = draw_text(label, strength)
        text_pair = draw_text(label, strength) if pair else None
        if noise and rng.random() < noise:
            label = int((label + rng.integers(1, class_count)) % class_count)
        examples.append(Example(id=position, text=text, label=label, text_pair=text_pair))

    return Dataset(
        examples=tuple(examples),
        label_names=tuple(f'class_{label}' for label in range(class_count)),
        split_tag=SplitTag(split_tag),
    )
