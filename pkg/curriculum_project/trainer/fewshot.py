"""Few-shot subsets: each strategy picks k training examples, then trains on them."""

import logging

import numpy as np

from corpus.tokenizer import token_lengths
from samplers.models import Strategy, WeightLaw
from samplers.plans import epoch_rng, length_order, partitioned_draws
from samplers.weights import rank_weights, weighted_permutation
from scoring.difficulty import rank_examples

from .exceptions import FewShotSizeError
from .loop import initial_scores, train

logger = logging.getLogger(__name__)

SELECTION_EPOCH = 0


def few_shot_select(strategy, score_table, dataset, k, rng, length_index=None, batch_size=16, split=(9, 7)):
    """Sorted parent ids of the k examples `strategy` picks from `dataset`."""
    strategy = Strategy.parse(strategy)
    size = len(dataset)
    if not 1 <= k <= size:
        raise FewShotSizeError(detail=f'k must be between 1 and {size}, got {k}')

    if strategy is Strategy.RANDOM:
        picked = rng.choice(size, size=k, replace=False)
    elif strategy is Strategy.LENGTH:
        if length_index is None:
            length_index = token_lengths(dataset)
        picked = length_order(length_index)[:k]
    else:
        ranked = rank_examples(score_table, strategy.direction)
        if strategy in (Strategy.E2D, Strategy.D2E):
            picked = ranked.order[:k]
        elif strategy in (Strategy.SME, Strategy.SMD):
            weights = rank_weights(size, WeightLaw.SQUARE).for_ids(ranked)
            picked = weighted_permutation(weights, rng)[:k]
        else:
            picked, _ = partitioned_draws(ranked, rng, k, batch_size=batch_size, split=split)
    return sorted(int(example_id) for example_id in picked)


def few_shot_run(train_set, validation_set, test_set, config, seed, k, scores=None):
    """Select k examples with `config.strategy`, then train on them with the same strategy."""
    strategy = config.strategy
    if scores is None and not strategy.is_baseline:
        scores, _ = initial_scores(train_set, config, seed)
    length_index = token_lengths(train_set, max_tokens=config.max_tokens) if strategy is Strategy.LENGTH else None

    selected = few_shot_select(strategy, scores, train_set, k, epoch_rng(seed, SELECTION_EPOCH),
                               length_index=length_index, batch_size=config.batch_size, split=config.partition)
    logger.info('%s seed %d: selected %d of %d training examples', strategy.value, seed, len(selected),
                len(train_set))
    subset = train_set.subset(selected)
    subset_scores = scores.subset(selected) if scores is not None else None
    report = train(subset, validation_set, test_set, config, seed, scores=subset_scores)
    report.selected_ids = selected
    return report


def selection_label_counts(dataset, selected):
    """Per-class counts of a selection, logged by the fewshot command."""
    return np.bincount(dataset.labels[np.asarray(selected, dtype=np.int64)], minlength=dataset.class_count)
