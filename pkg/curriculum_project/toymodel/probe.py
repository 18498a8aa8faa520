"""Probe scorer: a throwaway model briefly trained on a stratified slice of the training set.

An untrained linear model is uniform on every example, so it cannot rank
difficulty. The probe stands in for the confidence a pre-trained model would
bring; its weights are frozen into a provider and never reused for training.
"""

import logging

import numpy as np

from corpus.exceptions import SplitError
from corpus.splits import stratified_split_ids

from .exceptions import ProbeError
from .features import featurize, featurize_dataset
from .linear import forward, loss_and_grad_matrix, softmax
from .models import LinearModel, OptimizerConfig, OptimizerState
from .optim import optimizer_step

logger = logging.getLogger(__name__)

PROBE_STREAM = 7


class ModelProvider:
    """Frozen model served as a probability provider for `score_dataset`."""

    def __init__(self, model, max_tokens=None):
        self.model = model.copy()
        self.max_tokens = max_tokens

    def distribution(self, example):
        return softmax(forward(self.model, featurize(example, self.model.dim, max_tokens=self.max_tokens)))


def probe_ids(dataset, probe_fraction, seed):
    if not 0 < probe_fraction <= 1:
        raise ProbeError(detail=f'probe fraction must be in (0, 1], got {probe_fraction}')
    if probe_fraction == 1:
        ids = list(range(len(dataset)))
    else:
        try:
            ids = stratified_split_ids(dataset, [probe_fraction, 1.0 - probe_fraction], seed)[0]
        except SplitError as exc:
            raise ProbeError(detail=f'cannot draw a probe subset: {exc.detail}')
    covered = set(int(dataset[i].label) for i in ids)
    if len(covered) < dataset.class_count:
        raise ProbeError(detail=f'probe subset of {len(ids)} examples covers {len(covered)} of '
                                f'{dataset.class_count} classes')
    return ids


def build_probe_scorer(dataset, probe_fraction=0.1, probe_epochs=1, seed=0, dim=2 ** 16, batch_size=16,
                       optimizer=None, max_tokens=None):
    """Train a fresh model on a stratified probe subset and return it as a frozen provider."""
    optimizer = optimizer or OptimizerConfig()
    rng = np.random.default_rng([seed, PROBE_STREAM])
    ids = probe_ids(dataset, probe_fraction, seed)
    probe_set = dataset.subset(ids)
    matrix = featurize_dataset(probe_set, dim, max_tokens=max_tokens)
    labels = probe_set.labels

    model = LinearModel.zeros(dataset.class_count, dim)
    steps_per_epoch = -(-len(probe_set) // batch_size)
    state = OptimizerState.create(optimizer, probe_epochs * steps_per_epoch, model)
    for epoch in range(probe_epochs):
        order = rng.permutation(len(probe_set))
        losses = []
        for start in range(0, len(order), batch_size):
            rows = order[start:start + batch_size]
            loss, grads = loss_and_grad_matrix(model, matrix[rows], labels[rows])
            optimizer_step(model, grads, state)
            losses.append(loss)
        logger.info('Probe epoch %d/%d on %d examples: mean loss %.4f', epoch + 1, probe_epochs, len(probe_set),
                    float(np.mean(losses)))
    return ModelProvider(model, max_tokens=max_tokens)
