"""Fine-tuning loop: epoch plans, one optimizer step per batch, evaluation at checkpoint marks,
best-validation-accuracy model selection and a single test evaluation.
"""

import logging
import math

import numpy as np

from corpus.loaders import load_external_scores
from corpus.presets import get_preset
from corpus.tokenizer import token_lengths
from samplers.models import Strategy
from samplers.plans import epoch_rng, make_plan
from scoring.difficulty import score_dataset
from scoring.models import ScoreSource
from toymodel.features import featurize_dataset
from toymodel.linear import loss_and_grad_matrix
from toymodel.models import LinearModel, OptimizerState
from toymodel.optim import optimizer_step
from toymodel.probe import build_probe_scorer

from .analysis import rescore_analysis
from .exceptions import NonFiniteLoss
from .metrics import evaluate
from .models import CheckpointEntry, RunReport
from .schedule import checkpoint_steps

logger = logging.getLogger(__name__)


def initial_scores(train_set, config, seed):
    """Difficulty scores of the training split from the external file, else from a probe model.

    Returns (ScoreTable, provider-or-None); the provider is kept for the epoch-0 rescoring.
    """
    if config.scores_path:
        preset = get_preset(config.preset) if config.preset else None
        return load_external_scores(config.scores_path, train_set, preset=preset), None
    provider = build_probe_scorer(
        train_set,
        probe_fraction=config.probe_fraction,
        probe_epochs=config.probe_epochs,
        seed=seed,
        dim=config.dim,
        batch_size=config.batch_size,
        optimizer=config.optimizer,
        max_tokens=config.max_tokens,
    )
    return score_dataset(provider, train_set, source=ScoreSource.PROBE_MODEL), provider


def select_best(entries):
    """Index of the highest validation accuracy; ties go to the earliest checkpoint."""
    best_index, best_accuracy = None, -math.inf
    for index, entry in enumerate(entries):
        if entry.metrics.accuracy > best_accuracy:
            best_index, best_accuracy = index, entry.metrics.accuracy
    return best_index


def train(train_set, validation_set, test_set, config, seed, scores=None, on_batch=None):
    """Run one seed of `config.strategy` and return its RunReport.

    scores: ScoreTable of `train_set`; computed from the config (external file or
    probe) when a curriculum strategy or the rescoring analysis needs it.
    on_batch: optional callable(epoch, step, batch_ids) observing the schedule.
    """
    strategy = config.strategy
    provider = None
    if scores is None and (not strategy.is_baseline or config.rescore):
        scores, provider = initial_scores(train_set, config, seed)

    model = LinearModel.zeros(train_set.class_count, config.dim)
    train_matrix = featurize_dataset(train_set, config.dim, max_tokens=config.max_tokens)
    validation_matrix = featurize_dataset(validation_set, config.dim, max_tokens=config.max_tokens)
    labels = train_set.labels
    length_index = token_lengths(train_set, max_tokens=config.max_tokens) if strategy is Strategy.LENGTH else None

    size = len(train_set)
    steps_per_epoch = math.ceil(size / config.batch_size)
    state = OptimizerState.create(config.optimizer, config.epochs * steps_per_epoch, model)
    schedule = checkpoint_steps(size, config.batch_size, config.checkpoint_fraction)

    report = RunReport(strategy=strategy, seed=seed, train_size=size)
    best_model, best_accuracy = None, -math.inf
    snapshots = []

    for epoch in range(1, config.epochs + 1):
        plan = make_plan(strategy, scores, train_set, epoch_rng(seed, epoch), length_index=length_index,
                         batch_size=config.batch_size, split=config.partition, seed=seed, epoch=epoch)
        pending = list(schedule)
        batch_losses = []
        for step, batch_ids in enumerate(plan.batches(), start=1):
            loss, grads = loss_and_grad_matrix(model, train_matrix[batch_ids], labels[batch_ids])
            batch_losses.append(loss)
            if not np.isfinite(loss):
                logger.error('Non-finite loss at epoch %d step %d, batch ids %s', epoch, step, batch_ids.tolist())
                raise NonFiniteLoss(detail=f'non-finite loss at epoch {epoch} step {step}')
            optimizer_step(model, grads, state)
            if on_batch is not None:
                on_batch(epoch, step, batch_ids)
            logger.debug('epoch %d step %d loss %.6f lr %.3g', epoch, step, loss, state.lr_at(state.step - 1))

            crossed = [checkpoint for checkpoint in pending if checkpoint.step == step]
            if not crossed:
                continue
            pending = pending[len(crossed):]
            metrics, validation_loss = evaluate(model, validation_set, matrix=validation_matrix)
            for checkpoint in crossed:
                report.checkpoints.append(CheckpointEntry(
                    epoch=epoch,
                    mark=checkpoint.mark,
                    step=step,
                    fraction_seen=checkpoint.mark / size,
                    metrics=metrics,
                    loss=validation_loss,
                ))
            if metrics.accuracy > best_accuracy:
                best_accuracy = metrics.accuracy
                best_model = model.copy()
            logger.info('%s seed %d epoch %d at %d/%d examples: validation accuracy %.4f, loss %.4f',
                        strategy.value, seed, epoch, crossed[-1].mark, size, metrics.accuracy, validation_loss)
        report.epoch_losses.append(float(np.mean(batch_losses)))
        logger.info('%s seed %d epoch %d: mean training loss %.4f', strategy.value, seed, epoch,
                    report.epoch_losses[-1])
        if config.rescore:
            snapshots.append(model.copy())

    report.best_index = select_best(report.checkpoints)
    report.test_metrics, report.test_loss = evaluate(best_model, test_set, max_tokens=config.max_tokens)
    best = report.best_checkpoint
    logger.info('%s seed %d: test accuracy %.4f with the epoch %d model at %d examples', strategy.value, seed,
                report.test_metrics.accuracy, best.epoch, best.mark)
    report.model = best_model

    if config.rescore:
        target = train_set if config.rescore_split == 'train' else validation_set
        initial = scores if target is train_set else None
        report.histograms = rescore_analysis(snapshots, target, initial_table=initial, initial_provider=provider,
                                             bins=config.bins, max_tokens=config.max_tokens)
    return report
