"""Per-epoch rescoring: histograms of the difficulty scores the model itself assigns as it trains."""

import logging

from scoring.analysis import error_rate_correlation, score_histogram
from scoring.difficulty import score_dataset
from scoring.models import ScoreSource
from toymodel.exceptions import CheckpointFormatError
from toymodel.probe import ModelProvider

logger = logging.getLogger(__name__)


def _histogram(table, dataset, bins, epoch_tag):
    report = score_histogram(table, table.predictions, dataset.labels, bins=bins, epoch_tag=epoch_tag)
    rho, filled = error_rate_correlation(report)
    logger.info('Epoch %d: %d/%d examples misclassified, error-rate/score rank correlation %.3f over %d bins',
                epoch_tag, int(report.incorrect.sum()), report.total, rho, filled)
    return report


def rescore_analysis(snapshots, dataset, initial_table=None, initial_provider=None, bins=20, max_tokens=None):
    """Histograms for epoch 0 (initial scorer) and for every per-epoch model snapshot.

    Epoch 0 uses `initial_table` when given, else scores `dataset` with
    `initial_provider`; it is skipped when neither is available.
    """
    if not snapshots:
        raise CheckpointFormatError(detail='rescoring needs one model snapshot per epoch')
    reports = []
    if initial_table is None and initial_provider is not None:
        initial_table = score_dataset(initial_provider, dataset, source=ScoreSource.PROBE_MODEL)
    if initial_table is not None:
        reports.append(_histogram(initial_table, dataset, bins, 0))
    else:
        logger.warning('No initial scorer for the %s split, skipping epoch 0', dataset.split_tag.value)

    for epoch, snapshot in enumerate(snapshots, start=1):
        table = score_dataset(ModelProvider(snapshot, max_tokens=max_tokens), dataset,
                              source=ScoreSource.TRAINED_MODEL)
        reports.append(_histogram(table, dataset, bins, epoch))
    return reports
