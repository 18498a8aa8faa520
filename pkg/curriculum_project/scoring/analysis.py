"""Score-distribution analyses: histograms split by correctness, and how error rate tracks score."""

import csv

import numpy as np
from scipy.stats import spearmanr

from .exceptions import MisalignedInput
from .models import HistogramReport
from .serializers import HistogramRowSerializer

DEFAULT_BINS = 20


def bin_indices(scores, bins):
    """Equal-width bins on [0, 1]; a score of exactly 1.0 lands in the last bin."""
    indices = np.floor(np.asarray(scores, dtype=np.float64) * bins).astype(np.int64)
    return np.clip(indices, 0, bins - 1)


def score_histogram(table, predictions=None, labels=None, bins=DEFAULT_BINS, epoch_tag=0):
    """Histogram of `table.scores`, split into correct/incorrect when predictions are given."""
    if bins < 2:
        raise ValueError(f'bins must be at least 2, got {bins}')
    scores = table.scores
    indices = bin_indices(scores, bins)
    edges = np.linspace(0.0, 1.0, bins + 1)

    if predictions is None:
        counts = np.bincount(indices, minlength=bins)
        return HistogramReport(bin_edges=edges, correct=counts, incorrect=np.zeros(bins, dtype=np.int64),
                               epoch_tag=epoch_tag, grouped=False)

    predictions = np.asarray(predictions)
    labels = np.asarray(labels) if labels is not None else None
    if labels is None or len(predictions) != len(scores) or len(labels) != len(scores):
        raise MisalignedInput(
            detail=f'{len(scores)} scores, {len(predictions)} predictions, '
                   f'{"no" if labels is None else len(labels)} labels'
        )
    hits = predictions == labels
    correct = np.bincount(indices[hits], minlength=bins)
    incorrect = np.bincount(indices[~hits], minlength=bins)
    return HistogramReport(bin_edges=edges, correct=correct, incorrect=incorrect, epoch_tag=epoch_tag)


def error_rates(report):
    """Per-bin error rate over the non-empty bins, with their bin indices."""
    totals = report.correct + report.incorrect
    filled = np.flatnonzero(totals)
    return filled, report.incorrect[filled] / totals[filled]


def error_rate_correlation(report):
    """Spearman rank correlation between bin index and error rate, over non-empty bins.

    Negative values mean low-score (hard) examples are misclassified more often.
    Returns (rho, number of non-empty bins); rho is nan with fewer than 3 bins.
    """
    filled, rates = error_rates(report)
    if len(filled) < 3 or np.all(rates == rates[0]):
        return float('nan'), len(filled)
    rho, _ = spearmanr(filled, rates)
    return float(rho), len(filled)


def mean_score(table):
    return float(np.mean(table.scores))


def write_histogram_csv(reports, path):
    """One block of rows per report, in the order given."""
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        writer = csv.DictWriter(handle, fieldnames=list(HistogramRowSerializer().fields))
        writer.writeheader()
        for report in reports:
            for row in report.rows():
                writer.writerow(HistogramRowSerializer(row).data)
    return path
