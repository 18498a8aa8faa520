"""Running (strategy, seed) cells and writing their report files."""

import logging
from pathlib import Path

from scoring.serializers import HistogramRowSerializer
from toymodel.checkpoints import save_model
from trainer.fewshot import few_shot_run
from trainer.loop import train
from trainer.serializers import ProgressionRowSerializer, RunReportSerializer, progression_records

from .manifest import MANIFEST_NAME
from .output import write_csv, write_json

logger = logging.getLogger(__name__)


def run_name(report):
    return f'{report.strategy.value}-seed{report.seed}'


def run_cell(splits, config, seed, k=None, keep_model=True, scores=None):
    """One seed of `config.strategy`; a few-shot run when `k` is given.

    scores: ScoreTable of the train split, when loaded from an external file.
    """
    train_set, validation_set, test_set = splits
    if k is None:
        report = train(train_set, validation_set, test_set, config, seed, scores=scores)
    else:
        report = few_shot_run(train_set, validation_set, test_set, config, seed, k, scores=scores)
    if not keep_model:
        report.model = None
    return report


def write_report(out_dir, report, manifest):
    """Report JSON, progression CSV, histogram CSV and best-model checkpoint of one run."""
    out_dir = Path(out_dir)
    name = run_name(report)
    written = [
        write_json(out_dir / f'{name}.json', {'manifest': MANIFEST_NAME, **RunReportSerializer(report).data}),
        write_csv(out_dir / f'{name}-progression.csv', ProgressionRowSerializer().fields,
                  progression_records(report)),
    ]
    if report.histograms:
        rows = (HistogramRowSerializer(row).data for histogram in report.histograms for row in histogram.rows())
        written.append(write_csv(out_dir / f'{name}-histograms.csv', HistogramRowSerializer().fields, rows))
    if report.model is not None:
        written.append(save_model(report.model, out_dir / f'{name}-model.json', manifest=MANIFEST_NAME))
    for path in written:
        manifest.add_output(path)
    logger.info('Wrote %s reports to %s', name, out_dir)
    return written
