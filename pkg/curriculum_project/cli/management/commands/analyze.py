"""Score histograms (optionally split by prediction correctness), one block per epoch-tagged scores file."""

import numpy as np

from cli.base import CurriculumCommand
from cli.manifest import manifest_path
from cli.output import write_csv
from corpus.loaders import load_external_scores, load_predictions
from corpus.presets import PRESETS, get_preset
from scoring.analysis import error_rate_correlation, mean_score, score_histogram
from scoring.exceptions import MisalignedInput
from scoring.serializers import HistogramRowSerializer


class Command(CurriculumCommand):
    help = 'Histogram difficulty scores; with predictions, split every bin into correct and incorrect.'

    def add_arguments(self, parser):
        parser.add_argument('scores', nargs='+', metavar='SCORES',
                            help='scores files (JSONL with probs), tagged 0, 1, ... in the order given')
        parser.add_argument('--predictions', action='append', metavar='PREDICTIONS',
                            help='{id, prediction, label} JSONL; one per scores file, or one for all')
        parser.add_argument('--bins', type=int)
        parser.add_argument('--preset', choices=sorted(PRESETS))
        self.add_output_arguments(parser, directory=False)

    def run(self, **options):
        resolved = self.resolve(options)
        out = self.check_out_file(options['out'], options['force'])
        score_paths = options['scores']
        prediction_paths = options['predictions'] or []
        if len(prediction_paths) not in (0, 1, len(score_paths)):
            raise MisalignedInput(detail=f'{len(prediction_paths)} predictions files for '
                                         f'{len(score_paths)} scores files')
        if len(prediction_paths) == 1:
            prediction_paths = prediction_paths * len(score_paths)
        manifest = self.start_manifest(resolved, list(score_paths) + sorted(set(prediction_paths)))
        preset = get_preset(resolved['data.preset']) if resolved['data.preset'] else None

        reports = []
        for epoch_tag, path in enumerate(score_paths):
            table = load_external_scores(path, preset=preset)
            predictions = labels = None
            if prediction_paths:
                ids, predictions, labels = load_predictions(prediction_paths[epoch_tag])
                if not np.array_equal(ids, np.arange(len(table))):
                    raise MisalignedInput(detail=f'{prediction_paths[epoch_tag]} ids do not match the '
                                                 f'{len(table)} ids of {path}')
            report = score_histogram(table, predictions, labels, bins=resolved['analysis.bins'],
                                     epoch_tag=epoch_tag)
            reports.append(report)
            line = f'{path} (epoch {epoch_tag}): {report.total} examples, mean score {mean_score(table):.4f}'
            if report.grouped:
                rho, filled = error_rate_correlation(report)
                line += f', error-rate rank correlation {rho:.3f} over {filled} bins'
            self.stdout.write(line)

        rows = (HistogramRowSerializer(row).data for report in reports for row in report.rows())
        manifest.add_output(write_csv(out, HistogramRowSerializer().fields, rows))
        manifest.finish(manifest_path(out))
