"""Strategy x seed grid, then the mean-metric table across seeds."""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed

import django
from django.core.management.base import CommandError

from cli.base import CurriculumCommand
from cli.config import train_config
from cli.manifest import manifest_path
from cli.output import prepare_out_dir, write_csv, write_text
from cli.runs import run_cell, write_report
from curriculum_project.exceptions import CurriculumError
from samplers.models import Strategy
from trainer.aggregate import aggregate_runs, format_table, summary_records
from trainer.serializers import SummaryRecordSerializer

logger = logging.getLogger(__name__)


class Command(CurriculumCommand):
    help = 'Run every strategy for every seed and tabulate the mean test metrics.'

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        self.add_scoring_arguments(parser)
        self.add_training_arguments(parser, strategy=False)
        parser.add_argument('--strategies', nargs='+', metavar='STRATEGY', help=f'subset of {Strategy.names()}')
        parser.add_argument('--jobs', type=int, help='grid cells run in parallel')
        self.add_output_arguments(parser)

    def run(self, **options):
        resolved = self.resolve(options)
        strategies = [Strategy.parse(name) for name in resolved['compare.strategies']]
        configs = {strategy: train_config(resolved, strategy=strategy) for strategy in strategies}
        seeds = resolved['train.seeds']
        splits, scores = self.load_splits(options['datasets'], resolved)
        out_dir = prepare_out_dir(options['out'], force=options['force'])
        manifest = self.start_manifest(resolved, options['datasets'] + [resolved['scores.path']])

        cells = [(strategy, seed) for strategy in strategies for seed in seeds]
        reports, failures = [], []
        for cell, outcome in self.run_grid(cells, configs, splits, scores, resolved['compare.jobs']):
            if isinstance(outcome, Exception):
                logger.error('%s seed %d failed: %s', cell[0].value, cell[1], outcome)
                failures.append(cell)
                continue
            write_report(out_dir, outcome, manifest)
            reports.append(outcome)

        rows = aggregate_runs(reports, failures=failures)
        manifest.add_output(write_csv(out_dir / 'summary.csv', SummaryRecordSerializer().fields,
                                      (SummaryRecordSerializer(record).data for record in summary_records(rows))))
        table = format_table(rows)
        manifest.add_output(write_text(out_dir / 'summary.txt', table + '\n'))
        manifest.finish(manifest_path(out_dir))
        self.stdout.write(table)
        if failures:
            raise CommandError(f'{len(failures)} of {len(cells)} runs failed: '
                               + ', '.join(f'{strategy.value}/seed {seed}' for strategy, seed in failures))

    def run_grid(self, cells, configs, splits, scores, jobs):
        """Yield (cell, RunReport or the exception it raised), in completion order when parallel."""
        if jobs == 1:
            for strategy, seed in cells:
                try:
                    yield (strategy, seed), run_cell(splits, configs[strategy], seed, keep_model=False, scores=scores)
                except CurriculumError as exc:
                    yield (strategy, seed), exc
            return
        with ProcessPoolExecutor(max_workers=jobs, initializer=django.setup) as pool:
            futures = {}
            for strategy, seed in cells:
                future = pool.submit(run_cell, splits, configs[strategy], seed, keep_model=False, scores=scores)
                futures[future] = (strategy, seed)
            for future in as_completed(futures):
                try:
                    yield futures[future], future.result()
                except CurriculumError as exc:
                    yield futures[future], exc
