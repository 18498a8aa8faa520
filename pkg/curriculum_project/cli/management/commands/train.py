"""Train one strategy for every configured seed and write a report per seed."""

from cli.base import CurriculumCommand
from cli.config import train_config
from cli.manifest import manifest_path
from cli.output import prepare_out_dir
from cli.runs import run_cell, write_report


class Command(CurriculumCommand):
    help = 'Fine-tune the toy model under one sampling strategy, once per seed.'

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        self.add_scoring_arguments(parser)
        self.add_training_arguments(parser)
        self.add_output_arguments(parser)

    def run(self, **options):
        resolved = self.resolve(options)
        config = train_config(resolved)
        splits, scores = self.load_splits(options['datasets'], resolved)
        out_dir = prepare_out_dir(options['out'], force=options['force'])
        manifest = self.start_manifest(resolved, options['datasets'] + [config.scores_path])

        for seed in config.seeds:
            report = run_cell(splits, config, seed, scores=scores)
            write_report(out_dir, report, manifest)
            self.stdout.write(f'{config.strategy.value} seed {seed}: test accuracy '
                              f'{report.test_metrics.accuracy:.4f}, macro F1 {report.test_metrics.macro_f1:.4f}')
        manifest.finish(manifest_path(out_dir))
