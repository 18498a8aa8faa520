"""Select k training examples with a strategy, train on them only, evaluate on the full test split."""

from cli.base import CurriculumCommand
from cli.config import train_config
from cli.manifest import manifest_path
from cli.output import prepare_out_dir
from cli.runs import run_cell, write_report
from trainer.fewshot import selection_label_counts


class Command(CurriculumCommand):
    help = 'Few-shot runs: k examples chosen by the strategy, once per seed.'

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        self.add_scoring_arguments(parser)
        self.add_training_arguments(parser)
        parser.add_argument('--k', type=int, help='number of training examples to select')
        self.add_output_arguments(parser)

    def run(self, **options):
        resolved = self.resolve(options)
        config = train_config(resolved)
        k = resolved['fewshot.k']
        splits, scores = self.load_splits(options['datasets'], resolved)
        out_dir = prepare_out_dir(options['out'], force=options['force'])
        manifest = self.start_manifest(resolved, options['datasets'] + [config.scores_path])

        for seed in config.seeds:
            report = run_cell(splits, config, seed, k=k, scores=scores)
            write_report(out_dir, report, manifest)
            counts = selection_label_counts(splits[0], report.selected_ids)
            self.stdout.write(f'{config.strategy.value} seed {seed}: {len(report.selected_ids)} examples '
                              f'(per class {counts.tolist()}), test accuracy {report.test_metrics.accuracy:.4f}')
        manifest.finish(manifest_path(out_dir))
