"""Difficulty scores of every example: from an external probabilities file or from a probe model."""

from cli.base import CurriculumCommand
from cli.config import train_config
from cli.manifest import manifest_path
from cli.output import write_jsonl
from corpus.loaders import load_external_scores
from corpus.presets import get_preset
from scoring.difficulty import score_dataset
from scoring.models import ScoreSource
from scoring.serializers import scored_records
from toymodel.probe import build_probe_scorer


class Command(CurriculumCommand):
    help = 'Write one {id, probs, score} record per example, in id order.'

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser, splits=False)
        self.add_scoring_arguments(parser)
        parser.add_argument('--jobs', type=int, help='threads scoring examples in parallel')
        self.add_output_arguments(parser, directory=False)

    def run(self, **options):
        resolved = self.resolve(options)
        config = train_config(resolved)
        out = self.check_out_file(options['out'], options['force'])
        dataset = self.load_single(options['dataset'], resolved)
        manifest = self.start_manifest(resolved, [options['dataset'], config.scores_path])

        if config.scores_path:
            preset = get_preset(config.preset) if config.preset else None
            table = load_external_scores(config.scores_path, dataset, preset=preset)
        else:
            seed = config.seeds[0]
            provider = build_probe_scorer(dataset, probe_fraction=config.probe_fraction,
                                          probe_epochs=config.probe_epochs, seed=seed, dim=config.dim,
                                          batch_size=config.batch_size, optimizer=config.optimizer,
                                          max_tokens=config.max_tokens)
            table = score_dataset(provider, dataset, source=ScoreSource.PROBE_MODEL,
                                  jobs=resolved['compare.jobs'])

        manifest.add_output(write_jsonl(out, scored_records(table)))
        manifest.finish(manifest_path(out))
        self.stdout.write(f'Scored {len(table)} examples ({table.source.value}) into {out}')
