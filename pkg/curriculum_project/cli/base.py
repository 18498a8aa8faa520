"""Shared plumbing of the curriculum management commands."""

import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from corpus.loaders import FORMATS, load_dataset, load_external_scores
from corpus.models import SplitTag
from corpus.presets import PRESETS, get_preset
from corpus.splits import split_by_ids, stratified_split_ids
from curriculum_project.exceptions import CurriculumError
from samplers.exceptions import UnknownStrategy
from trainer.exceptions import FewShotSizeError

from .config import resolve_config
from .exceptions import ConfigError, OutputExists
from .manifest import RunManifest

logger = logging.getLogger(__name__)

USAGE_ERRORS = (ConfigError, UnknownStrategy, FewShotSizeError, OutputExists)


class CurriculumCommand(BaseCommand):
    """Base command: resolves the configuration and turns domain errors into CommandError."""

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except USAGE_ERRORS as exc:
            raise CommandError(str(exc), returncode=2)
        except CurriculumError as exc:
            logger.error('%s failed: %s', self.command_name, exc)
            raise CommandError(str(exc))
        except FileNotFoundError as exc:
            raise CommandError(f'{exc.filename}: no such file')

    def run(self, **options):
        raise NotImplementedError('subclasses of CurriculumCommand must provide a run() method')

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    # arguments

    def add_output_arguments(self, parser, directory=True):
        parser.add_argument('--out', required=True,
                            help='output directory' if directory else 'output file')
        parser.add_argument('--force', action='store_true', help='overwrite existing outputs')
        parser.add_argument('--config', help='YAML file of dotted configuration keys')

    def add_dataset_arguments(self, parser, splits=True):
        if splits:
            parser.add_argument('datasets', nargs='+', metavar='DATASET',
                                help='one file (split with data.split) or train, validation[, test] files')
        else:
            parser.add_argument('dataset', help='dataset file')
        parser.add_argument('--format', choices=FORMATS)
        parser.add_argument('--class-count', type=int)
        parser.add_argument('--preset', choices=sorted(PRESETS))
        parser.add_argument('--max-tokens', type=int)
        parser.add_argument('--split-seed', type=int)

    def add_scoring_arguments(self, parser):
        parser.add_argument('--scores', help='external probabilities file (JSONL) covering the whole dataset file, '
                                              'or the train file when the splits are separate files')
        parser.add_argument('--probe-fraction', type=float)
        parser.add_argument('--probe-epochs', type=int)
        parser.add_argument('--seed', type=int, action='append', help='repeat for several seeds')

    def add_training_arguments(self, parser, strategy=True):
        if strategy:
            parser.add_argument('--strategy')
        parser.add_argument('--epochs', type=int)
        parser.add_argument('--batch-size', type=int)
        parser.add_argument('--checkpoint-fraction', type=float)
        parser.add_argument('--optimizer', choices=['sgd', 'adamw'])
        parser.add_argument('--lr', type=float)
        parser.add_argument('--dim', type=int)
        parser.add_argument('--rescore', action='store_true', help='score histograms before and after each epoch')
        parser.add_argument('--rescore-split', choices=['train', 'validation'])
        parser.add_argument('--bins', type=int)

    # helpers

    def resolve(self, options):
        return resolve_config(options, config_path=options.get('config'))

    def start_manifest(self, resolved, input_paths):
        return RunManifest.start(self.command_name, resolved, [path for path in input_paths if path])

    def label_names(self, resolved):
        preset = resolved['data.preset']
        return get_preset(preset).label_names if preset else None

    def load_single(self, path, resolved, split_tag=SplitTag.TRAIN):
        return load_dataset(path, format=resolved['data.format'], class_count=resolved['data.class_count'],
                            label_names=self.label_names(resolved), split_tag=split_tag)

    def load_splits(self, paths, resolved):
        """(train, validation, test) and the external score table of the train split, if `scores.path` is set.

        One file is split with data.split; its score file covers the whole file and the
        train rows are picked by parent id. With separate files the scores cover the train file.
        """
        if len(paths) > 3:
            raise CommandError(f'expected 1 to 3 dataset files, got {len(paths)}', returncode=2)
        scores_path = resolved['scores.path']
        preset = get_preset(resolved['data.preset']) if resolved['data.preset'] else None
        scores = None
        if len(paths) == 1:
            dataset = self.load_single(paths[0], resolved)
            split_ids = stratified_split_ids(dataset, resolved['data.split'], resolved['data.split_seed'])
            parts = split_by_ids(dataset, split_ids)
            if scores_path:
                scores = load_external_scores(scores_path, dataset, preset=preset).subset(split_ids[0])
        else:
            tags = (SplitTag.TRAIN, SplitTag.VALIDATION, SplitTag.TEST)
            parts = [self.load_single(path, resolved, split_tag=tag) for path, tag in zip(paths, tags)]
            if scores_path:
                scores = load_external_scores(scores_path, parts[0], preset=preset)
        if len(parts) == 2:
            logger.warning('No test split given: test metrics are computed on the validation split')
            parts.append(parts[1].with_tag(SplitTag.TEST))
        return tuple(parts), scores

    def check_out_file(self, path, force):
        path = Path(path)
        if path.exists() and not force:
            raise OutputExists(detail=f'{path} exists, pass --force to overwrite')
        return path
