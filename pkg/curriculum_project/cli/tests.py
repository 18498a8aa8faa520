import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.apps import apps
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from corpus.loaders import load_dataset, load_external_scores
from corpus.splits import stratified_split_ids
from samplers.models import Strategy

from .base import CurriculumCommand
from .config import default_partition, resolve_config
from .exceptions import ConfigError

FAST = ['--epochs', '1', '--dim', '1024', '--seed', '1']


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.dataset = self.tmp / 'corpus.jsonl'
        self.call('synth', '--size', '200', '--signal', '0.5', '1.0', '--out', str(self.dataset))

    def tearDown(self):
        self._tmp.cleanup()

    def call(self, *args):
        stdout = StringIO()
        call_command(*args, stdout=stdout, stderr=StringIO())
        return stdout.getvalue()

    def write_yaml(self, content):
        path = self.tmp / 'run.yaml'
        path.write_text(content, encoding='utf-8')
        return str(path)

    def write_scores(self, probs):
        path = self.tmp / 'scores.jsonl'
        path.write_text(''.join(json.dumps({'id': i, 'probs': row}) + '\n' for i, row in enumerate(probs)),
                        encoding='utf-8')
        return str(path)


class TrainCommandTests(CommandTestCase):

    def test_train_writes_reports(self):
        out = self.tmp / 'out'
        stdout = self.call('train', str(self.dataset), '--strategy', 'Random', *FAST, '--out', str(out))
        self.assertIn('Random seed 1: test accuracy', stdout)
        names = {path.name for path in out.iterdir()}
        self.assertTrue({'Random-seed1.json', 'Random-seed1-progression.csv', 'Random-seed1-model.json',
                         'manifest.json'} <= names)
        report = json.loads((out / 'Random-seed1.json').read_text(encoding='utf-8'))
        self.assertEqual(report['strategy'], 'Random')
        self.assertEqual(report['train_size'], 160)
        self.assertEqual(len(report['checkpoints']), 10)
        manifest = json.loads((out / 'manifest.json').read_text(encoding='utf-8'))
        self.assertEqual(manifest['command'], 'train')
        self.assertIn(str(self.dataset), manifest['inputs'])
        self.assertIn('Random-seed1-progression.csv', manifest['outputs'])
        progression = (out / 'Random-seed1-progression.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(progression[0], 'epoch,fraction_seen,acc,macro_f1,macro_p,macro_r,loss')
        self.assertEqual(len(progression), 11)
        self.assertEqual(report['manifest'], 'manifest.json')
        model = json.loads((out / 'Random-seed1-model.json').read_text(encoding='utf-8'))
        self.assertEqual(model['manifest'], 'manifest.json')
        self.assertEqual(len(report['epoch_losses']), 1)

    def test_unknown_strategy_lists_the_choices(self):
        with self.assertRaises(CommandError) as caught:
            self.call('train', str(self.dataset), '--strategy', 'Hardest', *FAST, '--out', str(self.tmp / 'out'))
        self.assertEqual(caught.exception.returncode, 2)
        for name in Strategy.names():
            self.assertIn(name, str(caught.exception))

    def test_refuses_to_overwrite_without_force(self):
        out = str(self.tmp / 'out')
        self.call('train', str(self.dataset), *FAST, '--out', out)
        with self.assertRaises(CommandError) as caught:
            self.call('train', str(self.dataset), *FAST, '--out', out)
        self.assertEqual(caught.exception.returncode, 2)
        self.call('train', str(self.dataset), *FAST, '--out', out, '--force')

    def test_reruns_are_byte_identical(self):
        first, second = self.tmp / 'first', self.tmp / 'second'
        for out in (first, second):
            self.call('train', str(self.dataset), '--strategy', 'PME', *FAST, '--rescore', '--out', str(out))
        names = sorted(path.name for path in first.iterdir() if path.name != 'manifest.json')
        self.assertIn('PME-seed1-histograms.csv', names)
        for name in names:
            self.assertEqual((first / name).read_bytes(), (second / name).read_bytes(), name)

    def test_whole_file_scores_drive_a_single_file_run(self):
        scores = self.tmp / 'scores.jsonl'
        self.call('score', str(self.dataset), '--seed', '3', '--dim', '1024', '--out', str(scores))
        out = self.tmp / 'out'
        stdout = self.call('train', str(self.dataset), '--strategy', 'E2D', '--scores', str(scores), *FAST,
                           '--out', str(out))
        self.assertIn('E2D seed 1: test accuracy', stdout)

        resolved = resolve_config({'scores': str(scores)})
        (train_set, _, _), table = CurriculumCommand().load_splits([str(self.dataset)], resolved)
        train_ids = stratified_split_ids(load_dataset(str(self.dataset)), resolved['data.split'],
                                         resolved['data.split_seed'])[0]
        self.assertEqual(len(table), len(train_set))
        np.testing.assert_array_equal(table.scores, load_external_scores(str(scores)).scores[train_ids])

    def test_missing_dataset(self):
        with self.assertRaises(CommandError) as caught:
            self.call('train', str(self.tmp / 'absent.jsonl'), *FAST, '--out', str(self.tmp / 'out'))
        self.assertIn('no such file', str(caught.exception))


class FewShotCommandTests(CommandTestCase):

    def test_selects_k_examples(self):
        out = self.tmp / 'few'
        stdout = self.call('fewshot', str(self.dataset), '--strategy', 'E2D', '--k', '16', *FAST, '--out', str(out))
        self.assertIn('16 examples', stdout)
        report = json.loads((out / 'E2D-seed1.json').read_text(encoding='utf-8'))
        self.assertEqual(len(report['selected_ids']), 16)
        self.assertEqual(report['train_size'], 16)

    def test_k_out_of_range_is_a_usage_error(self):
        for k in ('0', '161'):
            with self.assertRaises(CommandError) as caught:
                self.call('fewshot', str(self.dataset), '--k', k, *FAST, '--out', str(self.tmp / f'few{k}'))
            self.assertEqual(caught.exception.returncode, 2)


class CompareCommandTests(CommandTestCase):

    def test_two_strategies_one_seed(self):
        out = self.tmp / 'grid'
        stdout = self.call('compare', str(self.dataset), '--strategies', 'Random', 'E2D', '--epochs', '1',
                           '--dim', '1024', '--seed', '66', '--out', str(out))
        self.assertIn('E2D', stdout)
        lines = (out / 'summary.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[0].startswith('strategy,seeds,accuracy'))
        self.assertTrue(lines[1].startswith('Random,66,'))
        self.assertTrue((out / 'summary.txt').exists())
        self.assertFalse((out / 'Random-seed66-model.json').exists())

    def test_default_grid_tabulates_every_strategy(self):
        out = self.tmp / 'grid'
        self.call('compare', str(self.dataset), '--epochs', '1', '--dim', '1024', '--out', str(out))
        lines = (out / 'summary.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'strategy,seeds,accuracy,macro_f1,macro_precision,macro_recall,failed_seeds')
        self.assertEqual([line.split(',')[0] for line in lines[1:]], Strategy.names())
        self.assertTrue(all(line.split(',')[1] == '66 88 99' for line in lines[1:]))
        reports = sorted(path.name for path in out.glob('*-seed*.json'))
        self.assertEqual(len(reports), 24)


class ScoreAndPlanCommandTests(CommandTestCase):

    def test_probe_scores(self):
        out = self.tmp / 'scores.jsonl'
        self.call('score', str(self.dataset), '--seed', '3', '--dim', '1024', '--out', str(out))
        records = [json.loads(line) for line in out.read_text(encoding='utf-8').splitlines()]
        self.assertEqual([record['id'] for record in records], list(range(200)))
        self.assertTrue(all(0.0 <= record['score'] <= 1.0 for record in records))
        self.assertTrue((self.tmp / 'scores.jsonl.manifest.json').exists())

    def test_plan_rows(self):
        out = self.tmp / 'plan.jsonl'
        self.call('plan', str(self.dataset), '--strategy', 'PMD', '--epochs', '2', '--dim', '1024',
                  '--out', str(out))
        rows = [json.loads(line) for line in out.read_text(encoding='utf-8').splitlines()]
        self.assertEqual(len(rows), 400)
        for epoch in (1, 2):
            ids = sorted(row['example_id'] for row in rows if row['epoch'] == epoch)
            self.assertEqual(ids, list(range(200)))
        self.assertEqual([row['partition_tag'] for row in rows[:16]].count('B1'), 9)


class AnalyzeCommandTests(CommandTestCase):

    def test_single_scores_file(self):
        scores = self.write_scores([[0.9, 0.1], [0.5, 0.5], [0.2, 0.8], [0.6, 0.4]])
        out = self.tmp / 'hist.csv'
        stdout = self.call('analyze', scores, '--bins', '4', '--out', str(out))
        self.assertIn('4 examples', stdout)
        lines = out.read_text(encoding='utf-8').splitlines()
        self.assertEqual(len(lines), 5)
        self.assertTrue(all(line.endswith(',0') for line in lines[1:]))

    def test_too_few_bins(self):
        scores = self.write_scores([[0.9, 0.1], [0.5, 0.5]])
        with self.assertRaises(CommandError) as caught:
            self.call('analyze', scores, '--bins', '1', '--out', str(self.tmp / 'hist.csv'))
        self.assertEqual(caught.exception.returncode, 2)

    def test_misaligned_predictions(self):
        scores = self.write_scores([[0.9, 0.1], [0.5, 0.5]])
        predictions = self.tmp / 'pred.jsonl'
        predictions.write_text('{"id": 0, "prediction": 0, "label": 0}\n', encoding='utf-8')
        with self.assertRaises(CommandError) as caught:
            self.call('analyze', scores, '--predictions', str(predictions), '--out', str(self.tmp / 'hist.csv'))
        self.assertEqual(caught.exception.returncode, 1)


class ResolveConfigTests(CommandTestCase):

    def test_flag_beats_file_beats_defaults(self):
        path = self.write_yaml('version: 1\ntrain.epochs: 3\ntrain.strategy: E2D\n')
        resolved = resolve_config({'epochs': 1}, config_path=path)
        self.assertEqual(resolved['train.epochs'], 1)
        self.assertEqual(resolved['train.strategy'], 'E2D')
        self.assertEqual(resolved['train.batch_size'], 16)
        self.assertEqual(resolved['train.seeds'], [66, 88, 99])

    def test_preset_supplies_split_and_classes(self):
        resolved = resolve_config({'preset': 'sst5'})
        self.assertEqual(resolved['data.class_count'], 5)
        self.assertEqual(resolved['data.split'], [0.8, 0.2])

    def test_partition_follows_batch_size(self):
        self.assertEqual(resolve_config({'batch_size': 32})['train.partition'], [18, 14])
        self.assertEqual(default_partition(8), [5, 3])

    def test_rejected_files(self):
        for content in ('compare.strategies: []\n', 'train.epoch: 2\n', 'version: 2\n', '- a list\n',
                        'train.partition: [8, 7]\n'):
            with self.assertRaises(ConfigError, msg=content):
                resolve_config({}, config_path=self.write_yaml(content))

    def test_invalid_flag_value(self):
        with self.assertRaises(ConfigError) as caught:
            resolve_config({'dim': 1000})
        self.assertIn('model.dim', str(caught.exception))

    def test_learning_rate_follows_the_optimizer(self):
        self.assertEqual(resolve_config({})['optim.lr'], 0.01)
        self.assertEqual(resolve_config({'optimizer': 'sgd'})['optim.lr'], 0.1)
        self.assertEqual(resolve_config({'optimizer': 'sgd', 'lr': 0.5})['optim.lr'], 0.5)
        self.assertEqual(resolve_config({}, config_path=self.write_yaml('optim.kind: sgd\n'))['optim.lr'], 0.1)
        path = self.write_yaml('optim.kind: sgd\noptim.lr: 0.02\n')
        self.assertEqual(resolve_config({}, config_path=path)['optim.lr'], 0.02)


class ProjectSettingsTests(SimpleTestCase):

    def test_no_database_layer(self):
        self.assertEqual(settings.DATABASES, {})
        self.assertFalse(settings.is_overridden('DEFAULT_AUTO_FIELD'))
        for label in ('corpus', 'scoring', 'toymodel', 'samplers', 'trainer', 'cli'):
            config = apps.get_app_config(label)
            self.assertNotIn('default_auto_field', vars(type(config)), label)
            self.assertEqual(list(config.get_models()), [], label)
