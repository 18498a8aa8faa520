import json
import random
import re
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from .exceptions import EmptyDataset, LabelOutOfRange, MalformedRecord, ScoreFileError, SplitError
from .loaders import load_dataset, load_external_scores, load_predictions, save_dataset
from .models import Dataset, Example, SplitTag
from .presets import PRESETS, get_preset
from .splits import stratified_split, stratified_split_ids
from .synthetic import make_corpus
from .tokenizer import example_tokens, token_lengths, tokenize


def write_jsonl(path, records):
    with open(path, 'w', encoding='utf-8') as handle:
        for record in records:
            handle.write(json.dumps(record) + '\n')
    return path


def make_dataset(labels, class_count=2, texts=None):
    texts = texts or [f'text number {i}' for i in range(len(labels))]
    examples = [Example(id=i, text=text, label=label) for i, (text, label) in enumerate(zip(texts, labels))]
    return Dataset(examples=examples, label_names=[str(c) for c in range(class_count)])


class TempDirMixin:

    def setUp(self):
        super().setUp()
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()
        super().tearDown()


class LoadDatasetTests(TempDirMixin, SimpleTestCase):

    def test_jsonl_ids_follow_file_order(self):
        path = write_jsonl(self.tmp / 'd.jsonl', [
            {'text': 'good', 'label': 0},
            {'text': 'bad', 'label': 1},
            {'text': 'meh', 'label': 0},
        ])
        dataset = load_dataset(path, class_count=2)
        self.assertEqual(len(dataset), 3)
        self.assertEqual(dataset.ids, [0, 1, 2])
        self.assertEqual(dataset.labels.tolist(), [0, 1, 0])
        self.assertEqual(dataset.split_tag, SplitTag.TRAIN)

    def test_label_out_of_range_names_line(self):
        path = write_jsonl(self.tmp / 'd.jsonl', [
            {'text': 'a', 'label': 0},
            {'text': 'b', 'label': 5},
        ])
        with self.assertRaises(LabelOutOfRange) as caught:
            load_dataset(path, class_count=3)
        self.assertEqual(str(caught.exception), 'label out of range at line 2')
        self.assertEqual(caught.exception.line, 2)

    def test_malformed_json_and_missing_field(self):
        path = self.tmp / 'bad.jsonl'
        path.write_text('{"text": "a", "label": 0}\n{not json\n', encoding='utf-8')
        with self.assertRaises(MalformedRecord) as caught:
            load_dataset(path)
        self.assertEqual(caught.exception.line, 2)

        path = write_jsonl(self.tmp / 'nolabel.jsonl', [{'text': 'a'}])
        with self.assertRaises(MalformedRecord) as caught:
            load_dataset(path)
        self.assertIn('label', str(caught.exception))

    def test_supplied_ids_must_match_position(self):
        path = write_jsonl(self.tmp / 'd.jsonl', [
            {'id': 0, 'text': 'a', 'label': 0},
            {'id': 5, 'text': 'b', 'label': 1},
        ])
        with self.assertRaises(MalformedRecord):
            load_dataset(path)

    def test_empty_file(self):
        path = self.tmp / 'empty.jsonl'
        path.write_text('', encoding='utf-8')
        with self.assertRaises(EmptyDataset):
            load_dataset(path)

    def test_csv_round_trip_of_awkward_strings(self):
        rng = random.Random(7)
        alphabet = 'ab ,"\'\n;é漢 '
        texts = [''.join(rng.choice(alphabet) for _ in range(rng.randint(1, 20))) for _ in range(100)]
        dataset = make_dataset([i % 2 for i in range(100)], texts=texts)
        for format in ('csv', 'jsonl'):
            path = save_dataset(dataset, self.tmp / f'round.{format}', format=format)
            loaded = load_dataset(path, format=format)
            self.assertEqual([example.text for example in loaded], texts)
            self.assertEqual(loaded.labels.tolist(), dataset.labels.tolist())

    def test_pair_round_trip(self):
        dataset = make_corpus(20, class_count=3, pair=True, seed=3)
        path = save_dataset(dataset, self.tmp / 'pair.csv', format='csv')
        loaded = load_dataset(path, format='csv', class_count=3, label_names=dataset.label_names)
        self.assertEqual(loaded.examples, dataset.examples)

    def test_empty_pair_cell_means_no_pair(self):
        dataset = Dataset(examples=(Example(id=0, text='first', label=0, text_pair=''),
                                    Example(id=1, text='second', label=1, text_pair='other')),
                          label_names=('0', '1'))
        loaded = load_dataset(save_dataset(dataset, self.tmp / 'pair.csv', format='csv'), format='csv')
        self.assertEqual([example.text_pair for example in loaded], [None, 'other'])
        loaded = load_dataset(save_dataset(dataset, self.tmp / 'pair.jsonl'))
        self.assertEqual([example.text_pair for example in loaded], ['', 'other'])


class TokenizerTests(SimpleTestCase):

    def test_rule(self):
        self.assertEqual(tokenize('This was a GREAT movie!'), ['this', 'was', 'a', 'great', 'movie'])
        self.assertEqual(tokenize(''), [])
        self.assertEqual(tokenize("don't stop"), ["don't", 'stop'])
        self.assertEqual(tokenize('... !!'), [])

    def test_matches_regex_oracle(self):
        rng = random.Random(11)
        words = ['Hello,', 'world!', '(quoted)', "it's", 'A', '--', 'x.y', 'Über']
        for _ in range(200):
            text = ' '.join(rng.choice(words) for _ in range(rng.randint(0, 8)))
            oracle = [re.sub(r'^[^\w]+|[^\w]+$', '', raw.lower()) for raw in text.split()]
            self.assertEqual(tokenize(text), [token for token in oracle if token])

    def test_token_lengths(self):
        dataset = Dataset(
            examples=[Example(id=0, text='a b c', label=0), Example(id=1, text='a b', label=1, text_pair='c')],
            label_names=['n', 'p'],
        )
        self.assertEqual(token_lengths(dataset).lengths.tolist(), [3, 3])

    def test_token_lengths_recount_and_permutation(self):
        dataset = make_corpus(1000, seed=5)
        lengths = token_lengths(dataset).lengths
        self.assertEqual(lengths.tolist(), [len(example.text.split()) for example in dataset])
        order = np.random.default_rng(1).permutation(len(dataset))
        shuffled = Dataset(examples=[dataset[int(i)] for i in order], label_names=dataset.label_names)
        self.assertEqual(token_lengths(shuffled).lengths.tolist(), lengths[order].tolist())

    def test_max_tokens_truncates_text_first(self):
        example = Example(id=0, text='a b c d', label=0, text_pair='e f')
        self.assertEqual(example_tokens(example, max_tokens=5), (['a', 'b', 'c', 'd'], ['e']))
        self.assertEqual(example_tokens(example, max_tokens=2), (['a', 'b'], []))


class SplitTests(SimpleTestCase):

    def test_exact_divisibility(self):
        dataset = make_dataset([i % 2 for i in range(100)])
        train, validation = stratified_split(dataset, [0.8, 0.2], seed=1)
        self.assertEqual((len(train), len(validation)), (80, 20))
        self.assertEqual(np.bincount(train.labels).tolist(), [40, 40])
        self.assertEqual(np.bincount(validation.labels).tolist(), [10, 10])
        self.assertEqual(validation.split_tag, SplitTag.VALIDATION)

    def test_three_way_partition_and_determinism(self):
        dataset = make_dataset([i % 3 for i in range(301)], class_count=3)
        first = stratified_split_ids(dataset, [0.8, 0.1, 0.1], seed=4)
        again = stratified_split_ids(dataset, [0.8, 0.1, 0.1], seed=4)
        self.assertEqual(first, again)
        self.assertEqual(sorted(i for ids in first for i in ids), list(range(301)))
        for ids, fraction in zip(first, [0.8, 0.1, 0.1]):
            counts = np.bincount(dataset.labels[ids], minlength=3)
            for label in range(3):
                self.assertLessEqual(abs(counts[label] - fraction * np.sum(dataset.labels == label)), 1)

    def test_errors(self):
        dataset = make_dataset([0, 0, 0, 1])
        with self.assertRaises(SplitError):
            stratified_split(dataset, [0.5, 0.4], seed=0)
        with self.assertRaises(SplitError):
            stratified_split(dataset, [0.5, 0.5], seed=0)


class ExternalScoresTests(TempDirMixin, SimpleTestCase):

    def setUp(self):
        super().setUp()
        self.dataset = make_dataset([0, 1] * 5)

    def test_margin_per_record(self):
        records = [{'id': i, 'probs': [0.9, 0.1]} for i in range(10)]
        records[3] = {'id': 3, 'probs': [0.2, 0.2]}
        table = load_external_scores(write_jsonl(self.tmp / 's.jsonl', records), self.dataset)
        self.assertAlmostEqual(table.scores[0], 0.8, places=12)
        self.assertEqual(table.scores[3], 0.0)
        self.assertEqual(table.probs[3].tolist(), [0.5, 0.5])

    def test_missing_duplicate_and_bad_records(self):
        records = [{'id': i, 'probs': [0.5, 0.5]} for i in range(10) if i != 7]
        with self.assertRaises(ScoreFileError) as caught:
            load_external_scores(write_jsonl(self.tmp / 'm.jsonl', records), self.dataset)
        self.assertEqual(caught.exception.example_id, 7)
        self.assertIn('7', str(caught.exception))

        records = [{'id': 0, 'probs': [0.5, 0.5]}, {'id': 0, 'probs': [0.5, 0.5]}]
        with self.assertRaises(ScoreFileError):
            load_external_scores(write_jsonl(self.tmp / 'd.jsonl', records), self.dataset)
        with self.assertRaises(ScoreFileError):
            load_external_scores(write_jsonl(self.tmp / 'l.jsonl', [{'id': 0, 'probs': [1.0]}]), self.dataset)
        with self.assertRaises(ScoreFileError):
            load_external_scores(write_jsonl(self.tmp / 'n.jsonl', [{'id': 0, 'probs': [-0.1, 1.1]}]),
                                 self.dataset)

    def test_token_probs_need_a_preset(self):
        records = [{'id': i, 'token_probs': {'great': 0.75, 'bad': 0.25, 'the': 0.5}} for i in range(10)]
        path = write_jsonl(self.tmp / 't.jsonl', records)
        with self.assertRaises(ScoreFileError):
            load_external_scores(path, self.dataset)
        table = load_external_scores(path, self.dataset, preset=get_preset('sst2'))
        self.assertEqual(table.probs[0].tolist(), [0.25, 0.75])
        self.assertAlmostEqual(table.scores[0], 0.5, places=12)

    def test_standalone_table_and_predictions(self):
        path = write_jsonl(self.tmp / 's.jsonl', [
            {'id': 1, 'probs': [0.6, 0.3, 0.1]},
            {'id': 0, 'probs': [1, 0, 0]},
        ])
        table = load_external_scores(path)
        self.assertEqual(table.class_count, 3)
        self.assertEqual(table.scores[0], 1.0)
        self.assertAlmostEqual(table.scores[1], 0.3, places=12)

        path = write_jsonl(self.tmp / 'p.jsonl', [{'id': 1, 'prediction': 0, 'label': 1},
                                                  {'id': 0, 'prediction': 2, 'label': 2}])
        ids, predictions, labels = load_predictions(path)
        self.assertEqual((ids.tolist(), predictions.tolist(), labels.tolist()), ([0, 1], [2, 0], [2, 1]))


class PresetTests(SimpleTestCase):

    def test_prompts(self):
        example = Example(id=0, text='A fine film.', label=1)
        self.assertEqual(get_preset('sst2').render_prompt(example), 'A fine film. this was a [MASK] movie.')
        pair = Example(id=0, text='It rains.', label=0, text_pair='The street is wet.')
        self.assertEqual(
            get_preset('xnli').render_prompt(pair),
            'Sentence 1 is It rains., sentence 2 is The street is wet.. They are [MASK].',
        )
        with self.assertRaises(ValueError):
            get_preset('sst2').render_prompt(pair)

    def test_verbalize_restricts_and_normalizes(self):
        dist = get_preset('hsol').verbalize({'hateful': 2.0, 'offensive': 1.0, 'neutral': 1.0, 'other': 9.0})
        self.assertEqual(dist.probs.tolist(), [0.5, 0.25, 0.25])
        for preset in PRESETS.values():
            self.assertEqual(len(preset.keywords), preset.class_count)
            self.assertAlmostEqual(sum(preset.split), 1.0)


class SyntheticCorpusTests(SimpleTestCase):

    def test_balanced_deterministic_and_disjoint(self):
        dataset = make_corpus(300, class_count=3, seed=2)
        self.assertEqual(np.bincount(dataset.labels).tolist(), [100, 100, 100])
        self.assertEqual(make_corpus(300, class_count=3, seed=2), dataset)
        for example in dataset:
            self.assertTrue(all(word.startswith(f'c{example.label}w') for word in example.text.split()))

    def test_noise_flips_labels(self):
        clean = make_corpus(1000, seed=9)
        noisy = make_corpus(1000, noise=0.2, seed=9)
        flipped = np.mean(clean.labels != noisy.labels)
        self.assertGreater(flipped, 0.1)
        self.assertLess(flipped, 0.3)
