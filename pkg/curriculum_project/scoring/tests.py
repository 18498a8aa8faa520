import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from corpus.models import Dataset, Example

from .analysis import error_rate_correlation, score_histogram, write_histogram_csv
from .difficulty import (
    TableProvider,
    build_score_table,
    difficulty_score,
    difficulty_scores,
    normalize_restricted,
    rank_examples,
    score_dataset,
)
from .exceptions import InvalidDistribution, MisalignedInput, ProviderFailure
from .models import ClassDistribution, Direction, ScoreTable


def table_of(scores):
    """ScoreTable with given scores over two classes (probs chosen to produce them)."""
    scores = np.asarray(scores, dtype=np.float64)
    probs = np.column_stack([(1 + scores) / 2, (1 - scores) / 2])
    return ScoreTable(scores=scores, probs=probs)


def tiny_dataset(size, class_count=2):
    return Dataset(
        examples=[Example(id=i, text=f'w{i}', label=i % class_count) for i in range(size)],
        label_names=[f'l{c}' for c in range(class_count)],
    )


class ConstantProvider:

    def __init__(self, probs):
        self.probs = probs

    def distribution(self, example):
        return ClassDistribution(np.asarray(self.probs, dtype=np.float64))


class FailingProvider:

    def distribution(self, example):
        if example.id == 3:
            raise RuntimeError('backend down')
        return ClassDistribution(np.array([0.5, 0.5]))


class NormalizeTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(normalize_restricted([2, 2]).probs.tolist(), [0.5, 0.5])
        self.assertEqual(normalize_restricted([3, 1]).probs.tolist(), [0.75, 0.25])
        with self.assertRaises(InvalidDistribution):
            normalize_restricted([0, 0])
        with self.assertRaises(InvalidDistribution):
            normalize_restricted([1, -1])

    def test_scale_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            raw = rng.random(4)
            scaled = raw * rng.uniform(0.01, 100)
            self.assertAlmostEqual(difficulty_score(normalize_restricted(raw)),
                                   difficulty_score(normalize_restricted(scaled)), places=12)

    def test_distribution_validation(self):
        with self.assertRaises(InvalidDistribution):
            ClassDistribution(np.array([0.7, 0.7]))
        with self.assertRaises(InvalidDistribution):
            ClassDistribution(np.array([np.nan, 1.0]))


class DifficultyScoreTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(difficulty_score(ClassDistribution(np.array([0.5, 0.5]))), 0.0)
        self.assertEqual(difficulty_score(ClassDistribution(np.array([1.0, 0.0]))), 1.0)
        self.assertAlmostEqual(difficulty_score(ClassDistribution(np.array([0.6, 0.3, 0.1]))), 0.3, places=12)
        with self.assertRaises(InvalidDistribution):
            difficulty_score(ClassDistribution(np.array([1.0])))

    def test_top_two_margin_oracle(self):
        rng = np.random.default_rng(0)
        for trial in range(1000):
            class_count = (2, 3, 5)[trial % 3]
            probs = rng.dirichlet(np.ones(class_count))
            ordered = sorted(probs, reverse=True)
            score = difficulty_score(ClassDistribution(probs / probs.sum()))
            self.assertLess(abs(score - (ordered[0] - ordered[1])), 1e-12)
            if class_count == 2:
                self.assertLess(abs(score - abs(probs[0] - probs[1])), 1e-12)

    def test_invariant_under_relabeling(self):
        rng = np.random.default_rng(1)
        matrix = rng.dirichlet(np.ones(5), size=50)
        shuffled = matrix[:, rng.permutation(5)]
        np.testing.assert_array_equal(difficulty_scores(matrix), difficulty_scores(shuffled))


class ScoreDatasetTests(SimpleTestCase):

    def test_uniform_and_one_hot_providers(self):
        dataset = tiny_dataset(6, class_count=3)
        uniform = score_dataset(ConstantProvider([1 / 3, 1 / 3, 1 / 3]), dataset)
        self.assertTrue(np.all(uniform.scores == 0.0))
        one_hot = score_dataset(ConstantProvider([0.0, 1.0, 0.0]), dataset)
        self.assertTrue(np.all(one_hot.scores == 1.0))

    def test_table_provider_matches_hand_margins(self):
        probs = np.array([[0.9, 0.1], [0.5, 0.5], [0.3, 0.7], [0.6, 0.4], [1.0, 0.0]])
        source = build_score_table(probs)
        table = score_dataset(TableProvider(source), tiny_dataset(5))
        np.testing.assert_allclose(table.scores, [0.8, 0.0, 0.4, 0.2, 1.0], atol=1e-12)

    def test_parallel_scoring_keeps_id_order(self):
        rng = np.random.default_rng(5)
        source = build_score_table(rng.dirichlet(np.ones(3), size=40))
        dataset = tiny_dataset(40, class_count=3)
        serial = score_dataset(TableProvider(source), dataset)
        parallel = score_dataset(TableProvider(source), dataset, jobs=4)
        np.testing.assert_array_equal(serial.probs, parallel.probs)
        np.testing.assert_array_equal(serial.scores, parallel.scores)

    def test_failure_names_example(self):
        with self.assertRaises(ProviderFailure) as caught:
            score_dataset(FailingProvider(), tiny_dataset(5))
        self.assertEqual(caught.exception.example_id, 3)
        self.assertIn('backend down', str(caught.exception))


class RankTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(rank_examples(table_of([0.2, 0.9, 0.5]), Direction.DESCENDING).order.tolist(), [1, 2, 0])
        self.assertEqual(rank_examples(table_of([0.4, 0.4]), Direction.ASCENDING).order.tolist(), [0, 1])
        self.assertEqual(rank_examples(table_of([0.4, 0.4]), Direction.DESCENDING).order.tolist(), [0, 1])

    def test_sort_oracle_and_reversal(self):
        scores = np.random.default_rng(2).random(1000)
        table = table_of(scores)
        ascending = rank_examples(table, Direction.ASCENDING)
        descending = rank_examples(table, Direction.DESCENDING)
        self.assertEqual(ascending.order.tolist(), sorted(range(1000), key=lambda i: (scores[i], i)))
        self.assertEqual(ascending.order.tolist(), descending.order.tolist()[::-1])
        ranks = ascending.ranks()
        self.assertEqual(ranks[ascending.order[0]], 1)
        self.assertEqual(ranks[ascending.order[-1]], 1000)


class HistogramTests(SimpleTestCase):

    def test_edge_assignment(self):
        report = score_histogram(table_of([0.0, 1.0]), [0, 1], [0, 1], bins=2)
        self.assertEqual(report.correct.tolist(), [1, 1])
        self.assertEqual(report.incorrect.tolist(), [0, 0])
        self.assertEqual(report.bin_edges.tolist(), [0.0, 0.5, 1.0])

    def test_conservation_without_predictions(self):
        report = score_histogram(table_of(np.linspace(0, 1, 10)), bins=4)
        self.assertEqual(report.total, 10)
        self.assertFalse(report.grouped)

    def test_brute_force_binning(self):
        rng = np.random.default_rng(8)
        scores = rng.random(500)
        predictions = rng.integers(0, 2, 500)
        labels = rng.integers(0, 2, 500)
        report = score_histogram(table_of(scores), predictions, labels, bins=20)
        correct, incorrect = [0] * 20, [0] * 20
        for score, prediction, label in zip(scores, predictions, labels):
            index = min(int(score * 20), 19)
            if prediction == label:
                correct[index] += 1
            else:
                incorrect[index] += 1
        self.assertEqual(report.correct.tolist(), correct)
        self.assertEqual(report.incorrect.tolist(), incorrect)

    def test_errors(self):
        with self.assertRaises(MisalignedInput):
            score_histogram(table_of([0.1, 0.2]), [0], [0], bins=2)
        with self.assertRaises(ValueError):
            score_histogram(table_of([0.1]), bins=1)

    def test_error_rate_correlation(self):
        scores = np.repeat(np.linspace(0.025, 0.975, 20), 10)
        labels = np.zeros(200, dtype=np.int64)
        predictions = labels.copy()
        for index in range(20):
            predictions[index * 10:index * 10 + (10 - index // 2)] = 1
        rho, filled = error_rate_correlation(score_histogram(table_of(scores), predictions, labels, bins=20))
        self.assertEqual(filled, 20)
        self.assertLess(rho, -0.9)

    def test_csv_rows(self):
        reports = [score_histogram(table_of([0.1, 0.6]), bins=2, epoch_tag=tag) for tag in (0, 1)]
        with tempfile.TemporaryDirectory() as tmp:
            path = write_histogram_csv(reports, Path(tmp) / 'h.csv')
            lines = Path(path).read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'bin_lo,bin_hi,correct_count,incorrect_count,epoch_tag')
        self.assertEqual(len(lines), 5)
        self.assertTrue(lines[-1].endswith(',1'))
