import numpy as np
from django.test import SimpleTestCase

from corpus.models import Dataset, Example, SplitTag
from corpus.synthetic import make_corpus
from samplers.plans import epoch_rng
from scoring.analysis import error_rate_correlation
from scoring.difficulty import rank_examples
from scoring.models import Direction, ScoreTable
from toymodel.exceptions import CheckpointFormatError
from toymodel.models import LinearModel

from .aggregate import aggregate_runs, format_table, summary_records
from .analysis import rescore_analysis
from .exceptions import FewShotSizeError, InconsistentSeeds
from .fewshot import few_shot_run, few_shot_select, selection_label_counts
from .loop import select_best, train
from .metrics import compute_metrics, confusion_matrix, evaluate
from .models import Metrics, RunReport, TrainConfig
from .schedule import checkpoint_steps
from .serializers import RunReportSerializer, progression_records

SMALL_DIM = 2 ** 10


def table_of(scores):
    scores = np.asarray(scores, dtype=np.float64)
    probs = np.column_stack([(1 + scores) / 2, (1 - scores) / 2])
    return ScoreTable(scores=scores, probs=probs)


def corpus_splits(size, **kwargs):
    return (
        make_corpus(size, seed=1, **kwargs),
        make_corpus(200, seed=2, split_tag=SplitTag.VALIDATION, **kwargs),
        make_corpus(200, seed=3, split_tag=SplitTag.TEST, **kwargs),
    )


def report_with(strategy, seed, accuracy):
    metrics = Metrics(accuracy=accuracy, macro_precision=accuracy, macro_recall=accuracy, macro_f1=accuracy)
    return RunReport(strategy=strategy, seed=seed, test_metrics=metrics)


class ScheduleTests(SimpleTestCase):

    def test_tenths_of_an_epoch(self):
        schedule = checkpoint_steps(100, 16, 0.1)
        self.assertEqual([checkpoint.mark for checkpoint in schedule], list(range(10, 101, 10)))
        self.assertEqual([checkpoint.step for checkpoint in schedule], [1, 2, 2, 3, 4, 4, 5, 5, 6, 7])

    def test_small_epochs(self):
        self.assertEqual([(c.mark, c.step) for c in checkpoint_steps(7, 16, 0.5)], [(4, 1), (7, 1)])
        self.assertEqual([c.mark for c in checkpoint_steps(1, 16, 0.1)], [1])

    def test_last_mark_is_the_epoch(self):
        for size in (3, 17, 99, 1000):
            self.assertEqual(checkpoint_steps(size, 16, 0.3)[-1].mark, size)


class MetricsTests(SimpleTestCase):

    def test_perfect_predictions(self):
        metrics = compute_metrics([0, 1, 2, 1], [0, 1, 2, 1], 3)
        self.assertEqual(metrics.accuracy, 1.0)
        self.assertEqual(metrics.macro_f1, 1.0)

    def test_constant_predictor(self):
        metrics = compute_metrics([0, 0, 0, 0], [0, 1, 0, 1], 2)
        self.assertEqual(metrics.accuracy, 0.5)
        self.assertAlmostEqual(metrics.macro_f1, 1 / 3, places=12)
        self.assertEqual(metrics.per_class[1].precision, 0.0)

    def test_confusion_oracle(self):
        rng = np.random.default_rng(0)
        predictions = rng.integers(0, 3, 300)
        labels = rng.integers(0, 3, 300)
        metrics = compute_metrics(predictions, labels, 3)
        confusion = confusion_matrix(predictions, labels, 3)
        self.assertEqual(confusion.sum(), 300)
        f1s = []
        for label in range(3):
            tp = sum(1 for p, g in zip(predictions, labels) if p == label and g == label)
            fp = sum(1 for p, g in zip(predictions, labels) if p == label and g != label)
            fn = sum(1 for p, g in zip(predictions, labels) if p != label and g == label)
            precision, recall = tp / (tp + fp), tp / (tp + fn)
            f1s.append(2 * precision * recall / (precision + recall))
            self.assertEqual(confusion[label, label], tp)
        self.assertAlmostEqual(metrics.macro_f1, float(np.mean(f1s)), places=12)
        self.assertAlmostEqual(metrics.accuracy, float(np.mean(predictions == labels)), places=12)

    def test_zero_model_evaluation(self):
        split = make_corpus(40, class_count=4, seed=5)
        metrics, loss = evaluate(LinearModel.zeros(4, SMALL_DIM), split)
        self.assertAlmostEqual(loss, np.log(4), places=12)
        self.assertAlmostEqual(metrics.accuracy, float(np.mean(split.labels == 0)), places=12)


class SelectBestTests(SimpleTestCase):

    def test_ties_go_to_the_earliest(self):
        class Entry:
            def __init__(self, accuracy):
                self.metrics = Metrics(accuracy=accuracy, macro_precision=0, macro_recall=0, macro_f1=0)

        self.assertEqual(select_best([Entry(0.5), Entry(0.7), Entry(0.7), Entry(0.6)]), 1)
        self.assertIsNone(select_best([]))


class TrainTests(SimpleTestCase):

    def test_checkpoints_and_best_model(self):
        train_set, validation_set, test_set = corpus_splits(1000, signal=(0.2, 1.0))
        config = TrainConfig(strategy='Random', epochs=5, dim=SMALL_DIM, seeds=(1,))
        report = train(train_set, validation_set, test_set, config, seed=1)
        self.assertEqual(len(report.checkpoints), 50)
        self.assertEqual(report.best_index, select_best(report.checkpoints))
        best_metrics, _ = evaluate(report.model, validation_set)
        self.assertEqual(best_metrics, report.best_checkpoint.metrics)
        self.assertEqual([entry.epoch for entry in report.checkpoints[:10]], [1] * 10)
        self.assertAlmostEqual(report.checkpoints[-1].fraction_seen, 1.0)
        metrics, loss = evaluate(report.model, test_set)
        self.assertEqual(report.test_metrics, metrics)
        self.assertEqual(report.test_loss, loss)
        self.assertEqual(len(list(progression_records(report))), 50)

    def test_easy_to_difficult_walks_the_ranking(self):
        train_set, validation_set, test_set = corpus_splits(100)
        scores = table_of(np.random.default_rng(4).random(100))
        consumed = {1: [], 2: []}
        config = TrainConfig(strategy='E2D', epochs=2, dim=SMALL_DIM)
        train(train_set, validation_set, test_set, config, seed=3, scores=scores,
              on_batch=lambda epoch, step, ids: consumed[epoch].extend(ids.tolist()))
        expected = rank_examples(scores, Direction.DESCENDING).order.tolist()
        self.assertEqual(consumed[1], expected)
        self.assertEqual(consumed[2], expected)

    def test_runs_are_reproducible(self):
        train_set, validation_set, test_set = corpus_splits(300, signal=(0.2, 1.0))
        config = TrainConfig(strategy='SME', epochs=2, dim=SMALL_DIM)
        first = train(train_set, validation_set, test_set, config, seed=66)
        second = train(train_set, validation_set, test_set, config, seed=66)
        self.assertEqual(RunReportSerializer(first).data, RunReportSerializer(second).data)
        self.assertEqual(first.model, second.model)

    def test_mean_epoch_loss_decreases(self):
        train_set, validation_set, test_set = corpus_splits(1000)
        config = TrainConfig(epochs=5, dim=SMALL_DIM)
        report = train(train_set, validation_set, test_set, config, seed=66)
        self.assertEqual(len(report.epoch_losses), 5)
        for earlier, later in zip(report.epoch_losses, report.epoch_losses[1:]):
            self.assertLess(later, earlier)

    def test_every_strategy_fits_separable_data(self):
        train_set, validation_set, test_set = corpus_splits(2000)
        for strategy in ('Random', 'Length', 'E2D', 'D2E', 'SME', 'SMD', 'PME', 'PMD'):
            config = TrainConfig(strategy=strategy, epochs=20, dim=2 ** 12)
            report = train(train_set, validation_set, test_set, config, seed=66)
            metrics, _ = evaluate(report.model, train_set)
            self.assertGreaterEqual(metrics.accuracy, 0.99, strategy)

    def test_rescoring_tracks_growing_confidence(self):
        train_set, validation_set, test_set = corpus_splits(5000, signal=(0.0, 1.0), noise=0.1)
        config = TrainConfig(strategy='Random', epochs=1, dim=2 ** 12, rescore=True)
        report = train(train_set, validation_set, test_set, config, seed=66)
        self.assertEqual([histogram.epoch_tag for histogram in report.histograms], [0, 1])
        self.assertTrue(all(histogram.total == 5000 for histogram in report.histograms))

        def mean_from_bins(histogram):
            centers = (histogram.bin_edges[:-1] + histogram.bin_edges[1:]) / 2
            return float(np.dot(centers, histogram.correct + histogram.incorrect) / histogram.total)

        initial, trained = report.histograms
        rho, filled = error_rate_correlation(initial)
        self.assertGreaterEqual(filled, 10)
        self.assertLess(rho, -0.5)
        self.assertLess(error_rate_correlation(trained)[0], 0)
        self.assertGreater(mean_from_bins(trained), mean_from_bins(initial) + 0.05)

    def test_rescoring_zero_snapshot(self):
        dataset = make_corpus(30, seed=7)
        reports = rescore_analysis([LinearModel.zeros(2, SMALL_DIM)], dataset)
        self.assertEqual(len(reports), 1)
        self.assertEqual(reports[0].epoch_tag, 1)
        self.assertEqual(int(reports[0].correct[0] + reports[0].incorrect[0]), 30)
        with self.assertRaises(CheckpointFormatError):
            rescore_analysis([], dataset)


class FewShotTests(SimpleTestCase):

    def setUp(self):
        size = 200
        self.scores = np.random.default_rng(11).permutation(size) / size
        self.table = table_of(self.scores)
        self.dataset = Dataset(
            examples=[Example(id=i, text=' '.join(['w'] * (size - i)), label=i % 2) for i in range(size)],
            label_names=['neg', 'pos'],
        )

    def select(self, strategy, k, seed=0, table=None):
        table = table if table is not None else self.table
        dataset = self.dataset if table is self.table else Dataset(
            examples=[Example(id=i, text='w', label=i % 2) for i in range(len(table))],
            label_names=['neg', 'pos'],
        )
        return few_shot_select(strategy, table, dataset, k, epoch_rng(seed, 0))

    def test_deterministic_selections(self):
        self.assertEqual(self.select('E2D', 64), sorted(np.argsort(-self.scores)[:64].tolist()))
        self.assertEqual(self.select('D2E', 64), sorted(np.argsort(self.scores)[:64].tolist()))
        self.assertEqual(self.select('Length', 64), list(range(136, 200)))

    def test_small_examples(self):
        table = table_of([0.1, 0.9, 0.5])
        self.assertEqual(self.select('E2D', 2, table=table), [1, 2])
        self.assertEqual(self.select('D2E', 2, table=table), [0, 2])

    def test_drawn_selections_are_seeded(self):
        for strategy in ('Random', 'SME', 'SMD', 'PME', 'PMD'):
            first = self.select(strategy, 64, seed=5)
            self.assertEqual(first, self.select(strategy, 64, seed=5))
            self.assertEqual(len(set(first)), 64)

    def test_whole_set(self):
        for strategy in ('SME', 'PME', 'Random'):
            self.assertEqual(self.select(strategy, 200), list(range(200)))

    def test_size_bounds(self):
        for k in (0, 201):
            with self.assertRaises(FewShotSizeError):
                self.select('SME', k)

    def test_label_counts(self):
        self.assertEqual(selection_label_counts(self.dataset, [0, 1, 2, 4]).tolist(), [3, 1])

    def test_full_selection_matches_full_training(self):
        train_set, validation_set, test_set = corpus_splits(120)
        scores = table_of(np.random.default_rng(2).random(120))
        config = TrainConfig(strategy='E2D', epochs=2, dim=SMALL_DIM)
        few = few_shot_run(train_set, validation_set, test_set, config, seed=9, k=120, scores=scores)
        full = train(train_set, validation_set, test_set, config, seed=9, scores=scores)
        self.assertEqual(few.selected_ids, list(range(120)))
        few_data, full_data = dict(RunReportSerializer(few).data), dict(RunReportSerializer(full).data)
        few_data.pop('selected_ids')
        full_data.pop('selected_ids')
        self.assertEqual(few_data, full_data)


class AggregateTests(SimpleTestCase):

    def test_identical_runs(self):
        rows = aggregate_runs([report_with('Random', seed, 0.75) for seed in (66, 88, 99)])
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0].seeds, (66, 88, 99))
        self.assertEqual(rows[0].means['accuracy'], 0.75)

    def test_means_and_order(self):
        reports = [report_with('E2D', 1, 0.8), report_with('E2D', 2, 1.0),
                   report_with('Random', 1, 0.5), report_with('Random', 2, 0.5)]
        rows = aggregate_runs(reports)
        self.assertEqual([row.strategy.value for row in rows], ['Random', 'E2D'])
        self.assertAlmostEqual(rows[1].means['accuracy'], 0.9, places=12)

    def test_inconsistent_seeds(self):
        with self.assertRaises(InconsistentSeeds):
            aggregate_runs([report_with('Random', 1, 0.5), report_with('Random', 2, 0.5),
                            report_with('E2D', 1, 0.5)])

    def test_failed_cells_leave_gaps(self):
        rows = aggregate_runs([report_with('Random', 1, 0.5), report_with('Random', 2, 0.7),
                               report_with('E2D', 1, 0.9)],
                              failures=[('E2D', 2), ('PME', 1), ('PME', 2)])
        by_name = {row.strategy.value: row for row in rows}
        self.assertFalse(by_name['E2D'].complete)
        self.assertEqual(by_name['E2D'].means['accuracy'], 0.9)
        self.assertIsNone(by_name['PME'].means)
        records = {record['strategy']: record for record in summary_records(rows)}
        self.assertEqual(records['E2D']['failed_seeds'], '2')
        self.assertEqual(records['PME']['accuracy'], '-')
        table = format_table(rows)
        self.assertIn('E2D*', table)
        self.assertIn('PME*', table)
        self.assertTrue(table.splitlines()[-1].startswith('*'))
