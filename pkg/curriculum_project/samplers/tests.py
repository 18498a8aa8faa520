import itertools
from collections import Counter

import numpy as np
from django.test import SimpleTestCase

from corpus.models import Dataset, Example, TokenLengthIndex
from corpus.tokenizer import token_lengths
from scoring.difficulty import rank_examples
from scoring.models import Direction, ScoreTable

from .exceptions import DirectionMismatch, MissingScores, PartitionMismatch, UnknownStrategy, ZeroWeights
from .models import PartitionTag, Strategy, WeightLaw
from .plans import (
    epoch_rng,
    length_order,
    make_plan,
    partition_sizes,
    partitioned_plan,
    sequential_plan,
)
from .serializers import plan_records
from .weights import rank_weights, weighted_permutation


def table_of(scores):
    scores = np.asarray(scores, dtype=np.float64)
    probs = np.column_stack([(1 + scores) / 2, (1 - scores) / 2])
    return ScoreTable(scores=scores, probs=probs)


def word_dataset(size):
    return Dataset(
        examples=[Example(id=i, text=' '.join(['w'] * (1 + i % 7)), label=i % 2) for i in range(size)],
        label_names=['neg', 'pos'],
    )


class StrategyTests(SimpleTestCase):

    def test_parse(self):
        self.assertIs(Strategy.parse('PME'), Strategy.PME)
        self.assertTrue(Strategy.parse('Random').is_baseline)
        self.assertFalse(Strategy.parse('E2D').is_baseline)

    def test_unknown_name_lists_all_strategies(self):
        with self.assertRaises(UnknownStrategy) as caught:
            Strategy.parse('Easy')
        for name in Strategy.names():
            self.assertIn(name, str(caught.exception))
        self.assertEqual(len(Strategy.names()), 8)


class RankWeightTests(SimpleTestCase):

    def test_examples(self):
        square = rank_weights(3)
        self.assertEqual(square.weights.tolist(), [1.0, 4.0, 9.0])
        np.testing.assert_allclose(square.probabilities, [1 / 14, 4 / 14, 9 / 14])
        self.assertEqual(rank_weights(3, WeightLaw.COMPLEMENT_SQUARE).weights.tolist(), [4.0, 1.0, 0.0])
        self.assertEqual(rank_weights(1).weights.tolist(), [1.0])

    def test_single_rank_complement_has_no_mass(self):
        with self.assertRaises(ZeroWeights):
            rank_weights(1, WeightLaw.COMPLEMENT_SQUARE).probabilities

    def test_for_ids_follows_ranks(self):
        ranked = rank_examples(table_of([0.9, 0.1, 0.5]), Direction.ASCENDING)
        self.assertEqual(rank_weights(3).for_ids(ranked).tolist(), [9.0, 1.0, 4.0])


class WeightedPermutationTests(SimpleTestCase):

    def test_zero_weight_goes_last(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            self.assertEqual(weighted_permutation([0, 1], rng).tolist(), [1, 0])

    def test_all_zero_weights(self):
        with self.assertRaises(ZeroWeights):
            weighted_permutation([0, 0], np.random.default_rng(0))

    def test_equal_weights_are_uniform(self):
        rng = np.random.default_rng(1)
        trials = 60000
        counts = Counter(tuple(weighted_permutation([1, 1, 1], rng).tolist()) for _ in range(trials))
        self.assertEqual(set(counts), set(itertools.permutations(range(3))))
        for count in counts.values():
            self.assertLess(abs(count / trials - 1 / 6), 0.01)

    def test_first_draw_follows_square_law(self):
        rng = np.random.default_rng(2)
        trials = 100000
        weights = rank_weights(10).weights
        firsts = np.array([weighted_permutation(weights, rng)[0] for _ in range(trials)])
        empirical = np.bincount(firsts, minlength=10) / trials
        expected = np.arange(1, 11) ** 2 / 385
        self.assertLess(np.max(np.abs(empirical - expected)), 0.01)

    def test_first_draw_follows_complement_law(self):
        rng = np.random.default_rng(3)
        trials = 100000
        weights = rank_weights(10, WeightLaw.COMPLEMENT_SQUARE).weights
        orders = [weighted_permutation(weights, rng) for _ in range(trials)]
        firsts = np.array([order[0] for order in orders])
        empirical = np.bincount(firsts, minlength=10) / trials
        expected = (10 - np.arange(1, 11)) ** 2 / 285
        self.assertLess(np.max(np.abs(empirical - expected)), 0.01)
        self.assertTrue(all(order[-1] == 9 for order in orders))


class PlanTests(SimpleTestCase):

    def plan(self, strategy, size, seed, table=None):
        dataset = word_dataset(size)
        table = table if table is not None else table_of(np.random.default_rng(size).random(size))
        return make_plan(strategy, table, dataset, epoch_rng(seed, 1), length_index=token_lengths(dataset),
                         seed=seed)

    def test_every_plan_is_a_permutation(self):
        for strategy in Strategy:
            for size in (1, 2, 16, 17, 100):
                for seed in range(25):
                    plan = self.plan(strategy, size, seed)
                    self.assertTrue(plan.is_permutation(), (strategy, size, seed))
                    self.assertEqual(len(plan.provenance), size)
                    if strategy in (Strategy.PME, Strategy.PMD):
                        batches = list(plan.batches())
                        tags = iter(plan.provenance)
                        for batch in batches:
                            counts = Counter(next(tags) for _ in batch)
                            if len(batch) == 16:
                                self.assertEqual(counts[PartitionTag.B1], 9)
                                self.assertEqual(counts[PartitionTag.B2], 7)

    def test_partition_sizes(self):
        self.assertEqual(partition_sizes(16, 16, (9, 7)), (9, 7))
        self.assertEqual(partition_sizes(4, 16, (9, 7)), (3, 1))
        self.assertEqual(partition_sizes(1, 16, (9, 7)), (1, 0))

    def test_ragged_last_batch(self):
        plan = self.plan(Strategy.PME, 20, seed=4)
        self.assertEqual([tag.value for tag in plan.provenance[16:]], ['B1', 'B1', 'B1', 'B2'])

    def test_partition_must_sum_to_batch_size(self):
        ranked = rank_examples(table_of([0.1, 0.2]), Direction.ASCENDING)
        with self.assertRaises(PartitionMismatch):
            partitioned_plan(ranked, 'PME', np.random.default_rng(0), split=(8, 7))

    def test_pme_first_draw_favors_easy_half(self):
        scores = np.linspace(0.05, 0.95, 10)
        table = table_of(scores)
        dataset = word_dataset(10)
        trials = 20000
        easy = 0
        for seed in range(trials):
            plan = make_plan('PME', table, dataset, epoch_rng(seed, 1))
            self.assertIs(plan.provenance[0], PartitionTag.B1)
            easy += scores[plan.order[0]] > 0.5
        self.assertLess(abs(easy / trials - 330 / 385), 0.01)

    def test_easy_to_difficult_walks_descending_scores(self):
        scores = np.random.default_rng(5).random(50)
        plan = self.plan(Strategy.E2D, 50, seed=0, table=table_of(scores))
        self.assertTrue(np.all(np.diff(scores[plan.order]) <= 0))

    def test_mirrored_strategies(self):
        scores = np.random.default_rng(6).permutation(np.arange(40)) / 40
        table, mirrored = table_of(scores), table_of(1 - scores)
        dataset = word_dataset(40)
        for strategy, mirror in (('PMD', 'PME'), ('SMD', 'SME'), ('E2D', 'D2E')):
            for seed in range(5):
                plan = make_plan(strategy, table, dataset, epoch_rng(seed, 1))
                other = make_plan(mirror, mirrored, dataset, epoch_rng(seed, 1))
                self.assertEqual(plan.order.tolist(), other.order.tolist(), (strategy, seed))
                self.assertEqual(plan.provenance, other.provenance)

    def test_length_order(self):
        self.assertEqual(length_order(TokenLengthIndex(lengths=np.array([5, 2, 9]))).tolist(), [1, 0, 2])
        self.assertEqual(length_order(TokenLengthIndex(lengths=np.array([3, 3, 1]))).tolist(), [2, 0, 1])

    def test_missing_scores(self):
        dataset = word_dataset(5)
        with self.assertRaises(MissingScores):
            make_plan('SME', None, dataset, epoch_rng(0, 1))
        self.assertTrue(make_plan('Random', None, dataset, epoch_rng(0, 1)).is_permutation())

    def test_direction_mismatch(self):
        ranked = rank_examples(table_of([0.3, 0.6]), Direction.ASCENDING)
        with self.assertRaises(DirectionMismatch):
            sequential_plan(ranked, 'E2D')

    def test_seed_and_epoch_determinism(self):
        first = self.plan(Strategy.SME, 100, seed=7)
        second = self.plan(Strategy.SME, 100, seed=7)
        self.assertEqual(first.order.tolist(), second.order.tolist())
        dataset = word_dataset(100)
        later = make_plan('Random', None, dataset, epoch_rng(7, 2))
        earlier = make_plan('Random', None, dataset, epoch_rng(7, 1))
        self.assertNotEqual(later.order.tolist(), earlier.order.tolist())

    def test_plan_records(self):
        plan = self.plan(Strategy.PME, 3, seed=0)
        rows = list(plan_records(plan))
        self.assertEqual([row['position'] for row in rows], [0, 1, 2])
        self.assertEqual(sorted(row['example_id'] for row in rows), [0, 1, 2])
        self.assertEqual({row['epoch'] for row in rows}, {1})
        self.assertTrue(all(row['partition_tag'] in ('B1', 'B2') for row in rows))
