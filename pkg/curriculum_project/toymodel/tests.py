import json
import math
import tempfile
from decimal import Decimal, localcontext
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from scipy import sparse

from corpus.models import Example
from corpus.synthetic import make_corpus
from scoring.difficulty import score_dataset

from .checkpoints import load_model, save_model
from .exceptions import CheckpointFormatError, FeatureIndexError, NonFiniteGradient
from .features import featurize, featurize_dataset
from .linear import forward, forward_matrix, loss_and_grad, loss_and_grad_matrix, predict, softmax
from .models import FeatureVector, Gradients, LinearModel, OptimizerConfig, OptimizerState
from .optim import optimizer_step
from .probe import build_probe_scorer

DIM = 64


def random_model(rng, class_count, dim):
    return LinearModel(weights=rng.normal(size=(class_count, dim)), bias=rng.normal(size=class_count))


class FeaturizeTests(SimpleTestCase):

    def test_counts_and_determinism(self):
        example = Example(id=0, text='a a b', label=0)
        features = featurize(example, 2 ** 16)
        self.assertEqual(sorted(features.values.tolist()), [1.0, 2.0])
        self.assertTrue(np.all(np.diff(features.indices) > 0))
        self.assertEqual(featurize(example, 2 ** 16), features)

    def test_pair_namespace(self):
        features = featurize(Example(id=0, text='a', label=0, text_pair='a'), 2 ** 16)
        self.assertEqual(len(features), 2)

    def test_dimension_must_be_power_of_two(self):
        with self.assertRaises(ValueError):
            featurize(Example(id=0, text='a', label=0), 100)

    def test_dataset_matrix_rows(self):
        dataset = make_corpus(10, seed=1)
        matrix = featurize_dataset(dataset, DIM)
        self.assertEqual(matrix.shape, (10, DIM))
        for example in dataset:
            row = matrix[example.id]
            vector = featurize(example, DIM)
            self.assertEqual(row.indices.tolist(), vector.indices.tolist())
            self.assertEqual(row.data.tolist(), vector.values.tolist())


class ForwardTests(SimpleTestCase):

    def test_zero_model_and_single_feature(self):
        features = FeatureVector(indices=np.array([3]), values=np.array([2.0]))
        self.assertEqual(forward(LinearModel.zeros(3, 8), features).tolist(), [0.0, 0.0, 0.0])
        model = LinearModel.zeros(2, 8)
        model.weights[1, 3] = 1.5
        model.bias[1] = 0.25
        self.assertEqual(forward(model, features).tolist(), [0.0, 3.25])

    def test_dense_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            model = random_model(rng, 3, DIM)
            indices = np.sort(rng.choice(DIM, size=5, replace=False))
            features = FeatureVector(indices=indices, values=rng.integers(1, 4, size=5).astype(np.float64))
            dense = np.zeros(DIM)
            dense[indices] = features.values
            np.testing.assert_allclose(forward(model, features), model.weights @ dense + model.bias,
                                       rtol=1e-12, atol=1e-12)

    def test_index_outside_dimension(self):
        with self.assertRaises(FeatureIndexError):
            forward(LinearModel.zeros(2, 8), FeatureVector(indices=np.array([9]), values=np.array([1.0])))


class SoftmaxTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(softmax([0.0, 0.0]).probs.tolist(), [0.5, 0.5])
        large = softmax([1000.0, 1000.0, 1000.0]).probs
        np.testing.assert_allclose(large, [1 / 3] * 3, rtol=1e-15)

    def test_high_precision_oracle(self):
        with localcontext() as context:
            context.prec = 50
            exps = [Decimal(value).exp() for value in (1, 2, 3)]
            total = sum(exps)
            oracle = [float(value / total) for value in exps]
        np.testing.assert_allclose(softmax([1.0, 2.0, 3.0]).probs, oracle, rtol=0, atol=1e-12)


class LossAndGradTests(SimpleTestCase):

    def test_zero_model_loss_is_ln2(self):
        batch = [(featurize(Example(id=0, text='x y', label=0), DIM), 1)]
        loss, _ = loss_and_grad(LinearModel.zeros(2, DIM), batch)
        self.assertAlmostEqual(loss, math.log(2), places=12)

    def test_confident_model_loss_vanishes(self):
        features = FeatureVector(indices=np.array([1]), values=np.array([1.0]))
        model = LinearModel.zeros(2, 8)
        model.weights[0, 1] = 50.0
        loss, _ = loss_and_grad(model, [(features, 0)])
        self.assertLess(loss, 1e-20)

    def test_finite_difference_gradient(self):
        rng = np.random.default_rng(12)
        epsilon = 1e-5
        for _ in range(50):
            class_count = int(rng.integers(2, 5))
            dim = 8
            rows = int(rng.integers(1, 5))
            dense = rng.integers(0, 3, size=(rows, dim)).astype(np.float64)
            matrix = sparse.csr_matrix(dense)
            labels = rng.integers(0, class_count, size=rows)
            model = random_model(rng, class_count, dim)
            _, grads = loss_and_grad_matrix(model, matrix, labels)

            worst = 0.0
            for name in ('weights', 'bias'):
                param = getattr(model, name)
                analytic = getattr(grads, name)
                for index in np.ndindex(param.shape):
                    original = param[index]
                    param[index] = original + epsilon
                    upper, _ = loss_and_grad_matrix(model, matrix, labels)
                    param[index] = original - epsilon
                    lower, _ = loss_and_grad_matrix(model, matrix, labels)
                    param[index] = original
                    numeric = (upper - lower) / (2 * epsilon)
                    scale = max(abs(numeric), abs(analytic[index]), 1e-6)
                    worst = max(worst, abs(numeric - analytic[index]) / scale)
            self.assertLess(worst, 1e-4)


class OptimizerTests(SimpleTestCase):

    def scalar_model(self, value):
        return LinearModel(weights=np.array([[value]]), bias=np.array([0.0]))

    def test_sgd_step(self):
        model = self.scalar_model(3.0)
        state = OptimizerState.create(OptimizerConfig(kind='sgd', lr=1.0, weight_decay=0.0), 100, model)
        optimizer_step(model, Gradients(weights=np.array([[1.0]]), bias=np.array([0.0])), state)
        self.assertAlmostEqual(model.weights[0, 0], 2.0, places=9)
        self.assertEqual(state.step, 1)

    def test_adamw_first_step_magnitude(self):
        model = self.scalar_model(0.0)
        state = OptimizerState.create(OptimizerConfig(lr=0.01, weight_decay=0.0), 10, model)
        optimizer_step(model, Gradients(weights=np.array([[0.3]]), bias=np.array([0.3])), state)
        self.assertAlmostEqual(model.weights[0, 0], -0.01, places=6)
        self.assertAlmostEqual(model.bias[0], -0.01, places=6)

    def test_decoupled_weight_decay_skips_bias(self):
        model = LinearModel(weights=np.array([[1.0]]), bias=np.array([1.0]))
        state = OptimizerState.create(OptimizerConfig(lr=0.1, weight_decay=0.5), 10, model)
        optimizer_step(model, Gradients(weights=np.array([[0.0]]), bias=np.array([0.0])), state)
        self.assertAlmostEqual(model.weights[0, 0], 0.95, places=12)
        self.assertEqual(model.bias[0], 1.0)

    def test_schedule_endpoint_gives_zero_update(self):
        model = self.scalar_model(1.0)
        state = OptimizerState.create(OptimizerConfig(kind='sgd', lr=0.5), 4, model)
        self.assertEqual([state.lr_at(t) for t in range(5)], [0.5, 0.375, 0.25, 0.125, 0.0])
        state.step = 4
        optimizer_step(model, Gradients(weights=np.array([[7.0]]), bias=np.array([7.0])), state)
        self.assertEqual(model.weights[0, 0], 1.0)
        self.assertEqual(state.step, 5)

    def test_default_learning_rate_per_optimizer(self):
        self.assertEqual(OptimizerConfig().lr, 0.01)
        self.assertEqual(OptimizerConfig(kind='sgd').lr, 0.1)
        self.assertEqual(OptimizerConfig(kind='sgd', lr=0.3).lr, 0.3)

    def test_non_finite_gradient_aborts(self):
        model = self.scalar_model(1.0)
        state = OptimizerState.create(OptimizerConfig(), 4, model)
        with self.assertRaises(NonFiniteGradient):
            optimizer_step(model, Gradients(weights=np.array([[np.nan]]), bias=np.array([0.0])), state)
        self.assertEqual(state.step, 0)
        self.assertTrue(model.is_finite())


class PredictTests(SimpleTestCase):

    def test_zero_model_picks_first_class(self):
        label, dist = predict(LinearModel.zeros(3, DIM), Example(id=0, text='anything', label=2))
        self.assertEqual(label, 0)
        np.testing.assert_allclose(dist.probs, [1 / 3] * 3)

    def test_matches_argmax_of_forward(self):
        rng = np.random.default_rng(6)
        dataset = make_corpus(100, class_count=4, seed=6)
        model = random_model(rng, 4, DIM)
        logits = forward_matrix(model, featurize_dataset(dataset, DIM))
        for example in dataset:
            label, _ = predict(model, example)
            self.assertEqual(label, int(np.argmax(logits[example.id])))


class CheckpointTests(SimpleTestCase):

    def test_save_load_is_exact(self):
        rng = np.random.default_rng(9)
        model = LinearModel.zeros(3, DIM)
        model.weights[:, [2, 17, 40]] = rng.normal(size=(3, 3))
        model.bias[:] = rng.normal(size=3)
        state = OptimizerState.create(OptimizerConfig(), 20, model)
        optimizer_step(model, Gradients(weights=rng.normal(size=(3, DIM)), bias=rng.normal(size=3)), state)
        with tempfile.TemporaryDirectory() as tmp:
            path = save_model(model, Path(tmp) / 'model.json', state=state)
            loaded, loaded_state = load_model(path)
        self.assertEqual(loaded, model)
        self.assertEqual(loaded_state, state)

    def test_manifest_reference_is_ignored_on_load(self):
        model = LinearModel.zeros(2, DIM)
        model.bias[:] = [0.5, -0.5]
        with tempfile.TemporaryDirectory() as tmp:
            path = save_model(model, Path(tmp) / 'model.json', manifest='manifest.json')
            self.assertEqual(json.loads(path.read_text(encoding='utf-8'))['manifest'], 'manifest.json')
            loaded, state = load_model(path)
        self.assertEqual(loaded, model)
        self.assertIsNone(state)

    def test_rejects_foreign_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'other.json'
            path.write_text('{"format": "other", "version": 1}', encoding='utf-8')
            with self.assertRaises(CheckpointFormatError):
                load_model(path)


class ProbeTests(SimpleTestCase):

    def test_untrained_probe_scores_zero(self):
        dataset = make_corpus(40, seed=2)
        provider = build_probe_scorer(dataset, probe_fraction=0.5, probe_epochs=0, seed=1, dim=DIM)
        table = score_dataset(provider, dataset)
        self.assertTrue(np.all(table.scores == 0.0))

    def test_probe_scores_are_spread(self):
        dataset = make_corpus(400, signal=(0.3, 1.0), seed=3)
        provider = build_probe_scorer(dataset, probe_fraction=0.25, probe_epochs=2, seed=1, dim=2 ** 12)
        table = score_dataset(provider, dataset)
        self.assertGreater(np.var(table.scores), 0.0)

    def test_long_probe_on_separable_data_is_confident(self):
        dataset = make_corpus(200, seed=4)
        provider = build_probe_scorer(dataset, probe_fraction=1, probe_epochs=20, seed=1, dim=2 ** 12,
                                      optimizer=OptimizerConfig(lr=0.05))
        table = score_dataset(provider, dataset)
        self.assertGreater(np.mean(table.scores > 0.9), 0.9)

    def test_probe_is_seed_deterministic(self):
        dataset = make_corpus(100, signal=(0.3, 1.0), seed=5)
        first = score_dataset(build_probe_scorer(dataset, seed=8, dim=DIM), dataset)
        second = score_dataset(build_probe_scorer(dataset, seed=8, dim=DIM), dataset)
        np.testing.assert_array_equal(first.scores, second.scores)
