"""Forward pass, softmax, cross-entropy gradient and prediction for the linear model."""

import numpy as np
from scipy import sparse

from scoring.models import ClassDistribution

from .exceptions import FeatureIndexError
from .features import featurize, stack
from .models import Gradients


def _check_indices(model, features):
    if len(features.indices) and (features.indices[0] < 0 or features.indices[-1] >= model.dim):
        raise FeatureIndexError(detail=f'feature index {int(features.indices[-1])} outside dimension {model.dim}')


def forward(model, features):
    """logits[c] = bias[c] + sum over features of weights[c, index] * value."""
    _check_indices(model, features)
    return model.bias + model.weights[:, features.indices] @ features.values


def forward_matrix(model, matrix):
    """Logits of every row of a CSR feature matrix, shape (rows, C)."""
    if matrix.shape[1] != model.dim:
        raise FeatureIndexError(detail=f'feature matrix has {matrix.shape[1]} columns, model has {model.dim}')
    return np.asarray(matrix @ model.weights.T) + model.bias


def softmax_rows(logits):
    """Row-wise softmax with the row maximum subtracted first."""
    logits = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    shifted = np.exp(logits - logits.max(axis=1, keepdims=True))
    return shifted / shifted.sum(axis=1, keepdims=True)


def softmax(logits):
    return ClassDistribution(softmax_rows(logits)[0])


def loss_and_grad_matrix(model, matrix, labels):
    """Mean cross-entropy over the rows of `matrix` and its gradient."""
    labels = np.asarray(labels, dtype=np.int64)
    size = len(labels)
    probs = softmax_rows(forward_matrix(model, matrix))
    gold = probs[np.arange(size), labels]
    loss = float(-np.mean(np.log(np.maximum(gold, np.finfo(np.float64).tiny))))

    delta = probs
    delta[np.arange(size), labels] -= 1.0
    delta /= size
    weights = np.asarray(sparse.csr_matrix(matrix).T @ delta).T
    return loss, Gradients(weights=weights, bias=delta.sum(axis=0))


def loss_and_grad(model, batch):
    """batch: non-empty list of (FeatureVector, label)."""
    if not batch:
        raise ValueError('loss_and_grad needs a non-empty batch')
    for features, _ in batch:
        _check_indices(model, features)
    matrix = stack([features for features, _ in batch], model.dim)
    return loss_and_grad_matrix(model, matrix, [label for _, label in batch])


def predict(model, example, max_tokens=None):
    """(argmax label, distribution); ties go to the lowest class index."""
    dist = softmax(forward(model, featurize(example, model.dim, max_tokens=max_tokens)))
    return dist.argmax, dist


def predict_matrix(model, matrix):
    probs = softmax_rows(forward_matrix(model, matrix))
    return np.argmax(probs, axis=1), probs
