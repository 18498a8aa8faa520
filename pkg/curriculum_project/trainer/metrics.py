"""Accuracy and macro precision/recall/F1 from a confusion matrix."""

import numpy as np

from toymodel.features import featurize_dataset
from toymodel.linear import predict_matrix

from .exceptions import ClassCountMismatch, EmptySplit
from .models import ClassMetrics, Metrics


def confusion_matrix(predictions, labels, class_count):
    """counts[gold, predicted]."""
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    flat = np.bincount(labels * class_count + predictions, minlength=class_count * class_count)
    return flat.reshape(class_count, class_count)


def _ratio(numerator, denominator):
    return float(numerator / denominator) if denominator else 0.0


def compute_metrics(predictions, labels, class_count):
    if len(labels) == 0:
        raise EmptySplit()
    confusion = confusion_matrix(predictions, labels, class_count)
    true_positives = np.diag(confusion)
    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)

    per_class = []
    for label in range(class_count):
        precision = _ratio(true_positives[label], predicted[label])
        recall = _ratio(true_positives[label], support[label])
        f1 = _ratio(2 * precision * recall, precision + recall)
        per_class.append(ClassMetrics(precision=precision, recall=recall, f1=f1, support=int(support[label])))

    return Metrics(
        accuracy=_ratio(true_positives.sum(), len(labels)),
        macro_precision=float(np.mean([item.precision for item in per_class])),
        macro_recall=float(np.mean([item.recall for item in per_class])),
        macro_f1=float(np.mean([item.f1 for item in per_class])),
        per_class=tuple(per_class),
    )


def evaluate(model, split, matrix=None, max_tokens=None):
    """(Metrics, mean cross-entropy) of `model` on `split`; `matrix` is the split's cached features."""
    if len(split) == 0:
        raise EmptySplit(detail=f'{split.split_tag.value} split is empty')
    if model.class_count != split.class_count:
        raise ClassCountMismatch(
            detail=f'model has {model.class_count} classes, {split.split_tag.value} split has {split.class_count}'
        )
    if matrix is None:
        matrix = featurize_dataset(split, model.dim, max_tokens=max_tokens)
    labels = split.labels
    predictions, probs = predict_matrix(model, matrix)
    gold = probs[np.arange(len(labels)), labels]
    loss = float(-np.mean(np.log(np.maximum(gold, np.finfo(np.float64).tiny))))
    return compute_metrics(predictions, labels, split.class_count), loss
