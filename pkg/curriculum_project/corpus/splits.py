"""Stratified train/validation(/test) splitting that keeps the label distribution."""

import logging
import math

import numpy as np

from .exceptions import SplitError
from .models import SplitTag

logger = logging.getLogger(__name__)

SPLIT_TAGS = (SplitTag.TRAIN, SplitTag.VALIDATION, SplitTag.TEST)


def _allocate(count, fractions):
    """Largest-remainder allocation of `count` items; every split gets at least one."""
    exact = [count * fraction for fraction in fractions]
    sizes = [math.floor(value) for value in exact]
    remainders = sorted(range(len(fractions)), key=lambda j: (-(exact[j] - sizes[j]), j))
    for j in remainders[:count - sum(sizes)]:
        sizes[j] += 1
    for j, size in enumerate(sizes):
        if size == 0:
            donor = max(range(len(sizes)), key=lambda k: (sizes[k], -k))
            sizes[donor] -= 1
            sizes[j] = 1
    return sizes


def stratified_split_ids(dataset, fractions, seed):
    """Parent ids of each split, sorted. The splits are disjoint and cover the dataset."""
    fractions = [float(fraction) for fraction in fractions]
    if len(fractions) < 2 or len(fractions) > len(SPLIT_TAGS):
        raise SplitError(detail=f'expected 2 or 3 fractions, got {len(fractions)}')
    if any(fraction <= 0 for fraction in fractions):
        raise SplitError(detail=f'every fraction must be positive: {fractions}')
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise SplitError(detail=f'fractions must sum to 1, got {sum(fractions)!r}')

    rng = np.random.default_rng(seed)
    labels = dataset.labels
    splits = [[] for _ in fractions]
    for label in range(dataset.class_count):
        members = np.flatnonzero(labels == label)
        if len(members) == 0:
            continue
        if len(members) < len(fractions):
            raise SplitError(
                detail=f'class {dataset.label_names[label]!r} has {len(members)} examples, '
                       f'too few to stratify into {len(fractions)} splits'
            )
        members = rng.permutation(members)
        start = 0
        for j, size in enumerate(_allocate(len(members), fractions)):
            splits[j].extend(int(i) for i in members[start:start + size])
            start += size
    return [sorted(ids) for ids in splits]


def split_by_ids(dataset, split_ids):
    """Train/validation(/test) datasets for parent id lists, each renumbered densely in parent order."""
    parts = [dataset.subset(ids, split_tag=tag) for ids, tag in zip(split_ids, SPLIT_TAGS)]
    logger.info('Split %d examples into %s', len(dataset), ' / '.join(str(len(part)) for part in parts))
    return parts


def stratified_split(dataset, fractions, seed):
    return split_by_ids(dataset, stratified_split_ids(dataset, fractions, seed))
