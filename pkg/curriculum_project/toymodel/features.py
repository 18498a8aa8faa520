"""Hashed bag-of-words features.

Token hash: the first 8 bytes of BLAKE2b(namespace + token, UTF-8), read little-endian,
masked to the dimension. Text tokens use the namespace "p:", pair tokens "h:".
The hash is fixed and unseeded, so features are identical across processes.
"""

import hashlib
from collections import Counter
from functools import lru_cache

import numpy as np
from scipy import sparse

from corpus.tokenizer import example_tokens

from .models import FeatureVector, is_power_of_two

TEXT_NAMESPACE = 'p:'
PAIR_NAMESPACE = 'h:'


@lru_cache(maxsize=1 << 18)
def token_hash(key):
    """64-bit unsigned hash of a namespaced token."""
    digest = hashlib.blake2b(key.encode('utf-8'), digest_size=8).digest()
    return int.from_bytes(digest, 'little')


def featurize(example, dim, max_tokens=None):
    if not is_power_of_two(dim):
        raise ValueError(f'feature dimension must be a power of two, got {dim}')
    mask = dim - 1
    text_tokens, pair_tokens = example_tokens(example, max_tokens=max_tokens)
    counts = Counter(token_hash(TEXT_NAMESPACE + token) & mask for token in text_tokens)
    counts.update(token_hash(PAIR_NAMESPACE + token) & mask for token in pair_tokens)
    indices = np.array(sorted(counts), dtype=np.int64)
    values = np.array([counts[index] for index in indices], dtype=np.float64)
    return FeatureVector(indices=indices, values=values)


def stack(features, dim):
    """CSR matrix with one row per FeatureVector."""
    indptr = np.zeros(len(features) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(vector) for vector in features])
    if len(features):
        indices = np.concatenate([vector.indices for vector in features])
        data = np.concatenate([vector.values for vector in features])
    else:
        indices, data = np.zeros(0, dtype=np.int64), np.zeros(0)
    return sparse.csr_matrix((data, indices, indptr), shape=(len(features), dim))


def featurize_dataset(dataset, dim, max_tokens=None):
    """Feature rows of every example, indexed by example id."""
    return stack([featurize(example, dim, max_tokens=max_tokens) for example in dataset], dim)
