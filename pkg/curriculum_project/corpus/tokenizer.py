"""Whitespace tokenizer and the token-length index used by the Length baseline.

Lowercased, split on unicode whitespace, punctuation stripped from both ends of each
token. It is a monotone length proxy, not a subword tokenizer.
"""

import unicodedata

import numpy as np

from .models import TokenLengthIndex


def _is_punctuation(char):
    return unicodedata.category(char).startswith('P')


def _strip_punctuation(token):
    start, end = 0, len(token)
    while start < end and _is_punctuation(token[start]):
        start += 1
    while end > start and _is_punctuation(token[end - 1]):
        end -= 1
    return token[start:end]


def tokenize(text):
    """Return the token list of `text`; empty text gives an empty list."""
    if not text:
        return []
    tokens = (_strip_punctuation(raw) for raw in text.lower().split())
    return [token for token in tokens if token]


def example_tokens(example, max_tokens=None):
    """Tokens of text and pair, truncated to `max_tokens` in total (text first)."""
    text_tokens = tokenize(example.text)
    pair_tokens = tokenize(example.text_pair) if example.text_pair is not None else []
    if max_tokens is not None:
        text_tokens = text_tokens[:max_tokens]
        pair_tokens = pair_tokens[:max(0, max_tokens - len(text_tokens))]
    return text_tokens, pair_tokens


def token_lengths(dataset, max_tokens=None):
    """lengths[i] = |tokenize(text_i)| + |tokenize(text_pair_i)|."""
    lengths = np.zeros(len(dataset), dtype=np.int64)
    for position, example in enumerate(dataset):
        text_tokens, pair_tokens = example_tokens(example, max_tokens=max_tokens)
        lengths[position] = len(text_tokens) + len(pair_tokens)
    return TokenLengthIndex(lengths=lengths)
