"""Rank weight laws and weighted sampling without replacement.

Successive weighted draws without replacement are sampled as an exponential race:
item i gets the key E_i / w_i with E_i ~ Exp(1), and the items are taken in
increasing key order. The smallest key belongs to item i with probability
w_i / sum(w), and by memorylessness the same holds again among the remaining
items, which is exactly the successive-draw law. Zero-weight items get an
infinite key and are therefore placed last, in ascending id order.
"""

import numpy as np

from .exceptions import ZeroWeights
from .models import RankWeights, WeightLaw


def rank_weights(size, law=WeightLaw.SQUARE):
    """square: w_n = n^2; complement_square: w_n = (N - n)^2, for ranks n = 1..N."""
    if size < 1:
        raise ValueError(f'rank weights need at least one rank, got N={size}')
    law = WeightLaw(law)
    ranks = np.arange(1, size + 1, dtype=np.float64)
    weights = ranks ** 2 if law is WeightLaw.SQUARE else (size - ranks) ** 2
    return RankWeights(weights=weights, law=law)


def race_keys(weights, rng):
    """Exponential race keys; always consumes exactly len(weights) draws from `rng`."""
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ZeroWeights(detail='sampling weights must be finite and non-negative')
    arrivals = rng.exponential(size=len(weights))
    keys = np.full(len(weights), np.inf)
    positive = weights > 0
    keys[positive] = arrivals[positive] / weights[positive]
    return keys


def race_order(keys):
    """Ids by increasing key, ties (the infinite keys) by ascending id."""
    return np.lexsort((np.arange(len(keys)), keys))


def weighted_permutation(weights, rng):
    """Random permutation of ids 0..N-1 distributed as successive weighted draws without replacement."""
    weights = np.asarray(weights, dtype=np.float64)
    if len(weights) == 0 or not np.any(weights > 0):
        raise ZeroWeights()
    return race_order(race_keys(weights, rng))


class WeightedPool:
    """Shared without-replacement pool drawn by several weight laws in any interleaving.

    Each law runs its own exponential race over the same ids; a draw takes the
    first id of that law's race order not yet taken by any law.
    """

    def __init__(self, laws, rng):
        self.orders = {name: race_order(race_keys(weights, rng)) for name, weights in laws.items()}
        self.cursors = {name: 0 for name in laws}
        size = len(next(iter(self.orders.values())))
        self.taken = np.zeros(size, dtype=bool)

    def __len__(self):
        return int((~self.taken).sum())

    def draw(self, name, count):
        order = self.orders[name]
        cursor = self.cursors[name]
        picked = []
        while len(picked) < count and cursor < len(order):
            candidate = order[cursor]
            cursor += 1
            if not self.taken[candidate]:
                self.taken[candidate] = True
                picked.append(int(candidate))
        self.cursors[name] = cursor
        return picked
