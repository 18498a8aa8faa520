"""Evaluation cadence inside an epoch, in fractions of the training examples seen."""

import math
from typing import NamedTuple


class Checkpoint(NamedTuple):
    mark: int   # examples seen in the epoch
    step: int   # 1-based batch after which the mark has been crossed


def checkpoint_steps(size, batch_size, fraction):
    """Marks ceil(k * fraction * N), k = 1..ceil(1/fraction), and the batches that cross them.

    Duplicate marks (tiny N) collapse; the last mark is always N. Several marks
    may share a step when a batch spans them.
    """
    if size < 1:
        raise ValueError(f'need at least one example per epoch, got {size}')
    count = math.ceil(1 / fraction - 1e-9)
    marks = []
    for k in range(1, count + 1):
        mark = min(size, math.ceil(k * fraction * size - 1e-9))
        if not marks or mark != marks[-1]:
            marks.append(mark)
    if marks[-1] != size:
        marks.append(size)
    return [Checkpoint(mark=mark, step=math.ceil(mark / batch_size)) for mark in marks]
