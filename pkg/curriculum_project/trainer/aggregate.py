"""Mean test metrics per strategy across seeds, as CSV rows or an aligned text table."""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from samplers.models import Strategy

from .exceptions import InconsistentSeeds

HEADLINE_FIELDS = ('accuracy', 'macro_f1', 'macro_precision', 'macro_recall')
GAP = '-'


@dataclass(frozen=True)
class SummaryRow:
    strategy: Strategy
    seeds: Tuple[int, ...]
    means: Optional[dict] = None
    failed_seeds: Tuple[int, ...] = field(default=())

    @property
    def complete(self):
        return not self.failed_seeds


def aggregate_runs(reports, failures=None):
    """One SummaryRow per strategy, in strategy order.

    failures: optional iterable of (strategy, seed) cells that did not finish; they
    still count towards the seed set but leave a gap marker in the row.
    """
    completed, failed = {}, {}
    for report in reports:
        completed.setdefault(Strategy.parse(report.strategy), {})[int(report.seed)] = report
    for strategy, seed in failures or ():
        failed.setdefault(Strategy.parse(strategy), set()).add(int(seed))

    strategies = [strategy for strategy in Strategy if strategy in completed or strategy in failed]
    seed_sets = {
        strategy: frozenset(completed.get(strategy, {})) | frozenset(failed.get(strategy, ()))
        for strategy in strategies
    }
    if len(set(seed_sets.values())) > 1:
        described = '; '.join(f'{strategy.value}: {sorted(seeds)}' for strategy, seeds in seed_sets.items())
        raise InconsistentSeeds(detail=f'strategies were run with different seeds ({described})')

    rows = []
    for strategy in strategies:
        runs = [completed[strategy][seed] for seed in sorted(completed.get(strategy, {}))]
        means = None
        if runs:
            means = {
                name: float(np.mean([getattr(run.test_metrics, name) for run in runs]))
                for name in HEADLINE_FIELDS
            }
        rows.append(SummaryRow(
            strategy=strategy,
            seeds=tuple(sorted(seed_sets[strategy])),
            means=means,
            failed_seeds=tuple(sorted(failed.get(strategy, ()))),
        ))
    return rows


def summary_records(rows):
    for row in rows:
        record = {'strategy': row.strategy.value, 'seeds': ' '.join(str(seed) for seed in row.seeds)}
        for name in HEADLINE_FIELDS:
            record[name] = GAP if row.means is None else row.means[name]
        record['failed_seeds'] = ' '.join(str(seed) for seed in row.failed_seeds)
        yield record


def format_table(rows):
    """Aligned text table; failed cells are flagged with '*'."""
    header = ['strategy'] + list(HEADLINE_FIELDS)
    lines = [header]
    for row in rows:
        name = row.strategy.value + ('' if row.complete else '*')
        cells = [GAP if row.means is None else f'{row.means[field_name]:.4f}' for field_name in HEADLINE_FIELDS]
        lines.append([name] + cells)
    widths = [max(len(line[column]) for line in lines) for column in range(len(header))]
    rendered = ['  '.join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip() for line in lines]
    if any(not row.complete for row in rows):
        rendered.append('* some seeds failed; means cover the completed runs only')
    return '\n'.join(rendered)
