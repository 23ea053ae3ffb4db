from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Tuple


@dataclass(frozen=True)
class OverlapReport(object):
    """Distribution of critical neighborhoods between several models evaluated on the same neighborhoods.

    The union of all critical ids is partitioned by the number of models flagging each id, so that all
    fractions sum to 1 (or are all 0 for an empty union).

    Attributes
    ----------
    model_names  : `tuple`
                   names of the compared models.
    n_union      : `int`
                   size of the union of critical ids.
    counts       : `dict`
                   number of ids flagged by exactly `m` models, for `m` in `1..len(model_names)`.
    ids          : `dict`
                   the ids flagged by exactly `m` models.
    n_critical   : `tuple`
                   number of critical ids of each model.
    """
    model_names: Tuple[str, ...]
    n_union: int
    counts: Dict[int, int]
    ids: Dict[int, FrozenSet[str]]
    n_critical: Tuple[int, ...]

    def fraction(self, multiplicity):
        return self.counts.get(multiplicity, 0)/self.n_union if self.n_union > 0 else 0.0

    @staticmethod
    def field_name(multiplicity, n_models):
        if multiplicity == 1:
            return 'unique_1'
        if multiplicity == n_models:
            return f'common_all_{n_models}'
        return f'common_exactly_{multiplicity}'

    def fractions(self):
        """Named fractions, e.g. `unique_1`, `common_exactly_2` and `common_all_3` for three models."""
        n_models = len(self.model_names)
        return {self.field_name(m, n_models): self.fraction(m) for m in range(1, n_models + 1)}

    @property
    def unique_1(self):
        return self.fraction(1)


def overlap_analysis(reports):
    """Partition the union of critical neighborhood ids of >= 2 `CriticalReport`s by multiplicity."""
    reports = list(reports)
    if len(reports) < 2:
        raise ValueError(f'overlap analysis needs at least 2 reports (got {len(reports)}).')
    universe = frozenset(reports[0].neighborhood_ids)
    for report in reports[1:]:
        if frozenset(report.neighborhood_ids) != universe:
            raise ValueError(f'reports of `{reports[0].model_name}` and `{report.model_name}` were evaluated on '
                             'different neighborhoods (same similarity settings and split are needed).')
    multiplicity = Counter(i for report in reports for i in report.critical_ids())
    counts = Counter(multiplicity.values())
    ids = {m: frozenset(i for i, c in multiplicity.items() if c == m) for m in range(1, len(reports) + 1)}
    return OverlapReport(tuple(report.model_name for report in reports), len(multiplicity),
                         {m: counts.get(m, 0) for m in range(1, len(reports) + 1)}, ids,
                         tuple(report.n_critical for report in reports))
