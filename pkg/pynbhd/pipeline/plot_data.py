"""Plot-ready records of a critical report: `(N, D')` metric scatter rows and box-plot statistics."""
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np


class ScatterRow(NamedTuple):
    neighborhood_id: str
    metric: str
    value_n: float
    value_dprime: float


@dataclass(frozen=True)
class BoxStats(object):
    """Box-plot statistics of one series, quartiles by linear interpolation.

    Whiskers reach the most extreme values within 1.5 IQR of the box; values beyond are outliers.
    """
    series: str
    n: int
    q1: float
    median: float
    q3: float
    iqr: float
    whisker_low: float
    whisker_high: float
    outliers: Tuple[float, ...]


def box_stats(values, series=''):
    values = np.sort(np.asarray(values, dtype=np.float64))
    if values.size == 0:
        raise ValueError(f'series `{series}` has no values.')
    q1, median, q3 = np.percentile(values, [25.0, 50.0, 75.0])
    iqr = q3 - q1
    low, high = q1 - 1.5*iqr, q3 + 1.5*iqr
    inside = values[(values >= low) & (values <= high)]
    outliers = values[(values < low) | (values > high)]
    return BoxStats(series, int(values.size), float(q1), float(median), float(q3), float(iqr),
                    float(inside[0]), float(inside[-1]), tuple(float(v) for v in outliers))


def emit_plot_data(report):
    """Scatter rows (one per evaluated neighborhood with metrics and per metric) and box statistics per
    series `<metric>_N` / `<metric>_Dprime`.

    Metrics exist for critical neighborhoods (or all of them for a report evaluated with `full`).
    """
    evaluations = [e for e in report.evaluations if e.metrics_n is not None]
    rows = []
    for e in evaluations:
        for name in e.metrics_n.names:
            rows.append(ScatterRow(e.neighborhood.id, name, getattr(e.metrics_n, name),
                                   getattr(e.metrics_dprime, name)))
    boxes = []
    if evaluations:
        for name in evaluations[0].metrics_n.names:
            boxes.append(box_stats([getattr(e.metrics_n, name) for e in evaluations], f'{name}_N'))
            boxes.append(box_stats([getattr(e.metrics_dprime, name) for e in evaluations], f'{name}_Dprime'))
    return rows, boxes
