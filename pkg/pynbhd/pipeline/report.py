import json
import math
import os
from enum import Enum

import numpy as np
import pandas as pd

from pynbhd.pipeline.plot_data import emit_plot_data


SCHEMA_VERSION = 1
FLOAT_FORMAT = '%.12g'  # 12 significant digits everywhere


def _clean(x):
    """JSON-ready copy of `x`: floats rounded to 12 significant digits, non-finite floats as `None`."""
    if isinstance(x, Enum):
        return x.value if isinstance(x.value, str) else x.name
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(FLOAT_FORMAT % x) if math.isfinite(x) else None
    if isinstance(x, dict):
        return {str(key): _clean(value) for key, value in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(value) for value in x]
    return x


def _bundle(bundle):
    return None if bundle is None else bundle.as_dict()


def evaluation_record(e):
    nbhd = e.neighborhood
    return {'id': nbhd.id,
            'anchor_user': nbhd.anchor_user,
            'size': nbhd.size,
            'raw_members': nbhd.raw_members,
            'n_test': nbhd.n_test,
            'loss_n': e.loss_n,
            'loss_dprime': e.loss_dprime,
            'diff': e.diff,
            'candidate': e.candidate,
            'critical': e.critical,
            'welch': None if e.welch is None else e.welch.as_dict(),
            'metrics_n': _bundle(e.metrics_n),
            'metrics_dprime': _bundle(e.metrics_dprime),
            'critical_zone': e.critical_zone}


def report_to_dict(report, config=None, overlap=None):
    """Structured (JSON-ready) form of a `CriticalReport` together with the run configuration echo."""
    out = {'schema_version': SCHEMA_VERSION,
           'config': {} if config is None else config,
           'model': report.model_name,
           'mode': report.mode,
           'similarity': None if report.similarity is None else report.similarity.as_dict(),
           'alpha': report.alpha,
           'bonferroni': report.bonferroni,
           'effective_alpha': report.effective_alpha,
           'k': report.k,
           'threshold': report.threshold,
           'settings': report.settings,
           'summary': {'n_neighborhoods': report.n_neighborhoods,
                       'n_critical': report.n_critical,
                       'critical_fraction': report.critical_fraction,
                       'n_skipped': report.n_skipped},
           'system_metrics': _bundle(report.system_metrics),
           'top': [e.neighborhood.id for e in report.top(10)],
           'neighborhoods': [evaluation_record(e) for e in report.evaluations]}
    if overlap is not None:
        out['overlap'] = overlap_to_dict(overlap)
    return _clean(out)


def overlap_to_dict(overlap, config=None):
    out = {'models': overlap.model_names,
           'n_critical': overlap.n_critical,
           'n_union': overlap.n_union,
           'fractions': overlap.fractions(),
           'counts': {overlap.field_name(m, len(overlap.model_names)): n for m, n in overlap.counts.items()}}
    if config is not None:
        out = {'schema_version': SCHEMA_VERSION, 'config': config, **out}
    return _clean(out)


def write_json(obj, path):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(json.dumps(obj, indent=2) + '\n')
    return path


def _write_csv(frame, path):
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path


def write_report(report, out_dir, config=None, prefix=''):
    """Write `<prefix>report.json`, `<prefix>scatter.csv` and `<prefix>box.csv` into `out_dir`."""
    os.makedirs(out_dir, exist_ok=True)
    rows, boxes = emit_plot_data(report)
    scatter = pd.DataFrame(rows, columns=['neighborhood_id', 'metric', 'value_n', 'value_dprime'])
    box = pd.DataFrame([{'series': b.series, 'n': b.n, 'q1': b.q1, 'median': b.median, 'q3': b.q3, 'iqr': b.iqr,
                         'whisker_low': b.whisker_low, 'whisker_high': b.whisker_high,
                         'outliers': ';'.join(FLOAT_FORMAT % v for v in b.outliers)} for b in boxes],
                       columns=['series', 'n', 'q1', 'median', 'q3', 'iqr', 'whisker_low', 'whisker_high',
                                'outliers'])
    return {'report': write_json(report_to_dict(report, config), os.path.join(out_dir, prefix + 'report.json')),
            'scatter': _write_csv(scatter, os.path.join(out_dir, prefix + 'scatter.csv')),
            'box': _write_csv(box, os.path.join(out_dir, prefix + 'box.csv'))}


def write_overlap(overlap, path, config=None):
    return write_json(overlap_to_dict(overlap, {} if config is None else config), path)


def write_sweep(rows, path):
    """One CSV row per `(dataset, measure)` pair with its critical fraction."""
    columns = ['dataset', 'measure', 'model', 'n_neighborhoods', 'n_critical', 'critical_fraction']
    return _write_csv(pd.DataFrame(rows, columns=columns), path)
