"""Accuracy (prediction mode) and top-k ranking (ranking mode) metrics.

Ranking metrics are macro-averaged over users: every user contributes one precision/recall/F1 value, which
are also the sample units compared by the significance test.
"""
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, NamedTuple, Optional, Tuple

import numpy as np


class Mode(str, Enum):
    PREDICTION = 'prediction'
    RANKING = 'ranking'

    @classmethod
    def parse(cls, name):
        if isinstance(name, Mode):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f'unknown evaluation mode `{name}` (choose from prediction or ranking).')


class RankingSample(NamedTuple):
    user: int
    recommended: Tuple[int, ...]  # ordered, distinct
    relevant: FrozenSet[int]


@dataclass(frozen=True)
class MetricBundle(object):
    """Metric values of one population (a neighborhood, its complement or the whole test set).

    Only the metrics of its `mode` are set: `mse`, `mae` and `rmse` for prediction mode, `precision`,
    `recall` and `f1` (all at `k`) for ranking mode.
    """
    mode: Mode
    n_samples: int
    mse: Optional[float] = None
    mae: Optional[float] = None
    rmse: Optional[float] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    f1: Optional[float] = None

    @property
    def names(self):
        if self.mode == Mode.PREDICTION:
            return 'mse', 'mae', 'rmse'
        return 'precision', 'recall', 'f1'

    def as_dict(self):
        out = {name: getattr(self, name) for name in self.names}
        out['n_samples'] = self.n_samples
        return out


def _errors(y_true, y_pred):
    y_true, y_pred = np.asarray(y_true, dtype=np.float64), np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError('true and predicted ratings should be 1-d arrays of the same length.')
    if y_true.size == 0:
        raise ValueError('metrics need at least one sample.')
    return y_pred - y_true


def mse(y_true, y_pred):
    return float(np.mean(np.square(_errors(y_true, y_pred))))


def mae(y_true, y_pred):
    return float(np.mean(np.abs(_errors(y_true, y_pred))))


def rmse(y_true, y_pred):
    return float(np.sqrt(mse(y_true, y_pred)))


def prediction_bundle(y_true, y_pred):
    mean_squared = mse(y_true, y_pred)
    return MetricBundle(Mode.PREDICTION, len(y_true), mse=mean_squared, mae=mae(y_true, y_pred),
                        rmse=float(np.sqrt(mean_squared)))


def _hits(sample):
    return sum(1 for item in sample.recommended if item in sample.relevant)


def precision_at_k(sample):
    """Share of recommended items that are relevant (`np.nan` for an empty recommendation list)."""
    if len(sample.recommended) == 0:
        return np.nan
    return _hits(sample)/len(sample.recommended)


def recall_at_k(sample):
    """Share of relevant items that are recommended (0 when the user has no relevant item)."""
    return _hits(sample)/max(1, len(sample.relevant))


def f1_at_k(sample):
    return _f1(precision_at_k(sample), recall_at_k(sample))


def _f1(precision, recall):
    precision, recall = np.asarray(precision, dtype=np.float64), np.asarray(recall, dtype=np.float64)
    total = precision + recall
    out = np.zeros(np.broadcast(precision, recall).shape)
    np.divide(2.0*precision*recall, total, out=out, where=total > 0)
    return out if out.ndim else float(out)


def ranking_bundle(samples):
    """Macro-averaged precision/recall/F1 over all samples with a nonempty recommendation list."""
    samples = [s for s in samples if len(s.recommended) > 0]
    if not samples:
        raise ValueError('ranking metrics need at least one user with a nonempty recommendation list.')
    hits = np.array([_hits(s) for s in samples], dtype=np.float64)
    n_recommended = np.array([len(s.recommended) for s in samples], dtype=np.float64)
    n_relevant = np.array([len(s.relevant) for s in samples], dtype=np.float64)
    return _ranking_bundle(hits, n_recommended, n_relevant)


def _ranking_bundle(hits, n_recommended, n_relevant):
    precision, recall = hits/n_recommended, hits/np.maximum(1.0, n_relevant)
    return MetricBundle(Mode.RANKING, hits.size, precision=float(np.mean(precision)),
                        recall=float(np.mean(recall)), f1=float(np.mean(_f1(precision, recall))))


@dataclass(frozen=True)
class SampleLosses(object):
    """Per-sample losses of one model on a test set, the units of the significance test.

    Attributes
    ----------
    mode    : `Mode`
              evaluation mode.
    owners  : `ndarray`
              dense user index owning each sample.
    values  : `ndarray`
              per-sample loss: squared error per test interaction (prediction mode) or precision@k per user
              (ranking mode).
    y_true  : `ndarray`
              true ratings (prediction mode only).
    y_pred  : `ndarray`
              clamped predictions (prediction mode only).
    hits    : `ndarray`
              number of relevant recommended items per user (ranking mode only).
    n_recommended : `ndarray`
              length of each user's recommendation list (ranking mode only).
    n_relevant    : `ndarray`
              number of relevant test items per user (ranking mode only).
    """
    mode: Mode
    owners: np.ndarray
    values: np.ndarray
    y_true: Optional[np.ndarray] = None
    y_pred: Optional[np.ndarray] = None
    hits: Optional[np.ndarray] = None
    n_recommended: Optional[np.ndarray] = None
    n_relevant: Optional[np.ndarray] = None

    def __len__(self):
        return self.values.size

    def bundle(self, mask=None):
        """`MetricBundle` of the samples selected by the boolean `mask` (all samples by default)."""
        mask = np.ones(self.values.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
        if self.mode == Mode.PREDICTION:
            return prediction_bundle(self.y_true[mask], self.y_pred[mask])
        if not np.any(mask):
            raise ValueError('ranking metrics need at least one user with a nonempty recommendation list.')
        return _ranking_bundle(self.hits[mask], self.n_recommended[mask], self.n_relevant[mask])


def ranking_samples(model, test, k=10, threshold=None, recommend_above_threshold=False):
    """One `RankingSample` per user with at least one test interaction.

    Recommendations are the top-`k` train-unseen items of `model.rank`; with `recommend_above_threshold` only
    those whose predicted rating also exceeds `threshold` are kept. Relevant items are the user's test items
    rated strictly above `threshold`.
    """
    threshold = test.scale.default_threshold if threshold is None else threshold
    csr = test.to_csr()
    samples = []
    for u in test.present_users():
        items, ratings = csr.indices[csr.indptr[u]:csr.indptr[u + 1]], csr.data[csr.indptr[u]:csr.indptr[u + 1]]
        recommended = model.rank(int(u), k=k)
        if recommend_above_threshold and recommended.size > 0:
            recommended = recommended[model.predict_batch(np.full(recommended.shape, u), recommended) > threshold]
        samples.append(RankingSample(int(u), tuple(int(i) for i in recommended),
                                     frozenset(int(i) for i in items[ratings > threshold])))
    return samples


def per_user_metrics(model, test, mode, k=10, threshold=None, recommend_above_threshold=False):
    """Per-sample losses of a fitted `model` on `test`.

    Prediction mode yields one squared error per test interaction; ranking mode one precision@k per user with
    at least one test interaction (users whose recommendation list is empty are skipped).

    Returns
    -------
    a `SampleLosses` record; its `values` are the per-sample losses.
    """
    mode = Mode.parse(mode)
    if mode == Mode.PREDICTION:
        y_true = np.asarray(test.ratings, dtype=np.float64)
        y_pred = model.predict_batch(test.users, test.items)
        return SampleLosses(mode, np.asarray(test.users), np.square(y_pred - y_true), y_true=y_true, y_pred=y_pred)
    assert k >= 1, f'k (== {k}) should >= 1.'
    samples = [s for s in ranking_samples(model, test, k, threshold, recommend_above_threshold)
               if len(s.recommended) > 0]
    hits = np.array([_hits(s) for s in samples], dtype=np.float64)
    n_recommended = np.array([len(s.recommended) for s in samples], dtype=np.float64)
    n_relevant = np.array([len(s.relevant) for s in samples], dtype=np.float64)
    owners = np.array([s.user for s in samples], dtype=np.int64)
    return SampleLosses(mode, owners, hits/np.maximum(1.0, n_recommended), hits=hits,
                        n_recommended=n_recommended, n_relevant=n_relevant)
