import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from pynbhd.metrics.metrics import MetricBundle, Mode, per_user_metrics
from pynbhd.similarity.neighborhoods import Neighborhood
from pynbhd.similarity.similarity import SimilarityConfig
from pynbhd.stats.welch import Alternative, WelchResult, welch_one_sided


# descriptive error levels of prediction-mode neighborhoods (annotation only, never used for flagging)
CRITICAL_ZONE = {'mse': 0.85, 'mae': 0.75, 'rmse': 0.90}


@dataclass(frozen=True)
class NeighborhoodEvaluation(object):
    """Evaluation of one neighborhood `N` against its complement `D'` (all other test samples).

    Attributes
    ----------
    neighborhood   : `Neighborhood`
                     evaluated neighborhood.
    loss_n         : `float`
                     mean per-sample loss over `N` (squared error or precision@k).
    loss_dprime    : `float`
                     mean per-sample loss over `D'`.
    diff           : `float`
                     `loss_n - loss_dprime`.
    severity       : `float`
                     how much worse `N` is than `D'` (`diff` in prediction mode, `-diff` in ranking mode).
    candidate      : `bool`
                     whether `N` is worse than `D'` (the positive-difference filter).
    welch          : `WelchResult`
                     significance test of the per-sample losses (`None` when not a candidate).
    critical       : `bool`
                     candidate *and* `welch.p_one_sided < alpha`.
    metrics_n      : `MetricBundle`
                     metrics of `N` (only for critical neighborhoods unless requested for all).
    metrics_dprime : `MetricBundle`
                     metrics of `D'` (same rule as `metrics_n`).
    critical_zone  : `tuple`
                     names of prediction metrics of `N` above their descriptive error level.
    """
    neighborhood: Neighborhood
    loss_n: float
    loss_dprime: float
    diff: float
    severity: float
    candidate: bool
    welch: Optional[WelchResult]
    critical: bool
    metrics_n: Optional[MetricBundle] = None
    metrics_dprime: Optional[MetricBundle] = None
    critical_zone: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CriticalReport(object):
    """Outcome of evaluating one model on all neighborhoods of a split.

    Attributes
    ----------
    mode            : `Mode`
                      evaluation mode.
    model_name      : `str`
                      name of the evaluated recommender.
    similarity      : `SimilarityConfig`
                      settings the neighborhoods were formed with.
    alpha           : `float`
                      significance level (before any Bonferroni correction).
    evaluations     : `tuple`
                      one `NeighborhoodEvaluation` per evaluated neighborhood, sorted by neighborhood id.
    neighborhood_ids: `tuple`
                      ids of all neighborhoods handed to the evaluation (skipped ones included).
    system_metrics  : `MetricBundle`
                      metrics of the whole test set.
    """
    mode: Mode
    model_name: str
    similarity: Optional[SimilarityConfig]
    alpha: float
    evaluations: Tuple[NeighborhoodEvaluation, ...]
    neighborhood_ids: Tuple[str, ...]
    system_metrics: Optional[MetricBundle] = None
    k: int = 10
    threshold: Optional[float] = None
    bonferroni: bool = False
    effective_alpha: Optional[float] = None
    n_skipped: int = 0
    settings: dict = field(default_factory=dict)

    @property
    def n_neighborhoods(self):
        return len(self.evaluations)

    @property
    def n_critical(self):
        return sum(1 for e in self.evaluations if e.critical)

    @property
    def critical_fraction(self):
        return self.n_critical/self.n_neighborhoods if self.n_neighborhoods > 0 else 0.0

    def critical(self):
        return [e for e in self.evaluations if e.critical]

    def critical_ids(self):
        return frozenset(e.neighborhood.id for e in self.evaluations if e.critical)

    def top(self, n=10):
        """The `n` most severe critical neighborhoods (ties by ascending id)."""
        return sorted(self.critical(), key=lambda e: (-e.severity, e.neighborhood.id))[:n]


def candidate_filter(loss_n, loss_dprime, mode):
    """Positive-difference filter: `N` must be strictly worse than `D'`.

    Prediction mode compares errors (`loss_n > loss_dprime`), ranking mode precisions (`loss_n < loss_dprime`).
    """
    if Mode.parse(mode) == Mode.PREDICTION:
        return bool(loss_n - loss_dprime > 0.0)
    return bool(loss_dprime - loss_n > 0.0)


def _masks(nbhd, losses):
    in_n = nbhd.contains(losses.owners)
    return in_n, ~in_n


def neighborhood_loss(model, nbhd, test, mode, k=10, threshold=None, losses=None):
    """Mean per-sample losses `(loss_N, loss_D')` of one neighborhood and its complement.

    Prediction mode averages squared errors over the test interactions, ranking mode precision@k over the
    test users. `losses` (from `per_user_metrics`) may be passed in to avoid recomputing all samples.
    An empty side yields `np.nan`.
    """
    if losses is None:
        losses = per_user_metrics(model, test, mode, k, threshold)
    in_n, in_dprime = _masks(nbhd, losses)
    loss_n = float(np.mean(losses.values[in_n])) if np.any(in_n) else np.nan
    loss_dprime = float(np.mean(losses.values[in_dprime])) if np.any(in_dprime) else np.nan
    return loss_n, loss_dprime


def _zone(bundle):
    if bundle is None or bundle.mode != Mode.PREDICTION:
        return ()
    return tuple(name for name, level in CRITICAL_ZONE.items() if getattr(bundle, name) > level)


def _mean_losses(nbhd, losses):
    # a `str` names the reason to skip the neighborhood
    in_n, in_dprime = _masks(nbhd, losses)
    if not np.any(in_dprime):
        return "the complement D' is empty"
    if not np.any(in_n):
        return 'no sample falls into the neighborhood'
    return float(np.mean(losses.values[in_n])), float(np.mean(losses.values[in_dprime]))


def _evaluate(nbhd, loss_pair, losses, mode, alpha, full):
    in_n, in_dprime = _masks(nbhd, losses)
    loss_n, loss_dprime = loss_pair
    candidate = candidate_filter(loss_n, loss_dprime, mode)
    welch, critical = None, False
    if candidate and np.sum(in_n) >= 2 and np.sum(in_dprime) >= 2:
        alternative = Alternative.A_GREATER if mode == Mode.PREDICTION else Alternative.A_LESS
        welch = welch_one_sided(losses.values[in_n], losses.values[in_dprime], alternative)
        critical = welch.p_one_sided < alpha
    metrics_n = metrics_dprime = None
    if critical or full:
        metrics_n, metrics_dprime = losses.bundle(in_n), losses.bundle(in_dprime)
    assert not critical or (candidate and welch.p_one_sided < alpha), \
        f'neighborhood {nbhd.id} is critical without passing both stages.'
    diff = loss_n - loss_dprime
    return NeighborhoodEvaluation(nbhd, loss_n, loss_dprime, diff, diff if mode == Mode.PREDICTION else -diff,
                                  candidate, welch, critical, metrics_n, metrics_dprime,
                                  _zone(metrics_n) if critical else ())


def evaluate_all(model, neighborhoods, test, mode, alpha=0.05, k=10, threshold=None, full=False,
                 bonferroni=False, recommend_above_threshold=False, similarity=None, n_threads=None,
                 verbose=False):
    """Flag the critical neighborhoods of a fitted `model` on `test`.

    For every neighborhood: mean losses of `N` and `D'` -> positive-difference filter -> one-sided Welch's
    t-test of the per-sample losses (prediction mode: squared errors per interaction with the alternative
    "`N` greater"; ranking mode: precision@k per user with the alternative "`N` less") -> critical iff
    `p < alpha`. With `bonferroni`, `alpha` is divided by the number of tested candidates.

    Parameters
    ----------
    model         : `Recommender`
                    recommender fitted on the training side of the split.
    neighborhoods : `list`
                    `Neighborhood`s formed on the same split.
    test          : `RatingDataset`
                    test side of the split.
    mode          : `Mode` or `str`
                    `'prediction'` or `'ranking'`.
    alpha         : `float`
                    significance level.
    k             : `int`
                    length of recommendation lists (ranking mode).
    threshold     : `float`
                    relevance threshold (ranking mode; scale default if `None`).
    full          : `bool`
                    attach metric bundles to all neighborhoods (not only critical ones).
    n_threads     : `int`
                    worker threads of the per-neighborhood evaluation (all cores if `None`).

    Returns
    -------
    a `CriticalReport` whose evaluations are sorted by neighborhood id.
    """
    assert 0.0 < alpha < 1.0, f'alpha (== {alpha}) should lie in (0, 1).'
    start_time = time.time()
    mode = Mode.parse(mode)
    threshold = test.scale.default_threshold if threshold is None else threshold
    neighborhoods = sorted(neighborhoods, key=lambda nbhd: nbhd.id)
    losses = per_user_metrics(model, test, mode, k, threshold, recommend_above_threshold)
    system_metrics = losses.bundle() if len(losses) > 0 else None
    with ThreadPoolExecutor(max_workers=n_threads) as executor:
        pairs = list(executor.map(lambda nbhd: _mean_losses(nbhd, losses),
                                   neighborhoods))
        kept = []
        for nbhd, pair in zip(neighborhoods, pairs):
            if isinstance(pair, str):
                warnings.warn(f'neighborhood {nbhd.id} skipped: {pair}.')
            else:
                kept.append((nbhd, pair))
        n_candidates = sum(1 for _, pair in kept if candidate_filter(*pair, mode))
        effective_alpha = alpha/max(1, n_candidates) if bonferroni else alpha
        evaluations = list(executor.map(lambda x: _evaluate(x[0], x[1], losses, mode, effective_alpha, full),
                                        kept))
    report = CriticalReport(mode, model.name, similarity, alpha, tuple(evaluations),
                            tuple(nbhd.id for nbhd in neighborhoods), system_metrics, k, threshold, bonferroni,
                            effective_alpha, len(neighborhoods) - len(kept),
                            {'recommend_above_threshold': recommend_above_threshold, 'full': full})
    if verbose:
        info = '  * Evaluation: {:d} of {:d} neighborhoods critical ({:.2%}) & runtime {:7.5e}'
        print(info.format(report.n_critical, report.n_neighborhoods, report.critical_fraction,
                          time.time() - start_time))
    return report
