import warnings

import numba as nb
import numpy as np

from pynbhd.recommenders.core.recommender import Recommender
from pynbhd.recommenders.mf.mf import MF


@nb.jit(nopython=True)
def _sigmoid(x):
    if x >= 0.0:
        return 1.0/(1.0 + np.exp(-x))
    z = np.exp(x)
    return z/(1.0 + z)


@nb.jit(nopython=True)
def _negative_item(draw, start, end, positions, known_items):
    # map a uniform draw onto the known items *not* rated by the user, whose (sorted) positions among
    # `known_items` are `positions[start:end]`
    t = int(draw*(known_items.size - (end - start)))
    for w in range(start, end):
        if positions[w] <= t:
            t += 1
        else:
            break
    return known_items[t]


@nb.jit(nopython=True)
def _sgd_epoch(users, items, order, draws, indptr, positions, known_items, p, q, b_i, lr, reg):
    log_likelihood = 0.0
    for n in order:
        u, i = users[n], items[n]
        start, end = indptr[u], indptr[u + 1]
        if known_items.size - (end - start) <= 0:  # no negatives left for this user
            continue
        for s in range(draws.shape[1]):
            j = _negative_item(draws[n, s], start, end, positions, known_items)
            x = b_i[i] - b_i[j]
            for f in range(p.shape[1]):
                x += p[u, f]*(q[i, f] - q[j, f])
            g = _sigmoid(-x)
            log_likelihood += np.log(_sigmoid(x))
            b_i[i] += lr*(g - reg*b_i[i])
            b_i[j] += lr*(-g - reg*b_i[j])
            for f in range(p.shape[1]):
                puf, qif, qjf = p[u, f], q[i, f], q[j, f]
                p[u, f] += lr*(g*(qif - qjf) - reg*puf)
                q[i, f] += lr*(g*puf - reg*qif)
                q[j, f] += lr*(-g*puf - reg*qjf)
    return log_likelihood


class BPR(MF):
    """Bayesian Personalized Ranking (BPR) with matrix factorization.

    Every training rating is read as a positive (implicit) observation regardless of its value. Each epoch
    visits all positives `(u, i)` in a seeded shuffled order, pairs each one with `'bpr_negative_samples'`
    negatives `j` drawn uniformly from the items seen in training but not rated by `u`, and performs a gradient
    **ascent** step on `ln sigma(x_uij) - reg*||theta||^2`, where `x_uij = x_ui - x_uj` and
    `x_ui = q_i^T p_u + b_i`. Only item biases are used; the user bias cancels in `x_uij`.

    Scores are not ratings: `predict` clamps them to the scale, `rank` uses the raw scores.

    Parameters
    ----------
    options : dict
              recommender options with the common settings of `Recommender` (`'n_epochs'` defaults to `30`);
              and with the following particular settings (`keys`):
                * 'n_factors'            - number of latent factors (`int`, default: `64`),
                * 'learning_rate'        - learning rate (`float`, default: `0.05`),
                * 'regularization'       - regularization weight (`float`, default: `0.01`),
                * 'init_std'             - standard deviation of the factor initialization (`float`, default: `0.1`),
                * 'bpr_negative_samples' - number of sampled negatives per positive (`int`, default: `1`).

    References
    ----------
    Rendle, S., Freudenthaler, C., Gantner, Z. and Schmidt-Thieme, L., 2009.
    BPR: Bayesian personalized ranking from implicit feedback.
    In Proceedings of Conference on Uncertainty in Artificial Intelligence (pp. 452-461).
    https://arxiv.org/abs/1205.2618
    """
    def __init__(self, options=None):
        options = {} if options is None else dict(options)
        options.setdefault('n_epochs', 30)
        options.setdefault('n_factors', 64)
        options.setdefault('learning_rate', 0.05)
        options.setdefault('regularization', 0.01)
        MF.__init__(self, options)
        self.n_negatives = options.get('bpr_negative_samples', 1)
        assert self.n_negatives >= 1, f'`self.n_negatives` = {self.n_negatives}, but should >= 1.'
        self._known_item_ids, self._positions = None, None

    def _prepare(self, train):
        MF._prepare(self, train)
        self._known_item_ids = np.flatnonzero(self._known_items).astype(np.int64)
        self._positions = np.searchsorted(self._known_item_ids, self._items).astype(np.int64)
        n_free = self._known_item_ids.size - np.diff(self._csr.indptr)
        n_skipped = int(np.sum(self._known_users & (n_free <= 0)))
        if n_skipped > 0:
            warnings.warn(f'{n_skipped} user(s) rated every known item and are skipped (no negatives).')

    def initialize(self):
        MF.initialize(self)
        self.b_u = None  # unused by the pairwise objective

    def iterate(self):
        draws = self.rng_optimization.random((self._items.size, self.n_negatives))
        log_likelihood = _sgd_epoch(self._users, self._items, self._order(), draws,
                                    self._csr.indptr.astype(np.int64), self._positions, self._known_item_ids,
                                    self.p, self.q, self.b_i, self.learning_rate, self.regularization)
        penalty = np.sum(np.square(self.p)) + np.sum(np.square(self.q)) + np.sum(np.square(self.b_i))
        return float(log_likelihood - self.regularization*penalty)

    def _parameters(self):
        return {'b_i': self.b_i, 'p': self.p, 'q': self.q}

    def _restore(self, state):
        Recommender._restore(self, state)
        self.b_i, self.p, self.q = state['param_b_i'], state['param_p'], state['param_q']

    def _fallback(self, users, items, known_users, known_items):
        # popularity (item bias) for known items, zero otherwise
        out = np.zeros(users.shape)
        out[known_items] = self.b_i[items[known_items]]
        return out

    def _estimate(self, users, items):
        return self.b_i[items] + np.sum(self.p[users]*self.q[items], axis=1)
