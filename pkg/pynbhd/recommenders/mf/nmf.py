import numba as nb
import numpy as np

from pynbhd.recommenders.core.recommender import Recommender
from pynbhd.recommenders.mf.mf import MF, _dot


@nb.jit(nopython=True)
def _multiplicative_epoch(users, items, ratings, n_u, n_i, p, q, reg):
    # user factors first, then item factors against the refreshed user factors
    n_factors = p.shape[1]
    num, denom = np.zeros(p.shape), np.zeros(p.shape)
    for n in range(ratings.size):
        u, i, r = users[n], items[n], ratings[n]
        est = _dot(q[i], p[u])
        for f in range(n_factors):
            num[u, f] += q[i, f]*r
            denom[u, f] += q[i, f]*est
    for u in range(p.shape[0]):
        for f in range(n_factors):
            d = denom[u, f] + n_u[u]*reg*p[u, f]
            if d > 0.0:
                p[u, f] *= num[u, f]/d
    num, denom = np.zeros(q.shape), np.zeros(q.shape)
    for n in range(ratings.size):
        u, i, r = users[n], items[n], ratings[n]
        est = _dot(q[i], p[u])
        for f in range(n_factors):
            num[i, f] += p[u, f]*r
            denom[i, f] += p[u, f]*est
    for i in range(q.shape[0]):
        for f in range(n_factors):
            d = denom[i, f] + n_i[i]*reg*q[i, f]
            if d > 0.0:
                q[i, f] *= num[i, f]/d


class NMF(MF):
    """Non-negative Matrix Factorization (NMF).

    The estimated rating is the unbiased dot product `q_i^T p_u`. Factors start from a positive uniform draw
    and are updated multiplicatively (a gradient step whose size keeps every entry non-negative), so
    `p` and `q` stay entrywise non-negative after every epoch as long as all ratings are.

    Parameters
    ----------
    options : dict
              recommender options with the common settings of `Recommender` (`'n_epochs'` defaults to `50`);
              and with the following particular settings (`keys`):
                * 'n_factors'      - number of latent factors (`int`, default: `15`),
                * 'regularization' - regularization weight of both factor blocks (`float`, default: `0.06`),
                * 'init_low'       - lower bound of the uniform initialization (`float`, default: `0.01`),
                * 'init_high'      - upper bound of the uniform initialization (`float`, default: `1.0`).

    References
    ----------
    Luo, X., Zhou, M., Xia, Y. and Zhu, Q., 2014.
    An efficient non-negative matrix-factorization-based approach to collaborative filtering for recommender
    systems.
    IEEE Transactions on Industrial Informatics, 10(2), pp.1273-1284.
    https://ieeexplore.ieee.org/document/6748996
    """
    def __init__(self, options=None):
        options = {} if options is None else dict(options)
        options.setdefault('n_epochs', 50)
        options.setdefault('n_factors', 15)
        options.setdefault('regularization', 0.06)
        MF.__init__(self, options)
        self.init_low = options.get('init_low', 0.01)
        self.init_high = options.get('init_high', 1.0)
        assert 0.0 < self.init_low < self.init_high, \
            f'the initialization range [{self.init_low}, {self.init_high}) should be positive and nonempty.'

    def _prepare(self, train):
        MF._prepare(self, train)
        if np.any(self._ratings < 0.0):
            raise ValueError('NMF needs non-negative training ratings.')

    def initialize(self):
        size_p, size_q = (self.n_users, self.n_factors), (self.n_items, self.n_factors)
        self.p = self.rng_initialization.uniform(self.init_low, self.init_high, size=size_p)
        self.q = self.rng_initialization.uniform(self.init_low, self.init_high, size=size_q)

    def iterate(self):
        n_u = np.bincount(self._users, minlength=self.n_users).astype(np.float64)
        n_i = np.bincount(self._items, minlength=self.n_items).astype(np.float64)
        _multiplicative_epoch(self._users, self._items, self._ratings, n_u, n_i, self.p, self.q,
                              self.regularization)
        return self._objective(self._estimate(self._users, self._items))

    def _objective(self, estimates):
        n_u = np.bincount(self._users, minlength=self.n_users)
        n_i = np.bincount(self._items, minlength=self.n_items)
        penalty = np.dot(n_u, np.sum(np.square(self.p), axis=1)) + np.dot(n_i, np.sum(np.square(self.q), axis=1))
        return float(np.sum(np.square(self._ratings - estimates)) + self.regularization*penalty)

    def _parameters(self):
        return {'p': self.p, 'q': self.q}

    def _restore(self, state):
        Recommender._restore(self, state)
        self.p, self.q = state['param_p'], state['param_q']

    def _estimate(self, users, items):
        return np.sum(self.p[users]*self.q[items], axis=1)
