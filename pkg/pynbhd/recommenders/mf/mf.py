import numba as nb
import numpy as np

from pynbhd.recommenders.core.recommender import Recommender


@nb.jit(nopython=True)
def _dot(x, y):
    s = 0.0
    for f in range(x.size):
        s += x[f]*y[f]
    return s


class MF(Recommender):
    """Matrix Factorization (MF).

    This is the **abstract** class for all `MF` classes. Please use any of its instantiated subclasses to
    train on the rating dataset at hand.

    .. note:: `MF` models map users and items into one joint latent factor space of dimensionality `n_factors`,
       such that user-item interactions are modeled as inner products in that space. Biased variants add a
       global mean `mu` and per-user / per-item biases `b_u`, `b_i` to the inner product.

    Parameters
    ----------
    options : dict
              recommender options with the following common settings (`keys`):
                * 'n_epochs'         - number of training epochs (`int`),
                * 'max_runtime'      - maximal training runtime to be allowed (`float`, default: `np.inf`),
                * 'seed_rng'         - seed for random number generation needed to be *explicitly* set (`int`);
              and with the following particular settings (`keys`):
                * 'n_factors'      - number of latent factors (`int`, default: `100`),
                * 'learning_rate'  - learning rate of stochastic gradient steps (`float`, default: `0.005`),
                * 'regularization' - regularization weight of all parameters (`float`, default: `0.02`),
                * 'init_std'       - standard deviation of the normal factor initialization (`float`, default: `0.1`).

    Attributes
    ----------
    b_u            : `ndarray`
                     user biases.
    b_i            : `ndarray`
                     item biases.
    p              : `ndarray`
                     user factors of shape `(n_users, n_factors)`.
    q              : `ndarray`
                     item factors of shape `(n_items, n_factors)`.
    n_factors      : `int`
                     number of latent factors.
    learning_rate  : `float`
                     learning rate of stochastic gradient steps.
    regularization : `float`
                     regularization weight.

    References
    ----------
    Koren, Y., Bell, R. and Volinsky, C., 2009.
    Matrix factorization techniques for recommender systems.
    Computer, 42(8), pp.30-37.
    https://ieeexplore.ieee.org/document/5197422
    """
    def __init__(self, options=None):
        Recommender.__init__(self, options)
        options = self.options
        self.n_factors = options.get('n_factors', 100)
        assert self.n_factors > 0, f'`self.n_factors` = {self.n_factors}, but should > 0.'
        self.learning_rate = options.get('learning_rate', 0.005)
        assert self.learning_rate > 0.0, f'`self.learning_rate` = {self.learning_rate}, but should > 0.'
        self.regularization = options.get('regularization', 0.02)
        assert self.regularization >= 0.0, f'`self.regularization` = {self.regularization}, but should >= 0.'
        self.init_std = options.get('init_std', 0.1)
        assert self.init_std >= 0.0, f'`self.init_std` = {self.init_std}, but should >= 0.'
        self.b_u, self.b_i, self.p, self.q = None, None, None, None
        # training interactions in user-major order, as contiguous kernel inputs
        self._users, self._items, self._ratings = None, None, None

    def _prepare(self, train):
        Recommender._prepare(self, train)
        self._users = np.repeat(np.arange(self.n_users, dtype=np.int64), np.diff(self._csr.indptr))
        self._items = self._csr.indices.astype(np.int64)
        self._ratings = self._csr.data.astype(np.float64)

    def initialize(self):
        self.b_u, self.b_i = np.zeros((self.n_users,)), np.zeros((self.n_items,))
        self.p = self.rng_initialization.normal(0.0, self.init_std, size=(self.n_users, self.n_factors))
        self.q = self.rng_initialization.normal(0.0, self.init_std, size=(self.n_items, self.n_factors))

    def _order(self):
        # one fresh seeded shuffle of all training interactions per epoch
        return self.rng_optimization.permutation(self._ratings.size)

    def _parameters(self):
        return {'b_u': self.b_u, 'b_i': self.b_i, 'p': self.p, 'q': self.q}

    def _restore(self, state):
        Recommender._restore(self, state)
        self.b_u, self.b_i = state['param_b_u'], state['param_b_i']
        self.p, self.q = state['param_p'], state['param_q']

    def _estimate(self, users, items):
        return self.global_mean + self.b_u[users] + self.b_i[items] + np.sum(self.p[users]*self.q[items], axis=1)

    def _objective(self, estimates):
        # regularized squared error, with every rating regularizing the parameters it touches
        n_u = np.bincount(self._users, minlength=self.n_users)
        n_i = np.bincount(self._items, minlength=self.n_items)
        penalty = np.dot(n_u, np.square(self.b_u) + np.sum(np.square(self.p), axis=1)) + \
            np.dot(n_i, np.square(self.b_i) + np.sum(np.square(self.q), axis=1))
        return float(np.sum(np.square(self._ratings - estimates)) + self.regularization*penalty)
