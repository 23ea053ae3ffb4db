import json
import time
from enum import IntEnum

import numpy as np
import scipy.sparse as sp

from pynbhd.datasets.dataset import RatingScale


FORMAT_VERSION = 1  # of the `.npz` model dump


class Terminations(IntEnum):
    """Helper class used by all recommender classes."""
    NO_TERMINATION = 0
    MAX_EPOCHS = 1  # maximum of training epochs
    MAX_RUNTIME = 2  # maximal runtime to be allowed


class Recommender(object):
    """Base (abstract) class of all recommenders trained on explicit rating datasets.

    Every recommender obeys one contract: `fit(train)` learns its parameters, `predict(u, i)` returns an
    estimated rating clamped to the rating scale for **any** pair of dense indices (pairs involving users or
    items unseen in training fall back to the global mean plus the known-side bias), and `rank(u, candidates, k)`
    orders candidate items by descending estimated score (ties by ascending item index).

    Parameters
    ----------
    options : `dict`
              recommender options with the following common settings (`keys`):
                * 'n_epochs'         - number of training epochs (`int`),
                * 'max_runtime'      - maximal training runtime to be allowed (`float`, default: `np.inf`),
                * 'seed_rng'         - seed for random number generation needed to be *explicitly* set (`int`),
                * 'saving_objective' - whether to record the training objective of every epoch (`bool`,
                  default: `True`),
                * 'verbose'          - frequency of printing progress information (`int`, default: `10`).

    Attributes
    ----------
    global_mean : `float`
                  mean training rating (`mu`).
    scale       : `RatingScale`
                  rating scale of the training data.
    """
    def __init__(self, options=None):
        options = {} if options is None else dict(options)
        self.options = options
        self.n_epochs = options.get('n_epochs', 20)
        assert self.n_epochs >= 0, f'`self.n_epochs` = {self.n_epochs}, but should >= 0.'
        self.max_runtime = options.get('max_runtime', np.inf)
        self.seed_rng = options.get('seed_rng')
        if self.seed_rng is None:  # it is highly recommended to explicitly set *seed_rng*
            self.rng = np.random.default_rng()
        else:
            self.rng = np.random.default_rng(self.seed_rng)
        self.seed_initialization = options.get('seed_initialization', self.rng.integers(np.iinfo(np.int64).max))
        self.rng_initialization = np.random.default_rng(self.seed_initialization)
        self.seed_optimization = options.get('seed_optimization', self.rng.integers(np.iinfo(np.int64).max))
        self.rng_optimization = np.random.default_rng(self.seed_optimization)
        self.saving_objective = options.get('saving_objective', True)
        self.verbose = options.get('verbose', 10)

        # fitted state
        self.scale, self.global_mean = None, None
        self.n_users, self.n_items = None, None
        self._known_users, self._known_items = None, None
        self._csr = None  # training ratings (user-by-item)
        self._n_epochs = 0  # number of finished epochs
        self.termination_signal = Terminations.NO_TERMINATION
        self.start_time, self.runtime = None, 0.0

    @property
    def name(self):
        return self.__class__.__name__.lower()

    def _prepare(self, train):
        if train.n_ratings < 1:
            raise ValueError('the training dataset should not be empty.')
        self.scale, self.global_mean = train.scale, train.global_mean()
        self.n_users, self.n_items = train.n_users, train.n_items
        self._csr = train.to_csr()
        self._known_users = np.diff(self._csr.indptr) > 0
        self._known_items = train.item_counts() > 0
        self._n_epochs = 0
        self.termination_signal = Terminations.NO_TERMINATION

    def initialize(self):
        raise NotImplementedError

    def iterate(self):  # for each epoch, returning its training objective
        raise NotImplementedError

    def _parameters(self):
        """All learned parameter blocks (`dict` of `ndarray`), checked for divergence and saved by `save`."""
        return {}

    def _check_terminations(self):
        self.runtime = time.time() - self.start_time
        if self._n_epochs >= self.n_epochs:
            self.termination_signal = Terminations.MAX_EPOCHS
        elif self.runtime >= self.max_runtime:
            self.termination_signal = Terminations.MAX_RUNTIME
        else:
            self.termination_signal = Terminations.NO_TERMINATION
        return self.termination_signal > 0

    def _check_divergence(self):
        for key, block in self._parameters().items():
            if not np.all(np.isfinite(block)):
                raise FloatingPointError(f'{self.__class__.__name__}: parameter block `{key}` diverged '
                                         f'(non-finite values) at epoch {self._n_epochs}.')

    def _print_verbose_info(self, objective):
        if self.verbose and ((not self._n_epochs % self.verbose) or (self.termination_signal > 0)):
            info = '  * Epoch {:d}: objective {:7.5e} & runtime {:7.5e}'
            print(info.format(self._n_epochs, objective, time.time() - self.start_time))

    def _collect(self, objective):
        return {'objective': np.array(objective) if self.saving_objective else None,
                'n_epochs': self._n_epochs,
                'runtime': time.time() - self.start_time,
                'termination_signal': self.termination_signal}

    def fit(self, train):
        """Train on `train` and return a `dict` of training results (objective history, epochs, runtime)."""
        self.start_time = time.time()
        self._prepare(train)
        self.initialize()
        objective = []  # to store the training objective of all epochs
        while not self._check_terminations():
            y = self.iterate()
            self._n_epochs += 1
            self._check_divergence()
            if self.saving_objective:
                objective.append(y)
            self._check_terminations()
            self._print_verbose_info(y)
        return self._collect(objective)

    def _estimate(self, users, items):
        """Raw model formula for pairs whose user *and* item were seen in training."""
        raise NotImplementedError

    def _fallback(self, users, items, known_users, known_items):
        out = np.full(users.shape, self.global_mean)
        b_u, b_i = getattr(self, 'b_u', None), getattr(self, 'b_i', None)
        if b_u is not None:
            out[known_users] += b_u[users[known_users]]
        if b_i is not None:
            out[known_items] += b_i[items[known_items]]
        return out

    def _known(self, ids, mask):
        inside = (ids >= 0) & (ids < mask.size)
        known = np.zeros(ids.shape, dtype=bool)
        known[inside] = mask[ids[inside]]
        return known

    def score(self, users, items):
        """Unclamped estimated scores of the pairs `(users[n], items[n])`, total over all pairs."""
        if self.scale is None:
            raise RuntimeError(f'{self.__class__.__name__} should be fitted before use.')
        users = np.atleast_1d(np.asarray(users, dtype=np.int64))
        items = np.atleast_1d(np.asarray(items, dtype=np.int64))
        users, items = np.broadcast_arrays(users, items)
        known_users, known_items = self._known(users, self._known_users), self._known(items, self._known_items)
        both = known_users & known_items
        out = self._fallback(users, items, known_users, known_items)
        if np.any(both):
            out[both] = self._estimate(users[both], items[both])
        return out

    def predict_batch(self, users, items):
        scores = self.score(users, items)
        return self.scale.clip(scores)

    def predict(self, u, i):
        """Estimated rating of the dense user `u` on the dense item `i`, clamped to the rating scale."""
        return float(self.predict_batch(u, i)[0])

    def seen_items(self, u):
        """Items rated by the dense user `u` in training."""
        if not 0 <= u < self.n_users:
            return np.empty((0,), dtype=np.int64)
        return self._csr.indices[self._csr.indptr[u]:self._csr.indptr[u + 1]]

    def candidates(self, u):
        """Default ranking candidates: items seen in training but not rated by `u` in training."""
        known = np.copy(self._known_items)
        known[self.seen_items(u)] = False
        return np.flatnonzero(known)

    def rank(self, u, candidates=None, k=10):
        """Top-`k` candidates by descending estimated score, ties broken by ascending item index."""
        assert k >= 1, f'k (== {k}) should >= 1.'
        candidates = self.candidates(u) if candidates is None else np.asarray(candidates, dtype=np.int64)
        if candidates.size == 0:
            return candidates
        scores = self.score(np.full(candidates.shape, u), candidates)
        order = np.lexsort((candidates, -scores))
        return candidates[order[:k]]

    def _state(self):
        return {'indptr': self._csr.indptr, 'indices': self._csr.indices, 'data': self._csr.data,
                'known_items': self._known_items, 'global_mean': np.array(self.global_mean),
                'scale': np.array([self.scale.min_rating, self.scale.max_rating, self.scale.step])}

    def _restore(self, state):
        self.scale = RatingScale(*(float(s) for s in state['scale']))
        self.global_mean = float(state['global_mean'])
        self._known_items = state['known_items'].astype(bool)
        self.n_items = self._known_items.size
        self.n_users = state['indptr'].size - 1
        self._csr = sp.csr_matrix((state['data'], state['indices'], state['indptr']),
                                  shape=(self.n_users, self.n_items))
        self._known_users = np.diff(self._csr.indptr) > 0

    def save(self, path):
        """Dump options, training index and all parameter blocks into a versioned `.npz` file."""
        if self.scale is None:
            raise RuntimeError(f'{self.__class__.__name__} should be fitted before saving.')
        options = {key: value for key, value in self.options.items() if _is_plain(value)}
        blocks = {'param_' + key: value for key, value in self._parameters().items()}
        np.savez(path, format_version=np.array(FORMAT_VERSION), model=np.array(self.name),
                 options=np.array(json.dumps(options, sort_keys=True)), **self._state(), **blocks)


def _is_plain(value):
    return isinstance(value, (bool, int, float, str)) or value is None
