import time

import numba as nb
import numpy as np

from pynbhd.recommenders.core.recommender import Recommender, Terminations


@nb.jit(nopython=True)
def _deviation_sums(i, item_indptr, item_users, item_data, indptr, indices, data, n_items):
    # sums and counts of `r_vi - r_vj` over all users `v` rating both `i` and `j`, visited in ascending `v`
    totals, counts = np.zeros(n_items), np.zeros(n_items, dtype=np.int64)
    for t in range(item_indptr[i], item_indptr[i + 1]):
        v, r_vi = item_users[t], item_data[t]
        for w in range(indptr[v], indptr[v + 1]):
            totals[indices[w]] += r_vi - data[w]
            counts[indices[w]] += 1
    return totals, counts


@nb.jit(nopython=True)
def _predict_sorted(users, items, order, item_indptr, item_users, item_data, indptr, indices, data,
                    user_means, n_items):
    out = np.empty(users.size)
    current = -1
    totals, counts = np.zeros(n_items), np.zeros(n_items, dtype=np.int64)
    for n in order:  # grouped by item so that each deviation row is built once
        i, u = items[n], users[n]
        if i != current:
            totals, counts = _deviation_sums(i, item_indptr, item_users, item_data, indptr, indices, data, n_items)
            current = i
        s, c = 0.0, 0
        for w in range(indptr[u], indptr[u + 1]):
            j = indices[w]
            if counts[j] > 0:
                s += totals[j]/counts[j]
                c += 1
        out[n] = user_means[u] + s/c if c > 0 else user_means[u]
    return out


class SlopeOne(Recommender):
    """Slope One collaborative filtering.

    The estimated rating of user `u` on item `i` is `mu_u + mean_{j in R_i(u)} dev(i, j)`, where `dev(i, j)` is
    the average of `r_vi - r_vj` over all users `v` rating both items, and `R_i(u)` are the items rated by `u`
    that share at least one rater with `i`. The estimate falls back to `mu_u` when `R_i(u)` is empty.

    The deviation table is never materialized as a whole: rows `dev(i, .)` are built on demand from the
    rating indexes, which keeps memory linear in the number of ratings. Since every row sums its terms in the
    same (ascending user) order, `dev(i, j) == -dev(j, i)` holds exactly.

    Unknown users fall back to the global mean, known users on unknown items to their own mean `mu_u`.

    References
    ----------
    Lemire, D. and Maclachlan, A., 2005, April.
    Slope one predictors for online rating-based collaborative filtering.
    In Proceedings of SIAM International Conference on Data Mining (pp. 471-475).
    https://arxiv.org/abs/cs/0702144
    """
    def __init__(self, options=None):
        Recommender.__init__(self, options)
        self.user_means = None
        self._csc = None  # training ratings (item-by-user)

    def initialize(self):
        sums = np.asarray(self._csr.sum(axis=1)).ravel()
        sizes = np.diff(self._csr.indptr)
        self.user_means = np.full((self.n_users,), self.global_mean)
        np.divide(sums, sizes, out=self.user_means, where=sizes > 0)
        self._csc = self._csr.tocsc()
        self._csc.sort_indices()

    def fit(self, train):
        """Memory-based: only builds the rating indexes and user means (no training epochs)."""
        self.start_time = time.time()
        self._prepare(train)
        self.initialize()
        self.termination_signal = Terminations.NO_TERMINATION
        return self._collect([])

    def _kernel_args(self):
        return (self._csc.indptr.astype(np.int64), self._csc.indices.astype(np.int64),
                self._csc.data.astype(np.float64), self._csr.indptr.astype(np.int64),
                self._csr.indices.astype(np.int64), self._csr.data.astype(np.float64))

    def deviations(self, i):
        """Row `dev(i, .)` of the deviation table and its co-rating counts (`np.nan` where undefined)."""
        totals, counts = _deviation_sums(int(i), *self._kernel_args(), self.n_items)
        dev = np.full((self.n_items,), np.nan)
        np.divide(totals, counts, out=dev, where=counts > 0)
        return dev, counts

    def _fallback(self, users, items, known_users, known_items):
        out = np.full(users.shape, self.global_mean)
        out[known_users] = self.user_means[users[known_users]]
        return out

    def _estimate(self, users, items):
        order = np.argsort(items, kind='mergesort')
        return _predict_sorted(users, items, order, *self._kernel_args(), self.user_means, self.n_items)

    def _parameters(self):
        return {'user_means': self.user_means}

    def _restore(self, state):
        Recommender._restore(self, state)
        self.user_means = state['param_user_means']
        self._csc = self._csr.tocsc()
        self._csc.sort_indices()


def deviation_table(model):
    """Dense `(n_items, n_items)` deviation table (`np.nan` where undefined), for small datasets only."""
    return np.vstack([model.deviations(i)[0] for i in range(model.n_items)])
