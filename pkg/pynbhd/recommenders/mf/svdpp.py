import numba as nb
import numpy as np

from pynbhd.recommenders.mf.mf import MF, _dot


@nb.jit(nopython=True)
def _sgd_epoch(users, items, ratings, order, indptr, indices, mu, b_u, b_i, p, q, y, lr, reg):
    n_factors = p.shape[1]
    implicit = np.empty(n_factors)
    for n in order:
        u, i = users[n], items[n]
        start, end = indptr[u], indptr[u + 1]
        norm = 1.0/np.sqrt(end - start)
        implicit[:] = 0.0
        for t in range(start, end):
            implicit += y[indices[t]]
        implicit *= norm
        e = ratings[n] - (mu + b_u[u] + b_i[i] + _dot(q[i], p[u] + implicit))
        b_u[u] += lr*(e - reg*b_u[u])
        b_i[i] += lr*(e - reg*b_i[i])
        for f in range(n_factors):
            puf, qif = p[u, f], q[i, f]
            p[u, f] += lr*(e*qif - reg*puf)
            q[i, f] += lr*(e*(puf + implicit[f]) - reg*qif)
            for t in range(start, end):
                j = indices[t]
                y[j, f] += lr*(e*norm*qif - reg*y[j, f])


class SVDPP(MF):
    """SVD++, i.e. biased matrix factorization with implicit feedback.

    The estimated rating is `mu + b_u + b_i + q_i^T (p_u + |I_u|^(-1/2) sum_{j in I_u} y_j)` where the implicit
    set `I_u` is the set of items rated by `u` in training.

    Parameters
    ----------
    options : dict
              the same settings (`keys`) as `SVD`; the implicit factors `y` share `init_std`.

    Attributes
    ----------
    y : `ndarray`
        implicit item factors of shape `(n_items, n_factors)`.

    References
    ----------
    Koren, Y., 2008, August.
    Factorization meets the neighborhood: A multifaceted collaborative filtering model.
    In Proceedings of ACM SIGKDD International Conference on Knowledge Discovery and Data Mining (pp. 426-434).
    https://dl.acm.org/doi/10.1145/1401890.1401944
    """
    def __init__(self, options=None):
        MF.__init__(self, options)
        self.y = None
        self._implicit = None  # cached per-user implicit term

    def initialize(self):
        MF.initialize(self)
        self.y = self.rng_initialization.normal(0.0, self.init_std, size=(self.n_items, self.n_factors))
        self._implicit = None

    def iterate(self):
        _sgd_epoch(self._users, self._items, self._ratings, self._order(),
                   self._csr.indptr.astype(np.int64), self._csr.indices.astype(np.int64), self.global_mean,
                   self.b_u, self.b_i, self.p, self.q, self.y, self.learning_rate, self.regularization)
        self._implicit = None
        return self._objective(self._estimate(self._users, self._items))

    def implicit_term(self):
        """`|I_u|^(-1/2) sum_{j in I_u} y_j` of every user (rows of users without ratings are zero)."""
        if self._implicit is None:
            binary = self._csr.copy()
            binary.data = np.ones_like(binary.data)
            sizes = np.diff(binary.indptr)
            scale = np.zeros((self.n_users,))
            np.divide(1.0, np.sqrt(sizes), out=scale, where=sizes > 0)
            self._implicit = np.asarray(binary @ self.y)*scale[:, np.newaxis]
        return self._implicit

    def _parameters(self):
        parameters = MF._parameters(self)
        parameters['y'] = self.y
        return parameters

    def _restore(self, state):
        MF._restore(self, state)
        self.y, self._implicit = state['param_y'], None

    def _estimate(self, users, items):
        factors = self.p[users] + self.implicit_term()[users]
        return self.global_mean + self.b_u[users] + self.b_i[items] + np.sum(factors*self.q[items], axis=1)
