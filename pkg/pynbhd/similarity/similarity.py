from dataclasses import dataclass
from enum import IntEnum

import numba as nb
import numpy as np


class Measure(IntEnum):
    """User-user similarity measures, also known as KNN-1 to KNN-4."""
    MSD = 1  # mean squared deviation
    COS = 2  # cosine
    PCC = 3  # Pearson correlation coefficient
    PBC = 4  # Pearson baseline correlation coefficient

    @classmethod
    def parse(cls, name):
        if isinstance(name, Measure):
            return name
        key = str(name).strip().upper()
        if key.startswith('KNN-') and key[4:].isdigit():
            return cls(int(key[4:]))
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f'unknown similarity measure `{name}` (choose from msd, cos, pcc, pbc or knn-1..knn-4).')


@dataclass(frozen=True)
class SimilarityConfig(object):
    """Settings of the KNN neighborhood formation.

    Attributes
    ----------
    measure               : `Measure`
                            similarity measure.
    k_neighbors           : `int`
                            number of nearest neighbors joined to each anchor user.
    min_support           : `int`
                            minimal number of co-rated items for a similarity to be defined.
    shrinkage             : `float`
                            shrinkage of PBC similarities.
    min_test_interactions : `int`
                            neighborhoods with fewer induced test interactions are dropped.
    """
    measure: Measure = Measure.PCC
    k_neighbors: int = 40
    min_support: int = 3
    shrinkage: float = 100.0
    min_test_interactions: int = 30

    def __post_init__(self):
        object.__setattr__(self, 'measure', Measure.parse(self.measure))
        if self.k_neighbors < 1:
            raise ValueError(f'k_neighbors (== {self.k_neighbors}) should >= 1.')
        if self.min_support < 1:
            raise ValueError(f'min_support (== {self.min_support}) should >= 1.')
        if self.shrinkage < 0.0:
            raise ValueError(f'shrinkage (== {self.shrinkage}) should >= 0.')
        if self.min_test_interactions < 0:
            raise ValueError(f'min_test_interactions (== {self.min_test_interactions}) should >= 0.')

    def as_dict(self):
        return {'measure': self.measure.name.lower(),
                'k_neighbors': self.k_neighbors,
                'min_support': self.min_support,
                'shrinkage': self.shrinkage,
                'min_test_interactions': self.min_test_interactions}


@nb.jit(nopython=True)
def _msd(x, y):
    return 1.0/(np.mean(np.square(x - y)) + 1.0)


@nb.jit(nopython=True)
def _cos(x, y):
    norm = np.sqrt(np.sum(x*x))*np.sqrt(np.sum(y*y))
    if norm == 0.0:
        return np.nan
    return np.sum(x*y)/norm


@nb.jit(nopython=True)
def _pearson(cx, cy):
    norm = np.sqrt(np.sum(cx*cx))*np.sqrt(np.sum(cy*cy))
    if norm == 0.0:
        return np.nan
    return np.sum(cx*cy)/norm


@nb.jit(nopython=True)
def _pcc(x, y):
    # means are taken over the co-rated items only
    return _pearson(x - np.mean(x), y - np.mean(y))


@nb.jit(nopython=True)
def _pbc(x, y, bx, by, shrinkage):
    s = _pearson(x - bx, y - by)
    n = x.size
    if n - 1 + shrinkage > 0.0:
        s *= (n - 1)/(n - 1 + shrinkage)
    return s


@nb.jit(nopython=True)
def _similarity(measure, x, y, bx, by, shrinkage):
    if measure == 1:
        return _msd(x, y)
    elif measure == 2:
        return _cos(x, y)
    elif measure == 3:
        return _pcc(x, y)
    return _pbc(x, y, bx, by, shrinkage)


@nb.jit(nopython=True)
def _pair_similarity(measure, a, b, indptr, indices, data, mu, b_u, b_i, min_support, shrinkage,
                     xs, ys, bx, by):
    # merge the sorted item lists of users `a` and `b`
    i, i_end, j, j_end, n = indptr[a], indptr[a + 1], indptr[b], indptr[b + 1], 0
    while i < i_end and j < j_end:
        if indices[i] == indices[j]:
            xs[n], ys[n] = data[i], data[j]
            if measure == 4:
                bx[n] = mu + b_u[a] + b_i[indices[i]]
                by[n] = mu + b_u[b] + b_i[indices[j]]
            n += 1
            i += 1
            j += 1
        elif indices[i] < indices[j]:
            i += 1
        else:
            j += 1
    if n < min_support or n == 0:
        return np.nan
    return _similarity(measure, xs[:n], ys[:n], bx[:n], by[:n], shrinkage)


@nb.jit(nopython=True, parallel=True)
def _similarity_rows(measure, indptr, indices, data, mu, b_u, b_i, min_support, shrinkage, k):
    # row `u` holds the `k` most similar users of `u` (ties broken by ascending user index)
    n_users = indptr.size - 1
    max_len = max(1, np.max(indptr[1:] - indptr[:-1]))
    neighbors = np.full((n_users, k), -1, dtype=np.int64)
    similarities = np.full((n_users, k), np.nan)
    for u in nb.prange(n_users):
        uu = np.int64(u)  # prange indices are unsigned
        if indptr[uu + 1] > indptr[uu]:
            xs, ys = np.empty(max_len), np.empty(max_len)
            bx, by = np.zeros(max_len), np.zeros(max_len)
            row = np.full(n_users, -np.inf)
            n_defined = 0
            for v in range(n_users):
                if v != uu and indptr[v + 1] > indptr[v]:
                    # fixed argument order makes sim(u, v) and sim(v, u) bitwise identical
                    a, b = (uu, v) if uu < v else (v, uu)
                    s = _pair_similarity(measure, a, b, indptr, indices, data, mu, b_u, b_i,
                                         min_support, shrinkage, xs, ys, bx, by)
                    if not np.isnan(s):
                        row[v] = s
                        n_defined += 1
            order = np.argsort(-row, kind='mergesort')
            for t in range(min(k, n_defined)):
                neighbors[uu, t] = order[t]
                similarities[uu, t] = row[order[t]]
    return neighbors, similarities


@nb.jit(nopython=True, parallel=True)
def _similarity_matrix(measure, indptr, indices, data, mu, b_u, b_i, min_support, shrinkage):
    n_users = indptr.size - 1
    max_len = max(1, np.max(indptr[1:] - indptr[:-1]))
    matrix = np.full((n_users, n_users), np.nan)
    for u in nb.prange(n_users):
        uu = np.int64(u)
        xs, ys = np.empty(max_len), np.empty(max_len)
        bx, by = np.zeros(max_len), np.zeros(max_len)
        for v in range(n_users):
            a, b = (uu, v) if uu < v else (v, uu)
            matrix[uu, v] = _pair_similarity(measure, a, b, indptr, indices, data, mu, b_u, b_i,
                                            min_support, shrinkage, xs, ys, bx, by)
    return matrix


def _kernel_args(train, cfg, baselines):
    csr = train.to_csr()
    if cfg.measure == Measure.PBC:
        if baselines is None:
            raise ValueError('the PBC measure needs fitted baselines.')
        mu, b_u, b_i = float(baselines.global_mean), baselines.user_bias, baselines.item_bias
    else:
        mu, b_u, b_i = 0.0, np.zeros((train.n_users,)), np.zeros((train.n_items,))
    return (int(cfg.measure), csr.indptr.astype(np.int64), csr.indices.astype(np.int64),
            csr.data.astype(np.float64), mu, np.asarray(b_u, dtype=np.float64),
            np.asarray(b_i, dtype=np.float64), int(cfg.min_support), float(cfg.shrinkage))


def nearest_neighbors(train, cfg, baselines=None):
    """The `cfg.k_neighbors` most similar users of every user, computed on `train` only.

    Returns
    -------
    neighbors    : `ndarray` of shape `(n_users, k_neighbors)` with dense user indices (`-1` pads users
                   that have fewer defined similarities).
    similarities : `ndarray` of the same shape (`np.nan` pads).
    """
    return _similarity_rows(*_kernel_args(train, cfg, baselines), int(cfg.k_neighbors))


def similarity_matrix(train, cfg, baselines=None):
    """Full user-by-user similarity matrix (`np.nan` marks undefined similarities)."""
    return _similarity_matrix(*_kernel_args(train, cfg, baselines))


# helper function
def _common(u, v, min_support):
    u, v = np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or u.shape != v.shape:
        raise TypeError('both rating vectors should be 1-d arrays over the same item axis.')
    common = ~np.isnan(u) & ~np.isnan(v)
    if np.sum(common) < max(1, min_support):
        return None
    return common


def sim_pcc(u, v, min_support=1):
    """Pearson correlation over the co-rated items, with both means taken over those items.

    `u` and `v` are rating vectors over the same item axis where `np.nan` marks unrated items.
    Returns `np.nan` when fewer than `min_support` items are co-rated or a centered vector is zero.
    """
    common = _common(u, v, min_support)
    if common is None:
        return np.nan
    return float(_pcc(np.asarray(u, dtype=np.float64)[common], np.asarray(v, dtype=np.float64)[common]))


def sim_msd(u, v, min_support=1):
    """Mean squared deviation similarity `1/(msd + 1)` in `(0, 1]`."""
    common = _common(u, v, min_support)
    if common is None:
        return np.nan
    return float(_msd(np.asarray(u, dtype=np.float64)[common], np.asarray(v, dtype=np.float64)[common]))


def sim_cos(u, v, min_support=1):
    """Raw (uncentered) cosine over the co-rated items."""
    common = _common(u, v, min_support)
    if common is None:
        return np.nan
    return float(_cos(np.asarray(u, dtype=np.float64)[common], np.asarray(v, dtype=np.float64)[common]))


def sim_pbc(u, v, baselines, user_u, user_v, shrinkage=100.0, min_support=1):
    """Pearson correlation of baseline residuals `r_ui - (mu + b_u + b_i)`, shrunk by `(n-1)/(n-1+shrinkage)`.

    `user_u` and `user_v` are the dense indices of both users (needed for their biases); the item axis of
    `u` and `v` is the dense item index.
    """
    common = _common(u, v, min_support)
    if common is None:
        return np.nan
    items = np.flatnonzero(common)
    return float(_pbc(np.asarray(u, dtype=np.float64)[common], np.asarray(v, dtype=np.float64)[common],
                      baselines.estimate(user_u, items), baselines.estimate(user_v, items), float(shrinkage)))


def save_similarity_triples(matrix, path):
    """Write the defined upper-triangle similarities as CSV triples `(u, v, sim)` ordered by `(u, v)`."""
    u, v = np.nonzero(np.triu(~np.isnan(matrix), 1))
    triples = np.column_stack((u, v, matrix[u, v]))
    np.savetxt(path, triples, fmt=['%d', '%d', '%.17g'], delimiter=',', header='u,v,sim', comments='')


def load_similarity_triples(path, n_users):
    """Read triples written by `save_similarity_triples` back into a symmetric matrix."""
    triples = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    matrix = np.full((n_users, n_users), np.nan)
    u, v = triples[:, 0].astype(np.int64), triples[:, 1].astype(np.int64)
    matrix[u, v], matrix[v, u] = triples[:, 2], triples[:, 2]
    return matrix
