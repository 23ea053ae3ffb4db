import numba as nb

from pynbhd.recommenders.mf.mf import MF, _dot


@nb.jit(nopython=True)
def _sgd_epoch(users, items, ratings, order, mu, b_u, b_i, p, q, lr, reg):
    for n in order:
        u, i = users[n], items[n]
        e = ratings[n] - (mu + b_u[u] + b_i[i] + _dot(q[i], p[u]))
        b_u[u] += lr*(e - reg*b_u[u])
        b_i[i] += lr*(e - reg*b_i[i])
        for f in range(p.shape[1]):
            puf, qif = p[u, f], q[i, f]
            p[u, f] += lr*(e*qif - reg*puf)
            q[i, f] += lr*(e*puf - reg*qif)


class SVD(MF):
    """Biased Singular Value Decomposition (SVD), aka biased probabilistic matrix factorization.

    The estimated rating is `mu + b_u + b_i + q_i^T p_u`; the regularized squared error over all training
    ratings is minimized by plain stochastic gradient descent in a seeded shuffled order.

    Parameters
    ----------
    options : dict
              recommender options with the following common settings (`keys`):
                * 'n_epochs'         - number of training epochs (`int`, default: `20`),
                * 'max_runtime'      - maximal training runtime to be allowed (`float`, default: `np.inf`),
                * 'seed_rng'         - seed for random number generation needed to be *explicitly* set (`int`);
              and with the following particular settings (`keys`):
                * 'n_factors'      - number of latent factors (`int`, default: `100`),
                * 'learning_rate'  - learning rate (`float`, default: `0.005`),
                * 'regularization' - regularization weight (`float`, default: `0.02`),
                * 'init_std'       - standard deviation of the factor initialization (`float`, default: `0.1`).

    Examples
    --------
    Train `SVD` on a synthetic split and predict one rating:

    .. code-block:: python
       :linenos:

       >>> from pynbhd.datasets.synthetic import planted_cluster_dataset
       >>> from pynbhd.recommenders.mf.svd import SVD
       >>> split = planted_cluster_dataset(seed=1).split
       >>> svd = SVD({'n_factors': 10, 'seed_rng': 2022, 'verbose': 0})
       >>> results = svd.fit(split.train)
       >>> rating = svd.predict(0, 0)

    References
    ----------
    Salakhutdinov, R. and Mnih, A., 2007.
    Probabilistic matrix factorization.
    In Advances in Neural Information Processing Systems (pp. 1257-1264).

    Koren, Y., Bell, R. and Volinsky, C., 2009.
    Matrix factorization techniques for recommender systems.
    Computer, 42(8), pp.30-37.
    """
    def __init__(self, options=None):
        MF.__init__(self, options)

    def iterate(self):
        _sgd_epoch(self._users, self._items, self._ratings, self._order(), self.global_mean,
                   self.b_u, self.b_i, self.p, self.q, self.learning_rate, self.regularization)
        return self._objective(self._estimate(self._users, self._items))
