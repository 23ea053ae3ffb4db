from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BaselineModel(object):
    """Baseline estimates `b_ui = mu + b_u + b_i`.

    Attributes
    ----------
    global_mean : `float`
                  global mean rating (`mu`).
    user_bias   : `ndarray`
                  bias of each dense user index (0 for users unseen in training).
    item_bias   : `ndarray`
                  bias of each dense item index (0 for items unseen in training).
    """
    global_mean: float
    user_bias: np.ndarray
    item_bias: np.ndarray

    def estimate(self, users, items):
        return self.global_mean + self.user_bias[users] + self.item_bias[items]


def fit_baselines(train, n_sweeps=10, reg_user=15.0, reg_item=10.0):
    """Fit user and item biases by alternating least squares.

    Each sweep first updates all item biases and then all user biases:

      * `b_i = sum_{u in R_i}(r_ui - mu - b_u)/(reg_item + |R_i|)`,
      * `b_u = sum_{i in R_u}(r_ui - mu - b_i)/(reg_user + |R_u|)`.

    References
    ----------
    Koren, Y. and Bell, R., 2015.
    Advances in collaborative filtering.
    In Recommender Systems Handbook (pp. 77-118). Springer, Boston, MA.
    https://link.springer.com/chapter/10.1007/978-1-4899-7637-6_3
    """
    assert n_sweeps > 0, f'n_sweeps (== {n_sweeps}) should > 0.'
    assert reg_user >= 0.0 and reg_item >= 0.0, 'regularization should >= 0.'
    mu = train.global_mean()
    users, items, residuals = train.users, train.items, train.ratings - mu
    n_u, n_i = train.user_counts(), train.item_counts()
    b_u, b_i = np.zeros((train.n_users,)), np.zeros((train.n_items,))
    for _ in range(n_sweeps):
        b_i = _ratio(np.bincount(items, residuals - b_u[users], train.n_items), reg_item + n_i)
        b_u = _ratio(np.bincount(users, residuals - b_i[items], train.n_users), reg_user + n_u)
    return BaselineModel(mu, b_u, b_i)


def _ratio(numerator, denominator):
    # ids without ratings (and zero regularization) keep a zero bias
    out = np.zeros_like(numerator)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out
