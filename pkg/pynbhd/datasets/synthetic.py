"""Synthetic rating datasets with known structure, used to check the evaluation mechanism end to end.

All generators are seeded and return plain `RatingDataset`s (or splits of them) on a fixed scale.
"""
from dataclasses import dataclass

import numpy as np

from pynbhd.datasets.dataset import RatingScale, RatingDataset, SplitPair, from_raw, train_test_split


SYNTHETIC_SCALE = RatingScale(1.0, 5.0, 0.5)


@dataclass(frozen=True)
class SyntheticSplit(object):
    """Train/test split of a synthetic dataset together with its ground truth.

    Attributes
    ----------
    split         : `SplitPair`
                    train/test split (train is always clean).
    groups        : `ndarray`
                    taste group of each dense user index.
    planted_users : `ndarray`
                    dense indices of users whose *test* ratings received the planted noise.
    true_test     : `ndarray`
                    noise-free rating of each test interaction (aligned with `split.test`).
    """
    split: SplitPair
    groups: np.ndarray
    planted_users: np.ndarray
    true_test: np.ndarray


def _taste_ratings(rng, n_groups, group_size, n_items, density):
    # each group shares one taste profile over items, kept inside [2, 4] so clean noise never hits the bounds
    taste = 3.0 + 0.5*np.clip(rng.standard_normal((n_groups, n_items)), -2.0, 2.0)
    n_users = n_groups*group_size
    groups = np.repeat(np.arange(n_groups), group_size)
    rated = rng.random((n_users, n_items)) < density
    users, items = np.nonzero(rated)
    return groups, users, items, taste[groups[users], items]


def planted_cluster_dataset(n_groups=5, group_size=40, n_items=150, density=0.6, clean_noise=0.2,
                            planted_noise=1.5, planted_group=0, test_fraction=0.2, seed=0):
    """Taste-grouped users whose planted group gets noisy *test* ratings.

    Users of the same group share one taste profile (so similarity-based neighborhoods recover the groups),
    every rating carries Gaussian noise with std `clean_noise`, and the test ratings of `planted_group` are
    redrawn with std `planted_noise` (clipped to the scale). With `planted_noise == clean_noise` the data
    are homogeneous.
    """
    assert 0 <= planted_group < n_groups, f'planted_group (== {planted_group}) should lie in [0, {n_groups}).'
    rng = np.random.default_rng(seed)
    groups, users, items, truth = _taste_ratings(rng, n_groups, group_size, n_items, density)
    ratings = SYNTHETIC_SCALE.clip(truth + clean_noise*rng.standard_normal(truth.shape))
    ds = from_raw(users, items, ratings, SYNTHETIC_SCALE, name='planted-cluster')
    # `from_raw` sorts by (user, item), exactly the order of `np.nonzero`, and raw ids equal dense indices
    split = train_test_split(ds, test_fraction, seed)
    test = split.test
    true_test = truth[_positions(ds, test)]
    planted = groups[test.users] == planted_group
    noisy = np.copy(test.ratings)
    noisy[planted] = SYNTHETIC_SCALE.clip(true_test[planted] + planted_noise*rng.standard_normal(planted.sum()))
    test = RatingDataset(test.users, test.items, noisy, test.scale, test.raw_user_ids, test.raw_item_ids,
                         name='planted-cluster-test')
    return SyntheticSplit(SplitPair(split.train, test, seed), groups,
                          np.flatnonzero(groups == planted_group), true_test)


def homogeneous_dataset(n_groups=5, group_size=40, n_items=150, density=0.6, noise=0.5, test_fraction=0.2,
                        seed=0):
    """Taste-grouped users whose ratings all carry the same noise level (no planted cluster)."""
    return planted_cluster_dataset(n_groups, group_size, n_items, density, noise, noise, 0, test_fraction, seed)


def _positions(ds, subset):
    keys = ds.users*ds.n_items + ds.items
    return np.searchsorted(keys, subset.users*ds.n_items + subset.items)


def constant_dataset(n_users=20, n_items=15, rating=4.0, density=0.7, seed=0):
    """Every observed rating equals `rating`."""
    rng = np.random.default_rng(seed)
    rated = rng.random((n_users, n_items)) < density
    rated[:, 0] = True  # every user rates at least one item
    users, items = np.nonzero(rated)
    return from_raw(users, items, np.full(users.shape, rating), RatingScale(0.5, 5.0, 0.5), name='constant')


def rank1_dataset(n_users=30, n_items=20, seed=0):
    """Fully observed nonnegative rank-1 ratings `r_ui = a_u*c_i`."""
    rng = np.random.default_rng(seed)
    a, c = rng.uniform(1.0, 2.2, size=(n_users,)), rng.uniform(1.0, 2.2, size=(n_items,))
    users, items = np.divmod(np.arange(n_users*n_items), n_items)
    return from_raw(users, items, a[users]*c[items], RatingScale(0.5, 5.0, 0.5), name='rank-1')


def block_preference_dataset(n_users_per_block=50, n_items_per_block=10, n_blocks=2, seed=0):
    """Users of block `b` rate exactly the items of block `b` (and nothing else)."""
    rng = np.random.default_rng(seed)
    n_users, n_items = n_blocks*n_users_per_block, n_blocks*n_items_per_block
    user_blocks = np.repeat(np.arange(n_blocks), n_users_per_block)
    item_blocks = np.repeat(np.arange(n_blocks), n_items_per_block)
    users, items = np.nonzero(user_blocks[:, np.newaxis] == item_blocks[np.newaxis, :])
    ratings = rng.choice([4.0, 4.5, 5.0], size=users.shape)
    return from_raw(users, items, ratings, RatingScale(0.5, 5.0, 0.5), name='block-preference')
