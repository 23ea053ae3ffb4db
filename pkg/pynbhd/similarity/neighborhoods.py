import hashlib
import time
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from pynbhd.similarity.baselines import fit_baselines
from pynbhd.similarity.similarity import Measure, nearest_neighbors


@dataclass(frozen=True)
class Neighborhood(object):
    """An anchor user together with its nearest neighbors.

    Attributes
    ----------
    id          : `str`
                  stable hash of the sorted raw member ids.
    anchor_user : `int`
                  dense index of the anchor user.
    members     : `tuple`
                  sorted dense indices of all members (anchor included).
    raw_members : `tuple`
                  raw ids of `members`.
    n_test      : `int`
                  number of test interactions of the members (the size of `N`); all other test
                  interactions form the complement `D'`.
    """
    id: str
    anchor_user: int
    members: Tuple[int, ...]
    raw_members: Tuple[int, ...]
    n_test: int

    def contains(self, users):
        """Boolean mask telling which entries of `users` (dense indices) belong to this neighborhood."""
        return np.isin(users, self.members)

    @property
    def size(self):
        return len(self.members)


def neighborhood_id(raw_members):
    digest = hashlib.sha1(','.join(str(int(r)) for r in sorted(raw_members)).encode('ascii'))
    return digest.hexdigest()[:12]


def build_neighborhoods(train, test, cfg, baselines=None, verbose=False):
    """Form overlapping KNN neighborhoods: each anchor user plus its `cfg.k_neighbors` most similar users.

    Similarities are computed on `train` only. Candidate neighborhoods with identical member sets are
    deduplicated (the smallest anchor is kept), neighborhoods inducing fewer than
    `cfg.min_test_interactions` test interactions are dropped, and the result is sorted by id.

    Parameters
    ----------
    train     : `RatingDataset`
                training interactions.
    test      : `RatingDataset`
                test interactions sharing the index space of `train`.
    cfg       : `SimilarityConfig`
                neighborhood settings.
    baselines : `BaselineModel`
                baselines for PBC (fitted on `train` if not given).
    verbose   : `bool`
                print a short summary.

    Returns
    -------
    a `list` of `Neighborhood`.
    """
    start_time = time.time()
    if cfg.measure == Measure.PBC and baselines is None:
        baselines = fit_baselines(train)
    neighbors, _ = nearest_neighbors(train, cfg, baselines)
    test_counts = np.bincount(test.users, minlength=test.n_users)
    seen, neighborhoods = set(), []
    for anchor in range(train.n_users):
        others = neighbors[anchor][neighbors[anchor] >= 0]
        if others.size == 0:
            continue
        members = tuple(int(m) for m in np.unique(np.append(others, anchor)))
        if members in seen:
            continue
        seen.add(members)
        n_test = int(np.sum(test_counts[list(members)]))
        if n_test < cfg.min_test_interactions:
            continue
        raw_members = tuple(int(r) for r in train.raw_user_ids[list(members)])
        neighborhoods.append(Neighborhood(neighborhood_id(raw_members), anchor, members, raw_members, n_test))
    neighborhoods.sort(key=lambda nbhd: nbhd.id)
    if not neighborhoods:
        warnings.warn('no neighborhood could be formed (too few defined similarities or test interactions).')
    if verbose:
        info = '  * Neighborhoods: {:d} formed with {:s} (k={:d}) & runtime {:7.5e}'
        print(info.format(len(neighborhoods), cfg.measure.name, cfg.k_neighbors, time.time() - start_time))
    return neighborhoods
