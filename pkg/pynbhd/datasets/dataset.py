import os
import re
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd
import scipy.sparse as sp


@dataclass(frozen=True)
class RatingScale(object):
    """Rating scale of a dataset, e.g. `0.5-5.0` with step `0.5` for *ml-latest-small*.

    Parameters
    ----------
    min_rating : `float`
                 lowest admissible rating.
    max_rating : `float`
                 highest admissible rating.
    step       : `float`
                 granularity of the scale.
    """
    min_rating: float
    max_rating: float
    step: float

    def __post_init__(self):
        if not self.min_rating < self.max_rating:
            raise ValueError(f'min_rating (== {self.min_rating}) should < max_rating (== {self.max_rating}).')
        if not self.step > 0.0:
            raise ValueError(f'step (== {self.step}) should > 0.')
        n_steps = (self.max_rating - self.min_rating)/self.step
        if abs(n_steps - round(n_steps)) > 1e-9:
            raise ValueError(f'range [{self.min_rating}, {self.max_rating}] is not divisible by step {self.step}.')

    @classmethod
    def parse(cls, text):
        """Parse a `min:max:step` string (e.g. `'0.5:5:0.5'`)."""
        fields = text.split(':')
        if len(fields) != 3:
            raise ValueError(f'scale should look like `min:max:step` (not `{text}`).')
        try:
            return cls(*(float(f) for f in fields))
        except (TypeError, ValueError) as e:
            raise ValueError(f'invalid scale `{text}`: {e}')

    def contains(self, ratings):
        ratings = np.asarray(ratings, dtype=np.float64)
        return (ratings >= self.min_rating - 1e-9) & (ratings <= self.max_rating + 1e-9)

    def clip(self, ratings):
        return np.clip(ratings, self.min_rating, self.max_rating)

    @property
    def default_threshold(self):
        # relevance threshold: 3.5 on half-star scales, 4 on integer scales
        return 3.5 if self.step < 1.0 else 4.0

    def __str__(self):
        return '{:g}:{:g}:{:g}'.format(self.min_rating, self.max_rating, self.step)


SCALES = {'ml-latest-small': RatingScale(0.5, 5.0, 0.5),
          'ml-latest': RatingScale(0.5, 5.0, 0.5),
          'ml-1m': RatingScale(1.0, 5.0, 1.0),
          'personality': RatingScale(0.5, 5.0, 0.5)}

# column mappings: names when the file has a header, positions otherwise
SCHEMAS = {'movielens': {'user': 'userId', 'item': 'movieId', 'rating': 'rating', 'timestamp': 'timestamp',
                         'sep': ',', 'header': 'infer'},
           'movielens-dat': {'user': 0, 'item': 1, 'rating': 2, 'timestamp': 3, 'sep': '::', 'header': False},
           'personality': {'user': 'useri', 'item': 'movie_id', 'rating': 'rating', 'timestamp': 'tstamp',
                           'sep': ',', 'header': True},
           'positional': {'user': 0, 'item': 1, 'rating': 2, 'timestamp': 3, 'sep': ',', 'header': False}}


class Interaction(NamedTuple):
    user_id: int
    item_id: int
    rating: float
    timestamp: Optional[int] = None


class RatingDataset(object):
    """Immutable set of (user, item, rating[, timestamp]) interactions on a rating scale.

    Users and items are addressed by *dense* indices (`0..n_users-1`, `0..n_items-1`) while raw ids are
    kept in `raw_user_ids` and `raw_item_ids` for reporting. Subsets (e.g. the two sides of a train/test
    split) share the index space of their parent, so that the same index always denotes the same user.

    Parameters
    ----------
    users        : `array_like`
                   dense user index of each interaction.
    items        : `array_like`
                   dense item index of each interaction.
    ratings      : `array_like`
                   rating of each interaction.
    scale        : `RatingScale`
                   rating scale.
    raw_user_ids : `array_like`
                   raw id of each dense user index.
    raw_item_ids : `array_like`
                   raw id of each dense item index.
    timestamps   : `array_like`
                   optional timestamp of each interaction (ignored by all computations).
    name         : `str`
                   optional human-readable name.
    """
    def __init__(self, users, items, ratings, scale, raw_user_ids, raw_item_ids, timestamps=None, name=None):
        self.users = _frozen(np.asarray(users, dtype=np.int64))
        self.items = _frozen(np.asarray(items, dtype=np.int64))
        self.ratings = _frozen(np.asarray(ratings, dtype=np.float64))
        self.raw_user_ids = _frozen(np.asarray(raw_user_ids, dtype=np.int64))
        self.raw_item_ids = _frozen(np.asarray(raw_item_ids, dtype=np.int64))
        self.timestamps = None if timestamps is None else _frozen(np.asarray(timestamps, dtype=np.int64))
        self.scale = scale
        self.name = name
        if not (self.users.shape == self.items.shape == self.ratings.shape) or self.users.ndim != 1:
            raise ValueError('users, items and ratings should be 1-d arrays of the same length.')
        if self.timestamps is not None and self.timestamps.shape != self.users.shape:
            raise ValueError('timestamps should have the same length as ratings.')
        if self.users.size == 0:
            raise ValueError('a rating dataset needs at least one interaction.')
        if self.users.min() < 0 or self.users.max() >= self.n_users:
            raise ValueError('user indices should lie in [0, n_users).')
        if self.items.min() < 0 or self.items.max() >= self.n_items:
            raise ValueError('item indices should lie in [0, n_items).')
        if not np.all(np.isfinite(self.ratings)) or not np.all(scale.contains(self.ratings)):
            raise ValueError(f'all ratings should lie within the rating scale {scale}.')
        if np.unique(self.users*self.n_items + self.items).size != self.users.size:
            raise ValueError('(user, item) pairs should be unique within a dataset.')
        self._csr, self._user_index, self._item_index = None, None, None

    @property
    def n_users(self):
        return self.raw_user_ids.size

    @property
    def n_items(self):
        return self.raw_item_ids.size

    @property
    def n_ratings(self):
        return self.ratings.size

    @property
    def user_index(self):
        """Mapping raw user id -> dense index."""
        if self._user_index is None:
            self._user_index = {int(r): u for u, r in enumerate(self.raw_user_ids)}
        return self._user_index

    @property
    def item_index(self):
        """Mapping raw item id -> dense index."""
        if self._item_index is None:
            self._item_index = {int(r): i for i, r in enumerate(self.raw_item_ids)}
        return self._item_index

    def present_users(self):
        return np.unique(self.users)

    def present_items(self):
        return np.unique(self.items)

    def user_counts(self):
        return np.bincount(self.users, minlength=self.n_users)

    def item_counts(self):
        return np.bincount(self.items, minlength=self.n_items)

    def global_mean(self):
        return float(np.mean(self.ratings))

    def to_csr(self):
        """User-by-item rating matrix (`scipy.sparse.csr_matrix`) with sorted column indices."""
        if self._csr is None:
            csr = sp.csr_matrix((self.ratings, (self.users, self.items)), shape=(self.n_users, self.n_items))
            csr.sort_indices()
            self._csr = csr
        return self._csr

    def user_ratings(self, u):
        """Items (sorted) and ratings of the dense user `u`."""
        csr = self.to_csr()
        start, end = csr.indptr[u], csr.indptr[u + 1]
        return csr.indices[start:end], csr.data[start:end]

    def rating_vector(self, u):
        """Ratings of `u` over the whole item axis, with `np.nan` for unrated items."""
        x = np.full((self.n_items,), np.nan)
        items, ratings = self.user_ratings(u)
        x[items] = ratings
        return x

    def subset(self, mask, name=None):
        """Interactions selected by a boolean `mask`, sharing this dataset's index space."""
        mask = np.asarray(mask, dtype=bool)
        return RatingDataset(self.users[mask], self.items[mask], self.ratings[mask], self.scale,
                             self.raw_user_ids, self.raw_item_ids,
                             None if self.timestamps is None else self.timestamps[mask],
                             name if name is not None else self.name)

    def interactions(self):
        """Iterate over interactions expressed with *raw* ids."""
        for n in range(self.n_ratings):
            yield Interaction(int(self.raw_user_ids[self.users[n]]), int(self.raw_item_ids[self.items[n]]),
                              float(self.ratings[n]),
                              None if self.timestamps is None else int(self.timestamps[n]))

    def __len__(self):
        return self.n_ratings

    def __repr__(self):
        return '{:s}(name={!r}, n_users={:d}, n_items={:d}, n_ratings={:d}, scale={!s})'.format(
            self.__class__.__name__, self.name, self.n_users, self.n_items, self.n_ratings, self.scale)


@dataclass(frozen=True)
class SplitPair(object):
    train: RatingDataset
    test: RatingDataset
    seed: int


@dataclass(frozen=True)
class DatasetStats(object):
    n_users: int
    n_items: int
    n_ratings: int
    sparsity: float  # not rounded

    def summary(self, decimals=3):
        return {'n_users': self.n_users,
                'n_items': self.n_items,
                'n_ratings': self.n_ratings,
                'sparsity': round(self.sparsity, decimals)}


# helper function
def _frozen(x):
    x.flags.writeable = False
    return x


def from_raw(raw_users, raw_items, ratings, scale, timestamps=None, name=None):
    """Build a `RatingDataset` from raw ids, with dense indices in ascending raw-id order.

    Interactions are stored sorted by (user, item). Duplicate (user, item) pairs are **not** allowed here;
    deduplicate before calling.
    """
    raw_user_ids, users = np.unique(np.asarray(raw_users, dtype=np.int64), return_inverse=True)
    raw_item_ids, items = np.unique(np.asarray(raw_items, dtype=np.int64), return_inverse=True)
    order = np.lexsort((items, users))
    ratings = np.asarray(ratings, dtype=np.float64)[order]
    if timestamps is not None:
        timestamps = np.asarray(timestamps, dtype=np.int64)[order]
    return RatingDataset(users[order], items[order], ratings, scale, raw_user_ids, raw_item_ids,
                         timestamps, name)


def _has_header(path, sep, header):
    with open(path, 'r', encoding='utf-8') as f:
        first = f.readline()
    if not first.strip():
        raise ValueError(f'{path}: empty file.')
    if header != 'infer':
        return bool(header)
    try:
        float(first.split(sep)[0].strip())
        return False
    except ValueError:
        return True


def _read_frame(path, schema):
    sep, header = schema.get('sep', ','), schema.get('header', 'infer')
    has_header = _has_header(path, sep, header)
    if len(sep) == 1:
        engine, pattern = 'c', sep
    else:
        engine, pattern = 'python', re.escape(sep)
    try:
        frame = pd.read_csv(path, sep=pattern, engine=engine, header=0 if has_header else None,
                            dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise ValueError(f'{path}: empty file.')
    except pd.errors.ParserError as e:
        raise ValueError(f'{path}: malformed row ({e}).')
    # row `r` of the unfiltered frame sits on physical line `r + 1 + has_header`
    lines = np.arange(frame.shape[0]) + 1 + int(has_header)
    blank = (frame.fillna('').apply(lambda c: c.str.strip()) == '').all(axis=1).to_numpy()
    frame, lines = frame.loc[~blank].reset_index(drop=True), lines[~blank]
    if frame.shape[0] == 0:
        raise ValueError(f'{path}: empty file.')
    columns = {}
    for key in ['user', 'item', 'rating', 'timestamp']:
        column = schema.get(key)
        if has_header and isinstance(column, str):
            if column not in frame.columns:
                if key == 'timestamp':
                    continue
                raise ValueError(f'{path}: missing column `{column}` in header.')
            columns[key] = frame[column]
        else:
            position = column if isinstance(column, int) else ['user', 'item', 'rating', 'timestamp'].index(key)
            if position >= frame.shape[1]:
                if key == 'timestamp':
                    continue
                raise ValueError(f'{path}: malformed row at line {lines[0]} '
                                 f'(expected at least 3 columns, got {frame.shape[1]}).')
            columns[key] = frame.iloc[:, position]
    return columns, lines


def _to_numbers(column, path, lines, name, integral):
    values = pd.to_numeric(column.str.strip(), errors='coerce').to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if integral:
        bad |= (values != np.round(values))
    if np.any(bad):
        row = int(np.argmax(bad))
        raise ValueError(f'{path}: malformed row at line {lines[row]} (invalid {name} `{column.iloc[row]}`).')
    return values


def load_csv(path, schema='movielens', scale=None, name=None):
    """Load a rating file in (comma-)separated format.

    Parameters
    ----------
    path   : `str`
             file path.
    schema : `str` or `dict`
             either a key of `SCHEMAS` or a column mapping with keys `user`, `item`, `rating` and optionally
             `timestamp` (column names if the file has a header, positions otherwise), `sep` and `header`
             (`True`, `False` or `'infer'`).
    scale  : `RatingScale`
             rating scale (default: `0.5:5:0.5`).

    Returns
    -------
    a `RatingDataset` where duplicated (user, item) pairs keep their **last** occurrence.
    """
    if isinstance(schema, str):
        if schema not in SCHEMAS:
            raise ValueError(f'unknown schema `{schema}` (choose from {sorted(SCHEMAS)}).')
        schema = SCHEMAS[schema]
    if scale is None:
        scale = SCALES['ml-latest-small']
    if not os.path.isfile(path):
        raise FileNotFoundError(f'{path}: no such file.')
    columns, lines = _read_frame(path, schema)
    users = _to_numbers(columns['user'], path, lines, 'user id', True)
    items = _to_numbers(columns['item'], path, lines, 'item id', True)
    ratings = _to_numbers(columns['rating'], path, lines, 'rating', False)
    outside = ~scale.contains(ratings)
    if np.any(outside):
        row = int(np.argmax(outside))
        raise ValueError(f'{path}: rating {ratings[row]:g} at line {lines[row]} lies outside scale {scale}.')
    timestamps = None
    if 'timestamp' in columns:
        stamps = pd.to_numeric(columns['timestamp'].str.strip(), errors='coerce').to_numpy(dtype=np.float64)
        if np.all(np.isfinite(stamps)):
            timestamps = stamps.astype(np.int64)
    frame = pd.DataFrame({'user': users.astype(np.int64), 'item': items.astype(np.int64), 'rating': ratings})
    if timestamps is not None:
        frame['timestamp'] = timestamps
    frame = frame.drop_duplicates(subset=['user', 'item'], keep='last')
    return from_raw(frame['user'].to_numpy(), frame['item'].to_numpy(), frame['rating'].to_numpy(), scale,
                    None if timestamps is None else frame['timestamp'].to_numpy(),
                    name if name is not None else os.path.basename(path))


def load_dat(path, separator='::', scale=None, name=None):
    """Load a headerless `::`-separated rating file (MovieLens 1M `ratings.dat`)."""
    if scale is None:
        scale = SCALES['ml-1m']
    schema = dict(SCHEMAS['movielens-dat'], sep=separator)
    return load_csv(path, schema, scale, name)


def subsample_users(ds, n_users, seed):
    """Restrict `ds` to a uniformly random (seeded) subset of `n_users` users, re-indexed densely."""
    present = ds.present_users()
    if not 1 <= n_users <= present.size:
        raise ValueError(f'n_users (== {n_users}) should lie in [1, {present.size}].')
    if n_users == present.size:
        return ds
    chosen = np.random.default_rng(seed).choice(present, size=n_users, replace=False)
    mask = np.isin(ds.users, chosen)
    return from_raw(ds.raw_user_ids[ds.users[mask]], ds.raw_item_ids[ds.items[mask]], ds.ratings[mask],
                    ds.scale, None if ds.timestamps is None else ds.timestamps[mask], ds.name)


def train_test_split(ds, test_fraction=0.2, seed=0):
    """Per-user stratified split: each user sends `floor(test_fraction*n_u)` interactions to test.

    Users with fewer than 2 interactions stay entirely in train. Both sides share `ds`'s index space.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f'test_fraction (== {test_fraction}) should lie in (0, 1).')
    counts = ds.user_counts()
    n_test = np.where(counts >= 2, np.floor(test_fraction*counts), 0).astype(np.int64)
    keys = np.random.default_rng(seed).permutation(ds.n_ratings)
    order = np.lexsort((keys, ds.users))  # random order within each user
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    sorted_users = ds.users[order]
    rank = np.arange(ds.n_ratings) - starts[sorted_users]
    is_test = np.zeros((ds.n_ratings,), dtype=bool)
    is_test[order] = rank < n_test[sorted_users]
    return SplitPair(ds.subset(~is_test), ds.subset(is_test), seed)


def dataset_stats(ds):
    n_users, n_items = ds.present_users().size, ds.present_items().size
    return DatasetStats(n_users, n_items, ds.n_ratings, 1.0 - ds.n_ratings/(n_users*n_items))


def save_dataset(ds, path):
    """Write the internal cache format: sorted CSV with dense indices and raw ids.

    Leading `#` lines hold the scale and the full raw-id maps, so a subset keeps its parent's index space.
    """
    order = np.lexsort((ds.items, ds.users))
    frame = pd.DataFrame({'user': ds.users[order], 'item': ds.items[order],
                          'raw_user': ds.raw_user_ids[ds.users[order]],
                          'raw_item': ds.raw_item_ids[ds.items[order]],
                          'rating': ds.ratings[order]})
    if ds.timestamps is not None:
        frame['timestamp'] = ds.timestamps[order]
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write('# scale={!s}\n'.format(ds.scale))
        f.write('# raw_user_ids={}\n'.format(' '.join(str(r) for r in ds.raw_user_ids)))
        f.write('# raw_item_ids={}\n'.format(' '.join(str(r) for r in ds.raw_item_ids)))
        frame.to_csv(f, index=False, lineterminator='\n')


def _cache_header(path):
    header = {}
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            if not line.startswith('# '):
                break
            key, _, value = line[2:].rstrip('\n').partition('=')
            header[key] = value
    missing = {'scale', 'raw_user_ids', 'raw_item_ids'} - set(header)
    if missing:
        raise ValueError(f'{path}: not a pynbhd dataset cache (missing {", ".join(sorted(missing))}).')
    return header


def load_cached_dataset(path, name=None):
    """Read a file written by `save_dataset` back into a dataset with the same index space and raw ids."""
    header = _cache_header(path)
    scale = RatingScale.parse(header['scale'])
    raw_user_ids = np.array(header['raw_user_ids'].split(), dtype=np.int64)
    raw_item_ids = np.array(header['raw_item_ids'].split(), dtype=np.int64)
    frame = pd.read_csv(path, comment='#')
    users, items = frame['user'].to_numpy(), frame['item'].to_numpy()
    if users.max() >= raw_user_ids.size or items.max() >= raw_item_ids.size:
        raise ValueError(f'{path}: dense indices exceed the stored raw-id maps.')
    if np.any(raw_user_ids[users] != frame['raw_user'].to_numpy()) or \
            np.any(raw_item_ids[items] != frame['raw_item'].to_numpy()):
        raise ValueError(f'{path}: raw ids disagree with the stored raw-id maps.')
    timestamps = frame['timestamp'].to_numpy() if 'timestamp' in frame.columns else None
    return RatingDataset(users, items, frame['rating'].to_numpy(), scale, raw_user_ids, raw_item_ids,
                         timestamps, name or os.path.basename(path))
