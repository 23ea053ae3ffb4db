import math
import os
import tempfile
import unittest

import numpy as np

from pynbhd.datasets.dataset import *
from pynbhd.datasets.test_cases import data_file, write_rows


class TestRatingScale(unittest.TestCase):
    def test_init(self):
        scale = RatingScale(0.5, 5.0, 0.5)
        self.assertEqual(str(scale), '0.5:5:0.5')
        self.assertEqual(scale.default_threshold, 3.5)
        self.assertEqual(RatingScale(1, 5, 1).default_threshold, 4.0)
        with self.assertRaisesRegex(ValueError, 'min_rating+'):
            RatingScale(5.0, 1.0, 1.0)
        with self.assertRaisesRegex(ValueError, 'step+'):
            RatingScale(1.0, 5.0, 0.0)
        with self.assertRaisesRegex(ValueError, 'not divisible+'):
            RatingScale(1.0, 5.0, 0.3)

    def test_parse(self):
        self.assertEqual(RatingScale.parse('1:5:1'), RatingScale(1.0, 5.0, 1.0))
        with self.assertRaisesRegex(ValueError, 'scale should+'):
            RatingScale.parse('1:5')


class TestLoad(unittest.TestCase):
    def test_load_csv_single_row(self):
        ds = load_csv(write_rows(['1,1,5.0']))
        self.assertEqual((ds.n_users, ds.n_items, ds.n_ratings), (1, 1, 1))
        self.assertEqual(list(ds.interactions()), [Interaction(1, 1, 5.0, None)])
        self.assertEqual(dataset_stats(ds).sparsity, 0.0)

    def test_load_csv_header_and_keep_last(self):
        path = write_rows(['userId,movieId,rating,timestamp',
                           '7,10,3.0,100',
                           '7,20,2.5,101',
                           '7,10,4.0,102'])
        ds = load_csv(path)
        self.assertEqual(ds.n_ratings, 2)
        ratings = {(x.user_id, x.item_id): x.rating for x in ds.interactions()}
        self.assertEqual(ratings, {(7, 10): 4.0, (7, 20): 2.5})

    def test_load_csv_errors(self):
        with self.assertRaisesRegex(ValueError, 'line 2+'):
            load_csv(write_rows(['1,1,5.0', '1,x,4.0']))
        with self.assertRaisesRegex(ValueError, 'outside scale+'):
            load_csv(write_rows(['1,1,5.5']))
        with self.assertRaisesRegex(ValueError, 'empty file+'):
            load_csv(write_rows([]))
        with self.assertRaises(FileNotFoundError):
            load_csv('/nonexistent/ratings.csv')

    def test_blank_lines_keep_line_numbers(self):
        with self.assertRaisesRegex(ValueError, 'line 3 +'):
            load_csv(write_rows(['1,1,4.0', '', '2,1,abc']))
        with self.assertRaisesRegex(ValueError, 'at line 5 lies outside scale+'):
            load_csv(write_rows(['userId,movieId,rating', '1,1,4.0', '', '  ', '2,1,9.0']))
        with self.assertRaisesRegex(ValueError, 'line 4 +'):
            load_dat(write_rows(['1::1193::5::978300760', '', '', '2::x::3::978300761'], '.dat'))
        ds = load_csv(write_rows(['1,1,4.0', '', '2,1,3.0', '']))
        self.assertEqual(ds.n_ratings, 2)

    def test_load_dat(self):
        ds = load_dat(write_rows(['1::1193::5::978300760', '2::1193::3::978300761'], '.dat'))
        self.assertEqual(next(ds.interactions()), Interaction(1, 1193, 5.0, 978300760))
        self.assertEqual(ds.scale, SCALES['ml-1m'])
        with self.assertRaisesRegex(ValueError, 'line 1+'):
            load_dat(write_rows(['1::1193'], '.dat'))

    def test_personality_schema(self):
        path = write_rows(['useri,movie_id,rating,tstamp', 'a1,5,4.0,2017-01-01'])
        with self.assertRaisesRegex(ValueError, 'invalid user id+'):
            load_csv(path, 'personality')
        path = write_rows(['useri,movie_id,rating,tstamp', '11,5,4.0,2017-01-01'])
        ds = load_csv(path, 'personality')
        self.assertEqual(ds.n_ratings, 1)
        self.assertIsNone(ds.timestamps)

    @unittest.skipIf(data_file('ml-latest-small', 'ratings.csv') is None, 'ml-latest-small is not available')
    def test_ml_latest_small(self):
        ds = load_csv(data_file('ml-latest-small', 'ratings.csv'))
        stats = dataset_stats(ds)
        self.assertEqual(stats.summary(), {'n_users': 610, 'n_items': 9742, 'n_ratings': 100836,
                                           'sparsity': 0.983})
        self.assertAlmostEqual(stats.sparsity, 1.0 - 100836/(610*9742), delta=1e-9)
        split = train_test_split(ds, 0.2, 42)
        self.assertEqual(split.test.n_ratings, sum(math.floor(0.2*n) for n in ds.user_counts() if n >= 2))

    @unittest.skipIf(data_file('ml-1m', 'ratings.dat') is None, 'ml-1m is not available')
    def test_ml_1m(self):
        stats = dataset_stats(load_dat(data_file('ml-1m', 'ratings.dat')))
        self.assertEqual((stats.n_users, stats.n_ratings), (6040, 1000209))
        self.assertAlmostEqual(stats.sparsity, 0.957, delta=0.001)


class TestSplit(unittest.TestCase):
    def setUp(self):
        users = np.repeat([0, 1, 2], [10, 1, 5])
        items = np.concatenate([np.arange(10), [3], np.arange(5)])
        self.ds = from_raw(users, items, np.full(users.shape, 3.0), SCALES['ml-1m'])

    def test_floor_rule(self):
        split = train_test_split(self.ds, 0.2, 1)
        counts = split.test.user_counts()
        self.assertEqual(list(counts), [2, 0, 1])
        self.assertTrue(np.all(np.isin(split.test.present_users(), split.train.present_users())))

    def test_round_trip_and_determinism(self):
        split = train_test_split(self.ds, 0.3, 7)
        keys = lambda d: d.users*d.n_items + d.items
        merged = np.sort(np.concatenate([keys(split.train), keys(split.test)]))
        self.assertTrue(np.array_equal(merged, np.sort(keys(self.ds))))
        self.assertEqual(np.intersect1d(keys(split.train), keys(split.test)).size, 0)
        again = train_test_split(self.ds, 0.3, 7)
        self.assertTrue(np.array_equal(keys(split.test), keys(again.test)))
        with self.assertRaisesRegex(ValueError, 'test_fraction+'):
            train_test_split(self.ds, 1.0, 7)

    def test_subsample_users(self):
        self.assertIs(subsample_users(self.ds, 3, 0), self.ds)
        a, b = subsample_users(self.ds, 2, 5), subsample_users(self.ds, 2, 5)
        self.assertEqual(a.n_users, 2)
        self.assertTrue(np.array_equal(a.raw_user_ids, b.raw_user_ids))
        self.assertTrue(np.array_equal(a.ratings, b.ratings))
        with self.assertRaisesRegex(ValueError, 'n_users+'):
            subsample_users(self.ds, 0, 5)


class TestCache(unittest.TestCase):
    def test_save_and_load(self):
        ds = load_csv(write_rows(['userId,movieId,rating,timestamp', '3,9,4.5,1', '1,9,1.0,2', '3,2,2.0,3']))
        folder = tempfile.mkdtemp()
        first, second = os.path.join(folder, 'a.csv'), os.path.join(folder, 'b.csv')
        save_dataset(ds, first)
        cached = load_cached_dataset(first)
        save_dataset(cached, second)
        with open(first, 'rb') as f1, open(second, 'rb') as f2:
            self.assertEqual(f1.read(), f2.read())
        self.assertEqual(list(cached.interactions()), list(ds.interactions()))
        self.assertEqual(cached.scale, ds.scale)

    def test_subset_keeps_index_space(self):
        ds = from_raw([10, 10, 20, 20, 30, 30], [5, 6, 5, 7, 6, 8], [4.0, 3.0, 2.5, 5.0, 1.0, 3.5],
                      RatingScale(0.5, 5.0, 0.5))
        side = ds.subset(ds.users < 2)  # the last user and item 8 have no interaction here
        path = os.path.join(tempfile.mkdtemp(), 'side.csv')
        save_dataset(side, path)
        cached = load_cached_dataset(path)
        self.assertEqual((cached.n_users, cached.n_items), (3, 4))
        self.assertEqual(cached.raw_user_ids.tolist(), [10, 20, 30])
        self.assertEqual(cached.raw_item_ids.tolist(), [5, 6, 7, 8])
        self.assertEqual(cached.users.tolist(), side.users.tolist())
        self.assertEqual(cached.items.tolist(), side.items.tolist())
        self.assertEqual(list(cached.interactions()), list(side.interactions()))

    def test_not_a_cache(self):
        with self.assertRaisesRegex(ValueError, 'not a pynbhd dataset cache+'):
            load_cached_dataset(write_rows(['userId,movieId,rating', '1,1,4.0']))
        with self.assertRaisesRegex(ValueError, 'raw_item_ids+'):
            load_cached_dataset(write_rows(['# scale=0.5:5:0.5', '# raw_user_ids=1', 'user,item,rating', '0,0,4.0']))


if __name__ == '__main__':
    unittest.main()
