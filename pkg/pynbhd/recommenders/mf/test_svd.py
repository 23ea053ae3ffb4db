import unittest

import numpy as np

from pynbhd.datasets.dataset import RatingScale, from_raw
from pynbhd.datasets.synthetic import constant_dataset, planted_cluster_dataset
from pynbhd.recommenders.mf.svd import SVD


def _zero(model):
    model.b_u[:], model.b_i[:], model.p[:], model.q[:] = 0.0, 0.0, 0.0, 0.0


class TestSVD(unittest.TestCase):
    def test_zero_parameters(self):
        svd = SVD({'n_factors': 3, 'n_epochs': 1, 'seed_rng': 0, 'verbose': 0})
        ds = planted_cluster_dataset(n_groups=2, group_size=10, n_items=20).split.train
        svd.fit(ds)
        _zero(svd)
        self.assertAlmostEqual(svd.predict(0, 0), ds.global_mean())
        self.assertTrue(np.allclose(svd.score(ds.users, ds.items), ds.global_mean()))

    def test_constant_dataset(self):
        ds = constant_dataset()
        svd = SVD({'n_factors': 10, 'n_epochs': 20, 'seed_rng': 1, 'verbose': 0})
        svd.fit(ds)
        rmse = np.sqrt(np.mean(np.square(svd.predict_batch(ds.users, ds.items) - 4.0)))
        self.assertLess(rmse, 0.05)

    def test_objective_decreases(self):
        train = planted_cluster_dataset(seed=2).split.train
        svd = SVD({'n_factors': 10, 'n_epochs': 5, 'seed_rng': 2, 'verbose': 0})
        objective = svd.fit(train)['objective']
        self.assertTrue(np.all(np.diff(objective) < 0.0))

    def test_determinism(self):
        train = planted_cluster_dataset(seed=3).split.train
        models = [SVD({'n_factors': 8, 'n_epochs': 3, 'seed_rng': 42, 'verbose': 0}) for _ in range(2)]
        for model in models:
            model.fit(train)
        for key in ('b_u', 'b_i', 'p', 'q'):
            self.assertTrue(np.array_equal(getattr(models[0], key), getattr(models[1], key)))

    def test_divergence(self):
        train = planted_cluster_dataset(seed=4).split.train
        svd = SVD({'n_factors': 10, 'n_epochs': 20, 'learning_rate': 50.0, 'seed_rng': 4, 'verbose': 0})
        with np.errstate(all='ignore'):
            with self.assertRaisesRegex(FloatingPointError, 'diverged+'):
                svd.fit(train)

    def test_fallback_and_clamp(self):
        # dense user 2 and its only item 2 are absent from training
        ds = from_raw([1, 1, 2, 3], [1, 2, 1, 3], [4.0, 2.0, 5.0, 3.0], RatingScale(1.0, 5.0, 1.0))
        train = ds.subset(ds.users != 2)
        svd = SVD({'n_factors': 2, 'n_epochs': 5, 'seed_rng': 5, 'verbose': 0})
        svd.fit(train)
        unknown_user = 2
        self.assertAlmostEqual(svd.predict(unknown_user, 0),
                               float(np.clip(svd.global_mean + svd.b_i[0], 1.0, 5.0)))
        self.assertAlmostEqual(svd.predict(99, 99), svd.global_mean)
        _zero(svd)
        svd.b_i[0] = 5.7 - svd.global_mean
        self.assertEqual(svd.predict(0, 0), 5.0)
        self.assertAlmostEqual(svd.score(0, 0)[0], 5.7)
        svd.b_i[0] = 4.2 - svd.global_mean
        self.assertAlmostEqual(svd.predict(0, 0), 4.2)

    def test_rank(self):
        ds = from_raw([1, 1, 1, 2], [1, 2, 3, 4], [4.0, 5.0, 3.0, 2.0], RatingScale(1.0, 5.0, 1.0))
        svd = SVD({'n_factors': 2, 'n_epochs': 1, 'seed_rng': 6, 'verbose': 0})
        svd.fit(ds)
        _zero(svd)
        self.assertEqual(list(svd.rank(1, candidates=[2, 1, 0], k=3)), [0, 1, 2])  # ties by item index
        svd.b_i[:3] = np.array([4.2, 4.8, 3.1]) - svd.global_mean
        self.assertEqual(list(svd.rank(1, candidates=[0, 1, 2], k=2)), [1, 0])
        self.assertEqual(list(svd.rank(1, candidates=[0, 1, 2], k=10)), [1, 0, 2])


if __name__ == '__main__':
    unittest.main()
