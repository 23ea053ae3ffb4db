import unittest

import numpy as np

from pynbhd.datasets.synthetic import constant_dataset, planted_cluster_dataset, rank1_dataset
from pynbhd.recommenders.mf.nmf import NMF


class TestNMF(unittest.TestCase):
    def test_non_negativity(self):
        train = planted_cluster_dataset(seed=1).split.train
        nmf = NMF({'n_epochs': 1, 'seed_rng': 1, 'verbose': 0})
        nmf.fit(train)
        for _ in range(5):  # every epoch keeps all factors non-negative
            nmf.iterate()
            self.assertGreaterEqual(np.min(nmf.p), 0.0)
            self.assertGreaterEqual(np.min(nmf.q), 0.0)

    def test_rank1_recovery(self):
        ds = rank1_dataset()
        for seed in [2, 3]:
            nmf = NMF({'n_factors': 1, 'n_epochs': 50, 'regularization': 0.0, 'seed_rng': seed, 'verbose': 0})
            nmf.fit(ds)
            rmse = np.sqrt(np.mean(np.square(nmf.score(ds.users, ds.items) - ds.ratings)))
            self.assertLess(rmse, 0.1)

    def test_objective_decreases(self):
        train = planted_cluster_dataset(seed=1).split.train
        for reg in [0.0, 0.06]:
            nmf = NMF({'n_factors': 5, 'n_epochs': 40, 'regularization': reg, 'seed_rng': 5, 'verbose': 0})
            objective = nmf.fit(train)['objective']
            self.assertEqual(objective.size, 40)
            # no oscillation between two states: every epoch is a descent step
            self.assertTrue(np.all(np.diff(objective) <= 1e-9*objective[:-1]))
            self.assertLess(objective[-1], objective[0])

    def test_constant_dataset(self):
        ds = constant_dataset()
        nmf = NMF({'seed_rng': 3, 'verbose': 0})
        nmf.fit(ds)
        predictions = nmf.predict_batch(ds.users, ds.items)
        self.assertTrue(np.all((predictions >= 3.5) & (predictions <= 4.5)))

    def test_fallback(self):
        ds = constant_dataset(n_users=5, n_items=4, density=0.5, seed=4)
        nmf = NMF({'n_epochs': 2, 'seed_rng': 4, 'verbose': 0})
        nmf.fit(ds)
        self.assertAlmostEqual(nmf.predict(ds.n_users, 0), ds.global_mean())

    def test_init_range(self):
        with self.assertRaisesRegex(AssertionError, 'initialization range+'):
            NMF({'init_low': 0.0})


if __name__ == '__main__':
    unittest.main()
