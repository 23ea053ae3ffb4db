import unittest

import numpy as np

from pynbhd.datasets.synthetic import homogeneous_dataset, planted_cluster_dataset
from pynbhd.metrics.metrics import Mode, per_user_metrics
from pynbhd.pipeline.evaluation import *
from pynbhd.pipeline.test_cases import LookupModel, make_neighborhood
from pynbhd.recommenders.mf.svd import SVD
from pynbhd.similarity.neighborhoods import build_neighborhoods
from pynbhd.similarity.similarity import SimilarityConfig


class TestCandidateFilter(unittest.TestCase):
    def test_candidate_filter(self):
        self.assertTrue(candidate_filter(1.1, 0.9, 'prediction'))
        self.assertFalse(candidate_filter(0.9, 1.1, Mode.PREDICTION))
        self.assertFalse(candidate_filter(0.4, 0.3, 'ranking'))
        self.assertTrue(candidate_filter(0.3, 0.4, 'ranking'))
        self.assertFalse(candidate_filter(0.5, 0.5, 'prediction'))
        self.assertFalse(candidate_filter(0.5, 0.5, 'ranking'))


class TestNeighborhoodLoss(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.test = planted_cluster_dataset(n_groups=2, group_size=10, n_items=30, seed=1).split.test

    def test_perfect_model(self):
        nbhd = make_neighborhood([0, 1, 2], self.test)
        self.assertEqual(neighborhood_loss(LookupModel(self.test), nbhd, self.test, 'prediction'), (0.0, 0.0))

    def test_offset_neighborhood(self):
        nbhd = make_neighborhood([0, 1, 2], self.test)
        model = LookupModel(self.test, offsets={0: 1.0, 1: 1.0, 2: -1.0})
        loss_n, loss_dprime = neighborhood_loss(model, nbhd, self.test, 'prediction')
        self.assertAlmostEqual(loss_n, 1.0, delta=1e-12)
        self.assertEqual(loss_dprime, 0.0)

    def test_brute_force(self):
        rng = np.random.default_rng(1)
        noisy = self.test.ratings + rng.normal(0.0, 0.7, self.test.n_ratings)
        model = LookupModel(self.test, noisy)
        nbhd = make_neighborhood([3, 5, 8, 13], self.test)
        loss_n, loss_dprime = neighborhood_loss(model, nbhd, self.test, 'prediction')
        errors_n, errors_dprime = [], []
        for u, i, r in zip(self.test.users, self.test.items, self.test.ratings):
            error = (model.table[(int(u), int(i))] - r)**2
            (errors_n if u in (3, 5, 8, 13) else errors_dprime).append(error)
        self.assertAlmostEqual(loss_n, sum(errors_n)/len(errors_n), delta=1e-12)
        self.assertAlmostEqual(loss_dprime, sum(errors_dprime)/len(errors_dprime), delta=1e-12)


class TestEvaluateAll(unittest.TestCase):
    def test_two_stages(self):
        test = planted_cluster_dataset(n_groups=2, group_size=10, n_items=30, seed=2).split.test
        rng = np.random.default_rng(2)
        noisy = test.ratings + rng.normal(0.0, 0.3, test.n_ratings)
        model = LookupModel(test, noisy, offsets={0: 1.5, 1: 1.5, 2: 1.5})
        worse, better = make_neighborhood([0, 1, 2], test), make_neighborhood([10, 11, 12], test)
        report = evaluate_all(model, [worse, better], test, 'prediction', n_threads=2)
        self.assertEqual([e.neighborhood.id for e in report.evaluations], sorted([worse.id, better.id]))
        flagged = {e.neighborhood.id: e for e in report.evaluations}
        self.assertTrue(flagged[worse.id].critical)
        self.assertFalse(flagged[better.id].critical)
        self.assertEqual(report.critical_fraction, 0.5)
        for e in report.evaluations:
            if e.critical:
                self.assertTrue(e.candidate and e.welch.p_one_sided < report.alpha)
                self.assertIsNotNone(e.metrics_n)
                self.assertAlmostEqual(e.metrics_n.mse, e.loss_n, delta=1e-12)
                self.assertIn('mse', e.critical_zone)
            else:
                self.assertIsNone(e.metrics_n)
        self.assertEqual(report.top(10), report.critical())
        self.assertEqual(report.system_metrics.n_samples, test.n_ratings)
        full = evaluate_all(model, [worse, better], test, 'prediction', full=True)
        self.assertTrue(all(e.metrics_n is not None for e in full.evaluations))

    def test_bonferroni(self):
        test = planted_cluster_dataset(n_groups=2, group_size=10, n_items=30, seed=3).split.test
        neighborhoods = [make_neighborhood(m, test) for m in ([0, 1], [2, 3], [4, 5], [6, 7])]
        model = LookupModel(test, test.ratings + np.random.default_rng(3).normal(0.0, 0.5, test.n_ratings))
        report = evaluate_all(model, neighborhoods, test, 'prediction', bonferroni=True)
        n_candidates = sum(1 for e in report.evaluations if e.candidate)
        self.assertAlmostEqual(report.effective_alpha, 0.05/max(1, n_candidates))
        for e in report.critical():
            self.assertLess(e.welch.p_one_sided, report.effective_alpha)

    def test_skip_and_empty(self):
        test = planted_cluster_dataset(n_groups=2, group_size=10, n_items=30, seed=4).split.test
        everybody = make_neighborhood(range(test.n_users), test)
        with self.assertWarnsRegex(UserWarning, 'skipped+'):
            report = evaluate_all(LookupModel(test), [everybody], test, 'prediction')
        self.assertEqual((report.n_neighborhoods, report.n_skipped, report.critical_fraction), (0, 1, 0.0))
        report = evaluate_all(LookupModel(test), [], test, 'prediction')
        self.assertEqual(report.evaluations, ())

    def test_order_invariance(self):
        test = planted_cluster_dataset(n_groups=2, group_size=10, n_items=30, seed=5).split.test
        neighborhoods = [make_neighborhood(m, test) for m in ([0, 1, 2], [3, 4], [10, 12, 14], [5, 15])]
        model = LookupModel(test, test.ratings + np.random.default_rng(5).normal(0.0, 0.5, test.n_ratings))
        forward = evaluate_all(model, neighborhoods, test, 'prediction', n_threads=1)
        backward = evaluate_all(model, neighborhoods[::-1], test, 'prediction', n_threads=4)
        self.assertEqual(forward, backward)

    def test_planted_cluster_detection(self):
        planted_rates, clean_rates = [], []
        for seed in range(10):
            data = planted_cluster_dataset(seed=seed)
            train, test = data.split.train, data.split.test
            svd = SVD({'n_factors': 10, 'n_epochs': 20, 'seed_rng': seed, 'verbose': 0})
            svd.fit(train)
            neighborhoods = build_neighborhoods(train, test, SimilarityConfig('pcc', k_neighbors=20))
            report = evaluate_all(svd, neighborhoods, test, 'prediction')
            planted = np.isin([e.neighborhood.anchor_user for e in report.evaluations], data.planted_users)
            flags = np.array([e.critical for e in report.evaluations])
            if np.any(planted):
                planted_rates.append(np.mean(flags[planted]))
            if np.any(~planted):
                clean_rates.append(np.mean(flags[~planted]))
        self.assertGreaterEqual(np.mean(planted_rates), 0.8)
        self.assertLessEqual(np.mean(clean_rates), 0.1)

    def test_dprime_loss_is_stable(self):
        for seed in range(3):
            data = planted_cluster_dataset(seed=seed)
            train, test = data.split.train, data.split.test
            svd = SVD({'n_factors': 10, 'n_epochs': 20, 'seed_rng': seed, 'verbose': 0})
            svd.fit(train)
            neighborhoods = build_neighborhoods(train, test, SimilarityConfig('pcc', k_neighbors=20))
            report = evaluate_all(svd, neighborhoods, test, 'prediction')
            self.assertLess(np.std([e.loss_dprime for e in report.evaluations]),
                            np.std([e.loss_n for e in report.evaluations]))
            critical = report.critical()
            if len(critical) >= 2:
                self.assertLess(np.std([e.loss_dprime for e in critical]), np.std([e.loss_n for e in critical]))

    def test_null_calibration(self):
        fractions = []
        for seed in range(10):
            data = homogeneous_dataset(n_groups=10, group_size=20, seed=seed)
            train, test = data.split.train, data.split.test
            model = LookupModel(test, data.true_test)  # identical error distribution for every user
            neighborhoods = build_neighborhoods(train, test, SimilarityConfig('pcc', k_neighbors=10))
            fractions.append(evaluate_all(model, neighborhoods, test, 'prediction').critical_fraction)
        self.assertLessEqual(np.mean(fractions), 2*0.05)

    def test_ranking_mode(self):
        split = planted_cluster_dataset(n_groups=2, group_size=15, n_items=40, seed=6).split
        svd = SVD({'n_factors': 5, 'n_epochs': 5, 'seed_rng': 6, 'verbose': 0})
        svd.fit(split.train)
        neighborhoods = build_neighborhoods(split.train, split.test, SimilarityConfig('msd', k_neighbors=5,
                                                                                     min_test_interactions=5))
        losses = per_user_metrics(svd, split.test, 'ranking', k=5)
        report = evaluate_all(svd, neighborhoods, split.test, 'ranking', k=5)
        for e in report.evaluations:
            self.assertEqual((e.loss_n, e.loss_dprime),
                             neighborhood_loss(svd, e.neighborhood, split.test, 'ranking', k=5, losses=losses))
            self.assertEqual(e.candidate, e.loss_n < e.loss_dprime)
            if e.critical:
                self.assertEqual(set(e.metrics_n.as_dict()), {'precision', 'recall', 'f1', 'n_samples'})
        self.assertEqual(report.system_metrics.mode, Mode.RANKING)


if __name__ == '__main__':
    unittest.main()
