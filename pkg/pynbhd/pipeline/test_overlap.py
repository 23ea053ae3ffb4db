import unittest

from pynbhd.metrics.metrics import Mode
from pynbhd.pipeline.evaluation import CriticalReport, NeighborhoodEvaluation
from pynbhd.pipeline.overlap import overlap_analysis
from pynbhd.similarity.neighborhoods import Neighborhood


def _report(name, ids, critical_ids):
    evaluations = tuple(NeighborhoodEvaluation(Neighborhood(i, 0, (0,), (0,), 30), 1.0, 0.5, 0.5, 0.5, True, None,
                                               i in critical_ids) for i in sorted(ids))
    return CriticalReport(Mode.PREDICTION, name, None, 0.05, evaluations, tuple(sorted(ids)))


IDS = ['a', 'b', 'c', 'd', 'e', 'f']


class TestOverlap(unittest.TestCase):
    def test_identical(self):
        overlap = overlap_analysis([_report(m, IDS, {'a', 'b'}) for m in ('svd', 'slopeone', 'nmf')])
        self.assertEqual(overlap.fractions(), {'unique_1': 0.0, 'common_exactly_2': 0.0, 'common_all_3': 1.0})
        self.assertEqual(overlap.n_critical, (2, 2, 2))

    def test_disjoint(self):
        overlap = overlap_analysis([_report('svd', IDS, {'a'}), _report('slopeone', IDS, {'b', 'c'}),
                                    _report('nmf', IDS, {'d'})])
        self.assertEqual(overlap.unique_1, 1.0)
        self.assertEqual(overlap.n_union, 4)

    def test_partition(self):
        overlap = overlap_analysis([_report('svd', IDS, {'a', 'b', 'c'}), _report('slopeone', IDS, {'b', 'c', 'd'}),
                                    _report('nmf', IDS, {'c', 'e'})])
        fractions = overlap.fractions()
        self.assertAlmostEqual(sum(fractions.values()), 1.0, delta=1e-9)
        self.assertEqual(overlap.counts, {1: 3, 2: 1, 3: 1})
        self.assertEqual(overlap.ids[3], frozenset({'c'}))
        self.assertEqual(overlap.ids[2], frozenset({'b'}))

    def test_two_models(self):
        overlap = overlap_analysis([_report('svd', IDS, {'a', 'b'}), _report('nmf', IDS, {'b'})])
        self.assertEqual(set(overlap.fractions()), {'unique_1', 'common_all_2'})
        self.assertEqual(overlap.fractions()['common_all_2'], 0.5)

    def test_empty_union(self):
        overlap = overlap_analysis([_report('svd', IDS, set()), _report('nmf', IDS, set())])
        self.assertEqual(overlap.n_union, 0)
        self.assertEqual(set(overlap.fractions().values()), {0.0})

    def test_errors(self):
        with self.assertRaisesRegex(ValueError, 'at least 2+'):
            overlap_analysis([_report('svd', IDS, {'a'})])
        with self.assertRaisesRegex(ValueError, 'different neighborhoods+'):
            overlap_analysis([_report('svd', IDS, {'a'}), _report('nmf', IDS[:-1], {'a'})])


if __name__ == '__main__':
    unittest.main()
