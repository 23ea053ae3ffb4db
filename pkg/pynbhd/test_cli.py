import contextlib
import io
import json
import os
import shutil
import tempfile
import unittest
from unittest import mock

import numba as nb
import numpy as np
import pandas as pd

from pynbhd.cli import *
from pynbhd.datasets.synthetic import planted_cluster_dataset
from pynbhd.datasets.test_cases import data_file


def _write_ratings(folder, seed=0):
    split = planted_cluster_dataset(n_groups=3, group_size=15, n_items=40, seed=seed).split
    frames = []
    for ds in (split.train, split.test):
        frames.append(pd.DataFrame({'userId': ds.raw_user_ids[ds.users] + 1,
                                    'movieId': ds.raw_item_ids[ds.items] + 1,
                                    'rating': ds.ratings, 'timestamp': 964982703}))
    frame = pd.concat(frames).sort_values(['userId', 'movieId'])
    path = os.path.join(folder, 'ratings.csv')
    frame.to_csv(path, index=False, float_format='%.6g', lineterminator='\n')
    return path


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        status = main(argv)
    return status, out.getvalue(), err.getvalue()


def _read(path):
    with open(path, 'rb') as f:
        return f.read()


SMALL = ['--n-factors', '5', '--n-epochs', '5', '--k-neighbors', '5', '--min-test-interactions', '5']


class TestRunConfig(unittest.TestCase):
    def test_stage_seeds(self):
        self.assertEqual(stage_seeds(42), stage_seeds(42))
        self.assertEqual(len(set(stage_seeds(42).values())), 3)
        self.assertNotEqual(stage_seeds(42), stage_seeds(43))

    def test_validation(self):
        RunConfig('ratings.csv')
        for kwargs in [{'format': 'xlsx'}, {'test_fraction': 1.0}, {'model': 'knn'}, {'alpha': 0.0},
                       {'top_k': 0}, {'scale': '5:1:1'}, {'n_epochs': 0}, {'schema': 'unknown'}]:
            with self.assertRaises(ValueError):
                RunConfig('ratings.csv', **kwargs)

    def test_as_dict(self):
        cfg = RunConfig('ratings.csv', mode='ranking', threads=1)
        out = cfg.as_dict()
        self.assertEqual(out['mode'], 'ranking')
        self.assertEqual(out['similarity']['measure'], 'pcc')
        self.assertEqual(out['seeds'], stage_seeds(42))
        self.assertNotIn('threads', out)
        self.assertNotIn('out', out)
        self.assertEqual(json.loads(json.dumps(out)), out)


class TestCommands(unittest.TestCase):
    def setUp(self):
        self.folder = tempfile.mkdtemp()
        self.data = _write_ratings(self.folder)
        self.out = os.path.join(self.folder, 'out')

    def tearDown(self):
        shutil.rmtree(self.folder)

    def test_stats(self):
        status, stdout, _ = _run(['stats', '--data', self.data, '--json'])
        self.assertEqual(status, 0)
        stats = json.loads(stdout)
        self.assertEqual(stats['n_users'], 45)
        self.assertEqual(stats['n_items'], 40)
        self.assertEqual(stats['n_ratings'], len(pd.read_csv(self.data)))
        status, stdout, _ = _run(['stats', '--data', self.folder])
        self.assertEqual(status, 0)
        self.assertIn('users: 45 & items: 40', stdout)

    def test_load_data_directory(self):
        ds = load_data(RunConfig(self.folder))
        self.assertEqual(ds.name, os.path.basename(self.folder))
        self.assertEqual((ds.n_users, ds.n_items, ds.n_ratings), (45, 40, len(pd.read_csv(self.data))))
        self.assertEqual(str(ds.scale), '0.5:5:0.5')
        same = load_data(RunConfig(self.data))
        self.assertTrue(np.array_equal(same.ratings, ds.ratings))

    def test_missing_path(self):
        status, stdout, stderr = _run(['stats', '--data', os.path.join(self.folder, 'missing.csv')])
        self.assertEqual(status, 1)
        self.assertEqual(stdout, '')
        self.assertIn("pynbhd: error in stage 'load'", stderr)

    def test_output_failure(self):
        with mock.patch('pynbhd.cli._print_summary', side_effect=BrokenPipeError('stdout closed')):
            status, stdout, stderr = _run(['evaluate', '--data', self.data, '--out', self.out] + SMALL)
        self.assertEqual(status, 1)
        self.assertEqual(stdout, '')
        self.assertIn("pynbhd: error in stage 'output': stdout closed", stderr)
        self.assertTrue(os.path.isfile(os.path.join(self.out, 'report.json')))
        with mock.patch('pynbhd.cli.dataset_stats', side_effect=ZeroDivisionError('division by zero')):
            status, _, stderr = _run(['stats', '--data', self.data])
        self.assertEqual(status, 1)
        self.assertIn("error in stage 'load'", stderr)

    def test_data_dir_environment(self):
        with mock.patch.dict(os.environ, {DATA_DIR_ENV: self.folder}):
            status, stdout, _ = _run(['stats', '--data', 'ratings.csv', '--json'])
            self.assertEqual(status, 0)
            self.assertEqual(json.loads(stdout)['n_users'], 45)
            status, _, _ = _run(['stats', '--json'])
            self.assertEqual(status, 0)

    def test_evaluate(self):
        status, stdout, stderr = _run(['evaluate', '--data', self.data, '--out', self.out] + SMALL)
        self.assertEqual(status, 0, stderr)
        self.assertIn('critical_fraction: ', stdout)
        with open(os.path.join(self.out, 'report.json')) as f:
            report = json.load(f)
        self.assertEqual(report['config']['model'], 'svd')
        self.assertEqual(report['config']['seed'], 42)
        self.assertEqual(report['config']['similarity']['k_neighbors'], 5)
        self.assertEqual(report['mode'], 'prediction')
        for name in ['scatter.csv', 'box.csv']:
            self.assertTrue(os.path.isfile(os.path.join(self.out, name)))

    def test_evaluate_is_deterministic(self):
        first, second = os.path.join(self.folder, 'first'), os.path.join(self.folder, 'second')
        threads = str(min(2, nb.config.NUMBA_NUM_THREADS))
        self.assertEqual(_run(['evaluate', '--data', self.data, '--out', first, '--threads', '1'] + SMALL)[0], 0)
        self.assertEqual(_run(['evaluate', '--data', self.data, '--out', second, '--threads', threads] + SMALL)[0],
                         0)
        for name in ['report.json', 'scatter.csv', 'box.csv']:
            self.assertEqual(_read(os.path.join(first, name)), _read(os.path.join(second, name)))

    def test_evaluate_ranking(self):
        status, stdout, stderr = _run(['evaluate', '--data', self.data, '--out', self.out, '--model', 'bpr',
                                       '--mode', 'ranking', '--top-k', '5', '--full', '--json'] + SMALL)
        self.assertEqual(status, 0, stderr)
        self.assertEqual(json.loads(stdout)['mode'], 'ranking')
        with open(os.path.join(self.out, 'report.json')) as f:
            report = json.load(f)
        self.assertEqual(set(report['system_metrics']), {'precision', 'recall', 'f1', 'n_samples'})
        for record in report['neighborhoods']:
            self.assertIn('f1', record['metrics_n'])

    def test_compare(self):
        status, stdout, stderr = _run(['compare', '--data', self.data, '--out', self.out, '--json',
                                       '--model', 'svd', 'slopeone', 'nmf'] + SMALL)
        self.assertEqual(status, 0, stderr)
        with open(os.path.join(self.out, 'overlap.json')) as f:
            overlap = json.load(f)
        self.assertEqual(overlap['models'], ['svd', 'slopeone', 'nmf'])
        self.assertEqual(set(overlap['fractions']), {'unique_1', 'common_exactly_2', 'common_all_3'})
        if overlap['n_union'] > 0:
            self.assertAlmostEqual(sum(overlap['fractions'].values()), 1.0, delta=1e-9)
        for model in ['svd', 'slopeone', 'nmf']:
            self.assertTrue(os.path.isfile(os.path.join(self.out, model + '_report.json')))

    def test_compare_two_models(self):
        status, stdout, _ = _run(['compare', '--data', self.data, '--out', self.out, '--json',
                                  '--model', 'svd', 'slopeone'] + SMALL)
        self.assertEqual(status, 0)
        self.assertEqual(set(json.loads(stdout)['fractions']), {'unique_1', 'common_all_2'})

    def test_compare_mismatched_similarity(self):
        status, _, stderr = _run(['compare', '--data', self.data, '--out', self.out,
                                  '--model', 'svd', 'nmf', '--sim', 'pcc', 'msd'] + SMALL)
        self.assertEqual(status, 1)
        self.assertIn("error in stage 'config'", stderr)
        self.assertFalse(os.path.exists(self.out))

    def test_sweep(self):
        status, _, stderr = _run(['sweep', '--data', self.data, '--out', self.out, '--sim', 'msd', 'pcc'] + SMALL)
        self.assertEqual(status, 0, stderr)
        sweep = pd.read_csv(os.path.join(self.out, 'sweep.csv'))
        self.assertEqual(sweep['measure'].tolist(), ['msd', 'pcc'])
        self.assertTrue(np.all((sweep['critical_fraction'] >= 0.0) & (sweep['critical_fraction'] <= 1.0)))

    def test_single_measure_sweep(self):
        sweep_dir, evaluate_dir = os.path.join(self.folder, 'sweep'), os.path.join(self.folder, 'evaluate')
        self.assertEqual(_run(['sweep', '--data', self.data, '--out', sweep_dir, '--sim', 'pcc'] + SMALL)[0], 0)
        self.assertEqual(_run(['evaluate', '--data', self.data, '--out', evaluate_dir, '--sim', 'pcc'] + SMALL)[0], 0)
        with open(os.path.join(evaluate_dir, 'report.json')) as f:
            fraction = json.load(f)['summary']['critical_fraction']
        self.assertAlmostEqual(pd.read_csv(os.path.join(sweep_dir, 'sweep.csv'))['critical_fraction'][0], fraction,
                               delta=1e-11)

    def test_config_file(self):
        path = os.path.join(self.folder, 'run.toml')
        with open(path, 'w') as f:
            f.write('model = "nmf"\nk_neighbors = 5\nmin_test_interactions = 5\nn_epochs = 5\n')
        status, _, stderr = _run(['evaluate', '--data', self.data, '--out', self.out, '--config', path])
        self.assertEqual(status, 0, stderr)
        with open(os.path.join(self.out, 'report.json')) as f:
            self.assertEqual(json.load(f)['config']['model'], 'nmf')
        status, _, _ = _run(['evaluate', '--data', self.data, '--out', self.out, '--config', path,
                             '--model', 'slopeone'])
        self.assertEqual(status, 0)
        with open(os.path.join(self.out, 'report.json')) as f:
            self.assertEqual(json.load(f)['config']['model'], 'slopeone')


@unittest.skipIf(data_file('ml-latest-small', 'ratings.csv') is None,
                 'ml-latest-small is not available under PYNBHD_DATA_DIR')
class TestMovieLens(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.data = data_file('ml-latest-small', 'ratings.csv')
        cls.folder = tempfile.mkdtemp()
        status, _, stderr = _run(['evaluate', '--data', cls.data, '--out', os.path.join(cls.folder, 'evaluate'),
                                  '--model', 'svd', '--sim', 'pcc', '--seed', '42'])
        assert status == 0, stderr
        with open(os.path.join(cls.folder, 'evaluate', 'report.json')) as f:
            cls.report = json.load(f)

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.folder)

    def test_ml_latest_small_stats(self):
        status, stdout, _ = _run(['stats', '--data', self.data, '--json'])
        self.assertEqual(status, 0)
        self.assertEqual(json.loads(stdout), {'n_users': 610, 'n_items': 9742, 'n_ratings': 100836,
                                              'sparsity': 0.983})

    def test_critical_fraction_band(self):
        self.assertGreater(self.report['summary']['n_neighborhoods'], 0)
        self.assertGreaterEqual(self.report['summary']['critical_fraction'], 0.05)
        self.assertLessEqual(self.report['summary']['critical_fraction'], 0.25)

    def test_dprime_loss_is_stable(self):
        records = self.report['neighborhoods']
        critical = [r['loss_n'] for r in records if r['critical']]
        self.assertGreaterEqual(len(critical), 2)
        self.assertLess(np.std([r['loss_dprime'] for r in records]), np.std(critical))

    def test_pbc_lowest_in_sweep(self):
        out = os.path.join(self.folder, 'sweep')
        status, _, stderr = _run(['sweep', '--data', self.data, '--out', out, '--model', 'svd', '--seed', '42',
                                  '--sim', 'msd', 'cos', 'pcc', 'pbc'])
        self.assertEqual(status, 0, stderr)
        fractions = pd.read_csv(os.path.join(out, 'sweep.csv')).set_index('measure')['critical_fraction']
        self.assertEqual(fractions.idxmin(), 'pbc')
        self.assertAlmostEqual(fractions['pcc'], self.report['summary']['critical_fraction'], delta=1e-11)

    def test_overlap_structure(self):
        out = os.path.join(self.folder, 'compare')
        status, _, stderr = _run(['compare', '--data', self.data, '--out', out, '--seed', '42',
                                  '--model', 'svd', 'slopeone', 'nmf', '--sim', 'pcc'])
        self.assertEqual(status, 0, stderr)
        with open(os.path.join(out, 'overlap.json')) as f:
            fractions = json.load(f)['fractions']
        self.assertGreater(fractions['unique_1'], fractions['common_exactly_2'])
        self.assertGreater(fractions['common_exactly_2'], fractions['common_all_3'])


if __name__ == '__main__':
    unittest.main()
