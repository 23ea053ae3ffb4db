"""Critical fraction of one recommender under each of the four KNN similarity measures, on several datasets.

    $ python knn_sweep.py --data_dir ~/data --datasets ml-latest-small ml-1m --model svd --start 0 --end 4

Each experiment index uses its own (fixed) seed, so that reruns reproduce earlier results.
"""
import os
import time
import argparse

import numpy as np

from pynbhd.cli import RunConfig, load_data
from pynbhd.datasets.dataset import train_test_split
from pynbhd.pipeline.evaluation import evaluate_all
from pynbhd.pipeline.report import write_report, write_sweep
from pynbhd.recommenders.registry import make_recommender
from pynbhd.similarity.neighborhoods import build_neighborhoods
from pynbhd.similarity.similarity import SimilarityConfig


class Experiment(object):
    def __init__(self, index, dataset, seed, model):
        self.index, self.seed = index, seed
        self.dataset, self.model = dataset, model
        self._folder = os.path.join('pynbhd_knn_sweep', 'Data-{}_Model-{}_Exp-{}'.format(dataset.name, model, index))
        if not os.path.exists(self._folder):
            os.makedirs(self._folder)

    def run(self, measures, k_neighbors):
        split_seed, model_seed = np.random.default_rng(self.seed).integers(np.iinfo(np.int64).max, size=2)
        split = train_test_split(self.dataset, 0.2, int(split_seed))
        model = make_recommender(self.model, {'seed_rng': int(model_seed), 'verbose': 0})
        model.fit(split.train)
        rows = []
        for measure in measures:
            start_time = time.time()
            similarity = SimilarityConfig(measure, k_neighbors)
            neighborhoods = build_neighborhoods(split.train, split.test, similarity)
            report = evaluate_all(model, neighborhoods, split.test, 'prediction', similarity=similarity)
            write_report(report, self._folder, {'seed': int(self.seed), 'experiment': self.index},
                         prefix=measure + '_')
            rows.append({'dataset': self.dataset.name, 'measure': measure, 'model': self.model,
                         'n_neighborhoods': report.n_neighborhoods, 'n_critical': report.n_critical,
                         'critical_fraction': report.critical_fraction})
            print('    * {:s}: critical_fraction {:.4f} & runtime {:7.5e}'.format(
                measure, report.critical_fraction, time.time() - start_time))
        write_sweep(rows, os.path.join(self._folder, 'sweep.csv'))
        return rows


class Experiments(object):
    def __init__(self, start, end, data_dir, datasets):
        self.start, self.end = start, end
        self.datasets = [load_data(RunConfig(os.path.join(data_dir, d))) for d in datasets]
        self.measures = ['msd', 'cos', 'pcc', 'pbc']
        self.seeds = np.random.default_rng(2023).integers(  # for repeatability
            np.iinfo(np.int64).max, size=(len(self.datasets), 50))

    def run(self, model, k_neighbors):
        fractions = {}
        for index in range(self.start, self.end + 1):
            print('* experiment: {:d} ***:'.format(index))
            for i, d in enumerate(self.datasets):
                print('  * dataset: {:s}:'.format(d.name))
                for row in Experiment(index, d, self.seeds[i, index], model).run(self.measures, k_neighbors):
                    fractions.setdefault((d.name, row['measure']), []).append(row['critical_fraction'])
        for (name, measure), values in sorted(fractions.items()):
            print('{:s} & {:s}: mean critical_fraction {:.4f}'.format(name, measure, np.mean(values)))


if __name__ == '__main__':
    start_runtime = time.time()
    parser = argparse.ArgumentParser()
    parser.add_argument('--start', '-s', type=int, default=0)  # starting index of experiments (from 0 to 49)
    parser.add_argument('--end', '-e', type=int, default=0)  # ending index of experiments (from 0 to 49)
    parser.add_argument('--data_dir', '-d', type=str, default=os.environ.get('PYNBHD_DATA_DIR', '.'))
    parser.add_argument('--datasets', nargs='+', default=['ml-latest-small'])
    parser.add_argument('--model', '-m', type=str, default='svd')  # any recommender of pynbhd
    parser.add_argument('--k_neighbors', '-k', type=int, default=40)
    args = parser.parse_args()
    params = vars(args)
    assert isinstance(params['start'], int) and 0 <= params['start'] < 50  # from 0 to 49
    assert isinstance(params['end'], int) and params['start'] <= params['end'] < 50  # from 0 to 49
    assert params['k_neighbors'] > 0
    experiments = Experiments(params['start'], params['end'], params['data_dir'], params['datasets'])
    experiments.run(params['model'], params['k_neighbors'])
    print('*** Total runtime: {:7.5e} ***.'.format(time.time() - start_runtime))
