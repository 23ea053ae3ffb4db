"""Critical neighborhoods of top-k recommendations (BPR against SVD used as a ranker), judged by precision@k.

    $ python ranking_algorithms.py --data_dir ~/data --dataset ml-latest-small --top_k 10
"""
import os
import time
import argparse

import numpy as np

from pynbhd.cli import RunConfig, load_data
from pynbhd.datasets.dataset import train_test_split
from pynbhd.pipeline.evaluation import evaluate_all
from pynbhd.pipeline.overlap import overlap_analysis
from pynbhd.pipeline.report import write_report, write_overlap
from pynbhd.recommenders.registry import make_recommender
from pynbhd.similarity.neighborhoods import build_neighborhoods
from pynbhd.similarity.similarity import SimilarityConfig


if __name__ == '__main__':
    start_runtime = time.time()
    parser = argparse.ArgumentParser()
    parser.add_argument('--data_dir', '-d', type=str, default=os.environ.get('PYNBHD_DATA_DIR', '.'))
    parser.add_argument('--dataset', type=str, default='ml-latest-small')
    parser.add_argument('--models', nargs='+', default=['bpr', 'svd'])
    parser.add_argument('--sim', type=str, default='pcc')
    parser.add_argument('--top_k', '-k', type=int, default=10)
    parser.add_argument('--threshold', type=float, default=None)  # items rated above it are relevant (scale default if None)
    parser.add_argument('--recommend_above_threshold', action='store_true')
    parser.add_argument('--seed', type=int, default=42)
    parser.add_argument('--out', type=str, default='pynbhd_ranking')
    args = parser.parse_args()
    assert args.top_k > 0

    split_seed, model_seed = np.random.default_rng(args.seed).integers(np.iinfo(np.int64).max, size=2)
    ds = load_data(RunConfig(os.path.join(args.data_dir, args.dataset)))  # same loader as `pynbhd evaluate`
    split = train_test_split(ds, 0.2, int(split_seed))
    similarity = SimilarityConfig(args.sim)
    neighborhoods = build_neighborhoods(split.train, split.test, similarity, verbose=True)
    reports = []
    for name in args.models:
        start_time = time.time()
        model = make_recommender(name, {'seed_rng': int(model_seed), 'verbose': 0})
        model.fit(split.train)
        report = evaluate_all(model, neighborhoods, split.test, 'ranking', k=args.top_k, threshold=args.threshold,
                              recommend_above_threshold=args.recommend_above_threshold, similarity=similarity)
        write_report(report, args.out, vars(args), prefix=name + '_')
        system = report.system_metrics
        print('* {:s}: precision {:.4f} & recall {:.4f} & f1 {:.4f} & critical_fraction {:.4f} & '
              'runtime {:7.5e}'.format(name, system.precision, system.recall, system.f1,
                                       report.critical_fraction, time.time() - start_time))
        for e in report.top(5):
            print('    {:s}: precision@{:d} {:.4f} vs {:.4f}'.format(
                e.neighborhood.id, args.top_k, e.loss_n, e.loss_dprime))
        reports.append(report)
    if len(reports) > 1:
        overlap = overlap_analysis(reports)
        write_overlap(overlap, os.path.join(args.out, 'overlap.json'), vars(args))
        print('  unique_1: {:.4f}'.format(overlap.unique_1))
    print('*** Total runtime: {:7.5e} ***.'.format(time.time() - start_runtime))
