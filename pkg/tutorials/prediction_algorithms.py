"""Critical neighborhoods of the rating-prediction recommenders (SVD, SlopeOne, NMF and optionally SVD++) on one
split, and how much they overlap across models.

    $ python prediction_algorithms.py --data_dir ~/data --dataset ml-latest-small --sim pcc
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
    parser.add_argument('--models', nargs='+', default=['svd', 'slopeone', 'nmf'])  # add `svdpp` if wanted
    parser.add_argument('--sim', type=str, default='pcc')
    parser.add_argument('--seed', type=int, default=42)
    parser.add_argument('--out', type=str, default='pynbhd_prediction')
    args = parser.parse_args()
    assert len(args.models) >= 2, 'at least 2 models are needed for their overlap.'

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
        report = evaluate_all(model, neighborhoods, split.test, 'prediction', similarity=similarity)
        write_report(report, args.out, vars(args), prefix=name + '_')
        critical = report.critical()
        # D' is nearly the whole test set, so its loss hardly moves between neighborhoods
        print('* {:s}: system rmse {:.4f} & critical_fraction {:.4f} & std(loss_Dprime) {:.2e} & '
              'std(loss_N of critical) {:.2e} & runtime {:7.5e}'.format(
                  name, report.system_metrics.rmse, report.critical_fraction,
                  np.std([e.loss_dprime for e in report.evaluations]),
                  np.std([e.loss_n for e in critical]) if critical else np.nan, time.time() - start_time))
        reports.append(report)
    overlap = overlap_analysis(reports)
    write_overlap(overlap, os.path.join(args.out, 'overlap.json'), vars(args))
    for field, fraction in overlap.fractions().items():
        print('  {:s}: {:.4f}'.format(field, fraction))
    print('*** Total runtime: {:7.5e} ***.'.format(time.time() - start_runtime))
