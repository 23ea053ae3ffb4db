"""Command line of pynbhd: dataset statistics, critical-neighborhood evaluation, model comparison and
similarity sweeps, each reproducible from a single seed.

    $ pynbhd stats --data ml-latest-small/
    $ pynbhd evaluate --data ml-latest-small/ --model svd --sim pcc --out results/
    $ pynbhd compare --data ml-latest-small/ --model svd slopeone nmf --sim pcc
    $ pynbhd sweep --data ml-latest-small/ ml-1m/ --model svd --sim msd cos pcc pbc
"""
import argparse
import json
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numba as nb
import numpy as np

from pynbhd.datasets.dataset import SCALES, SCHEMAS, RatingScale, load_csv, load_dat, subsample_users,\
    train_test_split, dataset_stats
from pynbhd.metrics.metrics import Mode
from pynbhd.pipeline.evaluation import evaluate_all
from pynbhd.pipeline.overlap import overlap_analysis
from pynbhd.pipeline.report import write_report, write_overlap, write_sweep
from pynbhd.recommenders.registry import RECOMMENDERS, make_recommender
from pynbhd.similarity.neighborhoods import build_neighborhoods
from pynbhd.similarity.similarity import Measure, SimilarityConfig


DATA_DIR_ENV = 'PYNBHD_DATA_DIR'
MEASURES = ['msd', 'cos', 'pcc', 'pbc']


class StageError(Exception):
    """Failure of one named stage of a run."""
    def __init__(self, stage, error):
        self.stage, self.error = stage, error
        super().__init__(f"error in stage '{stage}': {error}")


@contextmanager
def stage(name):
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, e) from e


def stage_seeds(seed):
    """Per-stage seeds (split, subsample, model) drawn from one run seed."""
    split, subsample, model = np.random.default_rng(seed).integers(np.iinfo(np.int64).max, size=3)
    return {'split': int(split), 'subsample': int(subsample), 'model': int(model)}


@dataclass(frozen=True)
class RunConfig(object):
    """Everything needed to reproduce one evaluation run (echoed into every report).

    Attributes
    ----------
    data          : `str`
                    rating file or directory holding `ratings.csv` / `ratings.dat`.
    format        : `str`
                    `'csv'` or `'dat'` (inferred from the file name if `None`).
    scale         : `str`
                    rating scale `min:max:step` (per-format default if `None`).
    model         : `str`
                    recommender name.
    similarity    : `SimilarityConfig`
                    neighborhood settings.
    n_factors     : `int`
                    number of latent factors (model default if `None`).
    n_epochs      : `int`
                    number of training epochs (model default if `None`).
    """
    data: str
    format: Optional[str] = None
    schema: str = 'movielens'
    scale: Optional[str] = None
    n_users: Optional[int] = None
    test_fraction: float = 0.2
    seed: int = 42
    model: str = 'svd'
    n_factors: Optional[int] = None
    n_epochs: Optional[int] = None
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    mode: Mode = Mode.PREDICTION
    alpha: float = 0.05
    top_k: int = 10
    threshold: Optional[float] = None
    bonferroni: bool = False
    recommend_above_threshold: bool = False
    full: bool = False
    threads: Optional[int] = None
    out: str = 'pynbhd_results'

    def __post_init__(self):
        if self.format not in (None, 'csv', 'dat'):
            raise ValueError(f'format (== {self.format}) should be `csv` or `dat`.')
        if self.schema not in SCHEMAS:
            raise ValueError(f'unknown schema `{self.schema}` (choose from {sorted(SCHEMAS)}).')
        if self.scale is not None:
            RatingScale.parse(self.scale)
        if self.n_users is not None and self.n_users < 1:
            raise ValueError(f'n_users (== {self.n_users}) should >= 1.')
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f'test_fraction (== {self.test_fraction}) should lie in (0, 1).')
        if self.model not in RECOMMENDERS:
            raise ValueError(f'unknown model `{self.model}` (choose from {", ".join(RECOMMENDERS)}).')
        for name in ['n_factors', 'n_epochs']:
            if getattr(self, name) is not None and getattr(self, name) < 1:
                raise ValueError(f'{name} (== {getattr(self, name)}) should >= 1.')
        object.__setattr__(self, 'mode', Mode.parse(self.mode))
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f'alpha (== {self.alpha}) should lie in (0, 1).')
        if self.top_k < 1:
            raise ValueError(f'top_k (== {self.top_k}) should >= 1.')
        if self.threads is not None and not 1 <= self.threads <= nb.config.NUMBA_NUM_THREADS:
            raise ValueError(f'threads (== {self.threads}) should lie in [1, {nb.config.NUMBA_NUM_THREADS}].')

    def as_dict(self):
        out = asdict(self)
        for name in ['threads', 'out']:  # outputs do not depend on them
            del out[name]
        out['similarity'] = self.similarity.as_dict()
        out['mode'] = self.mode.value
        out['seeds'] = stage_seeds(self.seed)
        return out

    def model_options(self, verbose=False):
        options = {'seed_rng': stage_seeds(self.seed)['model'], 'verbose': 10 if verbose else 0}
        for name in ['n_factors', 'n_epochs']:
            if getattr(self, name) is not None:
                options[name] = getattr(self, name)
        return options


def resolve_data_path(data):
    """Relative paths not found in the working directory are looked up under `$PYNBHD_DATA_DIR`."""
    if not os.path.isabs(data) and not os.path.exists(data) and os.environ.get(DATA_DIR_ENV):
        data = os.path.join(os.environ[DATA_DIR_ENV], data)
    if os.path.isdir(data):
        for name in ['ratings.csv', 'ratings.dat']:
            if os.path.isfile(os.path.join(data, name)):
                return os.path.join(data, name)
        raise FileNotFoundError(f'{data}: no ratings.csv or ratings.dat in directory.')
    if not os.path.isfile(data):
        raise FileNotFoundError(f'{data}: no such file or directory.')
    return data


def load_data(cfg):
    path = resolve_data_path(cfg.data)
    fmt = cfg.format or ('dat' if path.endswith('.dat') else 'csv')
    scale = None if cfg.scale is None else RatingScale.parse(cfg.scale)
    name = os.path.basename(os.path.normpath(cfg.data))
    if fmt == 'dat':
        ds = load_dat(path, scale=scale, name=name)
    else:
        ds = load_csv(path, cfg.schema, scale or SCALES['ml-latest-small'], name)
    if cfg.n_users is not None:
        ds = subsample_users(ds, cfg.n_users, stage_seeds(cfg.seed)['subsample'])
    return ds


def _split(cfg, verbose):
    with stage('load'):
        ds = load_data(cfg)
    with stage('split'):
        split = train_test_split(ds, cfg.test_fraction, stage_seeds(cfg.seed)['split'])
    if verbose:
        print('* {:s}: {:d} train & {:d} test ratings'.format(ds.name, split.train.n_ratings, split.test.n_ratings))
    return ds, split


def _train(cfg, train, verbose):
    with stage('train'):
        model = make_recommender(cfg.model, cfg.model_options(verbose))
        model.fit(train)
    return model


def _neighborhoods(cfg, split, verbose):
    with stage('neighborhoods'):
        return build_neighborhoods(split.train, split.test, cfg.similarity, verbose=verbose)


def _evaluate(cfg, model, neighborhoods, split, verbose):
    with stage('evaluate'):
        return evaluate_all(model, neighborhoods, split.test, cfg.mode, cfg.alpha, cfg.top_k, cfg.threshold,
                            cfg.full, cfg.bonferroni, cfg.recommend_above_threshold, cfg.similarity,
                            cfg.threads, verbose)


def _summary(report):
    return {'model': report.model_name,
            'mode': report.mode.value,
            'n_neighborhoods': report.n_neighborhoods,
            'n_critical': report.n_critical,
            'critical_fraction': report.critical_fraction,
            'top': [{'id': e.neighborhood.id, 'loss_n': e.loss_n, 'loss_dprime': e.loss_dprime,
                     'p_one_sided': e.welch.p_one_sided} for e in report.top(10)]}


def _print_summary(report, as_json=False):
    if as_json:
        print(json.dumps(_summary(report)))
        return
    print('critical_fraction: {:.6f} ({:d} of {:d} neighborhoods)'.format(
        report.critical_fraction, report.n_critical, report.n_neighborhoods))
    for e in report.top(10):
        print('  {:s}: loss_N {:.6f} & loss_Dprime {:.6f} & p {:.3e}'.format(
            e.neighborhood.id, e.loss_n, e.loss_dprime, e.welch.p_one_sided))


def cmd_stats(cfg, as_json=False):
    """Print the size (users, items, ratings) and sparsity of a dataset."""
    with stage('load'):
        stats = dataset_stats(load_data(cfg)).summary()
    if as_json:
        print(json.dumps(stats))
    else:
        print('users: {:d} & items: {:d} & ratings: {:d} & sparsity: {:.3f}'.format(
            stats['n_users'], stats['n_items'], stats['n_ratings'], stats['sparsity']))
    return stats


def cmd_evaluate(cfg, as_json=False, verbose=False):
    """Split -> train -> neighborhoods -> evaluate -> write report and plot data."""
    _, split = _split(cfg, verbose)
    model = _train(cfg, split.train, verbose)
    report = _evaluate(cfg, model, _neighborhoods(cfg, split, verbose), split, verbose)
    with stage('report'):
        write_report(report, cfg.out, cfg.as_dict())
    _print_summary(report, as_json)
    return report


def cmd_compare(cfgs, as_json=False, verbose=False):
    """Evaluate >= 2 models on the same split and neighborhoods, then write their critical overlap."""
    with stage('config'):
        if len(cfgs) < 2:
            raise ValueError(f'compare needs at least 2 models (got {len(cfgs)}).')
        shared = [replace(c, model=cfgs[0].model, n_factors=None, n_epochs=None) for c in cfgs]
        if any(c.similarity != cfgs[0].similarity for c in cfgs):
            raise ValueError('all models should share one similarity configuration.')
        if any(c != shared[0] for c in shared):
            raise ValueError('all models should share one dataset, split and evaluation configuration.')
    _, split = _split(cfgs[0], verbose)
    neighborhoods = _neighborhoods(cfgs[0], split, verbose)
    reports = []
    for cfg in cfgs:
        report = _evaluate(cfg, _train(cfg, split.train, verbose), neighborhoods, split, verbose)
        with stage('report'):
            write_report(report, cfg.out, cfg.as_dict(), prefix=cfg.model + '_')
        reports.append(report)
    with stage('overlap'):
        overlap = overlap_analysis(reports)
        write_overlap(overlap, os.path.join(cfgs[0].out, 'overlap.json'),
                      {'runs': [cfg.as_dict() for cfg in cfgs]})
    if as_json:
        print(json.dumps({'models': list(overlap.model_names), 'fractions': overlap.fractions()}))
    else:
        for name, fraction in overlap.fractions().items():
            print('{:s}: {:.6f}'.format(name, fraction))
    return overlap


def cmd_sweep(cfgs, as_json=False, verbose=False):
    """Critical fraction per (dataset, similarity measure): one CSV row each."""
    rows, splits, models = [], {}, {}
    for cfg in cfgs:
        if cfg.data not in splits:
            splits[cfg.data] = _split(cfg, verbose)
            models[cfg.data] = _train(cfg, splits[cfg.data][1].train, verbose)
        ds, split = splits[cfg.data]
        report = _evaluate(cfg, models[cfg.data], _neighborhoods(cfg, split, verbose), split, verbose)
        rows.append({'dataset': ds.name, 'measure': cfg.similarity.measure.name.lower(), 'model': cfg.model,
                     'n_neighborhoods': report.n_neighborhoods, 'n_critical': report.n_critical,
                     'critical_fraction': report.critical_fraction})
        if not as_json:
            print('{:s} & {:s}: critical_fraction {:.6f}'.format(ds.name, rows[-1]['measure'],
                                                                 report.critical_fraction))
    with stage('report'):
        os.makedirs(cfgs[0].out, exist_ok=True)
        write_sweep(rows, os.path.join(cfgs[0].out, 'sweep.csv'))
    if as_json:
        print(json.dumps(rows))
    return rows


def _add_data_arguments(parser, many=False):
    parser.add_argument('--data', nargs='+' if many else None, default=None,
                        help=f'rating file or directory (relative paths also searched under ${DATA_DIR_ENV})')
    parser.add_argument('--format', choices=['csv', 'dat'], default=None)
    parser.add_argument('--schema', choices=sorted(SCHEMAS), default='movielens')
    parser.add_argument('--scale', type=str, default=None, help='rating scale as min:max:step')
    parser.add_argument('--n-users', type=int, default=None, help='seeded user subsample')
    parser.add_argument('--seed', type=int, default=42)
    parser.add_argument('--json', action='store_true', help='machine-readable output')
    parser.add_argument('--config', type=str, default=None, help='TOML file with defaults for these flags')


def _add_run_arguments(parser):
    _add_data_arguments(parser, many=True)
    parser.add_argument('--model', nargs='+', default=['svd'], choices=list(RECOMMENDERS))
    parser.add_argument('--n-factors', type=int, default=None)
    parser.add_argument('--n-epochs', type=int, default=None)
    parser.add_argument('--sim', nargs='+', default=['pcc'], type=str.lower,
                        choices=MEASURES + ['knn-1', 'knn-2', 'knn-3', 'knn-4'])
    parser.add_argument('--k-neighbors', type=int, default=40)
    parser.add_argument('--min-support', type=int, default=3)
    parser.add_argument('--shrinkage', type=float, default=100.0)
    parser.add_argument('--min-test-interactions', type=int, default=30)
    parser.add_argument('--mode', choices=[m.value for m in Mode], default='prediction')
    parser.add_argument('--alpha', type=float, default=0.05)
    parser.add_argument('--top-k', type=int, default=10)
    parser.add_argument('--threshold', type=float, default=None)
    parser.add_argument('--test-fraction', type=float, default=0.2)
    parser.add_argument('--threads', type=int, default=None, help='worker threads (all cores if omitted)')
    parser.add_argument('--out', type=str, default='pynbhd_results')
    parser.add_argument('--full', action='store_true', help='metric bundles for all neighborhoods')
    parser.add_argument('--bonferroni', action='store_true')
    parser.add_argument('--recommend-above-threshold', action='store_true')
    parser.add_argument('--verbose', action='store_true')


def make_parser():
    """The `pynbhd` parser and its subcommand parsers (by name)."""
    parser = argparse.ArgumentParser(prog='pynbhd', description='Neighborhood-based evaluation of recommenders.')
    subparsers = parser.add_subparsers(dest='command', required=True)
    commands = {'stats': subparsers.add_parser('stats', help='dataset summary')}
    _add_data_arguments(commands['stats'])
    for name, text in [('evaluate', 'critical neighborhoods of one model'),
                       ('compare', 'overlap of critical neighborhoods across models'),
                       ('sweep', 'critical fraction per dataset and similarity measure')]:
        commands[name] = subparsers.add_parser(name, help=text)
        _add_run_arguments(commands[name])
    return parser, commands


def _read_toml(path):
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    with open(path, 'rb') as f:
        return {key.replace('-', '_'): value for key, value in tomllib.load(f).items()}


def parse_args(argv=None):
    """Parse `argv`; values of a `--config` TOML file act as defaults that explicit flags override."""
    parser, commands = make_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        commands[args.command].set_defaults(**_read_toml(args.config))
        args = parser.parse_args(argv)
    if args.data is None and os.environ.get(DATA_DIR_ENV):
        args.data = os.environ[DATA_DIR_ENV]
    if args.data is None:
        parser.error(f'--data is required (or set ${DATA_DIR_ENV}).')
    if args.command != 'stats':
        for name in ['data', 'model', 'sim']:
            if isinstance(getattr(args, name), str):
                setattr(args, name, [getattr(args, name)])
    return args


def _data_config(args, data):
    return dict(data=data, format=args.format, schema=args.schema, scale=args.scale, n_users=args.n_users,
                seed=args.seed)


def make_configs(args):
    """One `RunConfig` per run requested by the parsed `args`."""
    if args.command == 'stats':
        return [RunConfig(**_data_config(args, args.data))]
    similarities = [SimilarityConfig(Measure.parse(sim), args.k_neighbors, args.min_support, args.shrinkage,
                                     args.min_test_interactions) for sim in args.sim]
    base = dict(test_fraction=args.test_fraction, n_factors=args.n_factors, n_epochs=args.n_epochs,
                mode=args.mode, alpha=args.alpha, top_k=args.top_k, threshold=args.threshold,
                bonferroni=args.bonferroni, recommend_above_threshold=args.recommend_above_threshold,
                full=args.full, threads=args.threads, out=args.out)
    if args.command == 'evaluate':
        if len(args.data) != 1 or len(args.model) != 1 or len(similarities) != 1:
            raise ValueError('evaluate takes exactly one dataset, model and similarity measure.')
        return [RunConfig(**_data_config(args, args.data[0]), model=args.model[0], similarity=similarities[0],
                          **base)]
    if args.command == 'compare':
        if len(args.data) != 1:
            raise ValueError('compare takes exactly one dataset.')
        if len(similarities) not in (1, len(args.model)):
            raise ValueError(f'compare takes one similarity measure or one per model (got {len(similarities)} '
                             f'for {len(args.model)} models).')
        similarities = similarities*len(args.model) if len(similarities) == 1 else similarities
        return [RunConfig(**_data_config(args, args.data[0]), model=model, similarity=similarity, **base)
                for model, similarity in zip(args.model, similarities)]
    if len(args.model) != 1:
        raise ValueError('sweep takes exactly one model.')
    return [RunConfig(**_data_config(args, data), model=args.model[0], similarity=similarity, **base)
            for data in args.data for similarity in similarities]


def main(argv=None):
    """Run one command; returns the exit status (0 iff all requested outputs were written)."""
    start_time = time.time()
    try:
        with stage('config'):
            args = parse_args(argv)
            verbose = getattr(args, 'verbose', False)
            cfgs = make_configs(args)
            if cfgs[0].threads is not None:
                nb.set_num_threads(cfgs[0].threads)
        with stage('output'):  # failures outside the named stages (e.g. printing a summary)
            if args.command == 'stats':
                cmd_stats(cfgs[0], args.json)
            elif args.command == 'evaluate':
                cmd_evaluate(cfgs[0], args.json, verbose)
            elif args.command == 'compare':
                cmd_compare(cfgs, args.json, verbose)
            else:
                cmd_sweep(cfgs, args.json, verbose)
    except StageError as e:
        print(f'pynbhd: {e}', file=sys.stderr)
        return 1
    if verbose:
        print('*** Total runtime: {:7.5e}.'.format(time.time() - start_time))
    return 0


if __name__ == '__main__':
    sys.exit(main())
