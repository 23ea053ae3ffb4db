from pynbhd.datasets.dataset import RatingScale, SCALES, SCHEMAS, Interaction, RatingDataset, SplitPair,\
    DatasetStats, from_raw, load_csv, load_dat, subsample_users, train_test_split, dataset_stats,\
    save_dataset, load_cached_dataset
from pynbhd.datasets.synthetic import SyntheticSplit, planted_cluster_dataset, homogeneous_dataset,\
    constant_dataset, rank1_dataset, block_preference_dataset


__all__ = ['RatingScale', 'SCALES', 'SCHEMAS', 'Interaction', 'RatingDataset', 'SplitPair', 'DatasetStats',
           'from_raw', 'load_csv', 'load_dat', 'subsample_users', 'train_test_split', 'dataset_stats',
           'save_dataset', 'load_cached_dataset',
           'SyntheticSplit', 'planted_cluster_dataset', 'homogeneous_dataset', 'constant_dataset',
           'rank1_dataset', 'block_preference_dataset']
