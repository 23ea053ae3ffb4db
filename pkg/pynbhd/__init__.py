"""pynbhd is a Pure-PYthon library for NeighBorHooD-based evaluation of recommender systems. Instead of one
    aggregate score over a whole test set, it forms overlapping KNN neighborhoods of similar users, compares the
    loss of a trained recommender on every neighborhood with its loss on the rest of the data, and flags the
    neighborhoods where the model is significantly worse (one-sided Welch's t-test) as *critical*.

    Rating-prediction (SVD, SVD++, NMF, SlopeOne) and top-k ranking (BPR) recommenders, four user-user
    similarity measures and a reproducible command line (`pynbhd`) are included.
"""
from pynbhd.datasets import RatingScale, RatingDataset, SplitPair, load_csv, load_dat, train_test_split,\
    dataset_stats, planted_cluster_dataset, homogeneous_dataset
from pynbhd.similarity import Measure, SimilarityConfig, Neighborhood, build_neighborhoods
from pynbhd.recommenders import Recommender, Terminations, SVD, SVDPP, NMF, BPR, SlopeOne,\
    make_recommender, load_model  # all recommenders share the abstract `Recommender`
from pynbhd.metrics import Mode, MetricBundle, per_user_metrics
from pynbhd.stats import Alternative, WelchResult, welch_one_sided
from pynbhd.pipeline import CriticalReport, evaluate_all, overlap_analysis, emit_plot_data, write_report
