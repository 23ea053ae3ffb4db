from pynbhd.recommenders.core.recommender import Recommender, Terminations
from pynbhd.recommenders.mf.mf import MF
from pynbhd.recommenders.mf.svd import SVD
from pynbhd.recommenders.mf.svdpp import SVDPP
from pynbhd.recommenders.mf.nmf import NMF
from pynbhd.recommenders.mf.bpr import BPR
from pynbhd.recommenders.so.slopeone import SlopeOne, deviation_table
from pynbhd.recommenders.registry import RECOMMENDERS, make_recommender, load_model


__all__ = ['Recommender', 'Terminations', 'MF', 'SVD', 'SVDPP', 'NMF', 'BPR', 'SlopeOne', 'deviation_table',
           'RECOMMENDERS', 'make_recommender', 'load_model']
