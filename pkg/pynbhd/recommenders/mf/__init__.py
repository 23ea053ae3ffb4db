from pynbhd.recommenders.mf.mf import MF
from pynbhd.recommenders.mf.svd import SVD
from pynbhd.recommenders.mf.svdpp import SVDPP
from pynbhd.recommenders.mf.nmf import NMF
from pynbhd.recommenders.mf.bpr import BPR


__all__ = ['MF', 'SVD', 'SVDPP', 'NMF', 'BPR']
