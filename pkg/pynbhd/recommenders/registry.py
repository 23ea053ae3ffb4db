import json

import numpy as np

from pynbhd.recommenders.core.recommender import FORMAT_VERSION
from pynbhd.recommenders.mf.bpr import BPR
from pynbhd.recommenders.mf.nmf import NMF
from pynbhd.recommenders.mf.svd import SVD
from pynbhd.recommenders.mf.svdpp import SVDPP
from pynbhd.recommenders.so.slopeone import SlopeOne


RECOMMENDERS = {'svd': SVD, 'svdpp': SVDPP, 'nmf': NMF, 'bpr': BPR, 'slopeone': SlopeOne}


def make_recommender(name, options=None):
    try:
        return RECOMMENDERS[str(name).lower()](options)
    except KeyError:
        raise ValueError(f'unknown model `{name}` (choose from {", ".join(RECOMMENDERS)}).')


def load_model(path):
    """Rebuild a fitted recommender from a `.npz` file written by `Recommender.save`."""
    with np.load(path, allow_pickle=False) as state:
        state = dict(state)
    version = int(state['format_version'])
    if version != FORMAT_VERSION:
        raise ValueError(f'unsupported model format version {version} (expected {FORMAT_VERSION}).')
    model = make_recommender(str(state['model']), json.loads(str(state['options'])))
    model._restore(state)
    return model
