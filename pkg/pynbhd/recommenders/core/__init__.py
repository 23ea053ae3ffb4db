from pynbhd.recommenders.core.recommender import Terminations
from pynbhd.recommenders.core.recommender import Recommender


__all__ = ['Terminations', 'Recommender']
