from pynbhd.similarity.baselines import BaselineModel, fit_baselines
from pynbhd.similarity.similarity import Measure, SimilarityConfig, sim_pcc, sim_msd, sim_cos, sim_pbc,\
    nearest_neighbors, similarity_matrix, save_similarity_triples, load_similarity_triples
from pynbhd.similarity.neighborhoods import Neighborhood, neighborhood_id, build_neighborhoods


__all__ = ['BaselineModel', 'fit_baselines',
           'Measure', 'SimilarityConfig', 'sim_pcc', 'sim_msd', 'sim_cos', 'sim_pbc',
           'nearest_neighbors', 'similarity_matrix', 'save_similarity_triples', 'load_similarity_triples',
           'Neighborhood', 'neighborhood_id', 'build_neighborhoods']
