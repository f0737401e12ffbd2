"""Monte Carlo simulation of iterative HDD on sampled graphs."""
from .decoder import EmpiricalPQ, SimTrace, empirical_pq, random_global_codeword, simulate_hdd, trial_seed
from .graph import TannerGraph, sample_coupled_graph, sample_uncoupled_graph

__all__ = ["EmpiricalPQ", "SimTrace", "TannerGraph", "empirical_pq", "random_global_codeword",
           "sample_coupled_graph", "sample_uncoupled_graph", "simulate_hdd", "trial_seed"]
