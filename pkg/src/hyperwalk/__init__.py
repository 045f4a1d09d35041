"""Coined quantum walk search on the n-dimensional hypercube.

Full-space walk (:mod:`.walk`), the ``2n``-dimensional reduced walk
(:mod:`.reduced`), numerical spectra (:mod:`.spectral`), the analytic
avoided-crossing model (:mod:`.theory`) and search runs (:mod:`.search`).
"""
__version__ = "0.1.0"

from .errors import (
    BranchError,
    CapabilityError,
    HyperwalkError,
    NoCrossingError,
    NumericError,
    PoleError,
    TrackingError,
)
from .hypercube import Dim, SpectralParams, binomial, hamming_weight, mode_arrays, spectral_params
from .reduced import build_reduced_u_lambda, lift, project_full_to_reduced, reduced_evolve
from .search import SearchReport, SearchRun, detect_peak, run_search, scan_gap_vs_theory
from .spectral import eig_unitary, find_crossing, sweep_eigenphases
from .theory import (
    CrossingModel,
    crossing_model,
    gamma_n,
    g_prime,
    gap_theory,
    lambda_of_crossing,
    search_time,
    solve_g,
    sum_rule_full,
    sum_rule_local_S,
)
from .walk import WalkConfig, build_eigenvector, evolve, step_u, step_u_lambda
