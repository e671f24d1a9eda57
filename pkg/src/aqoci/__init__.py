"""Adaptive quantum-optimized centroid initialization (AQOCI).

Encodes k-means centroid seeding as a QUBO, solves it with annealing-style
samplers, refines real-valued centroids through per-weight scale/offset
adaptation, and benchmarks the effect on k-means convergence and clustering
quality against random initialization.
"""

__version__ = "0.1.0"

from .adaptive import LoopConfig, RefinementResult, run_refinement
from .data import Dataset, load_csv, make_blobs, pca_2d
from .encoding import FixedPointCodec, ScaleOffsetEntry
from .formulation import CentroidProblem, assemble, decode_solution
from .kmeans import ClusterRun, KMeansConfig, lloyd, random_init
from .metrics import MetricReport, homogeneity_completeness_v, inertia, silhouette
from .qubo import IsingProblem, QuboProblem, brute_force_minimum, energy, to_ising
from .samplers import (
    AnnealConfig,
    RemoteSolverConfig,
    SampleSet,
    TabuConfig,
    remote_hybrid,
    simulated_annealing,
    tabu_search,
)

__all__ = [
    "__version__",
    "AnnealConfig",
    "CentroidProblem",
    "ClusterRun",
    "Dataset",
    "FixedPointCodec",
    "IsingProblem",
    "KMeansConfig",
    "LoopConfig",
    "MetricReport",
    "QuboProblem",
    "RefinementResult",
    "RemoteSolverConfig",
    "SampleSet",
    "ScaleOffsetEntry",
    "TabuConfig",
    "assemble",
    "brute_force_minimum",
    "decode_solution",
    "energy",
    "homogeneity_completeness_v",
    "inertia",
    "lloyd",
    "load_csv",
    "make_blobs",
    "pca_2d",
    "random_init",
    "remote_hybrid",
    "run_refinement",
    "silhouette",
    "simulated_annealing",
    "tabu_search",
    "to_ising",
]
