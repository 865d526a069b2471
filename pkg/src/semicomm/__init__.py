"""Semi-supervised community detection with must-link / cannot-link closure."""

from .benchgen import GnParams, LfrParams, generate_gn, generate_lfr
from .constraints import (ConstraintSet, check_consistency, enhance, filter_constraints,
                          load_constraints, sample_constraints, write_constraints)
from .graph import (Graph, GroundTruth, Partition, adjacency, load_edge_list, load_labels,
                    load_partition, write_edge_list, write_labels, write_partition)
from .harness import ExperimentConfig, emit_results, run_case_study, run_experiment
from .metrics import misclustered, nmi, score
from .nmf import assign_from_h, nmf
from .revision import Variant, build_variant, revise
from .spectral import kmeans, normalized_affinity, spectral_cluster, top_k_eigenvectors

__version__ = "0.1.0"

__all__ = [
    "ConstraintSet", "ExperimentConfig", "GnParams", "Graph", "GroundTruth", "LfrParams",
    "Partition", "Variant", "adjacency", "assign_from_h", "build_variant", "check_consistency",
    "emit_results", "enhance", "filter_constraints", "generate_gn", "generate_lfr", "kmeans",
    "load_constraints", "load_edge_list", "load_labels", "load_partition", "misclustered", "nmf",
    "nmi", "normalized_affinity", "revise", "run_case_study", "run_experiment", "sample_constraints",
    "score", "spectral_cluster", "top_k_eigenvectors", "write_constraints", "write_edge_list",
    "write_labels", "write_partition",
]
