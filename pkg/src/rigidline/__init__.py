"""Reconstruct point sets on the line and the unit circle from partial distances."""
from .core import (
    DEFAULT_SEED,
    Graph,
    MeasurementSet,
    PointConfig,
    Scalar,
    Space,
    all_distances,
    common_neighbors,
    distance,
    sample_measurements,
)
from .determination import DeterminedGraph, InconsistentInput, WitnessTriple, closure, determine_circle, determine_line
from .cliques import CliqueCertificate, check_rigidity_necessary, extract_clique, reconstruct_dense
from .reconstruction import EmbeddingResult, Status, correct_distances, embed_line, est_from, isometry_match
from .monotone import has_monotone_path, pair_coverage, threshold_sweep

algorithm1 = embed_line

__all__ = [
    "DEFAULT_SEED", "Graph", "MeasurementSet", "PointConfig", "Scalar", "Space",
    "all_distances", "common_neighbors", "distance", "sample_measurements",
    "DeterminedGraph", "InconsistentInput", "WitnessTriple", "closure", "determine_circle", "determine_line",
    "CliqueCertificate", "check_rigidity_necessary", "extract_clique", "reconstruct_dense",
    "EmbeddingResult", "Status", "correct_distances", "embed_line", "algorithm1", "est_from", "isometry_match",
    "has_monotone_path", "pair_coverage", "threshold_sweep",
]
__version__ = "0.1.0"
