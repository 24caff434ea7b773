"""Quantum thermal discrimination of classically co-Ising graphs."""

__version__ = "0.1.0"

from .catalog import NAMES, TUPLES, catalog_get, iso_variant
from .chimera import ChimeraTopology, EmbeddingMap, chimera_graph, find_native_embeddings, verify_embedding
from .experiment import (
    MimicConfig,
    ObservableCurve,
    SweepConfig,
    Verdict,
    discriminate,
    mimic_run,
    sweep,
)
from .graph import Graph, GraphError, VertexPermutation, are_isomorphic, parse_graph, relabel
from .polynomial import (
    IsingPolynomial,
    RootedGraph,
    classical_spectrum,
    classical_spectrum_auto,
    co_ising,
    compose_rooted,
    rooted_spectrum,
    vertex_identify,
)
from .thermal import (
    IsingInstance,
    ObservableSet,
    Schedule,
    default_schedule,
    load_schedule,
    thermal_dense,
    thermal_qmc,
    thermal_stochastic,
)

__all__ = [
    "NAMES", "TUPLES", "catalog_get", "iso_variant",
    "ChimeraTopology", "EmbeddingMap", "chimera_graph", "find_native_embeddings", "verify_embedding",
    "MimicConfig", "ObservableCurve", "SweepConfig", "Verdict", "discriminate", "mimic_run", "sweep",
    "Graph", "GraphError", "VertexPermutation", "are_isomorphic", "parse_graph", "relabel",
    "IsingPolynomial", "RootedGraph", "classical_spectrum", "classical_spectrum_auto", "co_ising",
    "compose_rooted", "rooted_spectrum", "vertex_identify",
    "IsingInstance", "ObservableSet", "Schedule", "default_schedule", "load_schedule",
    "thermal_dense", "thermal_qmc", "thermal_stochastic",
]
