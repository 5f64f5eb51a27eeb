"""Dirichlet p-Laplacian eigenpairs and Cheeger constants on weighted graphs.

Modules
-------
graph      weighted graphs, Dirichlet domains, boundaries and volumes
spectral   p-Laplacian, energies, first and maximum eigenpair solvers
cheeger    exact Cheeger constants, co-area check, eigenvalue bracket
symmetry   automorphisms, orbit partitions, quotient domains
linear     linear graphs, trees and anti-trees, limits at infinity
"""

from .cheeger import CheegerResult, cheeger_exact, coarea_verify, lambda_1_1
from .errors import PCheegerError
from .graph import (
    Bipartition,
    DirichletDomain,
    WeightedGraph,
    bipartition,
    build_domain,
    edge_boundary,
    is_connected,
    metric_balls,
    volume,
)
from .linear import (
    Branching,
    LinearGraph,
    ModelSpec,
    build_linear,
    cheeger_at_infinity,
    cheeger_linear,
)
from .spectral import (
    EigenPair,
    SolverConfig,
    apply_p_laplacian,
    dirichlet_energy,
    first_eigenpair,
    max_eigenpair_bipartite,
    rayleigh_quotient,
)
from .symmetry import VertexPartition, enumerate_automorphisms, orbits, quotient

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "Branching",
    "CheegerResult",
    "DirichletDomain",
    "EigenPair",
    "LinearGraph",
    "ModelSpec",
    "PCheegerError",
    "SolverConfig",
    "VertexPartition",
    "WeightedGraph",
    "apply_p_laplacian",
    "bipartition",
    "build_domain",
    "build_linear",
    "cheeger_at_infinity",
    "cheeger_exact",
    "cheeger_linear",
    "coarea_verify",
    "dirichlet_energy",
    "edge_boundary",
    "enumerate_automorphisms",
    "first_eigenpair",
    "is_connected",
    "lambda_1_1",
    "max_eigenpair_bipartite",
    "metric_balls",
    "orbits",
    "quotient",
    "rayleigh_quotient",
    "volume",
]
