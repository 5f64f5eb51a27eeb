"""Bundled example domains and seeded random domain generators."""

from __future__ import annotations

import random
from fractions import Fraction

from .graph import DirichletDomain, WeightedGraph, build_domain, is_connected

# printed eigenvector components for the 3-vertex path example at p = 4
EXAMPLE41_U1 = (0.422207, 0.966286, 0.422207)
EXAMPLE41_UMAX = (0.696725, -0.852721, 0.696725)


def path_graph(n: int = 5) -> WeightedGraph:
    """Path ``v0 - ... - v{n-1}`` with unit weights and ``nu = deg``."""
    vs = [f"v{i}" for i in range(n)]
    return WeightedGraph.with_degree_measure(vs, [(vs[i], vs[i + 1], 1) for i in range(n - 1)])


def example41_domain() -> DirichletDomain:
    """Middle three vertices of the 5-path."""
    return build_domain(path_graph(5), ["v1", "v2", "v3"])


def fig2_graph(boundary_weight: int = 0) -> WeightedGraph:
    """Path v1-v2-v3 with a triangle v3-v4-v5, ``nu = deg``.

    With ``boundary_weight > 0`` the vertices v4 and v5 are each tied to an
    outside vertex by an edge of that weight.
    """
    edges = [("v1", "v2", 1), ("v2", "v3", 1), ("v3", "v4", 1), ("v3", "v5", 1), ("v4", "v5", 1)]
    vs = ["v1", "v2", "v3", "v4", "v5"]
    if boundary_weight:
        edges += [("v4", "w4", boundary_weight), ("v5", "w5", boundary_weight)]
        vs += ["w4", "w5"]
    return WeightedGraph.with_degree_measure(vs, edges)


def example51_domain() -> DirichletDomain:
    """All five vertices of the triangle-with-tail graph (no boundary)."""
    return build_domain(fig2_graph(), ["v1", "v2", "v3", "v4", "v5"])


def example51_embedded_domain() -> DirichletDomain:
    """The same five vertices with weight-3 boundary edges at v4 and v5.

    Here ``h = 1/3`` with minimizers exactly {v1,v2,v3} and {v1,v2}.
    """
    return build_domain(fig2_graph(3), ["v1", "v2", "v3", "v4", "v5"])


def singleton_domain(nu=1, boundary=2) -> DirichletDomain:
    return DirichletDomain(("x",), (Fraction(nu),), (), (Fraction(boundary),))


def star_domain() -> DirichletDomain:
    """Center ``c`` with four unit spokes; each leaf also ties to the outside with weight 1."""
    leaves = [f"l{i}" for i in range(1, 5)]
    edges = [("c", x, 1) for x in leaves] + [(x, "o", 1) for x in leaves]
    g = WeightedGraph.with_degree_measure(["c", *leaves, "o"], edges)
    return build_domain(g, ["c", *leaves])


def triangle_domain() -> DirichletDomain:
    """Symmetric triangle, unit weights, unit boundary weight everywhere."""
    return DirichletDomain(
        ("a", "b", "c"),
        (Fraction(3),) * 3,
        ((0, 1, Fraction(1)), (0, 2, Fraction(1)), (1, 2, Fraction(1))),
        (Fraction(1),) * 3,
    )


# ---------------------------------------------------------------- random domains


def _rational(rng: random.Random, top: int = 9, den: int = 4) -> Fraction:
    return Fraction(rng.randint(1, top), rng.randint(1, den))


def random_domain(rng: random.Random, n: int, extra_edges: float = 0.3, bipartite: bool = False) -> DirichletDomain:
    """Connected domain with random rational ``nu``, ``mu`` and boundary weights.

    A random spanning tree guarantees connectivity; with ``bipartite`` the
    extra edges only join opposite colours of the tree's 2-colouring.
    """
    ids = [f"x{i}" for i in range(n)]
    colour = [0] * n
    edges = {}
    for i in range(1, n):
        j = rng.randrange(i)
        colour[i] = 1 - colour[j]
        edges[(j, i)] = _rational(rng)
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in edges or rng.random() >= extra_edges:
                continue
            if bipartite and colour[i] == colour[j]:
                continue
            edges[(i, j)] = _rational(rng)
    bw = [_rational(rng) if rng.random() < 0.5 else Fraction(0) for _ in range(n)]
    if not any(bw):
        bw[rng.randrange(n)] = _rational(rng)
    nu = [_rational(rng) for _ in range(n)]
    return DirichletDomain(tuple(ids), tuple(nu), tuple((i, j, w) for (i, j), w in sorted(edges.items())), tuple(bw))


def random_graph(rng: random.Random, n: int, density: float = 0.35, bipartite: bool = False) -> WeightedGraph:
    """Connected random graph with rational edge weights and ``nu = deg``."""
    ids = [f"g{i}" for i in range(n)]
    colour = [0] * n
    edges = {}
    for i in range(1, n):
        j = rng.randrange(i)
        colour[i] = 1 - colour[j]
        edges[(j, i)] = _rational(rng)
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in edges or rng.random() >= density:
                continue
            if bipartite and colour[i] == colour[j]:
                continue
            edges[(i, j)] = _rational(rng)
    return WeightedGraph.with_degree_measure(ids, [(ids[i], ids[j], w) for (i, j), w in sorted(edges.items())])


def random_connected_omega(rng: random.Random, graph: WeightedGraph, size: int) -> list[str]:
    """Grow a connected vertex set of the given size (or the whole graph if smaller)."""
    vs = list(graph.vertices)
    start = rng.choice(vs)
    omega = [start]
    frontier = set(graph.adjacency[start])
    while len(omega) < size and frontier:
        x = rng.choice(sorted(frontier))
        omega.append(x)
        frontier |= set(graph.adjacency[x])
        frontier -= set(omega)
    return omega


def random_normalized_domain(rng: random.Random, n_graph: int, n_omega: int, bipartite: bool = False) -> DirichletDomain:
    """Connected proper subdomain of a random graph with ``nu = deg``."""
    while True:
        g = random_graph(rng, n_graph, bipartite=bipartite)
        dom = build_domain(g, random_connected_omega(rng, g, min(n_omega, n_graph - 1)))
        if is_connected(dom) and any(dom.boundary):
            return dom
