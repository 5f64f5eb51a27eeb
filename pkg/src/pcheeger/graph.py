"""Weighted graphs, Dirichlet domains and their combinatorial measures.

All weights are exact :class:`fractions.Fraction` values. Floating point only
appears in :mod:`pcheeger.spectral`, through the cached arrays on
:class:`DirichletDomain`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import DisconnectedDomain, EmptyDomain, InputError, UnknownVertex
from .exact import to_fraction


def _edge_key(x: str, y: str) -> frozenset:
    return frozenset((x, y))


@dataclass(frozen=True)
class WeightedGraph:
    """A finite simple undirected graph with vertex measure ``nu`` and edge weight ``mu``.

    ``vertices`` fixes the iteration order; ``mu`` is keyed by two-element
    frozensets so that symmetry holds by construction.
    """

    vertices: tuple[str, ...]
    nu: Mapping[str, Fraction]
    mu: Mapping[frozenset, Fraction]

    def __post_init__(self):
        vs = tuple(str(v) for v in self.vertices)
        if len(set(vs)) != len(vs):
            raise InputError("duplicate vertex identifiers")
        vset = set(vs)
        nu = {}
        for v in vs:
            if v not in self.nu:
                raise InputError(f"missing vertex measure for {v!r}")
            w = to_fraction(self.nu[v])
            if w <= 0:
                raise InputError(f"vertex measure must be positive at {v!r}")
            nu[v] = w
        mu = {}
        for key, w in self.mu.items():
            key = frozenset(str(k) for k in key)
            if len(key) != 2:
                raise InputError(f"self-loops are not allowed: {sorted(key)}")
            for v in key:
                if v not in vset:
                    raise UnknownVertex(f"edge endpoint {v!r} is not a vertex")
            w = to_fraction(w)
            if w <= 0:
                raise InputError(f"edge weight must be positive on {sorted(key)}")
            if key in mu:
                raise InputError(f"duplicate edge {sorted(key)}")
            mu[key] = w
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "mu", mu)

    @classmethod
    def from_edges(cls, nu: Mapping[str, object], edges: Iterable[tuple]) -> "WeightedGraph":
        """Build from ``{vertex: nu}`` and ``(x, y, mu)`` triples (insertion order kept)."""
        mu = {}
        for x, y, w in edges:
            key = _edge_key(str(x), str(y))
            if key in mu:
                raise InputError(f"duplicate edge {x}-{y}")
            mu[key] = w
        return cls(tuple(nu), dict(nu), mu)

    @classmethod
    def with_degree_measure(cls, vertices: Iterable[str], edges: Iterable[tuple]) -> "WeightedGraph":
        """Graph whose vertex measure is the weighted degree (normalized Laplacian)."""
        vertices = [str(v) for v in vertices]
        edges = [(str(x), str(y), to_fraction(w)) for x, y, w in edges]
        deg = {v: Fraction(0) for v in vertices}
        for x, y, w in edges:
            deg[x] += w
            deg[y] += w
        return cls.from_edges(deg, edges)

    @cached_property
    def adjacency(self) -> dict[str, dict[str, Fraction]]:
        adj = {v: {} for v in self.vertices}
        for key, w in self.mu.items():
            x, y = tuple(key)
            adj[x][y] = w
            adj[y][x] = w
        return adj

    def weight(self, x: str, y: str) -> Fraction:
        return self.mu.get(_edge_key(x, y), Fraction(0))

    def degree(self, x: str) -> Fraction:
        return sum(self.adjacency[x].values(), Fraction(0))

    def edges(self) -> list[tuple[str, str, Fraction]]:
        """Edges as ``(x, y, mu)`` with ``x`` before ``y`` in vertex order."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        out = []
        for key, w in self.mu.items():
            x, y = sorted(key, key=pos.__getitem__)
            out.append((x, y, w))
        out.sort(key=lambda e: (pos[e[0]], pos[e[1]]))
        return out

    def _check(self, vs: Iterable[str]) -> set[str]:
        vs = set(vs)
        for v in vs:
            if v not in self.nu:
                raise UnknownVertex(f"unknown vertex {v!r}")
        return vs


@dataclass(frozen=True)
class DirichletDomain:
    """A vertex subset Omega with its complement collapsed to one absorbing vertex.

    ``interior`` fixes the coordinate order of every function on the domain.
    ``edges`` holds index pairs ``(i, j, mu)`` with ``i < j``; ``boundary[i]`` is
    the aggregated weight from vertex ``i`` to the collapsed vertex.
    """

    interior: tuple[str, ...]
    nu: tuple[Fraction, ...]
    edges: tuple[tuple[int, int, Fraction], ...]
    boundary: tuple[Fraction, ...]

    def __post_init__(self):
        n = len(self.interior)
        if n == 0:
            raise EmptyDomain("domain has no vertices")
        if len(set(self.interior)) != n:
            raise InputError("duplicate interior vertices")
        if len(self.nu) != n or len(self.boundary) != n:
            raise InputError("nu/boundary length does not match interior")
        nu = tuple(to_fraction(w) for w in self.nu)
        bw = tuple(to_fraction(w) for w in self.boundary)
        if any(w <= 0 for w in nu):
            raise InputError("vertex measure must be positive")
        if any(w < 0 for w in bw):
            raise InputError("boundary weight must be nonnegative")
        seen = set()
        edges = []
        for i, j, w in self.edges:
            i, j = int(i), int(j)
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise InputError(f"bad edge indices ({i}, {j})")
            i, j = min(i, j), max(i, j)
            if (i, j) in seen:
                raise InputError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            w = to_fraction(w)
            if w <= 0:
                raise InputError("edge weight must be positive")
            edges.append((i, j, w))
        edges.sort()
        object.__setattr__(self, "interior", tuple(str(v) for v in self.interior))
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "boundary", bw)

    @classmethod
    def from_weights(cls, interior, nu, edges, boundary) -> "DirichletDomain":
        """Build from vertex-id keyed data: ``edges`` as ``(x, y, mu)`` triples."""
        interior = [str(v) for v in interior]
        pos = {v: i for i, v in enumerate(interior)}
        try:
            return cls(
                tuple(interior),
                tuple(nu[v] for v in interior),
                tuple((pos[str(x)], pos[str(y)], w) for x, y, w in edges),
                tuple(boundary.get(v, 0) for v in interior),
            )
        except KeyError as exc:
            raise UnknownVertex(f"unknown vertex {exc.args[0]!r}") from None

    @property
    def size(self) -> int:
        return len(self.interior)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.interior)}

    @cached_property
    def neighbors(self) -> tuple[dict[int, Fraction], ...]:
        adj = [dict() for _ in self.interior]
        for i, j, w in self.edges:
            adj[i][j] = w
            adj[j][i] = w
        return tuple(adj)

    def interior_degree(self, i: int) -> Fraction:
        return sum(self.neighbors[i].values(), Fraction(0))

    def ambient_degree(self, i: int) -> Fraction:
        """Weighted degree in the source graph: interior weight plus boundary weight."""
        return self.interior_degree(i) + self.boundary[i]

    def is_normalized(self) -> bool:
        """True when nu equals the ambient weighted degree everywhere."""
        return all(self.nu[i] == self.ambient_degree(i) for i in range(self.size))

    def edge_weight(self, i: int, j: int) -> Fraction:
        return self.neighbors[i].get(j, Fraction(0))

    def indices(self, vertices: Iterable[str]) -> list[int]:
        try:
            return [self.index[str(v)] for v in vertices]
        except KeyError as exc:
            raise UnknownVertex(f"unknown vertex {exc.args[0]!r}") from None

    def boundary_of(self, subset: Iterable[int]) -> Fraction:
        """``|dU|`` in the collapsed domain: edges to Omega minus U plus boundary weight of U."""
        u = set(subset)
        total = sum((self.boundary[i] for i in u), Fraction(0))
        for i, j, w in self.edges:
            if (i in u) != (j in u):
                total += w
        return total

    def volume_of(self, subset: Iterable[int]) -> Fraction:
        return sum((self.nu[i] for i in set(subset)), Fraction(0))

    # float views for the numerical solvers
    @cached_property
    def arrays(self) -> "DomainArrays":
        n = self.size
        if self.edges:
            ei = np.array([e[0] for e in self.edges], dtype=np.intp)
            ej = np.array([e[1] for e in self.edges], dtype=np.intp)
            w = np.array([float(e[2]) for e in self.edges])
        else:
            ei = np.zeros(0, dtype=np.intp)
            ej = np.zeros(0, dtype=np.intp)
            w = np.zeros(0)
        return DomainArrays(
            n=n,
            nu=np.array([float(x) for x in self.nu]),
            bw=np.array([float(x) for x in self.boundary]),
            ei=ei,
            ej=ej,
            w=w,
        )


@dataclass(frozen=True)
class DomainArrays:
    n: int
    nu: np.ndarray
    bw: np.ndarray
    ei: np.ndarray
    ej: np.ndarray
    w: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Bipartition:
    part_one: frozenset
    part_two: frozenset

    def sign_vector(self, domain: DirichletDomain) -> np.ndarray:
        """+1 on ``part_one``, -1 on ``part_two`` in interior order."""
        return np.array([1.0 if v in self.part_one else -1.0 for v in domain.interior])


def build_domain(graph: WeightedGraph, omega: Iterable[str]) -> DirichletDomain:
    """Restrict ``graph`` to ``omega`` and collapse the complement to one vertex.

    The interior order follows ``graph.vertices``.
    """
    omega = [str(v) for v in omega]
    if not omega:
        raise EmptyDomain("omega is empty")
    oset = graph._check(omega)
    interior = tuple(v for v in graph.vertices if v in oset)
    pos = {v: i for i, v in enumerate(interior)}
    boundary = [Fraction(0)] * len(interior)
    edges = []
    for x, y, w in graph.edges():
        xin, yin = x in oset, y in oset
        if xin and yin:
            edges.append((pos[x], pos[y], w))
        elif xin:
            boundary[pos[x]] += w
        elif yin:
            boundary[pos[y]] += w
    return DirichletDomain(interior, tuple(graph.nu[v] for v in interior), tuple(edges), tuple(boundary))


def edge_boundary(graph: WeightedGraph, u: Iterable[str]) -> Fraction:
    """Total weight of edges with exactly one endpoint in ``u``."""
    uset = graph._check(u)
    total = Fraction(0)
    for key, w in graph.mu.items():
        x, y = tuple(key)
        if (x in uset) != (y in uset):
            total += w
    return total


def volume(graph: WeightedGraph, u: Iterable[str]) -> Fraction:
    uset = graph._check(u)
    return sum((graph.nu[v] for v in uset), Fraction(0))


def _components(domain: DirichletDomain) -> list[list[int]]:
    seen = [False] * domain.size
    comps = []
    for s in range(domain.size):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [], deque([s])
        while queue:
            i = queue.popleft()
            comp.append(i)
            for j in domain.neighbors[i]:
                if not seen[j]:
                    seen[j] = True
                    queue.append(j)
        comps.append(comp)
    return comps


def is_connected(domain: DirichletDomain) -> bool:
    """Reachability over interior edges only."""
    return len(_components(domain)) == 1


def bipartition(domain: DirichletDomain) -> Bipartition | None:
    """Two-colour a connected domain by BFS; ``None`` if an odd cycle exists."""
    if not is_connected(domain):
        raise DisconnectedDomain("bipartition requires a connected domain")
    colour = [-1] * domain.size
    colour[0] = 0
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in domain.neighbors[i]:
            if colour[j] < 0:
                colour[j] = 1 - colour[i]
                queue.append(j)
            elif colour[j] == colour[i]:
                return None
    one = frozenset(v for v, c in zip(domain.interior, colour) if c == 0)
    two = frozenset(v for v, c in zip(domain.interior, colour) if c == 1)
    return Bipartition(one, two)


def metric_balls(graph: WeightedGraph, center: str, r: int) -> tuple[set[str], set[str]]:
    """Ball and sphere of combinatorial radius ``r`` around ``center``."""
    center = str(center)
    if center not in graph.nu:
        raise UnknownVertex(f"unknown vertex {center!r}")
    if r < 0:
        raise InputError("radius must be nonnegative")
    dist = {center: 0}
    queue = deque([center])
    while queue:
        x = queue.popleft()
        if dist[x] == r:
            continue
        for y in graph.adjacency[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    ball = set(dist)
    sphere = {v for v, d in dist.items() if d == r}
    return ball, sphere
