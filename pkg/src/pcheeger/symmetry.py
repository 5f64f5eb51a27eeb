"""Dirichlet automorphisms, orbit partitions and quotient domains."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidPartition, NotEquitable, TooLarge
from .graph import DirichletDomain

DEFAULT_AUT_CAP = 12


@dataclass(frozen=True)
class VertexPartition:
    """Disjoint nonempty cells of vertex ids."""

    cells: tuple[tuple[str, ...], ...]

    @classmethod
    def of(cls, cells: Iterable[Iterable[str]]) -> "VertexPartition":
        return cls(tuple(tuple(str(v) for v in c) for c in cells))

    @classmethod
    def singletons(cls, domain: DirichletDomain) -> "VertexPartition":
        return cls(tuple((v,) for v in domain.interior))

    def index_cells(self, domain: DirichletDomain) -> list[list[int]]:
        """Cells as sorted interior indices, ordered by smallest member."""
        seen: set[int] = set()
        out = []
        for cell in self.cells:
            if not cell:
                raise InvalidPartition("empty cell")
            idx = sorted(domain.indices(cell))
            if seen.intersection(idx) or len(set(idx)) != len(idx):
                raise InvalidPartition("cells overlap")
            seen.update(idx)
            out.append(idx)
        if len(seen) != domain.size:
            raise InvalidPartition("cells do not cover the domain")
        out.sort()
        return out

    def as_dict(self) -> dict:
        return {"cells": [list(c) for c in self.cells]}


@dataclass(frozen=True)
class AutomorphismGroup:
    """Explicit list of D-automorphisms as permutations of interior indices."""

    elements: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.elements)


def _signatures(domain: DirichletDomain, colour: Sequence[int] | None = None) -> list[tuple]:
    sig = []
    for i in range(domain.size):
        incident = tuple(sorted(domain.neighbors[i].values()))
        c = colour[i] if colour is not None else 0
        sig.append((c, domain.nu[i], domain.boundary[i], incident))
    return sig


def _search_order(domain: DirichletDomain) -> list[int]:
    """BFS order so that each new vertex has assigned neighbours to check against."""
    order, seen = [], set()
    for s in range(domain.size):
        if s in seen:
            continue
        seen.add(s)
        queue = [s]
        while queue:
            i = queue.pop(0)
            order.append(i)
            for j in sorted(domain.neighbors[i]):
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
    return order


def _backtrack(domain: DirichletDomain, sig, fixed: dict[int, int] | None = None, first_only=False, budget=None):
    """Yield vertex bijections preserving nu, interior mu and boundary weight."""
    n = domain.size
    order = _search_order(domain)
    if fixed:
        order = [i for i in fixed] + [i for i in order if i not in fixed]
    perm = [-1] * n
    used = [False] * n
    nb = domain.neighbors
    nodes = [0]
    results = []

    def consistent(x, y):
        for x2 in nb[x]:
            if perm[x2] >= 0 and nb[y].get(perm[x2]) != nb[x][x2]:
                return False
        # non-edges must map to non-edges
        for y2, w in nb[y].items():
            pre = inverse.get(y2)
            if pre is not None and nb[x].get(pre) != w:
                return False
        return True

    inverse: dict[int, int] = {}

    def rec(k):
        if budget is not None and nodes[0] > budget:
            return True
        if k == n:
            results.append(tuple(perm))
            return first_only
        x = order[k]
        cands = [fixed[x]] if fixed and x in fixed else range(n)
        for y in cands:
            if used[y] or sig[y] != sig[x]:
                continue
            nodes[0] += 1
            if not consistent(x, y):
                continue
            perm[x] = y
            used[y] = True
            inverse[y] = x
            if rec(k + 1):
                return True
            perm[x] = -1
            used[y] = False
            del inverse[y]
        return False

    rec(0)
    exhausted = budget is not None and nodes[0] > budget
    return results, exhausted


def enumerate_automorphisms(domain: DirichletDomain, cap: int = DEFAULT_AUT_CAP) -> AutomorphismGroup:
    """All D-automorphisms by backtracking over signature-compatible bijections."""
    if domain.size > cap:
        raise TooLarge(f"{domain.size} vertices exceed the automorphism cap {cap}")
    elements, _ = _backtrack(domain, _signatures(domain))
    return AutomorphismGroup(tuple(sorted(elements)))


def is_automorphism(domain: DirichletDomain, perm: Sequence[int]) -> bool:
    n = domain.size
    if sorted(perm) != list(range(n)):
        return False
    for i in range(n):
        if domain.nu[perm[i]] != domain.nu[i] or domain.boundary[perm[i]] != domain.boundary[i]:
            return False
    edges = {(i, j): w for i, j, w in domain.edges}
    for (i, j), w in edges.items():
        a, b = sorted((perm[i], perm[j]))
        if edges.get((a, b)) != w:
            return False
    return True


def orbits(group: AutomorphismGroup, domain: DirichletDomain) -> VertexPartition:
    """Orbit partition of ``group`` (union-find over ``x ~ g(x)``)."""
    parent = list(range(domain.size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in group.elements:
        for i, j in enumerate(g):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    cells: dict[int, list[str]] = {}
    for i in range(domain.size):
        cells.setdefault(find(i), []).append(domain.interior[i])
    return VertexPartition(tuple(tuple(c) for _, c in sorted(cells.items())))


def certify_orbit_partition(domain: DirichletDomain, partition: VertexPartition, budget: int = 200_000):
    """Find cell-preserving automorphisms moving each cell's first vertex to every member.

    Success shows the cells are exactly the orbits of the generated group.
    Returns the generators, or ``None`` if some move does not exist (or the
    search budget runs out).
    """
    cells = partition.index_cells(domain)
    colour = [0] * domain.size
    for c, cell in enumerate(cells):
        for i in cell:
            colour[i] = c
    sig = _signatures(domain, colour)
    gens = []
    for cell in cells:
        rep = cell[0]
        for target in cell[1:]:
            found, exhausted = _backtrack(domain, sig, fixed={rep: target}, first_only=True, budget=budget)
            if not found:
                return None
            gens.append(found[0])
    return gens


@dataclass(frozen=True)
class EquitableReport:
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_equitable(domain: DirichletDomain, partition: VertexPartition) -> EquitableReport:
    """Check nu, boundary weight and cell-to-cell weight sums are constant on cells."""
    cells = partition.index_cells(domain)
    owner = {}
    for c, cell in enumerate(cells):
        for i in cell:
            owner[i] = c
    issues = []
    for c, cell in enumerate(cells):
        name = domain.interior[cell[0]]
        profiles = []
        for i in cell:
            sums = [Fraction(0)] * len(cells)
            for j, w in domain.neighbors[i].items():
                sums[owner[j]] += w
            profiles.append((domain.nu[i], domain.boundary[i], tuple(sums)))
        ref = profiles[0]
        for i, prof in zip(cell[1:], profiles[1:]):
            v = domain.interior[i]
            if prof[0] != ref[0]:
                issues.append(f"nu differs within cell of {name}: {v}")
            if prof[1] != ref[1]:
                issues.append(f"boundary weight differs within cell of {name}: {v}")
            for c2, (a, b) in enumerate(zip(prof[2], ref[2])):
                if a != b:
                    other = domain.interior[cells[c2][0]]
                    kind = "within-cell" if c2 == c else f"to cell of {other}"
                    issues.append(f"weight {kind} differs within cell of {name}: {v}")
    return EquitableReport(tuple(issues))


def quotient(domain: DirichletDomain, partition: VertexPartition) -> DirichletDomain:
    """Collapse each cell: summed nu, summed crossing mu, summed boundary weight.

    Edges inside a cell are dropped (no self-loops). Quotient vertices are
    named ``[x]`` after the first member of each cell.
    """
    report = validate_equitable(domain, partition)
    if not report.valid:
        raise NotEquitable("; ".join(report.violations))
    return _collapse(domain, partition.index_cells(domain))


def _collapse(domain: DirichletDomain, cells: list[list[int]]) -> DirichletDomain:
    owner = {}
    for c, cell in enumerate(cells):
        for i in cell:
            owner[i] = c
    names = tuple(f"[{domain.interior[cell[0]]}]" for cell in cells)
    nu = tuple(sum((domain.nu[i] for i in cell), Fraction(0)) for cell in cells)
    bw = tuple(sum((domain.boundary[i] for i in cell), Fraction(0)) for cell in cells)
    mu: dict[tuple[int, int], Fraction] = {}
    for i, j, w in domain.edges:
        a, b = owner[i], owner[j]
        if a != b:
            key = (min(a, b), max(a, b))
            mu[key] = mu.get(key, Fraction(0)) + w
    return DirichletDomain(names, nu, tuple((a, b, w) for (a, b), w in sorted(mu.items())), bw)


def lift(domain: DirichletDomain, partition: VertexPartition, f) -> np.ndarray:
    """Extend a function on the quotient's cells to be constant on each cell."""
    cells = partition.index_cells(domain)
    f = np.asarray(f, dtype=float)
    if f.shape != (len(cells),):
        raise DimensionMismatch(f"expected {len(cells)} cell values, got shape {f.shape}")
    out = np.empty(domain.size)
    for c, cell in enumerate(cells):
        out[cell] = f[c]
    return out


@dataclass(frozen=True)
class InvarianceRow:
    p: float
    lam_original: float
    lam_quotient: float
    cell_spread: float  # max deviation of the original eigenfunction within a cell


@dataclass(frozen=True)
class InvarianceReport:
    origin: str  # "group" or "equitable-only"
    rows: tuple[InvarianceRow, ...]
    h_original: Fraction
    h_quotient: Fraction
    cell_union_cut: tuple[str, ...] | None
    examined_original: int
    examined_quotient: int

    @property
    def h_equal(self) -> bool:
        return self.h_original == self.h_quotient

    def lam_agreement(self) -> float:
        return max((abs(r.lam_original - r.lam_quotient) for r in self.rows), default=0.0)

    def as_dict(self) -> dict:
        from .exact import format_fraction

        return {
            "origin": self.origin,
            "rows": [
                {"p": r.p, "lambdaOriginal": r.lam_original, "lambdaQuotient": r.lam_quotient, "cellSpread": r.cell_spread}
                for r in self.rows
            ],
            "hOriginal": str(format_fraction(self.h_original)),
            "hQuotient": str(format_fraction(self.h_quotient)),
            "hEqual": self.h_equal,
            "cellUnionCut": list(self.cell_union_cut) if self.cell_union_cut is not None else None,
        }


def verify_quotient_invariance(
    domain: DirichletDomain, partition: VertexPartition, ps, cfg=None, cap: int | None = None, sink: list | None = None
) -> InvarianceReport:
    """Compare first eigenvalues and Cheeger constants of a domain and its quotient.

    ``origin`` is ``"group"`` when the cells are certified as orbits of a
    D-automorphism group; otherwise the partition is only known to be equitable.
    Eigenpairs of the original domain are appended to ``sink`` when given.
    """
    from .cheeger import DEFAULT_CAP, cheeger_exact
    from .spectral import first_eigenpair

    q = quotient(domain, partition)
    cells = partition.index_cells(domain)
    origin = "group" if certify_orbit_partition(domain, partition) is not None else "equitable-only"
    rows = []
    for p in ps:
        e = first_eigenpair(domain, p, cfg)
        eq = first_eigenpair(q, p, cfg)
        if sink is not None:
            sink.append(e)
        spread = max(float(np.ptp(e.u[cell])) for cell in cells)
        rows.append(InvarianceRow(float(p), e.lam, eq.lam, spread))
    cap = cap or DEFAULT_CAP
    full = cheeger_exact(domain, cap)
    small = cheeger_exact(q, cap)
    cell_sets = [frozenset(domain.interior[i] for i in cell) for cell in cells]
    union_cut = None
    for cut in full.cuts:
        s = set(cut)
        if all(c <= s or not (c & s) for c in cell_sets):
            union_cut = cut
            break
    return InvarianceReport(
        origin=origin,
        rows=tuple(rows),
        h_original=full.h,
        h_quotient=small.h,
        cell_union_cut=union_cut,
        examined_original=full.subsets_examined,
        examined_quotient=small.subsets_examined,
    )
