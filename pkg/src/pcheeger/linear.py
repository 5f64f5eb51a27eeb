"""One-dimensional linear graphs and the spherically symmetric model families.

A linear graph is the path ``0 - 1 - 2 - ...`` with vertex weights ``nu_i``
and edge weights ``mu_i`` on ``{i, i+1}``. Trees and anti-trees collapse to
linear graphs by grouping distance spheres around the root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from . import limits
from .errors import HorizonExceeded, InvalidSpec, TooLarge
from .exact import Surd, to_mpf
from .graph import DirichletDomain, WeightedGraph, build_domain
from .limits import CONVERGED, DIVERGES, INCONCLUSIVE, LimitEstimate

PHYSICAL = "physical"
MODIFIED = "modified"
NORMALIZED = "normalized"
SCHEMES = (PHYSICAL, MODIFIED, NORMALIZED)
TREE = "tree"
ANTITREE = "antitree"
DEFAULT_HORIZON = 200
INF = math.inf


# ---------------------------------------------------------------- branching


@dataclass(frozen=True)
class Branching:
    """Branching numbers ``m_i`` given by a finite prefix.

    Past the prefix the last value repeats, or with ``arithmetic=True`` the
    sequence continues with the step between the last two values
    (``1,2,3,...`` means ``m_i = i + 1``).
    """

    prefix: tuple[int, ...]
    arithmetic: bool = False

    def __post_init__(self):
        if not self.prefix:
            raise InvalidSpec("branching needs at least one value")
        for m in self.prefix:
            if isinstance(m, bool) or not isinstance(m, int) or m < 1:
                raise InvalidSpec(f"branching numbers must be integers >= 1, got {m!r}")
        if self.arithmetic:
            if len(self.prefix) < 2:
                raise InvalidSpec("arithmetic continuation needs two values")
            if self.prefix[-1] < self.prefix[-2]:
                raise InvalidSpec("arithmetic continuation must not decrease")

    @classmethod
    def constant(cls, m: int) -> "Branching":
        return cls((m,))

    @classmethod
    def parse(cls, text: str | Sequence) -> "Branching":
        """Parse ``"2"``, ``"1,2,3,..."`` or a list that may end with ``"..."``."""
        items = [t.strip() for t in text.split(",")] if isinstance(text, str) else list(text)
        arithmetic = bool(items) and items[-1] in ("...", "…")
        if arithmetic:
            items = items[:-1]
        try:
            values = tuple(int(x) for x in items if x != "")
        except (TypeError, ValueError) as exc:
            raise InvalidSpec(f"bad branching list {text!r}") from exc
        return cls(values, arithmetic)

    def __call__(self, i: int) -> int:
        if i < len(self.prefix):
            return self.prefix[i]
        last = self.prefix[-1]
        if self.arithmetic:
            return last + (i - len(self.prefix) + 1) * (last - self.prefix[-2])
        return last

    def as_json(self) -> list:
        return list(self.prefix) + (["..."] if self.arithmetic else [])


# ---------------------------------------------------------------- linear graph


class LinearGraph:
    """Linear graph materialized up to ``horizon`` (indices ``0..horizon``)."""

    def __init__(self, nu: Callable[[int], object], mu: Callable[[int], object], horizon: int):
        if horizon < 1:
            raise InvalidSpec("horizon must be at least 1")
        self.horizon = int(horizon)
        self._nu = [nu(i) for i in range(self.horizon + 1)]
        self._mu = [mu(i) for i in range(self.horizon + 1)]
        for v in self._nu + self._mu:
            if not v > 0:
                raise InvalidSpec("linear graph weights must be positive")
        vol, acc = [], Fraction(0)
        for v in self._nu:
            acc = acc + v
            vol.append(acc)
        self._vol = vol

    @classmethod
    def from_sequences(cls, nu: Sequence, mu: Sequence) -> "LinearGraph":
        if len(nu) != len(mu):
            raise InvalidSpec("nu and mu need equal length")
        return cls(lambda i: Fraction(nu[i]), lambda i: mu[i] if isinstance(mu[i], Surd) else Fraction(mu[i]), len(nu) - 1)

    def _check(self, r: int):
        if r < 0 or r > self.horizon:
            raise HorizonExceeded(f"index {r} outside 0..{self.horizon}")

    def nu(self, i: int):
        self._check(i)
        return self._nu[i]

    def mu(self, i: int):
        """``mu_i`` on the edge ``{i, i+1}``; ``mu_{-1} = 0``."""
        if i == -1:
            return Fraction(0)
        self._check(i)
        return self._mu[i]

    def ball_volume(self, r: int) -> Fraction:
        self._check(r)
        return self._vol[r]

    def annulus_volume(self, k: int, r: int) -> Fraction:
        """Volume of ``{k+1, ..., r}``; ``k = -1`` gives the ball."""
        self._check(r)
        return self._vol[r] - (self._vol[k] if k >= 0 else 0)

    @property
    def exact_rational(self) -> bool:
        return not any(isinstance(m, Surd) for m in self._mu)

    def truncate(self, horizon: int) -> "LinearGraph":
        self._check(horizon)
        return LinearGraph(self._nu.__getitem__, self._mu.__getitem__, horizon)

    def sequences(self) -> tuple[list, list]:
        return list(self._nu), list(self._mu)


def ball_ratio(L: LinearGraph, r: int):
    """``mu_r / |B_r|`` exactly (Fraction or Surd)."""
    return L.mu(r) / L.ball_volume(r)


def annulus_ratio(L: LinearGraph, k: int, r: int):
    """``(mu_k + mu_r) / |A_{k,r}|``; exact for rational weights, mpf otherwise."""
    num = L.mu(k), L.mu(r)
    vol = L.annulus_volume(k, r)
    if isinstance(num[0], Surd) or isinstance(num[1], Surd):
        with mpmath.workdps(limits.WORK_DPS):
            return (to_mpf(num[0]) + to_mpf(num[1])) / to_mpf(vol)
    return (num[0] + num[1]) / vol


def linear_domain(L: LinearGraph, contains_root: bool, horizon: int | None = None) -> DirichletDomain:
    """Finite Dirichlet domain cut out of ``L``.

    With the root: ``{0..H}`` and boundary weight ``mu_H`` at ``H``. Without:
    ``{1..H}`` with boundary weights ``mu_0`` at 1 and ``mu_H`` at ``H``.
    """
    H = L.horizon if horizon is None else horizon
    L._check(H)
    if not L.exact_rational:
        raise InvalidSpec("explicit domains need rational weights")
    lo = 0 if contains_root else 1
    ids = [str(i) for i in range(lo, H + 1)]
    nu = [L.nu(i) for i in range(lo, H + 1)]
    bw = [Fraction(0)] * len(ids)
    bw[-1] += L.mu(H)
    if not contains_root:
        bw[0] += L.mu(0)
    edges = [(k, k + 1, L.mu(lo + k)) for k in range(len(ids) - 1)]
    return DirichletDomain(tuple(ids), tuple(nu), tuple(edges), tuple(bw))


# ---------------------------------------------------------------- models


@dataclass(frozen=True)
class ModelSpec:
    """A tree with branching numbers or an anti-tree of order ``a``, plus a weight scheme."""

    family: str
    scheme: str
    branching: Branching | None = None
    order: int | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidSpec(f"unknown scheme {self.scheme!r}")
        if self.family == TREE:
            if not isinstance(self.branching, Branching):
                raise InvalidSpec("tree needs branching numbers")
        elif self.family == ANTITREE:
            if isinstance(self.order, bool) or not isinstance(self.order, int) or self.order < 1:
                raise InvalidSpec("anti-tree order must be an integer >= 1")
        else:
            raise InvalidSpec(f"unknown family {self.family!r}")

    def sphere_size(self, r: int) -> int:
        """Number of vertices at distance ``r`` from the root."""
        if self.family == TREE:
            return math.prod(self.branching(i) for i in range(r))
        return (r + 1) ** self.order

    def edges_out(self, r: int) -> int:
        """Number of edges between spheres ``r`` and ``r + 1``."""
        if r < 0:
            return 0
        if self.family == TREE:
            return math.prod(self.branching(i) for i in range(r + 1))
        return self.sphere_size(r) * self.sphere_size(r + 1)

    def as_dict(self, horizon: int | None = None) -> dict:
        d = {"family": self.family, "scheme": self.scheme}
        if self.family == TREE:
            d["branching"] = self.branching.as_json()
        else:
            d["order"] = self.order
        if horizon is not None:
            d["horizon"] = horizon
        return d


def build_linear(spec: ModelSpec, horizon: int = DEFAULT_HORIZON) -> LinearGraph:
    """Sphere quotient of the model under the chosen weight scheme."""
    if horizon < 1:
        raise InvalidSpec("horizon must be at least 1")
    n = [spec.sphere_size(r) for r in range(horizon + 3)]
    e = [spec.edges_out(r) for r in range(horizon + 2)]

    def edge(r):
        return e[r] if r >= 0 else 0

    if spec.scheme == PHYSICAL:
        return LinearGraph(lambda r: Fraction(n[r]), lambda r: Fraction(e[r]), horizon)
    if spec.scheme == NORMALIZED:
        return LinearGraph(lambda r: Fraction(edge(r - 1) + e[r]), lambda r: Fraction(e[r]), horizon)

    def deg(r):
        # weighted degree of one vertex in sphere r
        return Fraction(edge(r - 1) + e[r], n[r])

    return LinearGraph(
        lambda r: Fraction(n[r]),
        lambda r: Surd.over_sqrt(e[r], max(deg(r), deg(r + 1))),
        horizon,
    )


# ---------------------------------------------------------------- Cheeger constants


@dataclass(frozen=True)
class LinearCheeger:
    """Finite-horizon exact minimum plus the tail estimate.

    ``h`` is the finite minimum unless the tail converges to something
    smaller, in which case the infimum is not attained and ``h`` is the limit.
    """

    minimum: object
    argmin: tuple[int, ...]
    tail: LimitEstimate
    h: float
    attained: bool

    def as_dict(self) -> dict:
        return {
            "h": self.h,
            "minimum": str(self.minimum),
            "argmin": list(self.argmin),
            "attained": self.attained,
            "tail": self.tail.as_dict(),
        }


def _float(v) -> float:
    return float(v)


def _stolz_sequence(L: LinearGraph):
    with mpmath.workdps(limits.WORK_DPS):
        out = []
        for r in range(L.horizon + 1):
            a, b = L.mu(r), L.mu(r - 1)
            if isinstance(a, Surd) or isinstance(b, Surd):
                out.append((to_mpf(a) - to_mpf(b)) / to_mpf(L.nu(r)))
            else:
                out.append((a - b) / L.nu(r))
    return out


def _infinite_volume(L: LinearGraph) -> bool:
    """Heuristic: nu_r decays no faster than ``1/r`` over the second half."""
    H = L.horizon
    a, b = float(L.nu(H // 2)), float(L.nu(H))
    if H < 4 or a <= 0:
        return False
    return math.log(b / a) / math.log(H / (H // 2)) >= -1.0


def _annulus_tail(L: LinearGraph, window: int) -> LimitEstimate:
    """Finite-volume fallback: ``t_r = inf_{R > r} |dA_{r,R}| / |A_{r,R}|`` over the materialized range."""
    H = L.horizon
    ts = []
    for r in range(max(0, H - 2 * window), H):
        ts.append(min(annulus_ratio(L, r, R) for R in range(r + 1, H + 1)))
    tail = [float(t) for t in ts[-window:]]
    win = (H - len(tail), H - 1)
    spread = max(tail) - min(tail)
    if spread <= limits.AGREE_TOL * max(1.0, abs(tail[-1])):
        return LimitEstimate(tail[-1], CONVERGED, win, tuple(tail[-5:]), "annulus")
    return LimitEstimate(None, INCONCLUSIVE, win, tuple(tail[-5:]), "annulus")


def cheeger_at_infinity(L: LinearGraph, window: int = limits.DEFAULT_WINDOW) -> LimitEstimate:
    """Estimate ``liminf |dB_r| / |B_r|`` through the increments ``(mu_r - mu_{r-1}) / nu_r``.

    Falls back to the raw ball ratios when the increments do not settle, and
    to the annulus formula when the volume looks finite.
    """
    if L.horizon < 8:
        raise HorizonExceeded("need a horizon of at least 8 for a tail estimate")
    if not _infinite_volume(L):
        return _annulus_tail(L, min(window, L.horizon // 4))
    est = limits.estimate_limit(_stolz_sequence(L), 0, window)
    if est.status != INCONCLUSIVE:
        return est
    raw = limits.estimate_limit([ball_ratio(L, r) for r in range(L.horizon + 1)], 0, window)
    if raw.converged:
        return LimitEstimate(raw.value, CONVERGED, raw.window, raw.tail_values, "ball-" + raw.method)
    return LimitEstimate(None, INCONCLUSIVE, est.window, est.tail_values, "")


def ball_minimum(L: LinearGraph) -> tuple[object, tuple[int]]:
    """Smallest ball ratio over ``0 <= r <= horizon`` and the first radius attaining it."""
    best, arg = None, (0,)
    for r in range(L.horizon + 1):
        v = ball_ratio(L, r)
        if best is None or v < best:
            best, arg = v, (r,)
    return best, arg


def annulus_minimum(L: LinearGraph) -> tuple[object, tuple[int, int]]:
    """Smallest annulus ratio over ``0 <= k < r <= horizon``."""
    best, arg = None, (0, 1)
    for k in range(L.horizon):
        for r in range(k + 1, L.horizon + 1):
            v = annulus_ratio(L, k, r)
            if best is None or v < best:
                best, arg = v, (k, r)
    return best, arg


def cheeger_linear(L: LinearGraph, contains_root: bool = True) -> LinearCheeger:
    """Cheeger constant of ``L`` (root case: balls only; rootless: annuli only)."""
    if L.horizon < 2:
        raise HorizonExceeded("horizon must be at least 2")
    best, arg = ball_minimum(L) if contains_root else annulus_minimum(L)
    tail = cheeger_at_infinity(L) if L.horizon >= 8 else LimitEstimate(None, INCONCLUSIVE, (0, L.horizon), ())
    h = _float(best)
    attained = True
    if tail.converged and tail.value < h - limits.AGREE_TOL * max(1.0, h):
        h, attained = tail.value, False
    return LinearCheeger(best, arg, tail, h, attained)


# ---------------------------------------------------------------- appendix families


def antitree_reference_row(a: int) -> dict:
    """Closed-form anti-tree values as printed in the reference table.

    Keys: ``h, h_inf, h_M, h_inf_M, h_N, h_inf_N``; ``INF`` marks divergence.
    """
    if isinstance(a, bool) or not isinstance(a, int) or a < 1:
        raise InvalidSpec("anti-tree order must be an integer >= 1")
    two_a = Fraction(2**a)
    if a == 1:
        h_inf_m = Fraction(0)
    elif a == 2:
        h_inf_m = Surd(Fraction(3, 2), 2)
    else:
        h_inf_m = INF
    return {
        "h": two_a,
        "h_inf": Fraction(2) if a == 1 else INF,
        # the a = 1 entry is kept as printed (1), see the decisions ledger
        "h_M": Fraction(1) if a == 1 else Surd.over_sqrt(two_a, 1 + 3**a).simplify(),
        "h_inf_M": h_inf_m,
        "h_N": Fraction(0),
        "h_inf_N": Fraction(0),
    }


ROW_KEYS = ("h", "h_inf", "h_M", "h_inf_M", "h_N", "h_inf_N")
_SCHEME_KEYS = ((PHYSICAL, "h", "h_inf"), (MODIFIED, "h_M", "h_inf_M"), (NORMALIZED, "h_N", "h_inf_N"))


@dataclass(frozen=True)
class ModelRow:
    """Computed ``h`` and ``h_inf`` for each scheme of one model."""

    label: str
    values: dict  # key -> float (inf for divergence) or None
    statuses: dict  # key -> status string

    def as_dict(self) -> dict:
        return {"label": self.label, "values": dict(self.values), "statuses": dict(self.statuses)}


def model_row(family: str, horizon: int = DEFAULT_HORIZON, branching: Branching | None = None, order: int | None = None,
              schemes: Sequence[str] = SCHEMES) -> ModelRow:
    values, statuses = {}, {}
    for scheme, hk, ik in _SCHEME_KEYS:
        if scheme not in schemes:
            continue
        spec = ModelSpec(family, scheme, branching=branching, order=order)
        res = cheeger_linear(build_linear(spec, horizon), True)
        values[hk] = res.h
        statuses[hk] = "attained" if res.attained else "limit"
        values[ik] = res.tail.as_number()
        statuses[ik] = res.tail.status
    label = f"a={order}" if family == ANTITREE else f"m={','.join(map(str, branching.as_json()))}"
    return ModelRow(label, values, statuses)


def reference_matches(a: int, row: ModelRow, tol: float = 1e-9) -> dict:
    """Per-entry agreement of a computed anti-tree row with the reference table."""
    ref = antitree_reference_row(a)
    out = {}
    for key in ROW_KEYS:
        want, got = ref[key], row.values.get(key)
        if want == INF:
            out[key] = row.statuses.get(key) == DIVERGES
        else:
            out[key] = got is not None and math.isfinite(got) and abs(got - float(want)) <= tol
    return out


def normalized_tree_sequence(branching: Branching, horizon: int) -> list[Fraction]:
    """``prod_{i<=r} m_i / (2 sum_{k<r} prod_{i<=k} m_i + prod_{i<=r} m_i)`` for ``r = 0..horizon``."""
    out, acc, prod = [], 0, 1
    for r in range(horizon + 1):
        prod *= branching(r)
        out.append(Fraction(prod, 2 * acc + prod))
        acc += prod
    return out


@dataclass(frozen=True)
class BranchingReport:
    pipeline: LimitEstimate
    closed_form: LimitEstimate
    closed_last: Fraction


def rapidly_branching_check(branching: Branching, horizon: int) -> BranchingReport:
    """``h_inf`` of the normalized tree, via the pipeline and via the closed sequence."""
    if horizon < 10:
        raise InvalidSpec("horizon must be at least 10")
    L = build_linear(ModelSpec(TREE, NORMALIZED, branching=branching), horizon)
    seq = normalized_tree_sequence(branching, horizon)
    closed = limits.estimate_limit(seq, 0)
    return BranchingReport(cheeger_at_infinity(L), closed, seq[-1])


def tree_closed_form(branching: Branching, scheme: str, r: int):
    """Ball ratio at radius ``r`` from the printed per-scheme tree formulas."""
    m = branching
    top = math.prod(m(i) for i in range(r + 1))
    if scheme == NORMALIZED:
        lower = sum(math.prod(m(i) for i in range(k + 1)) for k in range(r))
        return Fraction(top, 2 * lower + top)
    vol = sum(math.prod(m(i) for i in range(k)) for k in range(r + 1))
    ratio = Fraction(top, vol)
    if scheme == PHYSICAL:
        return ratio
    if r == 0:
        return min(Surd.over_sqrt(m(0), m(1) + 1), Surd(1, m(0)))
    return min(ratio * Surd.over_sqrt(1, m(r + 1) + 1), ratio * Surd.over_sqrt(1, m(r) + 1))


@dataclass(frozen=True)
class TreeReport:
    h: float
    h_inf: LimitEstimate
    agree: bool
    first_mismatch: int | None
    linear: LinearCheeger


def tree_cheeger(branching: Branching, scheme: str, horizon: int = DEFAULT_HORIZON) -> TreeReport:
    """Tree constants via the linear pipeline, checked term by term against the closed forms."""
    if horizon < 2:
        raise InvalidSpec("horizon must be at least 2")
    L = build_linear(ModelSpec(TREE, scheme, branching=branching), horizon)
    mismatch = None
    for r in range(horizon + 1):
        if ball_ratio(L, r) != tree_closed_form(branching, scheme, r):
            mismatch = r
            break
    res = cheeger_linear(L, True)
    return TreeReport(res.h, res.tail, mismatch is None, mismatch, res)


# ---------------------------------------------------------------- explicit models


def explicit_model(spec: ModelSpec, radius: int, max_vertices: int = 2000) -> tuple[WeightedGraph, list[list[str]]]:
    """Materialize the model out to ``radius + 1`` with its distance spheres.

    Vertex measures follow the scheme's vertex weights (modified uses the
    physical measure; its edge rescaling is not rational in general).
    """
    if spec.scheme == MODIFIED:
        raise InvalidSpec("explicit models support the physical and normalized schemes")
    sizes = [spec.sphere_size(r) for r in range(radius + 2)]
    if sum(sizes) > max_vertices:
        raise TooLarge(f"{sum(sizes)} vertices exceed {max_vertices}")
    spheres = [[f"s{r}_{j}" for j in range(sizes[r])] for r in range(radius + 2)]
    edges = []
    for r in range(radius + 1):
        inner, outer = spheres[r], spheres[r + 1]
        if spec.family == TREE:
            kids = spec.branching(r)
            for j, x in enumerate(inner):
                for c in range(kids):
                    edges.append((x, outer[j * kids + c], 1))
        else:
            edges.extend((x, y, 1) for x in inner for y in outer)
    verts = [v for s in spheres for v in s]
    if spec.scheme == PHYSICAL:
        nu = {v: 1 for v in verts}
        return WeightedGraph.from_edges(nu, edges), spheres
    g = WeightedGraph.with_degree_measure(verts, edges)
    return g, spheres


@dataclass(frozen=True)
class SphereConsistency:
    quotient_nu: tuple[Fraction, ...]
    quotient_mu: tuple[Fraction, ...]
    linear_nu: tuple[Fraction, ...]
    linear_mu: tuple[Fraction, ...]
    boundary_ok: bool

    @property
    def ok(self) -> bool:
        return self.quotient_nu == self.linear_nu and self.quotient_mu == self.linear_mu and self.boundary_ok


def sphere_domain(spec: ModelSpec, radius: int) -> tuple[DirichletDomain, list[list[str]]]:
    """The ball ``B_radius`` as a Dirichlet domain inside the model, with its spheres as cells."""
    graph, spheres = explicit_model(spec, radius)
    omega = [v for s in spheres[: radius + 1] for v in s]
    return build_domain(graph, omega), spheres[: radius + 1]


def sphere_partition_consistency(spec: ModelSpec, radius: int) -> SphereConsistency:
    """Quotient the explicit ball by its spheres and compare with ``build_linear``."""
    from .symmetry import VertexPartition, quotient

    if radius < 1:
        raise InvalidSpec("radius must be at least 1")
    dom, cells = sphere_domain(spec, radius)
    q = quotient(dom, VertexPartition.of(cells))
    qmu = [Fraction(0)] * (radius)
    for i, j, w in q.edges:
        if j != i + 1:
            return SphereConsistency(tuple(q.nu), (), (), (), False)
        qmu[i] = w
    L = build_linear(spec, radius + 1)
    lnu = tuple(L.nu(r) for r in range(radius + 1))
    lmu = tuple(L.mu(r) for r in range(radius))
    boundary_ok = all(b == 0 for b in q.boundary[:-1]) and q.boundary[-1] == L.mu(radius)
    return SphereConsistency(tuple(q.nu), tuple(qmu), lnu, lmu, boundary_ok)
