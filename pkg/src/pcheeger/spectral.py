"""Dirichlet p-Laplacian, p-Dirichlet energy and extremal eigenpair solvers.

Functions on a domain are numpy vectors in the domain's interior order. The
collapsed boundary vertex always carries the value 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import (
    DimensionMismatch,
    DisconnectedDomain,
    InvalidBipartition,
    InvalidP,
    NoConvergence,
    NotBipartite,
    NotNormalized,
    ZeroFunction,
)
from .exact import to_mpf
from .graph import Bipartition, DirichletDomain, bipartition, is_connected

log = logging.getLogger(__name__)

# differences below this magnitude contribute nothing to solver gradients
DIFF_CUTOFF = 1e-12
# restarts whose normalized vectors differ by more than this are not "agreeing"
AGREEMENT_TOL = 1e-6
# neighbouring values closer than this (relative) are candidates for exact ties
TIE_GAP = 1e-3
# digits used when double precision cannot resolve near-ties
REFINE_DPS = 40
# extended-precision refinement aims this far below the tolerance
REFINE_MARGIN = 1e-6
# double-precision polishing aims this far below the tolerance (it stops on stagnation)
POLISH_MARGIN = 1e-4
# precision ceiling for continuation toward p = 1
MAX_DPS = 400


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 50_000
    residual_tol: float = 1e-10
    step_shrink: float = 0.5
    restarts: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if not 0 < self.step_shrink < 1:
            raise ValueError("step_shrink must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True)
class EigenPair:
    """An eigenpair with ``u`` normalized to unit weighted l^p norm."""

    p: float
    lam: float
    u: np.ndarray = field(repr=False)
    residual: float
    restarts_agreeing: int
    certified: bool = False
    iterations: int = 0
    kind: str = "first"

    def as_dict(self, domain: DirichletDomain) -> dict:
        return {
            "p": self.p,
            "lambda": self.lam,
            "u": {v: float(x) for v, x in zip(domain.interior, self.u)},
            "residual": self.residual,
            "certified": self.certified,
        }


def _check_p(p: float, minimum: float = 1.0, strict: bool = False) -> float:
    p = float(p)
    if not np.isfinite(p) or p < minimum or (strict and p == minimum):
        raise InvalidP(f"p must be {'>' if strict else '>='} {minimum}, got {p}")
    return p


def _vector(domain: DirichletDomain, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (domain.size,):
        raise DimensionMismatch(f"expected a vector of length {domain.size}, got shape {u.shape}")
    return u


def _phi(t: np.ndarray, p: float, cutoff: float = 0.0) -> np.ndarray:
    """``|t|^(p-2) t`` with the convention ``sign(0) = 0`` (covers p = 1)."""
    out = np.sign(t) * np.abs(t) ** (p - 1.0)
    if cutoff:
        out[np.abs(t) < cutoff] = 0.0
    return out


def _flux(a, u: np.ndarray, p: float, cutoff: float = 0.0) -> np.ndarray:
    """``nu_x * Delta_p u(x)`` for every interior vertex."""
    flux = -a.bw * _phi(u, p, cutoff)
    if a.w.size:
        f = a.w * _phi(u[a.ej] - u[a.ei], p, cutoff)
        flux += np.bincount(a.ei, weights=f, minlength=a.n)
        flux -= np.bincount(a.ej, weights=f, minlength=a.n)
    return flux


def apply_p_laplacian(domain: DirichletDomain, p: float, u) -> np.ndarray:
    """Dirichlet p-Laplacian of ``u`` (null extension through the collapsed vertex)."""
    p = _check_p(p)
    u = _vector(domain, u)
    a = domain.arrays
    return _flux(a, u, p) / a.nu


def _energy(a, u: np.ndarray, p: float) -> float:
    e = float(np.dot(a.bw, np.abs(u) ** p))
    if a.w.size:
        e += float(np.dot(a.w, np.abs(u[a.ej] - u[a.ei]) ** p))
    return e


def _norm_p(a, u: np.ndarray, p: float) -> float:
    return float(np.dot(a.nu, np.abs(u) ** p)) ** (1.0 / p)


def dirichlet_energy(domain: DirichletDomain, p: float, u) -> float:
    """Sum of ``mu |du|^p`` over interior edges plus boundary terms ``w |u|^p``."""
    p = _check_p(p)
    return _energy(domain.arrays, _vector(domain, u), p)


def lp_norm(domain: DirichletDomain, p: float, u) -> float:
    """Weighted norm ``(sum nu |u|^p)^(1/p)``."""
    return _norm_p(domain.arrays, _vector(domain, u), _check_p(p))


def energy_gradient(domain: DirichletDomain, p: float, u) -> np.ndarray:
    """Gradient of the p-Dirichlet energy, as used by the solvers."""
    p = _check_p(p, strict=True)
    u = _vector(domain, u)
    return -p * _flux(domain.arrays, u, p, DIFF_CUTOFF)


def rayleigh_quotient(domain: DirichletDomain, p: float, u) -> float:
    p = _check_p(p)
    a = domain.arrays
    u = _vector(domain, u)
    denom = float(np.dot(a.nu, np.abs(u) ** p))
    if denom == 0.0:
        raise ZeroFunction("Rayleigh quotient of the zero function")
    return _energy(a, u, p) / denom


def eigen_residual(domain: DirichletDomain, p: float, u, lam: float) -> float:
    """Sup-norm defect ``max |Delta_p u + lam |u|^(p-2) u|``."""
    a = domain.arrays
    u = _vector(domain, u)
    return float(np.max(np.abs(_flux(a, u, p) / a.nu + lam * _phi(u, p))))


def involution(domain: DirichletDomain, parts: Bipartition, u) -> np.ndarray:
    """Negate ``u`` on the second part of a bipartition."""
    u = _vector(domain, u)
    if parts.part_one & parts.part_two or (parts.part_one | parts.part_two) != set(domain.interior):
        raise InvalidBipartition("parts must be disjoint and cover the domain")
    for i, j, _ in domain.edges:
        x, y = domain.interior[i], domain.interior[j]
        if (x in parts.part_one) == (y in parts.part_one):
            raise InvalidBipartition(f"edge {x}-{y} lies inside one part")
    return u * parts.sign_vector(domain)


# ---------------------------------------------------------------------------
# first eigenpair: Rayleigh minimization on the unit l^p sphere


def _warn_small_p(p: float) -> None:
    if p < 1.05:
        log.warning("p=%g is close to 1; |t|^(p-2) terms make the problem ill-conditioned", p)


def _residual_vec(a, u, p, lam):
    return _flux(a, u, p, DIFF_CUTOFF) / a.nu + lam * _phi(u, p)


class _Nonmonotone:
    """Reference value for a nonmonotone (max over a short history) line search."""

    def __init__(self, size: int = 8):
        self.history: list[float] = []
        self.size = size

    def push(self, value: float) -> float:
        self.history.append(value)
        del self.history[: -self.size]
        return max(self.history)


def _minimize_rayleigh(a, p: float, u: np.ndarray, cfg: SolverConfig, stall: int = 1000):
    """Projected gradient descent with BB steps and nonmonotone Armijo backtracking.

    Stops early once the residual has not halved for ``stall`` iterations.
    """
    u = u / _norm_p(a, u, p)
    lam = _energy(a, u, p)
    r = _residual_vec(a, u, p, lam)
    deg = np.bincount(a.ei, weights=a.w, minlength=a.n) + np.bincount(a.ej, weights=a.w, minlength=a.n)
    step = 1.0 / (p * float(np.max((deg + a.bw) / a.nu)))
    ref = _Nonmonotone()
    best_res, best_it = np.inf, 0
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        res = float(np.max(np.abs(r)))
        if res <= cfg.residual_tol:
            return u, lam, res, it
        if res < 0.5 * best_res:
            best_res, best_it = res, it
        elif it - best_it > stall:
            break
        target = ref.push(lam)
        slope = p * float(np.dot(a.nu, r * r))
        t = step
        while True:
            v = u + t * r
            v = v / _norm_p(a, v, p)
            lam_v = _energy(a, v, p)
            if lam_v <= target - 1e-4 * t * slope + 8 * np.finfo(float).eps * abs(target):
                break
            t *= cfg.step_shrink
            if t < 1e-300:
                break
        r_v = _residual_vec(a, v, p, lam_v)
        s = v - u
        y = p * (r - r_v)
        sy = float(np.dot(a.nu, s * y))
        step = float(np.dot(a.nu, s * s)) / sy if sy > 0 else 2.0 * t
        u, lam, r = v, lam_v, r_v
    return u, lam, float(np.max(np.abs(r))), it


def _defect(a, u, p, lam) -> np.ndarray:
    """``Delta_p u + lam phi_p(u)`` without any cutoff."""
    return _flux(a, u, p) / a.nu + lam * _phi(u, p)


def _jacobian(a, u: np.ndarray, p: float, lam: float, keep=None) -> np.ndarray:
    """Jacobian of ``(nu * defect, sum nu |u|^p - 1)`` with respect to ``(u, lam)``.

    Edges with ``keep`` False are left out (their difference is pinned at 0).
    """
    n = a.n
    tiny = np.finfo(float).tiny
    J = np.zeros((n + 1, n + 1))
    ei, ej, wt = (a.ei, a.ej, a.w) if keep is None else (a.ei[keep], a.ej[keep], a.w[keep])
    if wt.size:
        d = np.abs(u[ej] - u[ei])
        w = wt * (p - 1.0) * np.maximum(d, tiny) ** (p - 2.0)
        np.add.at(J, (ei, ei), -w)
        np.add.at(J, (ej, ej), -w)
        np.add.at(J, (ei, ej), w)
        np.add.at(J, (ej, ei), w)
    diag = (p - 1.0) * np.maximum(np.abs(u), tiny) ** (p - 2.0) * (lam * a.nu - a.bw)
    J[np.arange(n), np.arange(n)] += diag
    ph = _phi(u, p)
    J[:n, n] = a.nu * ph
    J[n, :n] = p * a.nu * ph
    return J


def _tie_labels(a, u: np.ndarray, tau: float) -> np.ndarray:
    """Cluster labels joining the endpoints of every edge with ``|du| <= tau``."""
    parent = list(range(a.n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in zip(a.ei, a.ej):
        if abs(u[i] - u[j]) <= tau:
            parent[find(int(i))] = find(int(j))
    roots = [find(i) for i in range(a.n)]
    _, labels = np.unique(roots, return_inverse=True)
    return labels


def _tie_candidates(a, u: np.ndarray, limit: int = 6) -> list[np.ndarray]:
    """Clusterings that merge the k smallest edge gaps, for k up to ``limit``."""
    if not a.w.size:
        return []
    scale = float(np.max(np.abs(u)))
    gaps = np.unique(np.abs(u[a.ej] - u[a.ei]))
    gaps = gaps[gaps <= TIE_GAP * scale][:limit]
    return [_tie_labels(a, u, g) for g in gaps]


def _newton_polish(a, p: float, u: np.ndarray, lam: float, tol: float, labels=None, max_steps=60):
    """Damped Gauss-Newton on the eigen-equation plus normalization.

    Resolves the stiff near-ties that slow gradient descent for p < 2. With
    ``labels``, vertices sharing a label are tied to one common value, which
    handles exact ties forced by symmetry.
    """
    if labels is None:
        labels = np.arange(a.n)
    m = int(labels.max()) + 1
    P = np.zeros((a.n, m))
    P[np.arange(a.n), labels] = 1.0
    keep = labels[a.ei] != labels[a.ej]
    c = np.bincount(labels, weights=a.nu * u, minlength=m) / np.bincount(labels, weights=a.nu, minlength=m)
    u = c[labels]
    res = float(np.max(np.abs(_defect(a, u, p, lam))))
    for _ in range(max_steps):
        if res <= tol:
            break
        g = np.concatenate([_defect(a, u, p, lam) * a.nu, [float(np.dot(a.nu, np.abs(u) ** p)) - 1.0]])
        with np.errstate(all="ignore"):
            J = _jacobian(a, u, p, lam, keep)
            if not np.all(np.isfinite(J)):
                break
            R = np.hstack([J[:, : a.n] @ P, J[:, a.n :]])
            step = np.linalg.lstsq(R, -g, rcond=None)[0]
        du = P @ step[:m]
        t = 1.0
        improved = False
        while t > 1e-12:
            un, ln = u + t * du, lam + t * step[m]
            rn = float(np.max(np.abs(_defect(a, un, p, ln))))
            if rn < res:
                improved = True
                break
            t *= 0.5
        if not improved:
            break
        u, lam, res = un, ln, rn
    return u, lam, res


class _MpDomain:
    """Exact weights of a domain converted once to mpmath numbers."""

    def __init__(self, domain: DirichletDomain):
        self.n = domain.size
        self.nu = [to_mpf(x) for x in domain.nu]
        self.bw = [to_mpf(x) for x in domain.boundary]
        self.edges = [(i, j, to_mpf(w)) for i, j, w in domain.edges]


def _mp_newton(md: _MpDomain, p: float, uu, lam, labels, tol: float, steps: int = 40, positive: bool = False):
    """Damped Newton on the eigen-equation at the current mpmath precision.

    ``uu`` is a list of mpf values; vertices sharing a label are held at one
    common value. With ``positive`` the line search never leaves the positive
    orthant. Returns ``(uu, lam, residual)`` as mpmath numbers.
    """
    n, nu, bw, edges = md.n, md.nu, md.bw, md.edges
    pm = mpmath.mpf(p)
    kept = [(i, j, w) for i, j, w in edges if labels[i] != labels[j]]
    m = int(max(labels)) + 1
    c = [mpmath.mpf(0)] * m
    tot = [mpmath.mpf(0)] * m
    for i in range(n):
        c[labels[i]] += nu[i] * uu[i]
        tot[labels[i]] += nu[i]
    c = [x / t for x, t in zip(c, tot)]

    def phi(t):
        return mpmath.sign(t) * abs(t) ** (pm - 1)

    def defect(cc, ll):
        vv = [cc[labels[i]] for i in range(n)]
        d = [-bw[i] * phi(vv[i]) for i in range(n)]
        for i, j, w in edges:
            f = w * phi(vv[j] - vv[i])
            d[i] += f
            d[j] -= f
        return [d[i] / nu[i] + ll * phi(vv[i]) for i in range(n)], vv

    dvec, uu = defect(c, lam)
    res = max(abs(x) for x in dvec)
    for _ in range(steps):
        if res <= tol * REFINE_MARGIN:
            break
        J = mpmath.zeros(n + 1, m + 1)
        for i, j, w in kept:
            g = w * (pm - 1) * abs(uu[j] - uu[i]) ** (pm - 2)
            li, lj = labels[i], labels[j]
            J[i, li] -= g
            J[i, lj] += g
            J[j, lj] -= g
            J[j, li] += g
        for i in range(n):
            J[i, labels[i]] += (pm - 1) * abs(uu[i]) ** (pm - 2) * (lam * nu[i] - bw[i])
            J[i, m] = nu[i] * phi(uu[i])
            J[n, labels[i]] += pm * nu[i] * phi(uu[i])
        rhs = mpmath.matrix([-nu[i] * dvec[i] for i in range(n)] + [1 - sum(nu[i] * abs(uu[i]) ** pm for i in range(n))])
        try:
            step = mpmath.qr_solve(J, rhs)[0] if m < n else mpmath.lu_solve(J, rhs)
        except (ZeroDivisionError, ValueError):  # numerically singular
            break
        t = mpmath.mpf(1)
        while t > mpmath.mpf(2) ** -40:
            cn = [c[k] + t * step[k] for k in range(m)]
            ln = lam + t * step[m]
            if positive and min(cn) <= 0:
                t /= 2
                continue
            dn, un = defect(cn, ln)
            rn = max(abs(x) for x in dn)
            if rn < res:
                break
            t /= 2
        else:
            break
        c, lam, dvec, uu, res = cn, ln, dn, un, rn
    return uu, lam, res


def _mp_refine(domain: DirichletDomain, p: float, u: np.ndarray, lam: float, labels, tol: float, steps: int = 40):
    """Refine a double-precision eigenpair in extended precision with exact rational weights.

    Used when double precision cannot resolve near-tied neighbours for p < 2
    (a gap of one ulp already carries flux ``ulp^(p-1)``). Returns
    ``(u, lam, residual)`` with the residual of the extended-precision vector.
    """
    with mpmath.workdps(REFINE_DPS):
        uu = [mpmath.mpf(float(x)) for x in u]
        uu, lam, res = _mp_newton(_MpDomain(domain), p, uu, mpmath.mpf(float(lam)), labels, tol, steps)
        return np.array([float(x) for x in uu]), float(lam), float(res)


def _digits_needed(uu) -> int:
    """Decimal digits that resolve the smallest neighbour gap and entry of ``uu``."""
    vals = sorted(set(uu))
    small = min([abs(v) for v in vals] + [b - a for a, b in zip(vals, vals[1:])])
    return 25 + max(0, int(-mpmath.log10(small))) if small > 0 else 10**6


def _continuation(domain: DirichletDomain, p: float, u0: np.ndarray, cfg: SolverConfig):
    """Track the first eigenpair from a larger exponent down to ``p`` in extended precision.

    Near p = 1 neighbour gaps of the eigenfunction shrink faster than
    exponentially, below what doubles can hold. Starting from a double
    solution at a larger exponent, each step warm-starts Newton from the
    previous extended-precision vector, so the gaps stay resolved. Returns
    ``(u, lam, residual)``.
    """
    tol = cfg.residual_tol
    a = domain.arrays
    top = p
    while True:
        top = min(2.0, top + 0.2)
        u, lam, _, _ = _minimize_rayleigh(a, top, u0, cfg)
        u, lam, res = _polish(domain, top, u, lam, tol, refine=False)
        if res <= tol or top >= 2.0:
            break
    if res > tol:
        return u, lam, res
    md = _MpDomain(domain)
    labels = np.arange(a.n)
    dps, cur, h = REFINE_DPS, top, (top - p) / 8
    with mpmath.workdps(dps):
        uu, mu = [mpmath.mpf(float(x)) for x in u], mpmath.mpf(float(lam))
    prev = None
    while cur > p:
        nxt = max(p, cur - h)
        with mpmath.workdps(dps):
            guess, gl = uu, mu
            if prev is not None:
                # entries decay geometrically in p, so extrapolate log u linearly
                s = mpmath.mpf(nxt - cur) / (cur - prev[0])
                guess = [x * (x / y) ** s for x, y in zip(uu, prev[1])]
                gl = mu + s * (mu - prev[2])
            vv, nl, r = _mp_newton(md, nxt, guess, gl, labels, tol, positive=True)
            ok = r <= tol and min(vv) > 0
            need = _digits_needed(vv) if ok else dps
        if ok and need <= dps:
            prev = (cur, uu, mu)
            uu, mu, cur, h = vv, nl, nxt, h * 1.5
        elif need > dps and need <= MAX_DPS:
            dps = need + 10  # retry the step with enough digits
        elif h > 1e-4:
            h /= 2
        else:
            log.debug("p=%g: continuation stalled at %g", p, cur)
            return np.array([float(x) for x in uu]), float(mu), float("inf")
    log.debug("p=%g: continuation finished at %d digits, residual %.3g", p, dps, float(r))
    return np.array([float(x) for x in uu]), float(mu), float(r)


def _polish(domain: DirichletDomain, p: float, u: np.ndarray, lam: float, tol: float, refine: bool = True):
    """Newton polishing, then extended-precision refinement, of an approximate first eigenpair.

    Only strictly positive candidates are accepted, so a nearby sign-changing
    eigenpair is never returned. Returns ``(u, lam, residual)``; the residual
    exceeds ``tol`` only if every attempt failed.
    """
    a = domain.arrays
    # |u| has no larger quotient, and the first eigenfunction is positive
    u = np.abs(u)
    u = u / _norm_p(a, u, p)
    lam = _energy(a, u, p)
    best = (float("inf"), u, lam)

    def consider(v):
        nonlocal best
        if np.sum(v) < 0:
            v = -v
        if not np.all(v > 0):
            return
        v = v / _norm_p(a, v, p)
        mu = _energy(a, v, p)
        r = float(np.max(np.abs(_defect(a, v, p, mu))))
        if r < best[0]:
            best = (r, v, mu)

    consider(u)
    seen = set()

    def attempt(labels):
        v, _, _ = _newton_polish(a, p, u, lam, tol * POLISH_MARGIN, labels)
        consider(v)
        return v

    # plain polish first (also for accepted vectors, to push the residual
    # well below tol), then with the smallest edge gaps merged into exact ties
    polished = attempt(None)
    if best[0] > tol and np.all(u > 0):
        # tiny entries: Newton in log-magnitude coordinates
        consider(_newton_signed(a, p, u, lam, tol)[0])
    candidates = [np.arange(a.n)]
    for src in (polished, u):
        for labels in _tie_candidates(a, src):
            if best[0] <= tol:
                break
            key = tuple(labels)
            if key not in seen:
                seen.add(key)
                candidates.append(labels)
                attempt(labels)
    if best[0] <= tol or not refine:
        return best[1], best[2], best[0]
    # double precision is exhausted; refine the best candidate at higher precision
    _, v, mu = best
    for labels in candidates:
        w, nl, r = _mp_refine(domain, p, v, mu, labels, tol)
        if r <= tol and np.all(w > 0):
            log.debug("p=%g: refined at %d digits to residual %.3g", p, REFINE_DPS, r)
            return w, nl, r
    return v, mu, best[0]


def _solve_first(domain: DirichletDomain, p: float, u0: np.ndarray, cfg: SolverConfig):
    """Gradient descent followed by polishing; returns ``(u, lam, residual, iterations)``."""
    u, lam, _, its = _minimize_rayleigh(domain.arrays, p, u0, cfg)
    u, lam, res = _polish(domain, p, u, lam, cfg.residual_tol)
    if res > cfg.residual_tol and p < 2.0:
        u, lam, res = _continuation(domain, p, u0, cfg)
    return u, lam, res, its


def _restart_seed(cfg: SolverConfig, k: int, p: float) -> np.random.Generator:
    return np.random.default_rng([cfg.rng_seed & 0xFFFFFFFFFFFFFFFF, k])


def _agreeing(vectors: list[np.ndarray], best: np.ndarray) -> int:
    return sum(1 for v in vectors if float(np.max(np.abs(v - best))) <= AGREEMENT_TOL)


def first_eigenpair(domain: DirichletDomain, p: float, cfg: SolverConfig | None = None) -> EigenPair:
    """Smallest eigenvalue and its positive eigenfunction (unit weighted l^p norm).

    A converged, strictly positive result is certified as the first
    eigenfunction by the sign characterization. When near-tied neighbours
    need extended precision (p close to 1), ``residual`` is that of the
    refined vector; re-evaluating the rounded ``u`` in doubles can show a
    larger defect.
    """
    cfg = cfg or SolverConfig()
    p = _check_p(p, strict=True)
    if not is_connected(domain):
        raise DisconnectedDomain("first eigenpair requires a connected domain")
    _warn_small_p(p)
    a = domain.arrays
    results = []
    worst = 0.0
    for k in range(cfg.restarts):
        rng = _restart_seed(cfg, k, p)
        u0 = np.ones(a.n) * (1.0 + 0.25 * rng.uniform(-1.0, 1.0, a.n))
        u, lam, res, its = _solve_first(domain, p, u0, cfg)
        if np.sum(u) < 0:
            u = -u
        worst = max(worst, res)
        if res <= cfg.residual_tol:
            results.append((lam, u, res, its))
    if not results:
        raise NoConvergence(f"first eigenpair did not converge (residual {worst:.3g})", worst)
    lam, u, res, its = min(results, key=lambda t: t[0])
    agreeing = _agreeing([t[1] for t in results], u)
    return EigenPair(
        p=p,
        lam=lam,
        u=u,
        residual=res,
        restarts_agreeing=agreeing,
        certified=bool(np.min(u) > 0),
        iterations=its,
        kind="first",
    )


# ---------------------------------------------------------------------------
# maximum eigenpair on bipartite domains: concave maximization of Q_p

G_FLOOR = 1e-14


def q_functional(domain: DirichletDomain, p: float, g) -> float:
    """``sum mu (g_i^(1/p) + g_j^(1/p))^p + sum w g_i`` over edges and boundary terms.

    Concave on the positive orthant; its maximum over ``sum nu g = 1`` is the
    maximum eigenvalue of a connected bipartite domain.
    """
    p = _check_p(p, strict=True)
    g = _vector(domain, g)
    if np.any(g < 0):
        raise ValueError("Q_p is defined on nonnegative vectors")
    return _q(domain.arrays, p, g)


def _q(a, p, g):
    h = g ** (1.0 / p)
    val = float(np.dot(a.bw, g))
    if a.w.size:
        val += float(np.dot(a.w, (h[a.ei] + h[a.ej]) ** p))
    return val


def _q_grad(a, p, g):
    h = g ** (1.0 / p)
    grad = a.bw.copy()
    if a.w.size:
        s = a.w * (h[a.ei] + h[a.ej]) ** (p - 1.0)
        grad += (np.bincount(a.ei, weights=s, minlength=a.n) + np.bincount(a.ej, weights=s, minlength=a.n)) * h ** (
            1.0 - p
        )
    return grad


def _power_step(a, p: float, h: np.ndarray) -> np.ndarray:
    """One nonlinear power step ``h_i^(p-1) <- (dE/dh_i) / (p nu_i)`` on the magnitudes.

    This is the fixed-point form of the eigen-equation on the alternating
    orthant; iterates stay strictly positive.
    """
    acc = a.bw * h ** (p - 1.0)
    if a.w.size:
        t = a.w * (h[a.ei] + h[a.ej]) ** (p - 1.0)
        acc = acc + np.bincount(a.ei, weights=t, minlength=a.n) + np.bincount(a.ej, weights=t, minlength=a.n)
    h = (acc / a.nu) ** (1.0 / (p - 1.0))
    return h / float(np.max(h))


def _power_ascent(a, p: float, u: np.ndarray, signs: np.ndarray, steps: int = 2000) -> np.ndarray:
    """Nonlinear power iteration until the quotient stops increasing."""
    h = np.maximum(np.abs(u) / float(np.max(np.abs(u))), np.finfo(float).tiny)
    last = -np.inf
    for _ in range(steps):
        h = _power_step(a, p, h)
        r = _energy(a, h * signs, p) / _norm_p(a, h, p) ** p
        if r <= last * (1.0 + 4.0 * np.finfo(float).eps):
            break
        last = r
    return signs * h


def _log_rayleigh_value(a, p: float, z: np.ndarray) -> float:
    h = np.exp(z - np.max(z))
    energy = float(np.dot(a.bw, h**p))
    if a.w.size:
        energy += float(np.dot(a.w, (h[a.ei] + h[a.ej]) ** p))
    return float(np.log(energy) - np.log(np.dot(a.nu, h**p)))


def _log_rayleigh(a, p: float, z: np.ndarray):
    """Value, gradient and Hessian of ``log R`` at ``u = signs * exp(z)`` on the alternating orthant.

    There ``E_p(u) = sum mu (h_i + h_j)^p + sum w h_i^p`` with ``h = exp(z)``.
    """
    h = np.exp(z - np.max(z))  # log R is shift invariant
    n = a.n
    e_grad = p * a.bw * h ** (p - 1.0)
    e_hess = np.diag(p * (p - 1.0) * a.bw * h ** (p - 2.0))
    energy = float(np.dot(a.bw, h**p))
    if a.w.size:
        S = h[a.ei] + h[a.ej]
        energy += float(np.dot(a.w, S**p))
        d1 = a.w * p * S ** (p - 1.0)
        d2 = a.w * p * (p - 1.0) * S ** (p - 2.0)
        e_grad += np.bincount(a.ei, weights=d1, minlength=n) + np.bincount(a.ej, weights=d1, minlength=n)
        np.add.at(e_hess, (a.ei, a.ei), d2)
        np.add.at(e_hess, (a.ej, a.ej), d2)
        np.add.at(e_hess, (a.ei, a.ej), d2)
        np.add.at(e_hess, (a.ej, a.ei), d2)
    # chain rule to z = log h
    gz_e = h * e_grad
    hz_e = h[:, None] * e_hess * h[None, :] + np.diag(gz_e)
    norm = float(np.dot(a.nu, h**p))
    gz_n = p * a.nu * h**p
    hz_n = np.diag(p * gz_n)
    val = np.log(energy) - np.log(norm)
    grad = gz_e / energy - gz_n / norm
    hess = hz_e / energy - np.outer(gz_e, gz_e) / energy**2 - hz_n / norm + np.outer(gz_n, gz_n) / norm**2
    return val, grad, hess


def _ascend_log(a, p: float, u: np.ndarray, signs: np.ndarray, tol: float, max_steps: int = 60):
    """Damped Newton ascent of ``log R`` in log-magnitude coordinates with the signs fixed.

    On the alternating orthant the quotient has a single local maximum (it is
    a concave-over-linear ratio in ``g = |u|^p``), so ascent cannot stall at a
    different eigenpair. Returns ``(u, lam, residual)``.
    """
    z = np.log(np.maximum(np.abs(u), np.finfo(float).tiny))
    ones = np.ones(a.n) / np.sqrt(a.n)
    res = np.inf
    f_prev = -np.inf
    for _ in range(max_steps):
        v = signs * np.exp(z - z.max())
        v = v / _norm_p(a, v, p)
        lam = _energy(a, v, p)
        res = float(np.max(np.abs(_defect(a, v, p, lam))))
        if res <= tol:
            return v, lam, res
        with np.errstate(all="ignore"):
            f0, grad, hess = _log_rayleigh(a, p, z)
        if not (np.isfinite(f0) and np.all(np.isfinite(hess))):
            break
        if f0 <= f_prev + 4.0 * np.finfo(float).eps * abs(f0):
            break  # the quotient is flat to rounding; the defect Newton takes over
        f_prev = f0
        # log R is invariant under z -> z + c; work orthogonally to that direction
        P = np.eye(a.n) - np.outer(ones, ones)
        A = -(P @ hess @ P) + np.outer(ones, ones)
        vals, vecs = np.linalg.eigh(0.5 * (A + A.T))
        floor = 1e-10 * max(1.0, float(np.max(np.abs(vals))))
        vals = np.maximum(np.abs(vals), floor)
        step = vecs @ ((vecs.T @ (P @ grad)) / vals)
        slope = float(grad @ step)
        t = 1.0
        while t > 1e-12:
            with np.errstate(all="ignore"):
                zn = z + t * step
                fn = _log_rayleigh_value(a, p, zn)
            if np.isfinite(fn) and fn >= f0 + 1e-4 * t * slope:
                break
            t *= 0.5
        else:
            break
        z = zn - zn.max()
    v = signs * np.exp(z - z.max())
    v = v / _norm_p(a, v, p)
    lam = _energy(a, v, p)
    return v, lam, float(np.max(np.abs(_defect(a, v, p, lam))))


def _newton_signed(a, p: float, u: np.ndarray, lam: float, tol: float, max_steps: int = 60):
    """Newton on the eigen-equation in log-magnitude coordinates (signs fixed).

    The quotient hardly depends on tiny entries, while the sup-norm defect
    does; this resolves the defect at such vertices. Returns ``(u, lam, residual)``.
    """
    res = float(np.max(np.abs(_defect(a, u, p, lam))))
    for _ in range(max_steps):
        if res <= tol:
            break
        g = np.concatenate([_defect(a, u, p, lam) * a.nu, [float(np.dot(a.nu, np.abs(u) ** p)) - 1.0]])
        with np.errstate(all="ignore"):
            J = _jacobian(a, u, p, lam)
            J[:, : a.n] *= u[None, :]
            if not np.all(np.isfinite(J)):
                break
            step = np.linalg.lstsq(J, -g, rcond=None)[0]
        t = 1.0
        while t > 1e-12:
            un = u * np.exp(np.clip(t * step[: a.n], -50.0, 50.0))
            ln = lam + t * step[a.n]
            rn = float(np.max(np.abs(_defect(a, un, p, ln))))
            if rn < res:
                break
            t *= 0.5
        else:
            break
        u, lam, res = un, ln, rn
    return u, lam, res


def _g_to_u(a, p, g, signs):
    u = signs * g ** (1.0 / p)
    return u / _norm_p(a, u, p)


def _maximize_q(a, p: float, g: np.ndarray, signs: np.ndarray, cfg: SolverConfig, stall: int = 1000):
    """Projected gradient ascent on the simplex ``{g > 0, sum nu g = 1}``.

    Stops early once the residual has not halved for ``stall`` iterations.
    """
    total_nu = float(np.sum(a.nu))

    def project(x):
        x = np.maximum(x, G_FLOOR)
        return x / float(np.dot(a.nu, x))

    def direction(x):
        grad = _q_grad(a, p, x)
        return grad / a.nu - float(np.sum(grad)) / total_nu

    g = project(g)
    q = _q(a, p, g)
    d = direction(g)
    step = 1.0 / (p * float(np.max(np.abs(_q_grad(a, p, g) / a.nu))) + 1.0)
    ref = _Nonmonotone()
    res = best_res = np.inf
    best_it = 0
    u = _g_to_u(a, p, g, signs)
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        u = _g_to_u(a, p, g, signs)
        lam = _energy(a, u, p)
        res = float(np.max(np.abs(_flux(a, u, p) / a.nu + lam * _phi(u, p))))
        if res <= cfg.residual_tol:
            return u, lam, res, it
        if res < 0.5 * best_res:
            best_res, best_it = res, it
        elif it - best_it > stall:
            break
        target = ref.push(-q)
        slope = float(np.dot(a.nu, d * d))
        t = step
        while True:
            g_new = project(g + t * d)
            q_new = _q(a, p, g_new)
            if -q_new <= target - 1e-4 * t * slope + 8 * np.finfo(float).eps * abs(target):
                break
            t *= cfg.step_shrink
            if t < 1e-300:
                break
        d_new = direction(g_new)
        s = g_new - g
        y = d - d_new
        sy = float(np.dot(a.nu, s * y))
        step = float(np.dot(a.nu, s * s)) / sy if sy > 0 else 2.0 * t
        g, q, d = g_new, q_new, d_new
    u = _g_to_u(a, p, g, signs)
    lam = _energy(a, u, p)
    return u, lam, res, it


def max_eigenpair_bipartite(
    domain: DirichletDomain, p: float, cfg: SolverConfig | None = None, parts: Bipartition | None = None
) -> EigenPair:
    """Largest eigenvalue of a connected bipartite domain and its alternating eigenfunction.

    The sign of the returned vector is fixed so that it is positive on
    ``parts.part_one`` (the part containing the first interior vertex by default).
    """
    cfg = cfg or SolverConfig()
    p = _check_p(p, strict=True)
    if not is_connected(domain):
        raise DisconnectedDomain("maximum eigenpair requires a connected domain")
    found = bipartition(domain)
    if found is None:
        raise NotBipartite("maximum eigenpair is only characterized on bipartite domains")
    parts = parts or found
    _warn_small_p(p)
    a = domain.arrays
    signs = parts.sign_vector(domain)
    results = []
    worst = 0.0
    for k in range(cfg.restarts):
        rng = _restart_seed(cfg, k, p)
        g0 = (1.0 + 0.25 * rng.uniform(-1.0, 1.0, a.n)) / float(np.sum(a.nu))
        u, lam, res, its = _maximize_q(a, p, g0, signs, cfg)
        if res > cfg.residual_tol:
            # the clipped ascent stalls when the maximizer has entries below the clip
            u, lam, res = _ascend_log(a, p, _power_ascent(a, p, u, signs), signs, cfg.residual_tol)
            if res > cfg.residual_tol:
                u, lam, res = _newton_signed(a, p, u, lam, cfg.residual_tol)
                u = u / _norm_p(a, u, p)
        worst = max(worst, res)
        if res <= cfg.residual_tol:
            results.append((lam, u, res, its))
    if not results:
        raise NoConvergence(f"maximum eigenpair did not converge (residual {worst:.3g})", worst)
    lam, u, res, its = max(results, key=lambda t: t[0])
    agreeing = _agreeing([t[1] for t in results], u)
    alternates = all(u[i] * u[j] < 0 for i, j, _ in domain.edges)
    return EigenPair(
        p=p,
        lam=lam,
        u=u,
        residual=res,
        restarts_agreeing=agreeing,
        certified=bool(alternates and np.all(u != 0)),
        iterations=its,
        kind="max",
    )


def monotonicity_profile(
    domain: DirichletDomain, ps, cfg: SolverConfig | None = None, sink: list | None = None
) -> list[tuple[float, float]]:
    """``(p, p * lambda_1p^(1/p))`` for each p; nondecreasing on normalized domains.

    Solver results are appended to ``sink`` when given.
    """
    if not domain.is_normalized():
        raise NotNormalized("monotonicity requires nu equal to the ambient weighted degree")
    ps = [float(p) for p in ps]
    if any(b < a for a, b in zip(ps, ps[1:])):
        raise ValueError("ps must be ascending")
    out = []
    cache: dict[float, float] = {}
    for p in ps:
        if p not in cache:
            pair = first_eigenpair(domain, p, cfg)
            if sink is not None:
                sink.append(pair)
            cache[p] = pair.lam
        out.append((p, p * cache[p] ** (1.0 / p)))
    return out
