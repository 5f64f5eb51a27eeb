"""Reproduction checks for the worked examples and the stated properties.

Each check returns a :class:`CheckResult`. Solver outputs seen along the way
are collected so the sign/uniqueness check can audit every run.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import fixtures
from .cheeger import cheeger_exact, coarea_verify, lambda_1_1
from .graph import bipartition, build_domain
from .linear import (
    ANTITREE,
    Branching,
    LinearGraph,
    ModelSpec,
    PHYSICAL,
    annulus_minimum,
    ball_minimum,
    linear_domain,
    model_row,
    rapidly_branching_check,
    reference_matches,
    sphere_domain,
)
from .spectral import SolverConfig, first_eigenpair, max_eigenpair_bipartite, monotonicity_profile
from .symmetry import VertexPartition, enumerate_automorphisms, orbits, verify_quotient_invariance

EIGEN_PS = (1.5, 2.0, 4.0)
MONO_PS = (1.2, 1.5, 2.0, 3.0, 4.0)


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    parts: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "key": self.key,
            "title": self.title,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
            "parts": self.parts,
        }


@dataclass
class Recorder:
    """Solver runs seen so far: ``(domain, pair)`` tuples."""

    runs: list = field(default_factory=list)

    def first(self, domain, p, cfg):
        pair = first_eigenpair(domain, p, cfg)
        self.runs.append((domain, pair))
        return pair

    def maximum(self, domain, p, cfg):
        pair = max_eigenpair_bipartite(domain, p, cfg)
        self.runs.append((domain, pair))
        return pair


def _unit4(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.sum(np.abs(v) ** 4) ** 0.25


# ---------------------------------------------------------------- 1. path example


def check_example41(cfg: SolverConfig, rec: Recorder) -> CheckResult:
    t0 = time.perf_counter()
    dom = fixtures.example41_domain()
    first = rec.first(dom, 4.0, cfg)
    top = rec.maximum(dom, 4.0, cfg)
    secs = time.perf_counter() - t0
    # both the printed and the computed vectors are put on the unweighted unit l^4 sphere
    u1 = _unit4(first.u)
    um = _unit4(top.u)
    err1 = float(np.max(np.abs(u1 - _unit4(fixtures.EXAMPLE41_U1))))
    errm = float(np.max(np.abs(um - _unit4(fixtures.EXAMPLE41_UMAX))))
    parts = {
        "first_matches": err1 <= 1e-5,
        "max_matches": errm <= 1e-5,
        "runtime_ok": secs < 1.0,
    }
    detail = (
        f"u1={np.round(u1, 6).tolist()} (err {err1:.2e}); umax={np.round(um, 6).tolist()} (err {errm:.2e}); "
        f"{secs:.2f}s"
    )
    return CheckResult("example41", "path example eigenvectors at p=4", all(parts.values()), detail, secs, parts)


# ---------------------------------------------------------------- 2. non-unique cuts


def _cut_check(dom) -> tuple[bool, str]:
    res = cheeger_exact(dom)
    cuts = {frozenset(c) for c in res.cuts}
    want = {frozenset({"v1", "v2", "v3"}), frozenset({"v1", "v2"})}
    ok = res.h == Fraction(1, 3) and want <= cuts
    return ok, f"h={res.h} cuts={[list(c) for c in res.cuts]}"


def check_example51(cfg: SolverConfig, rec: Recorder) -> CheckResult:
    t0 = time.perf_counter()
    literal_ok, literal = _cut_check(fixtures.example51_domain())
    embedded_ok, embedded = _cut_check(fixtures.example51_embedded_domain())
    secs = time.perf_counter() - t0
    parts = {"literal": literal_ok, "embedded_supplement": embedded_ok, "runtime_ok": secs < 1.0}
    detail = f"Omega=V: {literal}; with outside edges at v4,v5: {embedded}"
    passed = literal_ok and secs < 1.0
    return CheckResult("example51", "non-unique Cheeger cuts h=1/3", passed, detail, secs, parts)


# ---------------------------------------------------------------- 3. anti-tree table


def check_antitree_table(cfg: SolverConfig, rec: Recorder, horizon: int = 200) -> CheckResult:
    t0 = time.perf_counter()
    parts = {}
    bad = []
    for a in (1, 2, 3):
        row = model_row(ANTITREE, horizon, order=a)
        for key, ok in reference_matches(a, row).items():
            parts[f"a={a}:{key}"] = ok
            if not ok:
                bad.append(f"a={a} {key}: computed {row.values.get(key)} ({row.statuses.get(key)})")
    secs = time.perf_counter() - t0
    parts["runtime_ok"] = secs < 5.0
    detail = "all entries match" if not bad else "mismatches: " + "; ".join(bad)
    return CheckResult("antitree", "anti-tree Cheeger table", all(parts.values()), f"{detail}; {secs:.2f}s", secs, parts)


# ---------------------------------------------------------------- 4. rapidly branching trees


def check_branching(cfg: SolverConfig, rec: Recorder) -> CheckResult:
    t0 = time.perf_counter()
    grow = rapidly_branching_check(Branching.parse("1,2,3,..."), 40)
    const = rapidly_branching_check(Branching.constant(3), 40)
    parts = {
        "m_i=i+1": grow.pipeline.converged and abs(grow.pipeline.value - 1.0) <= 1e-3,
        "m_i=i+1_closed": grow.closed_form.converged and abs(grow.closed_form.value - 1.0) <= 1e-3,
        "m=3": const.pipeline.converged and abs(const.pipeline.value - 0.5) <= 1e-9,
        "m=3_closed": const.closed_form.converged and abs(const.closed_form.value - 0.5) <= 1e-9,
    }
    detail = (
        f"m_i=i+1: {grow.pipeline.value} (closed {grow.closed_form.value}, last term {float(grow.closed_last):.6f}); "
        f"m=3: {const.pipeline.value}"
    )
    return CheckResult("branching", "normalized tree h_inf", all(parts.values()), detail, time.perf_counter() - t0, parts)


# ---------------------------------------------------------------- 5. 1-Laplacian and co-area


def brute_force_h(dom) -> Fraction:
    """Independent oracle: plain loop over all nonempty subsets."""
    best = None
    for k in range(1, dom.size + 1):
        for sub in itertools.combinations(range(dom.size), k):
            v = dom.boundary_of(sub) / dom.volume_of(sub)
            if best is None or v < best:
                best = v
    return best


def check_one_laplacian(cfg: SolverConfig, rec: Recorder, count: int = 50, seed: int = 7) -> CheckResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    h_ok = coarea_ok = 0
    for _ in range(count):
        dom = fixtures.random_domain(rng, rng.randint(1, 10))
        if lambda_1_1(dom) == brute_force_h(dom):
            h_ok += 1
        good = 0
        for _ in range(10):
            f = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(dom.size)]
            if not any(f):
                f[0] = Fraction(1)
            if coarea_verify(dom, f).ok:
                good += 1
        coarea_ok += good == 10
    secs = time.perf_counter() - t0
    parts = {"h_exact": h_ok == count, "coarea": coarea_ok == count, "runtime_ok": secs < 30}
    detail = f"h matches {h_ok}/{count}; co-area passes {coarea_ok}/{count}; {secs:.2f}s"
    return CheckResult("one_laplacian", "lambda_{1,1} = h and co-area", all(parts.values()), detail, secs, parts)


# ---------------------------------------------------------------- 6. quotient invariance


def _quotient_cases():
    dom = fixtures.example41_domain()
    yield "path example", dom, orbits(enumerate_automorphisms(dom), dom)
    star = fixtures.star_domain()
    yield "star", star, VertexPartition.of([["c"], ["l1", "l2", "l3", "l4"]])
    for a, R in ((1, 1), (1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (3, 1)):
        sdom, cells = sphere_domain(ModelSpec(ANTITREE, PHYSICAL, order=a), R)
        yield f"anti-tree a={a} R={R}", sdom, VertexPartition.of(cells)


def check_quotients(cfg: SolverConfig, rec: Recorder) -> CheckResult:
    t0 = time.perf_counter()
    parts = {}
    notes = []
    for name, dom, part in _quotient_cases():
        pairs: list = []
        report = verify_quotient_invariance(dom, part, EIGEN_PS, cfg, sink=pairs)
        rec.runs.extend((dom, pair) for pair in pairs)
        gap = report.lam_agreement()
        ok = report.origin == "group" and gap <= 1e-7 and report.h_equal and report.cell_union_cut is not None
        parts[name] = ok
        notes.append(f"{name}: dlam={gap:.1e} h={report.h_original}/{report.h_quotient} {report.origin}")
    secs = time.perf_counter() - t0
    parts["runtime_ok"] = secs < 10
    return CheckResult("quotient", "quotient invariance of lambda and h", all(parts.values()), "; ".join(notes) + f"; {secs:.2f}s", secs, parts)


# ---------------------------------------------------------------- 7. monotonicity


def check_monotonicity(cfg: SolverConfig, rec: Recorder, count: int = 20, seed: int = 11) -> CheckResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    good = 0
    worst = 0.0
    for _ in range(count):
        dom = fixtures.random_normalized_domain(rng, rng.randint(4, 9), rng.randint(1, 6))
        pairs: list = []
        prof = monotonicity_profile(dom, MONO_PS, cfg, sink=pairs)
        rec.runs.extend((dom, pair) for pair in pairs)
        drops = [a[1] - b[1] for a, b in zip(prof, prof[1:])]
        worst = max(worst, max(drops))
        good += all(d <= 1e-6 for d in drops)
    detail = f"{good}/{count} profiles nondecreasing (largest drop {worst:.2e})"
    return CheckResult("monotonicity", "p * lambda_{1,p}^(1/p) nondecreasing", good == count, detail, time.perf_counter() - t0)


# ---------------------------------------------------------------- 8. p = 2 oracle


def dense_laplacian(dom) -> np.ndarray:
    """Matrix of the quadratic form ``E_2`` in interior coordinates."""
    a = dom.arrays
    L = np.diag(a.bw.copy())
    for i, j, w in zip(a.ei, a.ej, a.w):
        L[i, i] += w
        L[j, j] += w
        L[i, j] -= w
        L[j, i] -= w
    return L


def dense_spectrum(dom) -> tuple[np.ndarray, np.ndarray]:
    """Generalized eigenpairs of ``L u = lam N u`` via a symmetric eigensolve."""
    s = 1.0 / np.sqrt(dom.arrays.nu)
    vals, vecs = np.linalg.eigh(s[:, None] * dense_laplacian(dom) * s[None, :])
    return vals, s[:, None] * vecs


def check_oracle(cfg: SolverConfig, rec: Recorder, count: int = 30, seed: int = 13) -> CheckResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    worst_lam = worst_vec = 0.0
    domains = 0
    maxed = 0
    for k in range(count):
        g = fixtures.random_graph(rng, rng.randint(3, 11), bipartite=k % 2 == 0)
        for _ in range(2):
            dom = build_domain(g, fixtures.random_connected_omega(rng, g, rng.randint(1, 8)))
            vals, vecs = dense_spectrum(dom)
            first = rec.first(dom, 2.0, cfg)
            v = vecs[:, 0] * np.sign(vecs[:, 0].sum())
            worst_lam = max(worst_lam, abs(first.lam - vals[0]))
            worst_vec = max(worst_vec, float(np.max(np.abs(first.u - v))))
            if bipartition(dom) is not None:
                top = rec.maximum(dom, 2.0, cfg)
                w = vecs[:, -1] * np.sign(vecs[0, -1])
                worst_lam = max(worst_lam, abs(top.lam - vals[-1]))
                worst_vec = max(worst_vec, float(np.max(np.abs(top.u * np.sign(top.u[0]) - w))))
                maxed += 1
            domains += 1
    parts = {"eigenvalues": worst_lam <= 1e-8, "eigenvectors": worst_vec <= 1e-6}
    detail = f"{domains} domains ({maxed} bipartite); max |dlam|={worst_lam:.1e}, max |du|={worst_vec:.1e}"
    return CheckResult("oracle", "p=2 agreement with dense eigensolve", all(parts.values()), detail, time.perf_counter() - t0, parts)


# ---------------------------------------------------------------- 9. certificates


def audit_runs(rec: Recorder, cfg: SolverConfig) -> tuple[int, list[str]]:
    bad = []
    for dom, pair in rec.runs:
        if pair.kind == "first":
            if not np.min(pair.u) > 0:
                bad.append(f"first eigenfunction not positive on {dom.interior[:3]}")
        else:
            if not all(pair.u[i] * pair.u[j] < 0 for i, j, _ in dom.edges):
                bad.append(f"max eigenfunction does not alternate on {dom.interior[:3]}")
        if pair.restarts_agreeing != cfg.restarts:
            bad.append(f"{pair.restarts_agreeing}/{cfg.restarts} restarts agree ({pair.kind}, p={pair.p})")
    return len(rec.runs), bad


def check_certificates(cfg: SolverConfig, rec: Recorder) -> CheckResult:
    t0 = time.perf_counter()
    if not rec.runs:
        for fn in (check_example41, check_quotients, check_monotonicity, check_oracle):
            fn(cfg, rec)
    total, bad = audit_runs(rec, cfg)
    detail = f"{total} solver runs audited" + (f"; failures: {bad[:5]}" if bad else "")
    return CheckResult("certificates", "sign and uniqueness certificates", not bad and total > 0, detail, time.perf_counter() - t0)


# ---------------------------------------------------------------- 10. balls and annuli suffice


def random_linear(rng: random.Random, horizon: int) -> LinearGraph:
    nu = [Fraction(rng.randint(1, 20), rng.randint(1, 4)) for _ in range(horizon + 1)]
    mu = [Fraction(rng.randint(1, 20), rng.randint(1, 4)) for _ in range(horizon + 1)]
    return LinearGraph.from_sequences(nu, mu)


def check_linear_reduction(cfg: SolverConfig, rec: Recorder, count: int = 10, seed: int = 17) -> CheckResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    ok_root = ok_rootless = 0
    for _ in range(count):
        L = random_linear(rng, 18)
        root = L.truncate(17)
        if cheeger_exact(linear_domain(root, True)).h == ball_minimum(root)[0]:
            ok_root += 1
        if cheeger_exact(linear_domain(L, False)).h == annulus_minimum(L)[0]:
            ok_rootless += 1
    parts = {"root": ok_root == count, "rootless": ok_rootless == count}
    detail = f"balls {ok_root}/{count}, annuli {ok_rootless}/{count} (18-vertex truncations)"
    return CheckResult("linear_reduction", "ball/annulus reduction on linear graphs", all(parts.values()), detail, time.perf_counter() - t0, parts)


CHECKS: dict[str, tuple[str, Callable]] = {
    "example41": ("1", check_example41),
    "example51": ("2", check_example51),
    "antitree": ("3", check_antitree_table),
    "branching": ("4", check_branching),
    "one_laplacian": ("5", check_one_laplacian),
    "quotient": ("6", check_quotients),
    "monotonicity": ("7", check_monotonicity),
    "oracle": ("8", check_oracle),
    "certificates": ("9", check_certificates),
    "linear_reduction": ("10", check_linear_reduction),
}


def resolve(names) -> list[str]:
    """Accept check keys or criterion numbers; unknown names raise KeyError."""
    if not names:
        return list(CHECKS)
    by_number = {num: key for key, (num, _) in CHECKS.items()}
    out = []
    for n in names:
        key = by_number.get(str(n), n)
        if key not in CHECKS:
            raise KeyError(n)
        out.append(key)
    return out


def run_checks(names=None, cfg: SolverConfig | None = None) -> list[CheckResult]:
    cfg = cfg or SolverConfig()
    rec = Recorder()
    return [CHECKS[key][1](cfg, rec) for key in resolve(names)]
