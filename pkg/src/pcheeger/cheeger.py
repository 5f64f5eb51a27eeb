"""Exact Dirichlet Cheeger constants by subset enumeration, and related checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InputError, NotNormalized, TooLarge, ZeroFunction
from .exact import format_fraction
from .graph import DirichletDomain

DEFAULT_CAP = 24
# enumerate at most 2**_BLOCK_BITS masks per numpy block
_BLOCK_BITS = 20
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class CheegerResult:
    """Exact Cheeger constant with every minimizing cut (as interior vertex ids)."""

    h: Fraction
    cuts: tuple[tuple[str, ...], ...]
    subsets_examined: int

    def as_dict(self) -> dict:
        return {
            "h": str(format_fraction(self.h)),
            "cuts": [list(c) for c in self.cuts],
            "subsetsExamined": self.subsets_examined,
        }


def _common_scale(values) -> int:
    scale = 1
    for v in values:
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
    return scale


def _units(domain: DirichletDomain, cells: Sequence[Sequence[int]]):
    """Integer data per unit (cell): volume, self boundary term, pairwise crossing weight."""
    nu, bw = domain.nu, domain.boundary
    scale = _common_scale(list(nu) + list(bw) + [w for _, _, w in domain.edges])
    owner = {}
    for c, cell in enumerate(cells):
        for i in cell:
            owner[i] = c
    m = len(cells)
    vol = [0] * m
    selfb = [0] * m
    cross = [[0] * m for _ in range(m)]
    for i in range(domain.size):
        vol[owner[i]] += int(nu[i] * scale)
        selfb[owner[i]] += int(bw[i] * scale)
    for i, j, w in domain.edges:
        w = int(w * scale)
        a, b = owner[i], owner[j]
        if a != b:
            selfb[a] += w
            selfb[b] += w
            cross[a][b] += w
            cross[b][a] += w
    return vol, selfb, cross, scale


def _subset_sums(vals: Sequence[int], dtype) -> np.ndarray:
    out = np.zeros(1, dtype=dtype)
    for v in vals:
        out = np.concatenate([out, out + v])
    return out


def _enumerate_numpy(vol, selfb, cross):
    """Vectorized exact minimization; returns (num, den, masks) of all minimizers."""
    m = len(vol)
    low = min(m, _BLOCK_BITS)
    lv = np.zeros(1, dtype=np.int64)
    lb = np.zeros(1, dtype=np.int64)
    for x in range(low):
        s = _subset_sums(cross[x][:x], np.int64)
        lv = np.concatenate([lv, lv + vol[x]])
        lb = np.concatenate([lb, lb + selfb[x] - 2 * s])
    high = m - low
    best = None  # (num, den)
    found: list[int] = []
    for hmask in range(1 << high):
        hs = [low + k for k in range(high) if hmask >> k & 1]
        hv = sum(vol[x] for x in hs)
        hb = sum(selfb[x] for x in hs) - 2 * sum(cross[x][y] for x in hs for y in hs if x < y)
        link = [sum(cross[x][y] for x in hs) for y in range(low)]
        bv = lv + hv
        bb = lb + hb - 2 * _subset_sums(link, np.int64)
        if hmask == 0:
            bv, bb = bv[1:], bb[1:]
            offset = 1
        else:
            offset = 0
        if bb.size == 0:
            continue
        # float argmin proposes a candidate; integer cross-multiplication decides
        k = int(np.argmin(bb / bv))
        cand = (int(bb[k]), int(bv[k]))
        if best is None or cand[0] * best[1] < best[0] * cand[1]:
            best, found = cand, []
        diff = bb * best[1] - bv * best[0]
        while (lo := int(diff.min())) < 0:
            k = int(np.argmin(diff))
            best, found = (int(bb[k]), int(bv[k])), []
            diff = bb * best[1] - bv * best[0]
        if lo == 0:
            base = hmask << low
            found.extend(base | (int(i) + offset) for i in np.flatnonzero(diff == 0))
    return best[0], best[1], found


def _enumerate_gray(vol, selfb, cross):
    """Gray-code walk with O(deg) incremental updates in Python integers."""
    m = len(vol)
    inside = [False] * m
    link = [0] * m  # crossing weight from unit y into the current set
    cur_v = cur_b = 0
    best = None
    found: list[int] = []
    mask = 0
    for step in range(1, 1 << m):
        x = (step & -step).bit_length() - 1
        if inside[x]:
            inside[x] = False
            cur_v -= vol[x]
            cur_b -= selfb[x] - 2 * link[x]
            sign = -1
        else:
            inside[x] = True
            cur_v += vol[x]
            cur_b += selfb[x] - 2 * link[x]
            sign = 1
        for y in range(m):
            if cross[x][y]:
                link[y] += sign * cross[x][y]
        mask ^= 1 << x
        if best is None or cur_b * best[1] < best[0] * cur_v:
            best, found = (cur_b, cur_v), [mask]
        elif cur_b * best[1] == best[0] * cur_v:
            found.append(mask)
    return best[0], best[1], found


def cheeger_exact(
    domain: DirichletDomain, cap: int = DEFAULT_CAP, cells: Sequence[Sequence[int]] | None = None
) -> CheegerResult:
    """Minimize ``|dU| / |U|`` over all nonempty ``U`` in the domain.

    With ``cells``, only unions of the given cells are examined (orbit
    restriction). Boundaries are taken in the collapsed domain.
    """
    if cells is None:
        cells = [[i] for i in range(domain.size)]
    else:
        cells = [sorted(int(i) for i in c) for c in cells]
        flat = sorted(i for c in cells for i in c)
        if flat != list(range(domain.size)) or any(not c for c in cells):
            raise InputError("cells must partition the domain")
    m = len(cells)
    if m > cap:
        raise TooLarge(f"{m} units exceed the enumeration cap {cap}")
    vol, selfb, cross, scale = _units(domain, cells)
    if sum(vol) * sum(selfb) < _INT64_SAFE:
        num, den, masks = _enumerate_numpy(vol, selfb, cross)
    else:
        num, den, masks = _enumerate_gray(vol, selfb, cross)
    cuts = []
    for mask in masks:
        idx = sorted(i for c in range(m) if mask >> c & 1 for i in cells[c])
        cuts.append(tuple(idx))
    cuts.sort()
    return CheegerResult(
        h=Fraction(num, den),
        cuts=tuple(tuple(domain.interior[i] for i in c) for c in cuts),
        subsets_examined=(1 << m) - 1,
    )


def lambda_1_1(domain: DirichletDomain, cap: int = DEFAULT_CAP) -> Fraction:
    """First eigenvalue of the Dirichlet 1-Laplacian, which equals the Cheeger constant."""
    return cheeger_exact(domain, cap).h


@dataclass(frozen=True)
class CoareaReport:
    energy: object  # E_1(|f|)
    coarea_integral: object  # integral of |d{|f| > t}| dt
    l1_norm: object  # ||f||_1
    area_integral: object  # integral of |{|f| > t}| dt
    energy_of_f: object  # E_1(f)

    @property
    def coarea_holds(self) -> bool:
        return _close(self.energy, self.coarea_integral)

    @property
    def area_holds(self) -> bool:
        return _close(self.l1_norm, self.area_integral)

    @property
    def abs_decreases_energy(self) -> bool:
        return self.energy <= self.energy_of_f or _close(self.energy, self.energy_of_f)

    @property
    def ok(self) -> bool:
        return self.coarea_holds and self.area_holds and self.abs_decreases_energy


def _close(a, b, rel: float = 1e-12) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= rel * max(abs(float(a)), abs(float(b)), 1e-300)


def coarea_verify(domain: DirichletDomain, f: Sequence) -> CoareaReport:
    """Check the co-area and area formulas for ``|f|`` by exact level sorting.

    Exact (Fraction/int) input gives exact arithmetic throughout.
    """
    if len(f) != domain.size:
        raise InputError(f"expected {domain.size} values")
    exact = all(isinstance(x, (int, Fraction)) for x in f)
    if exact:
        f = [Fraction(x) for x in f]
        nu = list(domain.nu)
        bw = list(domain.boundary)
        edges = list(domain.edges)
        zero = Fraction(0)
    else:
        f = [float(x) for x in f]
        nu = [float(x) for x in domain.nu]
        bw = [float(x) for x in domain.boundary]
        edges = [(i, j, float(w)) for i, j, w in domain.edges]
        zero = 0.0
    if all(x == 0 for x in f):
        raise ZeroFunction("co-area check needs a nonzero function")
    u = [abs(x) for x in f]

    def e1(vals):
        total = sum((b * abs(v) for b, v in zip(bw, vals)), zero)
        return total + sum((w * abs(vals[i] - vals[j]) for i, j, w in edges), zero)

    levels = sorted(set(u) | {zero})
    coarea = area = zero
    for lo, hi in zip(levels, levels[1:]):
        upper = [i for i, v in enumerate(u) if v >= hi]
        coarea += (hi - lo) * domain_boundary(bw, edges, upper, zero)
        area += (hi - lo) * sum((nu[i] for i in upper), zero)
    return CoareaReport(
        energy=e1(u),
        coarea_integral=coarea,
        l1_norm=sum((n * v for n, v in zip(nu, u)), zero),
        area_integral=area,
        energy_of_f=e1(f),
    )


def domain_boundary(bw, edges, subset, zero):
    s = set(subset)
    total = sum((bw[i] for i in s), zero)
    return total + sum((w for i, j, w in edges if (i in s) != (j in s)), zero)


def cheeger_bracket(h, p: float) -> tuple[float, float]:
    """Normalized-Laplacian bracket ``(2^(p-1) (h/p)^p, h)`` for lambda_{1,p}."""
    h = float(h)
    return 2.0 ** (p - 1.0) * (h / p) ** p, h


@dataclass(frozen=True)
class BoundsRow:
    p: float
    lower: float
    lam: float
    h: float
    upper_ok: bool
    lower_ok: bool


def cheeger_bounds_report(domain: DirichletDomain, ps, cfg=None, tol: float = 1e-9) -> list[BoundsRow]:
    """Compare lambda_{1,p} against the Cheeger bracket for each p.

    The upper bound ``lambda <= h`` always holds (indicator of a cut); the lower
    bound is reported as a diagnostic only.
    """
    from .spectral import first_eigenpair

    if not domain.is_normalized():
        raise NotNormalized("Cheeger bracket is stated for nu equal to the weighted degree")
    h = cheeger_exact(domain).h
    rows = []
    for p in ps:
        lam = first_eigenpair(domain, p, cfg).lam
        lower, upper = cheeger_bracket(h, p)
        rows.append(BoundsRow(float(p), lower, lam, upper, lam <= upper + tol, lower <= lam + tol))
    return rows
