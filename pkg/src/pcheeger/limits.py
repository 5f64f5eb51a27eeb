"""Tail-limit estimation for slowly converging sequences.

Sequences arrive as exact values (Fraction or Surd); they are evaluated at
60 decimal digits and accelerated with the Levin u-transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath

from .exact import to_mpf

CONVERGED = "Converged"
DIVERGES = "DivergesToInfinity"
INCONCLUSIVE = "Inconclusive"

WORK_DPS = 60
LEVIN_ORDER = 30
AGREE_TOL = 1e-9
GROWTH_EXPONENT = 0.25
DIVERGENCE_THRESHOLD = 1e6
DEFAULT_WINDOW = 50


@dataclass(frozen=True)
class LimitEstimate:
    """Estimated limit of a tail; ``value`` is present whenever ``status`` is Converged."""

    value: float | None
    status: str
    window: tuple[int, int]
    tail_values: tuple[float, ...]
    method: str = ""

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def diverges(self) -> bool:
        return self.status == DIVERGES

    def as_number(self) -> float | None:
        """Value with divergence mapped to ``inf``."""
        if self.status == DIVERGES:
            return math.inf
        return self.value if self.status == CONVERGED else None

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "status": self.status,
            "window": list(self.window),
            "tailValues": list(self.tail_values),
            "method": self.method,
        }


def levin_u(s: Sequence, n: int, k: int):
    """Levin u-transform of order ``k`` using ``s[n-1 .. n+k]``.

    Returns ``None`` when a remainder estimate vanishes.
    """
    num = mpmath.mpf(0)
    den = mpmath.mpf(0)
    for j in range(k + 1):
        m = n + j
        om = (m + 1) * (s[m] - s[m - 1])
        if om == 0:
            return None
        c = (-1) ** j * mpmath.binomial(k, j) * (mpmath.mpf(m + 1) / (n + k + 1)) ** (k - 1)
        num += c * s[m] / om
        den += c / om
    if den == 0:
        return None
    return num / den


def _levin_estimates(vals, kmax: int = LEVIN_ORDER):
    """Estimates from three windows ending at or near the last term."""
    size = len(vals)
    k = min(kmax, (size - 6) // 2)
    if k < 4:
        return []
    out = []
    for end in (size - 1, size - 3, size - 5):
        n = end - k
        if n < 1:
            continue
        est = levin_u(vals, n, k)
        if est is not None:
            out.append(est)
    return out


def _growth_exponent(vals, idx) -> float:
    """Log-log slope of the last quarter; assumes positive values."""
    a, b = vals[len(vals) * 3 // 4], vals[-1]
    ra, rb = idx[len(vals) * 3 // 4], idx[-1]
    if a <= 0 or b <= 0 or ra <= 0 or rb <= ra:
        return 0.0
    return float(mpmath.log(b / a) / mpmath.log(mpmath.mpf(rb) / ra))


def estimate_limit(seq: Sequence, first_index: int = 0, window: int = DEFAULT_WINDOW) -> LimitEstimate:
    """Classify the tail of ``seq`` (exact values indexed from ``first_index``).

    Order of tests: exactly constant tail, monotone polynomial growth,
    agreement of Levin estimates across windows. Anything else is Inconclusive.
    """
    if len(seq) < 8:
        raise ValueError("need at least 8 terms")
    idx = list(range(first_index, first_index + len(seq)))
    with mpmath.workdps(WORK_DPS):
        vals = [to_mpf(v) for v in seq]
        w = min(window, max(4, len(vals) // 4))
        tail = vals[-w:]
        win = (idx[-w], idx[-1])
        shown = tuple(float(v) for v in vals[-5:])
        scale = max(abs(v) for v in tail)
        if max(tail) - min(tail) <= mpmath.mpf(10) ** (-WORK_DPS + 10) * max(scale, 1):
            return LimitEstimate(float(tail[-1]), CONVERGED, win, shown, "constant")
        increasing = all(b > a for a, b in zip(tail, tail[1:]))
        if increasing and (tail[-1] > DIVERGENCE_THRESHOLD or _growth_exponent(vals, idx) >= GROWTH_EXPONENT):
            return LimitEstimate(None, DIVERGES, win, shown, "growth")
        ests = _levin_estimates(vals)
        if len(ests) >= 2:
            ref = ests[0]
            tol = AGREE_TOL * max(1.0, abs(float(ref)))
            # the raw tail must approach the estimate (rules out antilimits of oscillations)
            approaching = abs(tail[-1] - ref) <= tol or abs(tail[-1] - ref) < abs(tail[0] - ref)
            if approaching and all(abs(float(e - ref)) <= tol for e in ests):
                value = float(ref)
                if value < 0 and value > -tol:
                    value = 0.0  # limits of nonnegative ratios
                if value >= 0:
                    return LimitEstimate(value, CONVERGED, win, shown, "levin")
    return LimitEstimate(None, INCONCLUSIVE, win, shown, "")
