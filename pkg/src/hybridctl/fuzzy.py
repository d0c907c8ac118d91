"""Two-input Mamdani fuzzy inference on normalized universes.

Both inputs (error and error derivative) and the output live on
[-1, 1], partitioned by seven triangular sets with half overlap:
NL NM NS ZR PS PM PL.  Inference uses min firing, clipping
implication, max aggregation and center-of-gravity defuzzification.
The COG is evaluated in closed form by integrating the piecewise
linear upper envelope of the clipped sets between its breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

LABELS = ("NL", "NM", "NS", "ZR", "PS", "PM", "PL")

# Output label per (derivative row, error column), both indexed NL..PL.
# Constant along anti-diagonals; saturates at the extreme labels.
_RULES = (
    ("NL", "NL", "NL", "NL", "NM", "NS", "ZR"),
    ("NL", "NL", "NL", "NM", "NS", "ZR", "PS"),
    ("NL", "NL", "NM", "NS", "ZR", "PS", "PM"),
    ("NL", "NM", "NS", "ZR", "PS", "PM", "PL"),
    ("NM", "NS", "ZR", "PS", "PM", "PL", "PL"),
    ("NS", "ZR", "PS", "PM", "PL", "PL", "PL"),
    ("ZR", "PS", "PM", "PL", "PL", "PL", "PL"),
)


def default_centers() -> np.ndarray:
    return np.array([-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0])


def default_rule_table() -> np.ndarray:
    idx = {name: i for i, name in enumerate(LABELS)}
    return np.array([[idx[name] for name in row] for row in _RULES], dtype=np.int64)


@dataclass
class MembershipFamily:
    """Triangular partition of [-1, 1] with peaks at `centers`.

    Each set peaks at its center and falls to zero at the neighboring
    centers; the outer sets saturate beyond the universe edge, so on
    [-1, 1] every set reduces to a (possibly one-sided) triangle.
    """

    centers: np.ndarray = field(default_factory=default_centers)

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float)
        if c.ndim != 1 or c.size < 3:
            raise ValueError("need at least three membership centers")
        if np.any(np.diff(c) <= 0):
            raise ValueError("membership centers must be strictly increasing")
        if not np.allclose(c + c[::-1], 0.0, atol=1e-12):
            raise ValueError("membership centers must be symmetric about 0")
        self.centers = c

    @property
    def n_sets(self) -> int:
        return self.centers.size


@dataclass
class RuleBase:
    table: np.ndarray = field(default_factory=default_rule_table)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        n = t.shape[0]
        if t.shape != (n, n):
            raise ValueError("rule table must be square")
        if t.min() < 0 or t.max() >= n:
            raise ValueError("rule table entries out of label range")
        self.table = t


@njit(cache=True)
def _fuzzify_core(x, centers, degrees):
    """Fill membership degrees of x; returns index of first active set."""
    n = centers.shape[0]
    degrees[:] = 0.0
    if x <= centers[0]:
        degrees[0] = 1.0
        return 0
    if x >= centers[n - 1]:
        degrees[n - 1] = 1.0
        return n - 1
    i = 0
    while centers[i + 1] < x:
        i += 1
    lo = (centers[i + 1] - x) / (centers[i + 1] - centers[i])
    degrees[i] = lo
    degrees[i + 1] = 1.0 - lo
    return i


@njit(cache=True)
def _membership(x, k, centers):
    """Triangular membership of set k at x, within the universe."""
    n = centers.shape[0]
    c = centers[k]
    if x < c:
        if k == 0:
            return 1.0
        left = centers[k - 1]
        if x <= left:
            return 0.0
        return (x - left) / (c - left)
    if k == n - 1:
        return 1.0
    right = centers[k + 1]
    if x >= right:
        return 0.0
    return (right - x) / (right - c)


@njit(cache=True)
def _flc_core(e_n, de_n, centers, table):
    """Crisp Mamdani output for normalized inputs (clamped to [-1, 1])."""
    n = centers.shape[0]
    if e_n < -1.0:
        e_n = -1.0
    elif e_n > 1.0:
        e_n = 1.0
    if de_n < -1.0:
        de_n = -1.0
    elif de_n > 1.0:
        de_n = 1.0

    deg_e = np.zeros(n)
    deg_de = np.zeros(n)
    _fuzzify_core(e_n, centers, deg_e)
    _fuzzify_core(de_n, centers, deg_de)

    # Clip heights per output label, aggregated by max across rules.
    heights = np.zeros(n)
    for i in range(n):
        wi = deg_de[i]
        if wi == 0.0:
            continue
        for j in range(n):
            wj = deg_e[j]
            if wj == 0.0:
                continue
            w = wi if wi < wj else wj
            k = table[i, j]
            if w > heights[k]:
                heights[k] = w

    # Breakpoints of the aggregated upper envelope: set corners, clip
    # entry/exit points, and every spot where two adjacent clipped sets
    # can cross.  Between consecutive breakpoints the envelope is linear.
    pts = np.empty(12 * n + 2)
    m = 0
    pts[m] = centers[0]
    m += 1
    pts[m] = centers[n - 1]
    m += 1
    for k in range(n):
        h = heights[k]
        if h == 0.0:
            continue
        pts[m] = centers[k]
        m += 1
        if k > 0:
            d = centers[k] - centers[k - 1]
            pts[m] = centers[k - 1]
            m += 1
            pts[m] = centers[k] - (1.0 - h) * d  # rising edge hits clip
            m += 1
        if k < n - 1:
            d = centers[k + 1] - centers[k]
            pts[m] = centers[k + 1]
            m += 1
            pts[m] = centers[k] + (1.0 - h) * d  # falling edge hits clip
            m += 1
    for k in range(n - 1):
        hk = heights[k]
        hk1 = heights[k + 1]
        if hk == 0.0 or hk1 == 0.0:
            continue
        lo = centers[k]
        hi = centers[k + 1]
        d = hi - lo
        pts[m] = 0.5 * (lo + hi)  # raw edges cross at half height
        m += 1
        pts[m] = lo + hk * d      # rising edge of k+1 reaches clip of k
        m += 1
        pts[m] = hi - hk1 * d     # falling edge of k reaches clip of k+1
        m += 1

    lo_u = centers[0]
    hi_u = centers[n - 1]
    for i in range(m):
        if pts[i] < lo_u:
            pts[i] = lo_u
        elif pts[i] > hi_u:
            pts[i] = hi_u
    pts[:m].sort()

    area = 0.0
    moment = 0.0
    x1 = pts[0]
    m1 = 0.0
    for k in range(n):
        if heights[k] > 0.0:
            v = _membership(x1, k, centers)
            if v > heights[k]:
                v = heights[k]
            if v > m1:
                m1 = v
    for i in range(1, m):
        x2 = pts[i]
        if x2 == x1:
            continue
        m2 = 0.0
        for k in range(n):
            if heights[k] > 0.0:
                v = _membership(x2, k, centers)
                if v > heights[k]:
                    v = heights[k]
                if v > m2:
                    m2 = v
        dx = x2 - x1
        area += 0.5 * (m1 + m2) * dx
        moment += dx * (x1 * (2.0 * m1 + m2) + x2 * (m1 + 2.0 * m2)) / 6.0
        x1 = x2
        m1 = m2

    assert area > 1e-12, "aggregated fuzzy set has no area"
    return moment / area


class FuzzyInference:
    """Bound membership family + rule base, exposing fuzzify and flc."""

    def __init__(self, family: MembershipFamily | None = None,
                 rules: RuleBase | None = None):
        self.family = family if family is not None else MembershipFamily()
        self.rules = rules if rules is not None else RuleBase()
        if self.rules.table.shape[0] != self.family.n_sets:
            raise ValueError("rule table size does not match membership count")

    def fuzzify(self, x: float) -> np.ndarray:
        degrees = np.zeros(self.family.n_sets)
        _fuzzify_core(float(x), self.family.centers, degrees)
        return degrees

    def flc(self, e_n: float, de_n: float) -> float:
        return _flc_core(float(e_n), float(de_n),
                         self.family.centers, self.rules.table)


_DEFAULT = None


def _default_engine() -> FuzzyInference:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = FuzzyInference()
    return _DEFAULT


def fuzzify(x: float, family: MembershipFamily | None = None) -> np.ndarray:
    if family is None:
        return _default_engine().fuzzify(x)
    degrees = np.zeros(family.n_sets)
    _fuzzify_core(float(x), family.centers, degrees)
    return degrees


def flc(e_n: float, de_n: float) -> float:
    return _default_engine().flc(e_n, de_n)
