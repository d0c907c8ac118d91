"""Band-limited rational approximation of fractional differ-integrators.

A fractional power s**alpha is approximated over a frequency band
[w_lo, w_hi] by a recursive ladder of first-order zero/pole sections.
The ladder is returned in zero-pole-gain form and can be realized as a
cascade of biproper first-order state-space sections for time-domain
simulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ZpkFilter:
    """Zero-pole-gain description of a real rational filter.

    All zeros and poles are real and negative; gain is real positive.
    """

    zeros: np.ndarray
    poles: np.ndarray
    gain: float

    def evaluate(self, s: complex) -> complex:
        num = np.prod(s - self.zeros)
        den = np.prod(s - self.poles)
        return self.gain * num / den

    def dc_gain(self) -> float:
        return float(self.gain * np.prod(self.zeros / self.poles))


def oustaloup_zpk(alpha: float, w_lo: float = 1e-2, w_hi: float = 1e2,
                  n_pairs: int = 2) -> ZpkFilter:
    """Recursive zero/pole ladder approximating s**alpha on [w_lo, w_hi].

    alpha in [-1, 1]; the ladder has 2*n_pairs + 1 sections.  Corner
    frequencies are log-spaced across the band with the alpha-dependent
    stagger that makes the magnitude slope average 20*alpha dB/decade
    and the mid-band phase sit near alpha*90 degrees.
    """
    if not (-1.0 <= alpha <= 1.0):
        raise ValueError(f"fractional order {alpha} outside [-1, 1]")
    if not (0.0 < w_lo < w_hi):
        raise ValueError(f"invalid approximation band [{w_lo}, {w_hi}]")
    if n_pairs < 1:
        raise ValueError(f"section pair count {n_pairs} must be >= 1")

    n_sec = 2 * n_pairs + 1
    ratio = w_hi / w_lo
    k = np.arange(-n_pairs, n_pairs + 1, dtype=float)
    zeros = -w_lo * ratio ** ((k + n_pairs + 0.5 * (1.0 - alpha)) / n_sec)
    poles = -w_lo * ratio ** ((k + n_pairs + 0.5 * (1.0 + alpha)) / n_sec)
    return ZpkFilter(zeros=zeros, poles=poles, gain=w_hi ** alpha)


@dataclass
class LinearStateSpace:
    """SISO state-space system xdot = A x + b u, y = c x + d u.

    Carries its own state vector so controller blocks can own live
    filter instances; the closed-loop integrator works on copies of
    the state laid out in a joint vector.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float
    state: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.state is None:
            self.state = np.zeros(self.a.shape[0])

    @property
    def order(self) -> int:
        return self.a.shape[0]

    def reset(self) -> None:
        self.state[:] = 0.0

    def derivative(self, x: np.ndarray, u: float) -> np.ndarray:
        return self.a @ x + self.b * u

    def output(self, x: np.ndarray, u: float) -> float:
        return float(self.c @ x + self.d * u)

    def dc_gain(self) -> float:
        return float(self.d - self.c @ np.linalg.solve(self.a, self.b))


def zpk_to_state_space(f: ZpkFilter) -> LinearStateSpace:
    """Realize a zpk ladder as a cascade of first-order biproper sections.

    Section i implements (s - z_i)/(s - p_i) as xdot = p_i x + u,
    y = (p_i - z_i) x + u; the overall gain is applied once at the
    input.  Chaining gives a lower-triangular A, which keeps the
    realization well conditioned for the stiff corner spreads used
    here.
    """
    z = np.asarray(f.zeros, dtype=float)
    p = np.asarray(f.poles, dtype=float)
    if z.shape != p.shape:
        raise ValueError("zero/pole count mismatch")
    n = z.shape[0]
    cvec = p - z
    a = np.zeros((n, n))
    b = np.full(n, f.gain)
    for i in range(n):
        a[i, i] = p[i]
        a[i, :i] = cvec[:i]
    return LinearStateSpace(a=a, b=b, c=cvec.copy(), d=float(f.gain))


def freq_response(ss: LinearStateSpace, w: float) -> complex:
    """Transfer function value c (jwI - A)^-1 b + d at angular frequency w."""
    n = ss.order
    m = 1j * w * np.eye(n) - ss.a
    return complex(ss.c @ np.linalg.solve(m, ss.b) + ss.d)
