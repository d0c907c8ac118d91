"""Stochastic wind/solar/load profiles with switched mean levels.

Each profile is xi(t) * gamma(t) [+ additive steps], where gamma is a
Heaviside switching schedule of the mean level and xi modulates it
with band-shaped noise:

    xi = delta * (1 + eta * hp(phi) / sqrt(beta))

phi is a uniform [-1, 1] sample drawn once per integration step and
held; hp is the complement (1 - G(s)) of a low-pass G realized in
state space, so the noise floor vanishes at DC and the spectral shape
follows the component physics.  G is one lag for wind/solar and a
difference of two lags for the load.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Schedule = tuple[tuple[float, float], ...]


def switching_signal(schedule: Schedule, t: float) -> float:
    """Sum of step increments active at time t, with H(0) = 1."""
    total = 0.0
    for t_k, coeff in schedule:
        if t >= t_k:
            total += coeff
    return total


@dataclass(frozen=True)
class ProfileSpec:
    """Noise shaping and switching description of one resource.

    The shaping low-pass is G(s) = g1/(tau1 s + 1) + g2/(tau2 s + 1),
    realized with two unit-DC lag states.
    """

    name: str
    eta: float
    beta: float
    delta: float
    g1: float
    tau1: float
    g2: float
    tau2: float
    gamma: Schedule
    additive: Schedule = ()

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.tau1 <= 0 or self.tau2 <= 0:
            raise ValueError("shaping time constants must be positive")
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")

    def packed(self) -> np.ndarray:
        return np.array([self.eta, np.sqrt(self.beta), self.delta,
                         self.g1, self.tau1, self.g2, self.tau2])

    def mean_value(self, t: float) -> float:
        """Noise-free profile value (eta = 0 reduction)."""
        return (self.delta * switching_signal(self.gamma, t)
                + switching_signal(self.additive, t))

    def value(self, filter_state: np.ndarray, phi: float, t: float) -> float:
        g_out = self.g1 * filter_state[0] + self.g2 * filter_state[1]
        high = phi - g_out
        xi = self.delta * (1.0 + self.eta * high / np.sqrt(self.beta))
        return (xi * switching_signal(self.gamma, t)
                + switching_signal(self.additive, t))

    def filter_derivative(self, filter_state: np.ndarray,
                          phi: float) -> np.ndarray:
        return np.array([(phi - filter_state[0]) / self.tau1,
                         (phi - filter_state[1]) / self.tau2])


def make_wind() -> ProfileSpec:
    return ProfileSpec(name="wind", eta=0.8, beta=10.0, delta=1.0,
                       g1=1.0, tau1=1e4, g2=0.0, tau2=1.0,
                       gamma=((0.0, 0.5), (40.0, -0.1)))


def make_solar() -> ProfileSpec:
    return ProfileSpec(name="solar", eta=0.7, beta=2.0, delta=0.1,
                       g1=1.0, tau1=1e4, g2=0.0, tau2=1.0,
                       gamma=((0.0, 1.1111), (40.0, -0.5555)))


def make_load() -> ProfileSpec:
    return ProfileSpec(name="load", eta=0.8, beta=100.0, delta=1.0,
                       g1=300.0, tau1=300.0, g2=-1.0, tau2=1800.0,
                       gamma=((0.0, 1.0),),
                       additive=((80.0, 0.8),))


PROFILE_FACTORIES = {"wind": make_wind, "solar": make_solar, "load": make_load}


@dataclass
class NoiseStream:
    """Seeded uniform [-1, 1] source; one sample drawn and held per step."""

    rng: np.random.Generator
    held: float = 0.0

    @classmethod
    def from_seed(cls, *entropy: int) -> "NoiseStream":
        seq = np.random.SeedSequence(list(entropy))
        return cls(rng=np.random.Generator(np.random.PCG64(seq)))

    def step(self) -> float:
        self.held = float(self.rng.uniform(-1.0, 1.0))
        return self.held

    def draw_block(self, n: int) -> np.ndarray:
        return self.rng.uniform(-1.0, 1.0, size=n)


class ProfileSampler:
    """Owns one profile's noise stream and shaping-filter state.

    step(t, dt) must be called on the integration grid in time order;
    it draws the held sample for [t, t + dt), returns the profile value
    at t, and advances the filter state across the step with the same
    third-order rule used by the closed-loop integrator.
    """

    def __init__(self, spec: ProfileSpec, stream: NoiseStream):
        self.spec = spec
        self.stream = stream
        self.filter_state = np.zeros(2)
        self._last_t = -np.inf

    def step(self, t: float, dt: float) -> float:
        if t < self._last_t:
            raise ValueError(f"profile sampled out of order: {t} after "
                             f"{self._last_t}")
        if dt <= 0:
            raise ValueError("dt must be positive")
        self._last_t = t
        phi = self.stream.step()
        value = self.spec.value(self.filter_state, phi, t)
        x = self.filter_state
        k1 = self.spec.filter_derivative(x, phi)
        k2 = self.spec.filter_derivative(x + 0.5 * dt * k1, phi)
        k3 = self.spec.filter_derivative(x + 0.75 * dt * k2, phi)
        self.filter_state = x + dt * (2.0 * k1 + 3.0 * k2 + 4.0 * k3) / 9.0
        return value


def profile_step(sampler: ProfileSampler, t: float, dt: float) -> float:
    return sampler.step(t, dt)


def generate_series(spec: ProfileSpec, seed_entropy: tuple[int, ...],
                    t_max: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Profile trajectory on the grid 0, dt, ..., t_max (value held at t)."""
    sampler = ProfileSampler(spec, NoiseStream.from_seed(*seed_entropy))
    n = int(round(t_max / dt))
    t = np.arange(n + 1) * dt
    values = np.empty(n + 1)
    for i in range(n):
        values[i] = sampler.step(t[i], dt)
    values[n] = spec.value(sampler.filter_state, sampler.stream.held, t[n])
    return t, values
