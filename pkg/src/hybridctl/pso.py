"""Particle swarm optimizer with interchangeable random sources.

The velocity update follows the classic two-coefficient form with a
linearly decaying inertia weight.  The stochastic coefficients can be
drawn from a seeded uniform generator or from one of two chaotic maps
(logistic, Henon) iterated as a single global stream; draws are
consumed particle-major, dimension-minor, so a run is reproducible for
any source.  Fitness values come from a batch objective so that all
particles of one generation share the same evaluation seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HENON_A = 1.4
HENON_B = 0.3
# Observed output range of the Henon y sequence; draws are mapped
# affinely from it onto [0, 1].
HENON_Y_MIN = -0.3854
HENON_Y_MAX = 0.3819
LOGISTIC_X0 = 0.2027


class ChaoticRangeError(RuntimeError):
    """Chaotic map state left its admissible range."""


@dataclass
class LogisticState:
    x: float = LOGISTIC_X0


def logistic_next(state: LogisticState) -> float:
    if not (0.0 < state.x < 1.0):
        raise ChaoticRangeError(f"logistic state {state.x} left (0, 1)")
    state.x = 4.0 * state.x * (1.0 - state.x)
    return state.x


@dataclass
class HenonState:
    x: float = 0.0
    y: float = 0.0


def henon_next(state: HenonState) -> float:
    x_new = state.y + 1.0 - HENON_A * state.x * state.x
    y_new = HENON_B * state.x
    if not (np.isfinite(x_new) and np.isfinite(y_new)):
        raise ChaoticRangeError("henon state diverged")
    state.x = x_new
    state.y = y_new
    scaled = (y_new - HENON_Y_MIN) / (HENON_Y_MAX - HENON_Y_MIN)
    return min(1.0, max(0.0, scaled))


class UniformSource:
    def __init__(self, seed: int):
        self.rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence([int(seed), 0x9d5])))

    def draw(self) -> float:
        return float(self.rng.random())


class LogisticSource:
    def __init__(self, seed: int = 0):
        self.state = LogisticState()

    def draw(self) -> float:
        return logistic_next(self.state)


class HenonSource:
    def __init__(self, seed: int = 0):
        self.state = HenonState()

    def draw(self) -> float:
        return henon_next(self.state)


RNG_SOURCES = {"uniform": UniformSource, "logistic": LogisticSource,
               "henon": HenonSource}


def make_rng_source(name: str, seed: int):
    """Chaotic sources always start from their fixed published state;
    only the uniform source consumes the seed."""
    try:
        return RNG_SOURCES[name](seed)
    except KeyError:
        raise ValueError(f"unknown rng source {name!r}") from None


@dataclass
class SwarmConfig:
    n_particles: int = 30
    generations: int = 300
    inertia_start: float = 0.9
    inertia_end: float = 0.1
    beta1: float = 0.5
    beta2: float = 1.0
    velocity_frac: float = 0.2
    rng: str = "uniform"

    def __post_init__(self):
        if self.n_particles < 2:
            raise ValueError("need at least two particles")
        if self.generations < 1:
            raise ValueError("need at least one generation")
        if self.rng not in RNG_SOURCES:
            raise ValueError(f"unknown rng source {self.rng!r}")
        if not (0.0 < self.velocity_frac <= 1.0):
            raise ValueError("velocity_frac must lie in (0, 1]")

    def inertia(self, k: int) -> float:
        frac = k / self.generations
        return self.inertia_start + (self.inertia_end
                                     - self.inertia_start) * frac


@dataclass
class SwarmState:
    positions: np.ndarray
    velocities: np.ndarray
    pbest_pos: np.ndarray
    pbest_val: np.ndarray
    gbest_pos: np.ndarray
    gbest_val: float
    iteration: int = 0


@dataclass
class TuneResult:
    best_position: np.ndarray
    best_value: float
    trace: np.ndarray  # columns: generation, best value, mean finite value
    evaluations: int = 0


def _draw_matrix(source, n: int, d: int) -> np.ndarray:
    out = np.empty((n, d))
    for i in range(n):
        for j in range(d):
            out[i, j] = source.draw()
    return out


def init_swarm(bounds: np.ndarray, cfg: SwarmConfig, source) -> SwarmState:
    lo = bounds[:, 0]
    hi = bounds[:, 1]
    d = bounds.shape[0]
    pos = lo + _draw_matrix(source, cfg.n_particles, d) * (hi - lo)
    vel = np.zeros((cfg.n_particles, d))
    return SwarmState(positions=pos, velocities=vel, pbest_pos=pos.copy(),
                      pbest_val=np.full(cfg.n_particles, np.inf),
                      gbest_pos=pos[0].copy(), gbest_val=np.inf)


def evaluate_swarm(swarm: SwarmState, values: np.ndarray) -> None:
    """Fold freshly evaluated fitness into personal/global bests."""
    improved = values < swarm.pbest_val
    swarm.pbest_val = np.where(improved, values, swarm.pbest_val)
    swarm.pbest_pos[improved] = swarm.positions[improved]
    best = int(np.argmin(swarm.pbest_val))
    swarm.gbest_val = float(swarm.pbest_val[best])
    swarm.gbest_pos = swarm.pbest_pos[best].copy()


def pso_step(swarm: SwarmState, bounds: np.ndarray, cfg: SwarmConfig,
             source) -> None:
    """One velocity/position update pass (no fitness evaluation)."""
    lo = bounds[:, 0]
    hi = bounds[:, 1]
    v_max = cfg.velocity_frac * (hi - lo)
    alpha = cfg.inertia(swarm.iteration)
    n, d = swarm.positions.shape
    for i in range(n):
        for j in range(d):
            th1 = source.draw()
            th2 = source.draw()
            v = (alpha * swarm.velocities[i, j]
                 + cfg.beta1 * th1 * (swarm.pbest_pos[i, j]
                                      - swarm.positions[i, j])
                 + cfg.beta2 * th2 * (swarm.gbest_pos[j]
                                      - swarm.positions[i, j]))
            if v > v_max[j]:
                v = v_max[j]
            elif v < -v_max[j]:
                v = -v_max[j]
            x = swarm.positions[i, j] + v
            # Absorbing walls: a clamped particle loses its outward
            # velocity instead of staying pinned against the face.
            if x < lo[j]:
                x = lo[j]
                v = 0.0
            elif x > hi[j]:
                x = hi[j]
                v = 0.0
            swarm.velocities[i, j] = v
            swarm.positions[i, j] = x
    swarm.iteration += 1


def optimize(objective, bounds, cfg: SwarmConfig, seed: int) -> TuneResult:
    """Minimize a batch objective over box bounds.

    objective(positions, gen_seed) must return one value per row; the
    per-generation seed gives every particle of a generation the same
    evaluation noise.
    """
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim != 2 or bounds.shape[1] != 2:
        raise ValueError("bounds must be an (n, 2) array")
    if np.any(bounds[:, 0] >= bounds[:, 1]):
        raise ValueError("each bound row must satisfy lo < hi")

    source = make_rng_source(cfg.rng, seed)
    swarm = init_swarm(bounds, cfg, source)
    gen_seeds = np.random.SeedSequence(
        [int(seed), 0x5ee]).generate_state(cfg.generations, dtype=np.uint64)

    trace = np.empty((cfg.generations, 3))
    evaluations = 0
    for k in range(cfg.generations):
        values = np.asarray(objective(swarm.positions, int(gen_seeds[k])))
        evaluations += values.size
        evaluate_swarm(swarm, values)
        finite = values[np.isfinite(values)]
        trace[k, 0] = k
        trace[k, 1] = swarm.gbest_val
        trace[k, 2] = finite.mean() if finite.size else np.inf
        if k < cfg.generations - 1:
            pso_step(swarm, bounds, cfg, source)
    return TuneResult(best_position=swarm.gbest_pos.copy(),
                      best_value=float(swarm.gbest_val), trace=trace,
                      evaluations=evaluations)


def default_bounds(kind: str, gain_hi: float = 30.0,
                   order_lo: float = 0.05) -> np.ndarray:
    """Search box per controller structure (gains, then any orders)."""
    n_gains = {"pid": 3, "fpid": 4, "fofpid": 4}[kind]
    rows = [[0.0, gain_hi]] * n_gains
    if kind == "fofpid":
        rows += [[order_lo, 1.0], [order_lo, 1.0]]
    return np.array(rows, dtype=float)
