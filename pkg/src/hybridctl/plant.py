"""Hybrid power system plant: component lags, power balance, frequency.

Generation side: wind turbine (WTG) and solar thermal (STPG, a two-lag
cascade) feed the grid through a split factor kn; the remaining
(1 - kn) share drives the aqua electrolyzer (AE) whose hydrogen feeds
two fuel cell stacks (FC1, FC2).  A diesel generator (DEG) and three
storage devices (flywheel FESS, battery BESS, ultracapacitor UC) track
the frequency controller output u.  Storage lag gains are negative
(they are load-type elements); their outputs enter the power balance
with a minus sign, so a positive u injects net power.  The frequency
deviation integrates the net power mismatch through 1/(D + M s).

Every lag optionally saturates its state derivative, which models a
slew limit placed before the integrator of the transfer block.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

COMPONENTS = ("wtg", "stpg", "ae", "fc1", "fc2", "deg", "fess", "bess", "uc")

# Joint plant state layout (11 states).
STATE_NAMES = ("wtg", "stpg_a", "stpg_b", "ae", "fc1", "fc2",
               "deg", "fess", "bess", "uc", "df")


@dataclass
class FirstOrderLag:
    """K/(T s + 1) with an optional symmetric limit on the state slope."""

    gain: float
    time_constant: float
    rate_limit: float | None = None
    state: float = 0.0

    def derivative(self, u: float) -> float:
        dx = (self.gain * u - self.state) / self.time_constant
        r = self.rate_limit
        if r is not None:
            if dx > r:
                dx = r
            elif dx < -r:
                dx = -r
        return dx

    def reset(self) -> None:
        self.state = 0.0


def lag_derivative(block: FirstOrderLag, u: float) -> float:
    return block.derivative(u)


@dataclass
class PlantConfig:
    """Component gains/time constants plus grid constants.

    Defaults are the nominal hybrid system ratings.  `connected` flags
    remove a component entirely (zero power, frozen state);
    `rate_limits` holds per-component slew bounds (absent = unlimited).
    `storage_balance_sign` is -1 when the storage branch outputs are
    subtracted in the balance (the convention that makes the steady
    control effort positive); +1 sums them literally.
    """

    k_wtg: float = 1.0
    t_wtg: float = 1.5
    k_solar: float = 1.8
    t_solar: float = 1.8
    k_turbine: float = 1.0
    t_turbine: float = 0.3
    k_ae: float = 0.002
    t_ae: float = 0.5
    k_fc: float = 0.01
    t_fc: float = 4.0
    k_deg: float = 0.003
    t_deg: float = 2.0
    k_fess: float = -0.01
    t_fess: float = 0.1
    k_bess: float = -0.003
    t_bess: float = 0.1
    k_uc: float = -0.7
    t_uc: float = 0.9
    kn: float = 0.6
    inertia: float = 0.4
    damping: float = 0.03
    storage_balance_sign: float = -1.0
    connected: dict[str, bool] = field(
        default_factory=lambda: {name: True for name in COMPONENTS})
    rate_limits: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name in self.connected:
            if name not in COMPONENTS:
                raise ValueError(f"unknown component {name!r}")
        for name in self.rate_limits:
            if name not in COMPONENTS:
                raise ValueError(f"unknown component {name!r}")
        for tc in (self.t_wtg, self.t_solar, self.t_turbine, self.t_ae,
                   self.t_fc, self.t_deg, self.t_fess, self.t_bess, self.t_uc):
            if tc <= 0:
                raise ValueError("time constants must be positive")
        if self.inertia <= 0 or self.damping <= 0:
            raise ValueError("inertia and damping must be positive")

    def disconnect(self, *names: str) -> "PlantConfig":
        conn = dict(self.connected)
        for name in names:
            if name not in COMPONENTS:
                raise ValueError(f"unknown component {name!r}")
            conn[name] = False
        return replace(self, connected=conn)

    def with_rate_limits(self, limits: dict[str, float]) -> "PlantConfig":
        merged = dict(self.rate_limits)
        merged.update(limits)
        return replace(self, rate_limits=merged)

    def scale_uc(self, factor: float) -> "PlantConfig":
        """Joint gain/time-constant scaling of the ultracapacitor."""
        return replace(self, k_uc=self.k_uc * factor, t_uc=self.t_uc * factor)

    def packed(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(params, connectivity mask, per-state rate limits) for the kernel."""
        params = np.array([
            self.k_wtg, self.t_wtg,
            self.k_solar, self.t_solar,
            self.k_turbine, self.t_turbine,
            self.k_ae, self.t_ae,
            self.k_fc, self.t_fc,
            self.k_deg, self.t_deg,
            self.k_fess, self.t_fess,
            self.k_bess, self.t_bess,
            self.k_uc, self.t_uc,
            self.kn, self.inertia, self.damping,
            self.storage_balance_sign,
        ])
        conn = np.array([1.0 if self.connected.get(name, True) else 0.0
                         for name in COMPONENTS])
        limits = np.full(11, np.inf)
        state_of = {"wtg": (0,), "stpg": (1, 2), "ae": (3,), "fc1": (4,),
                    "fc2": (5,), "deg": (6,), "fess": (7,), "bess": (8,),
                    "uc": (9,)}
        for name, limit in self.rate_limits.items():
            for idx in state_of[name]:
                limits[idx] = limit
        return params, conn, limits


@njit(cache=True)
def _clamp(v, r):
    if v > r:
        return r
    if v < -r:
        return -r
    return v


@njit(cache=True)
def _plant_deriv_core(x, u, p_wind, p_solar, p_load, pp, conn, limits, dx):
    """Fill dx[0:11]; returns the net power mismatch feeding d(df)/dt."""
    kn = pp[18]
    inertia = pp[19]
    damping = pp[20]
    s_sign = pp[21]

    if conn[0] > 0.0:
        dx[0] = _clamp((pp[0] * p_wind - x[0]) / pp[1], limits[0])
    else:
        dx[0] = 0.0
    if conn[1] > 0.0:
        dx[1] = _clamp((pp[2] * p_solar - x[1]) / pp[3], limits[1])
        dx[2] = _clamp((pp[4] * x[1] - x[2]) / pp[5], limits[2])
    else:
        dx[1] = 0.0
        dx[2] = 0.0

    p_wtg = x[0] * conn[0]
    p_stpg = x[2] * conn[1]
    renewable = p_wtg + p_stpg

    if conn[2] > 0.0:
        ae_in = (1.0 - kn) * renewable
        dx[3] = _clamp((pp[6] * ae_in - x[3]) / pp[7], limits[3])
    else:
        dx[3] = 0.0
    p_ae = x[3] * conn[2]

    if conn[3] > 0.0:
        dx[4] = _clamp((pp[8] * p_ae - x[4]) / pp[9], limits[4])
    else:
        dx[4] = 0.0
    if conn[4] > 0.0:
        dx[5] = _clamp((pp[8] * p_ae - x[5]) / pp[9], limits[5])
    else:
        dx[5] = 0.0

    if conn[5] > 0.0:
        dx[6] = _clamp((pp[10] * u - x[6]) / pp[11], limits[6])
    else:
        dx[6] = 0.0
    if conn[6] > 0.0:
        dx[7] = _clamp((pp[12] * u - x[7]) / pp[13], limits[7])
    else:
        dx[7] = 0.0
    if conn[7] > 0.0:
        dx[8] = _clamp((pp[14] * u - x[8]) / pp[15], limits[8])
    else:
        dx[8] = 0.0
    if conn[8] > 0.0:
        dx[9] = _clamp((pp[16] * u - x[9]) / pp[17], limits[9])
    else:
        dx[9] = 0.0

    mismatch = (kn * renewable
                + x[4] * conn[3] + x[5] * conn[4] + x[6] * conn[5]
                + s_sign * (x[7] * conn[6] + x[8] * conn[7] + x[9] * conn[8])
                - p_load)
    dx[10] = (mismatch - damping * x[10]) / inertia
    return mismatch


def plant_derivatives(cfg: PlantConfig, state: np.ndarray, u: float,
                      p_wind: float, p_solar: float,
                      p_load: float) -> np.ndarray:
    """Time derivative of the 11 plant states."""
    state = np.asarray(state, dtype=float)
    if state.shape != (11,):
        raise ValueError("plant state must have 11 entries")
    pp, conn, limits = cfg.packed()
    dx = np.zeros(11)
    _plant_deriv_core(state, float(u), float(p_wind), float(p_solar),
                      float(p_load), pp, conn, limits, dx)
    return dx


def ae_input(cfg: PlantConfig, state: np.ndarray) -> float:
    """Renewable power share routed to the aqua electrolyzer."""
    p_wtg = state[0] if cfg.connected.get("wtg", True) else 0.0
    p_stpg = state[2] if cfg.connected.get("stpg", True) else 0.0
    return (1.0 - cfg.kn) * (p_wtg + p_stpg)


def power_balance(cfg: PlantConfig, state: np.ndarray, p_load: float) -> float:
    """Net power mismatch seen by the grid frequency integrator."""
    pp, conn, limits = cfg.packed()
    dx = np.zeros(11)
    return float(_plant_deriv_core(np.asarray(state, dtype=float), 0.0, 0.0,
                                   0.0, float(p_load), pp, conn, limits, dx))


def grid_frequency_derivative(cfg: PlantConfig, df: float,
                              mismatch: float) -> float:
    return (mismatch - cfg.damping * df) / cfg.inertia
