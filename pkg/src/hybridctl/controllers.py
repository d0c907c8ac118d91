"""Frequency controller structures sharing one evaluation interface.

Three structures act on the frequency error e:

* pid      u = Kp e + Ki int(e) + Kd e' with a filtered derivative
* fpid     fuzzy PID: v = flc(Ke e, Kd e'), u = K_PD v + K_PI int(v)
* fofpid   fuzzy fractional PID: the derivative on e and the integral
           on v are fractional orders mu and lam, realized by
           band-limited rational approximations

Every block is stateless at the Python level: its live states ride in
the closed-loop joint vector, and evaluate(x, e) returns both the
output and the state derivative so staged integrators see consistent
values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from numba import njit

from .fracorder import oustaloup_zpk, zpk_to_state_space
from .fuzzy import _flc_core, default_centers, default_rule_table

DERIVATIVE_FILTER_TAU = 0.01
FRAC_BAND = (1e-2, 1e2)
FRAC_SECTION_PAIRS = 2


def _check_nonneg(**gains: float) -> None:
    for name, value in gains.items():
        if not np.isfinite(value) or value < 0:
            raise ValueError(f"{name} must be finite and nonnegative, "
                             f"got {value}")


@dataclass(frozen=True)
class PIDParams:
    kp: float
    ki: float
    kd: float

    kind = "pid"
    field_names = ("kp", "ki", "kd")

    def __post_init__(self):
        _check_nonneg(kp=self.kp, ki=self.ki, kd=self.kd)


@dataclass(frozen=True)
class FuzzyPIDParams:
    ke: float
    kd: float
    k_pi: float
    k_pd: float

    kind = "fpid"
    field_names = ("ke", "kd", "k_pi", "k_pd")

    def __post_init__(self):
        _check_nonneg(ke=self.ke, kd=self.kd, k_pi=self.k_pi, k_pd=self.k_pd)


@dataclass(frozen=True)
class FuzzyFOPIDParams:
    ke: float
    kd: float
    k_pi: float
    k_pd: float
    lam: float
    mu: float

    kind = "fofpid"
    field_names = ("ke", "kd", "k_pi", "k_pd", "lam", "mu")

    def __post_init__(self):
        _check_nonneg(ke=self.ke, kd=self.kd, k_pi=self.k_pi, k_pd=self.k_pd)
        for name, order in (("lam", self.lam), ("mu", self.mu)):
            if not (0.0 < order <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1], got {order}")


ControllerParams = Union[PIDParams, FuzzyPIDParams, FuzzyFOPIDParams]

PARAM_CLASSES = {"pid": PIDParams, "fpid": FuzzyPIDParams,
                 "fofpid": FuzzyFOPIDParams}

_KIND_TAGS = {"pid": 0, "fpid": 1, "fofpid": 2}


def params_to_vector(params: ControllerParams) -> np.ndarray:
    return np.array([getattr(params, name) for name in params.field_names])


def params_from_vector(kind: str, vec: np.ndarray) -> ControllerParams:
    cls = PARAM_CLASSES[kind]
    return cls(*(float(v) for v in vec))


def params_to_text(params: ControllerParams, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"kind = {params.kind}")
    for name in params.field_names:
        lines.append(f"{name} = {getattr(params, name):.12g}")
    return "\n".join(lines) + "\n"


def params_from_text(text: str) -> ControllerParams:
    entries: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed parameter line: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        entries[key.lower()] = value
    kind = entries.pop("kind", None)
    if kind not in PARAM_CLASSES:
        raise ValueError(f"unknown or missing controller kind: {kind!r}")
    cls = PARAM_CLASSES[kind]
    missing = [name for name in cls.field_names if name not in entries]
    if missing:
        raise ValueError(f"missing parameters for {kind}: {missing}")
    return cls(**{name: float(entries[name]) for name in cls.field_names})


@njit(cache=True)
def _controller_eval(kind, pk, ad, bd, cd, dd0, ai, bi, ci, di0,
                     centers, table, x, e, dx):
    """Controller output at (x, e); fills dx with the state derivative."""
    if kind == 0:
        tau = pk[3]
        de_f = (e - x[1]) / tau
        dx[0] = e
        dx[1] = de_f
        return pk[0] * e + pk[1] * x[0] + pk[2] * de_f
    if kind == 1:
        tau = pk[4]
        de_f = (e - x[0]) / tau
        v = _flc_core(pk[0] * e, pk[1] * de_f, centers, table)
        dx[0] = de_f
        dx[1] = v
        return pk[3] * v + pk[2] * x[1]
    nd = ad.shape[0]
    ni = ai.shape[0]
    y_d = dd0 * e
    for i in range(nd):
        y_d += cd[i] * x[i]
    v = _flc_core(pk[0] * e, pk[1] * y_d, centers, table)
    y_i = di0 * v
    for i in range(ni):
        y_i += ci[i] * x[nd + i]
    for i in range(nd):
        acc = bd[i] * e
        for j in range(nd):
            acc += ad[i, j] * x[j]
        dx[i] = acc
    for i in range(ni):
        acc = bi[i] * v
        for j in range(ni):
            acc += ai[i, j] * x[nd + j]
        dx[nd + i] = acc
    return pk[3] * v + pk[2] * y_i


_DUMMY_A = np.zeros((1, 1))
_DUMMY_B = np.zeros(1)


class ControllerBlock:
    """Packed, kernel-ready realization of one controller structure."""

    def __init__(self, params: ControllerParams,
                 derivative_tau: float = DERIVATIVE_FILTER_TAU,
                 frac_band: tuple[float, float] = FRAC_BAND,
                 frac_pairs: int = FRAC_SECTION_PAIRS,
                 centers: np.ndarray | None = None,
                 table: np.ndarray | None = None):
        self.params = params
        self.kind = _KIND_TAGS[params.kind]
        self.centers = centers if centers is not None else default_centers()
        self.table = table if table is not None else default_rule_table()
        self.ad, self.bd, self.cd, self.dd0 = (_DUMMY_A, _DUMMY_B, _DUMMY_B,
                                               0.0)
        self.ai, self.bi, self.ci, self.di0 = (_DUMMY_A, _DUMMY_B, _DUMMY_B,
                                               0.0)
        if isinstance(params, PIDParams):
            self.pk = np.array([params.kp, params.ki, params.kd,
                                derivative_tau])
            self.state_size = 2
            self.state_names = ("pid_int", "pid_dfilt")
        elif isinstance(params, FuzzyPIDParams):
            self.pk = np.array([params.ke, params.kd, params.k_pi,
                                params.k_pd, derivative_tau])
            self.state_size = 2
            self.state_names = ("fpid_dfilt", "fpid_int")
        else:
            self.pk = np.array([params.ke, params.kd, params.k_pi,
                                params.k_pd])
            deriv = zpk_to_state_space(
                oustaloup_zpk(params.mu, frac_band[0], frac_band[1],
                              frac_pairs))
            integ = zpk_to_state_space(
                oustaloup_zpk(-params.lam, frac_band[0], frac_band[1],
                              frac_pairs))
            self.ad, self.bd, self.cd, self.dd0 = (deriv.a, deriv.b, deriv.c,
                                                   deriv.d)
            self.ai, self.bi, self.ci, self.di0 = (integ.a, integ.b, integ.c,
                                                   integ.d)
            self.state_size = deriv.order + integ.order
            self.state_names = tuple(f"fofpid_d{i}" for i in range(deriv.order)) \
                + tuple(f"fofpid_i{i}" for i in range(integ.order))

    def evaluate(self, x: np.ndarray, e: float) -> tuple[float, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.state_size,):
            raise ValueError(f"controller state must have {self.state_size} "
                             f"entries")
        dx = np.zeros(self.state_size)
        u = _controller_eval(self.kind, self.pk, self.ad, self.bd, self.cd,
                             self.dd0, self.ai, self.bi, self.ci, self.di0,
                             self.centers, self.table, x, float(e), dx)
        return float(u), dx

    def output(self, x: np.ndarray, e: float) -> float:
        return self.evaluate(x, e)[0]

    def zero_state(self) -> np.ndarray:
        return np.zeros(self.state_size)


def make_pid(params: PIDParams, **kw) -> ControllerBlock:
    return ControllerBlock(params, **kw)


def make_fuzzy_pid(params: FuzzyPIDParams, **kw) -> ControllerBlock:
    return ControllerBlock(params, **kw)


def make_fuzzy_fopid(params: FuzzyFOPIDParams, **kw) -> ControllerBlock:
    return ControllerBlock(params, **kw)


def make_controller(params: ControllerParams, **kw) -> ControllerBlock:
    return ControllerBlock(params, **kw)
