"""Closed-loop simulation, cost metrics and ensemble evaluation.

A run integrates the joint plant/controller/noise-filter state with a
fixed-step third-order Runge-Kutta rule and scores it with

    J = w1 * ISE + w2 * ISDCO
      = integral of w1 df^2 + w2 (u - u_ss)^2 dt

where u_ss is the scheduled steady control level.  Runs whose state
leaves the finite range are marked diverged and score +inf, which lets
the tuner discard unstable candidates without aborting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .controllers import ControllerBlock, ControllerParams, make_controller
from .profiles import NoiseStream, ProfileSpec, switching_signal
from .scenario import ScenarioConfig


class NonFiniteStateError(RuntimeError):
    """Raised when an integration step produces NaN or Inf."""


def bs3_step(f, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """One explicit third-order step (stages at t, t+h/2, t+3h/4)."""
    y = np.asarray(y, dtype=float)
    k1 = np.asarray(f(t, y))
    k2 = np.asarray(f(t + 0.5 * h, y + 0.5 * h * k1))
    k3 = np.asarray(f(t + 0.75 * h, y + 0.75 * h * k2))
    y_next = y + h * (2.0 * k1 + 3.0 * k2 + 4.0 * k3) / 9.0
    if not np.all(np.isfinite(y_next)):
        raise NonFiniteStateError(f"state became non-finite at t = {t}")
    return y_next


def _pack_schedules(specs) -> tuple[np.ndarray, ...]:
    """Cumulative switching tables for the kernel, one row per profile."""
    def build(schedules):
        width = max(1, max(len(s) for s in schedules))
        counts = np.zeros(len(schedules), dtype=np.int64)
        times = np.zeros((len(schedules), width))
        cums = np.zeros((len(schedules), width))
        for i, sched in enumerate(schedules):
            ordered = sorted(sched, key=lambda e: e[0])
            counts[i] = len(ordered)
            total = 0.0
            for j, (t_k, coeff) in enumerate(ordered):
                total += coeff
                times[i, j] = t_k
                cums[i, j] = total
        return counts, times, cums

    gn, gt, gc = build([s.gamma for s in specs])
    an, at_, ac = build([s.additive for s in specs])
    return gn, gt, gc, an, at_, ac


def _profile_pack(cfg: ScenarioConfig):
    specs = cfg.profile_specs()
    prof = np.stack([s.packed() for s in specs])
    return (prof,) + _pack_schedules(specs)


def _ctrl_pack(block: ControllerBlock):
    return (block.kind, block.pk, block.ad, block.bd, block.cd, block.dd0,
            block.ai, block.bi, block.ci, block.di0, block.centers,
            block.table)


def realization_noise(cfg: ScenarioConfig, seed: int) -> np.ndarray:
    """Held noise samples, one independent substream per profile."""
    n_noise = int(np.ceil(cfg.n_steps / cfg.noise_stride))
    phi = np.empty((3, n_noise))
    for i in range(3):
        stream = NoiseStream.from_seed(seed, i)
        phi[i] = stream.draw_block(n_noise)
    return phi


def uss_grid(cfg: ScenarioConfig) -> np.ndarray:
    t = np.arange(cfg.n_steps + 1) * cfg.step
    return np.array([switching_signal(cfg.u_ss, tk) for tk in t])


@dataclass
class SimResult:
    t: np.ndarray
    series: dict[str, np.ndarray]
    ise: float
    isdco: float
    j: float
    diverged: bool
    seed: int

    @property
    def df(self) -> np.ndarray:
        return self.series["df"]

    @property
    def u(self) -> np.ndarray:
        return self.series["u"]


def run_closed_loop(cfg: ScenarioConfig, seed: int,
                    record_full: bool = True) -> SimResult:
    """Integrate one noise realization of the closed loop."""
    if cfg.controller is None:
        raise ValueError("scenario has no controller parameters")
    block = make_controller(cfg.controller)
    nc = block.state_size
    n_steps = cfg.n_steps
    phi = realization_noise(cfg, seed)
    pp, conn, limits = cfg.plant.packed()
    n_cols = len(engine.SERIES_COLUMNS) if record_full else 2
    series = np.zeros((n_steps + 1, n_cols))

    status, n_done = engine._simulate_core(
        cfg.step, n_steps, cfg.noise_stride, phi, cfg.error_sign,
        (pp, conn, limits), _ctrl_pack(block), _profile_pack(cfg), nc,
        series, record_full)

    t = np.arange(n_steps + 1) * cfg.step
    diverged = status != 0
    if diverged:
        series[n_done:] = np.nan
        ise = isdco = j = float("inf")
    else:
        ise, isdco, j = compute_metrics(cfg, series[:, 0], series[:, 1])
    names = engine.SERIES_COLUMNS[:n_cols]
    columns = {name: series[:, k].copy() for k, name in enumerate(names)}
    return SimResult(t=t, series=columns, ise=ise, isdco=isdco, j=j,
                     diverged=diverged, seed=seed)


def compute_metrics(cfg: ScenarioConfig, df: np.ndarray,
                    u: np.ndarray) -> tuple[float, float, float]:
    """(ISE, ISDCO, J) by trapezoid quadrature on the run grid."""
    uss = uss_grid(cfg)
    ise = float(np.trapezoid(df * df, dx=cfg.step))
    dev = u - uss
    isdco = float(np.trapezoid(dev * dev, dx=cfg.step))
    return ise, isdco, cfg.w1 * ise + cfg.w2 * isdco


def performance_decrease(i_nominal: float, i_perturbed: float) -> float:
    """Percent change of an index relative to its nominal value."""
    if i_nominal == 0.0:
        raise ValueError("nominal index is zero; relative change undefined")
    return abs(i_nominal - i_perturbed) / abs(i_nominal) * 100.0


def realization_seeds(master_seed: int, count: int,
                      stream_tag: int = 0) -> list[int]:
    """Derived seeds: stable, platform independent, non-overlapping."""
    seq = np.random.SeedSequence([int(master_seed), int(stream_tag)])
    return [int(s) for s in seq.generate_state(count, dtype=np.uint64)]


def ensemble_objective(cfg: ScenarioConfig, params: ControllerParams,
                       realizations: int, seed: int) -> float:
    """Mean J over a seeded ensemble (diverged runs poison the mean)."""
    return ensemble_metrics(cfg, params, realizations, seed)[2]


def ensemble_metrics(cfg: ScenarioConfig, params: ControllerParams,
                     realizations: int,
                     seed: int) -> tuple[float, float, float]:
    """(mean ISE, mean ISDCO, mean J) over the derived seed ensemble."""
    run_cfg = cfg.with_controller(params)
    seeds = realization_seeds(seed, realizations)
    ise = isdco = j = 0.0
    for s in seeds:
        result = run_closed_loop(run_cfg, s, record_full=False)
        if result.diverged:
            return float("inf"), float("inf"), float("inf")
        ise += result.ise
        isdco += result.isdco
        j += result.j
    n = float(realizations)
    return ise / n, isdco / n, j / n


def make_batch_objective(cfg: ScenarioConfig, kind: str, realizations: int):
    """Tuning objective: (positions, gen_seed) -> mean J per candidate.

    All candidates within one call share the same noise realizations,
    so a generation compares parameter sets on identical disturbances.
    """
    from .controllers import params_from_vector

    pp, conn, limits = cfg.plant.packed()
    plant_pack = (pp, conn, limits)
    prof_pack = _profile_pack(cfg)
    uss = uss_grid(cfg)
    n_steps = cfg.n_steps

    def objective(positions: np.ndarray, gen_seed: int) -> np.ndarray:
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        blocks = []
        for vec in positions:
            try:
                blocks.append(make_controller(params_from_vector(kind, vec)))
            except ValueError:
                blocks.append(None)
        template = next((b for b in blocks if b is not None), None)
        if template is None:
            return np.full(len(blocks), np.inf)
        nc = template.state_size
        n_cand = len(blocks)
        pks = np.zeros((n_cand, template.pk.size))
        nd = template.ad.shape[0]
        ads = np.zeros((n_cand, nd, nd))
        bds = np.zeros((n_cand, nd))
        cds = np.zeros((n_cand, nd))
        dd0s = np.zeros(n_cand)
        ais = np.zeros((n_cand, nd, nd))
        bis = np.zeros((n_cand, nd))
        cis = np.zeros((n_cand, nd))
        di0s = np.zeros(n_cand)
        valid = np.ones(n_cand, dtype=bool)
        for i, block in enumerate(blocks):
            if block is None:
                valid[i] = False
                continue
            pks[i] = block.pk
            ads[i] = block.ad
            bds[i] = block.bd
            cds[i] = block.cd
            dd0s[i] = block.dd0
            ais[i] = block.ai
            bis[i] = block.bi
            cis[i] = block.ci
            di0s[i] = block.di0

        seeds = realization_seeds(gen_seed, realizations)
        phi_all = np.stack([realization_noise(cfg, s) for s in seeds])
        out = np.empty(n_cand)
        engine._batch_objective(cfg.step, n_steps, cfg.noise_stride, phi_all,
                                cfg.error_sign, plant_pack, template.kind,
                                pks, ads, bds, cds, dd0s, ais, bis, cis,
                                di0s, template.centers, template.table,
                                prof_pack, nc, uss, cfg.w1, cfg.w2, out)
        out[~valid] = np.inf
        return out

    return objective


def steady_control_residual(cfg: ScenarioConfig, result: SimResult,
                            window: float = 10.0) -> dict[float, float]:
    """Mean control offset from the schedule over the tail of each segment.

    Reported (not asserted): how closely the simulated steady control
    level reproduces the scheduled one before each switching instant.
    """
    times = sorted(t for t, _ in cfg.u_ss)
    edges = times[1:] + [cfg.t_max]
    residuals = {}
    uss = uss_grid(cfg)
    for seg_start, seg_end in zip(times, edges):
        lo = max(seg_start, seg_end - window)
        mask = (result.t >= lo) & (result.t < seg_end)
        if not np.any(mask):
            continue
        residuals[seg_start] = float(np.mean(result.u[mask] - uss[mask]))
    return residuals


def write_series_csv(path, result: SimResult, seed: int,
                     precision: int = 12) -> None:
    names = ("t",) + tuple(result.series.keys())
    data = np.column_stack([result.t] + list(result.series.values()))
    fmt = f"%.{precision}g"
    with open(path, "w") as fh:
        fh.write(f"# seed={seed}\n")
        fh.write(",".join(names) + "\n")
        for row in data:
            fh.write(",".join(fmt % v for v in row) + "\n")


def read_series_csv(path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    names = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return {name: data[:, k] for k, name in enumerate(names)}
