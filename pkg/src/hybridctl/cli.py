"""Command line front end for the simulation and tuning experiments.

Subcommands
  tune                   swarm-tune one controller structure
  simulate               run one seeded realization, write series + metrics
  robustness-uc          ultracapacitor parameter drift study
  robustness-disconnect  component outage study
  rate-limit             slew-limited vs linear comparison
  report                 side-by-side controller comparison tables

All outputs are plain text (CSV, key = value, markdown) and carry the
seed in a header comment so any file can be regenerated bit for bit.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .controllers import (ControllerParams, PARAM_CLASSES, params_from_text,
                          params_from_vector, params_to_text)
from .profiles import switching_signal
from .pso import SwarmConfig, default_bounds, optimize
from .scenario import (RATE_LIMIT_DEFAULTS, ScenarioConfig, load_scenario)
from .simulation import (ensemble_metrics, make_batch_objective,
                         performance_decrease, run_closed_loop,
                         steady_control_residual, write_series_csv)

UC_SCALES = ((0.0, 1.0), (30.0, 1.3), (50.0, 1.5), (-30.0, 0.7), (-50.0, 0.5))
DISCONNECT_CASES = ("deg", "fess", "bess")


def _load_cfg(args) -> ScenarioConfig:
    cfg = load_scenario(args.scenario) if args.scenario else ScenarioConfig()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if getattr(args, "realizations", None) is not None:
        cfg = replace(cfg, realizations=args.realizations)
    return cfg


def _load_params(args, cfg: ScenarioConfig) -> ControllerParams:
    if getattr(args, "params", None):
        return params_from_text(Path(args.params).read_text())
    if cfg.controller is not None:
        return cfg.controller
    raise ValueError("no controller parameters: pass --params or put a "
                     "[controller] section in the scenario file")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    print(f"wrote {path}")


def cmd_tune(args) -> int:
    cfg = _load_cfg(args)
    swarm = SwarmConfig(n_particles=args.particles,
                        generations=args.generations, rng=args.rng)
    objective = make_batch_objective(cfg, args.controller, cfg.realizations)
    result = optimize(objective, default_bounds(args.controller), swarm,
                      cfg.master_seed)
    params = params_from_vector(args.controller, result.best_position)
    out = _out_dir(args)
    tag = f"{args.controller}_{args.rng}"

    comment = (f"seed={cfg.master_seed} rng={args.rng} "
               f"particles={swarm.n_particles} "
               f"generations={swarm.generations} "
               f"realizations={cfg.realizations} "
               f"best_j={result.best_value:.6g}")
    _write(out / f"params_{tag}.txt", params_to_text(params, comment))

    lines = [f"# seed={cfg.master_seed} rng={args.rng}",
             "generation,best_j,mean_j"]
    for gen, best, mean in result.trace:
        lines.append(f"{int(gen)},{best:.12g},{mean:.12g}")
    _write(out / f"trace_{tag}.csv", "\n".join(lines) + "\n")
    print(f"best J = {result.best_value:.6g} after {result.evaluations} "
          f"evaluations")
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_cfg(args)
    params = _load_params(args, cfg)
    if args.disconnect:
        cfg = cfg.with_plant(cfg.plant.disconnect(*args.disconnect))
    cfg = cfg.with_controller(params)
    result = run_closed_loop(cfg, cfg.master_seed)
    out = _out_dir(args)
    write_series_csv(out / f"series_{params.kind}.csv", result,
                     cfg.master_seed)
    print(f"wrote {out / f'series_{params.kind}.csv'}")

    residuals = steady_control_residual(cfg, result)
    lines = [f"# seed={cfg.master_seed}",
             f"kind = {params.kind}",
             f"ise = {result.ise:.12g}",
             f"isdco = {result.isdco:.12g}",
             f"j = {result.j:.12g}",
             f"diverged = {result.diverged}"]
    for seg, resid in residuals.items():
        lines.append(f"steady_residual_{seg:g} = {resid:.6g}")
    _write(out / f"metrics_{params.kind}.txt", "\n".join(lines) + "\n")
    print(f"J = {result.j:.6g} (ISE {result.ise:.6g}, ISDCO "
          f"{result.isdco:.6g})")
    return 0


def cmd_robustness_uc(args) -> int:
    cfg = _load_cfg(args)
    params = _load_params(args, cfg)
    rows = []
    for pct, scale in UC_SCALES:
        case_cfg = cfg.with_plant(cfg.plant.scale_uc(scale))
        ise, isdco, j = ensemble_metrics(case_cfg, params, cfg.realizations,
                                         cfg.master_seed)
        rows.append((pct, scale, ise, isdco, j))
    nominal = rows[0]

    out = _out_dir(args)
    tag = params.kind
    csv_lines = [f"# seed={cfg.master_seed} realizations={cfg.realizations}",
                 "change_pct,scale,ise,isdco,j"]
    for pct, scale, ise, isdco, j in rows:
        csv_lines.append(f"{pct:g},{scale:g},{ise:.12g},{isdco:.12g},"
                         f"{j:.12g}")
    _write(out / f"robustness_uc_{tag}.csv", "\n".join(csv_lines) + "\n")

    md = [f"# Ultracapacitor drift study ({tag})",
          "",
          f"seed={cfg.master_seed}, realizations={cfg.realizations}; "
          "gain and time constant scaled jointly.",
          "",
          "| change | ISE | ISE change % | ISDCO | ISDCO change % | J |",
          "|---|---|---|---|---|---|"]
    for pct, scale, ise, isdco, j in rows:
        d_ise = performance_decrease(nominal[2], ise)
        d_isdco = performance_decrease(nominal[3], isdco)
        md.append(f"| {pct:+g}% | {ise:.4g} | {d_ise:.1f} | {isdco:.4g} | "
                  f"{d_isdco:.1f} | {j:.4g} |")
    _write(out / f"robustness_uc_{tag}.md", "\n".join(md) + "\n")
    return 0


def cmd_robustness_disconnect(args) -> int:
    cfg = _load_cfg(args)
    params = _load_params(args, cfg)
    rows = [("nominal",) + ensemble_metrics(cfg, params, cfg.realizations,
                                            cfg.master_seed)]
    for name in DISCONNECT_CASES:
        case_cfg = cfg.with_plant(cfg.plant.disconnect(name))
        rows.append((name,) + ensemble_metrics(case_cfg, params,
                                               cfg.realizations,
                                               cfg.master_seed))
    nominal = rows[0]

    out = _out_dir(args)
    tag = params.kind
    csv_lines = [f"# seed={cfg.master_seed} realizations={cfg.realizations}",
                 "case,ise,isdco,j"]
    for name, ise, isdco, j in rows:
        csv_lines.append(f"{name},{ise:.12g},{isdco:.12g},{j:.12g}")
    _write(out / f"robustness_disconnect_{tag}.csv",
           "\n".join(csv_lines) + "\n")

    md = [f"# Component outage study ({tag})",
          "",
          f"seed={cfg.master_seed}, realizations={cfg.realizations}",
          "",
          "| case | ISE | ISE change % | ISDCO | ISDCO change % | J |",
          "|---|---|---|---|---|---|"]
    for name, ise, isdco, j in rows:
        d_ise = performance_decrease(nominal[1], ise)
        d_isdco = performance_decrease(nominal[2], isdco)
        md.append(f"| {name} | {ise:.4g} | {d_ise:.1f} | {isdco:.4g} | "
                  f"{d_isdco:.1f} | {j:.4g} |")
    _write(out / f"robustness_disconnect_{tag}.md", "\n".join(md) + "\n")
    return 0


def cmd_rate_limit(args) -> int:
    cfg = _load_cfg(args)
    params = _load_params(args, cfg)
    limits = dict(cfg.plant.rate_limits) or dict(RATE_LIMIT_DEFAULTS)

    linear_cfg = cfg.with_controller(params)
    limited_cfg = linear_cfg.with_plant(
        linear_cfg.plant.with_rate_limits(limits))
    lin = run_closed_loop(linear_cfg, cfg.master_seed)
    lim = run_closed_loop(limited_cfg, cfg.master_seed)

    out = _out_dir(args)
    tag = params.kind
    h = cfg.step
    md = [f"# Slew limit study ({tag})",
          "",
          f"seed={cfg.master_seed}",
          "",
          f"- linear J = {lin.j:.6g} (ISE {lin.ise:.6g}, ISDCO "
          f"{lin.isdco:.6g})",
          f"- limited J = {lim.j:.6g} (ISE {lim.ise:.6g}, ISDCO "
          f"{lim.isdco:.6g})",
          "",
          "| component | limit | max recorded slew |",
          "|---|---|---|"]
    violations = []
    for name, limit in sorted(limits.items()):
        series = lim.series[f"p_{name}"]
        slew = float(np.max(np.abs(np.diff(series)))) / h
        md.append(f"| {name} | {limit:g} | {slew:.6g} |")
        if slew > limit + 1e-12:
            violations.append(name)
    _write(out / f"rate_limit_{tag}.md", "\n".join(md) + "\n")

    dev_lines = [f"# seed={cfg.master_seed}",
                 "t," + ",".join(f"d_{n}" for n in sorted(limits))]
    for i, t in enumerate(lin.t):
        devs = ",".join(f"{lim.series[f'p_{n}'][i] - lin.series[f'p_{n}'][i]:.12g}"
                        for n in sorted(limits))
        dev_lines.append(f"{t:.12g},{devs}")
    _write(out / f"rate_limit_deviation_{tag}.csv",
           "\n".join(dev_lines) + "\n")

    if violations:
        print(f"slew limit exceeded for: {', '.join(violations)}",
              file=sys.stderr)
        return 1
    return 0


def cmd_report(args) -> int:
    cfg = _load_cfg(args)
    param_sets = [params_from_text(Path(p).read_text()) for p in args.params]
    if not param_sets:
        raise ValueError("report needs at least one --params file")
    out = _out_dir(args)
    R = cfg.realizations
    seed = cfg.master_seed

    md = ["# Controller comparison", "",
          f"seed={seed}, realizations={R}", ""]

    md += ["## Nominal scenario", "",
           "| controller | ISE | ISDCO | J |", "|---|---|---|---|"]
    nominal = {}
    for params in param_sets:
        ise, isdco, j = ensemble_metrics(cfg, params, R, seed)
        nominal[params.kind] = (ise, isdco, j)
        md.append(f"| {params.kind} | {ise:.4g} | {isdco:.4g} | {j:.4g} |")

    md += ["", "## Ultracapacitor drift (J)", "",
           "| controller | " + " | ".join(f"{pct:+g}%" for pct, _ in
                                          UC_SCALES) + " |",
           "|---|" + "---|" * len(UC_SCALES)]
    for params in param_sets:
        cells = []
        for _, scale in UC_SCALES:
            case_cfg = cfg.with_plant(cfg.plant.scale_uc(scale))
            cells.append(f"{ensemble_metrics(case_cfg, params, R, seed)[2]:.4g}")
        md.append(f"| {params.kind} | " + " | ".join(cells) + " |")

    md += ["", "## Component outages (J)", "",
           "| controller | nominal | " + " | ".join(DISCONNECT_CASES) + " |",
           "|---|---|" + "---|" * len(DISCONNECT_CASES)]
    for params in param_sets:
        cells = [f"{nominal[params.kind][2]:.4g}"]
        for name in DISCONNECT_CASES:
            case_cfg = cfg.with_plant(cfg.plant.disconnect(name))
            cells.append(f"{ensemble_metrics(case_cfg, params, R, seed)[2]:.4g}")
        md.append(f"| {params.kind} | " + " | ".join(cells) + " |")

    limits = dict(cfg.plant.rate_limits) or dict(RATE_LIMIT_DEFAULTS)
    md += ["", "## Slew limits (J)", "",
           "| controller | linear | limited |", "|---|---|---|"]
    for params in param_sets:
        lim_cfg = cfg.with_plant(cfg.plant.with_rate_limits(limits))
        j_lin = ensemble_metrics(cfg, params, R, seed)[2]
        j_lim = ensemble_metrics(lim_cfg, params, R, seed)[2]
        md.append(f"| {params.kind} | {j_lin:.4g} | {j_lim:.4g} |")

    _write(out / "report.md", "\n".join(md) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridctl",
        description="hybrid power system frequency control experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, params_opt=True):
        p.add_argument("--scenario", help="scenario INI file "
                       "(defaults to the nominal scenario)")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--realizations", type=int,
                       help="ensemble size override")
        if params_opt:
            p.add_argument("--params", help="controller parameter file")

    p = sub.add_parser("tune", help="swarm-tune a controller structure")
    common(p, params_opt=False)
    p.add_argument("--controller", required=True,
                   choices=sorted(PARAM_CLASSES))
    p.add_argument("--rng", default="uniform",
                   choices=("uniform", "logistic", "henon"))
    p.add_argument("--particles", type=int, default=30)
    p.add_argument("--generations", type=int, default=300)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("simulate", help="run one seeded realization")
    common(p)
    p.add_argument("--disconnect", action="append", default=[],
                   help="component to disconnect (repeatable)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("robustness-uc",
                       help="ultracapacitor parameter drift study")
    common(p)
    p.set_defaults(func=cmd_robustness_uc)

    p = sub.add_parser("robustness-disconnect",
                       help="component outage study")
    common(p)
    p.set_defaults(func=cmd_robustness_disconnect)

    p = sub.add_parser("rate-limit", help="slew-limited vs linear run")
    common(p)
    p.set_defaults(func=cmd_rate_limit)

    p = sub.add_parser("report", help="side-by-side controller comparison")
    common(p, params_opt=False)
    p.add_argument("--params", action="append", default=[],
                   help="controller parameter file (repeatable)")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
