"""Command-line entry point: ``leocov {coverage,sweep,validate,dist,presets}``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from importlib import resources

from . import __version__
from .config import ConfigError, ExperimentSpec, load_config, parse_config
from .coverage import crossover_abs_distance, p_cov_end_to_end
from .experiment import distribution_table, emit_table, run_experiment, table_text
from .montecarlo import MCConfig, simulate_all
from .validation import regression_grid


def preset_names() -> list[str]:
    files = resources.files("leocov").joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".yaml"))


def load_preset(name: str) -> ExperimentSpec:
    res = resources.files("leocov").joinpath("presets", f"{name}.yaml")
    if not res.is_file():
        raise ConfigError(f"unknown preset {name!r} (available: {', '.join(preset_names())})")
    return parse_config(res.read_text(encoding="utf-8"))


def _spec(args) -> ExperimentSpec:
    if getattr(args, "preset", None):
        return load_preset(args.preset)
    if args.config is None:
        return parse_config("")
    try:
        return load_config(args.config)
    except OSError as e:
        raise ConfigError(f"cannot read {args.config}: {e.strerror or e}") from None


def _mc_overrides(spec: ExperimentSpec, args) -> ExperimentSpec:
    kw = {}
    if getattr(args, "trials", None) is not None:
        kw["trials"] = args.trials
    if getattr(args, "seed", None) is not None:
        kw["seed"] = args.seed
    return replace(spec, mc=replace(spec.mc, **kw)) if kw else spec


def cmd_coverage(args) -> int:
    spec = _mc_overrides(_spec(args), args)
    report = p_cov_end_to_end(spec.system, abs_distance=spec.abs_distance)
    out = {"analytic": report.as_dict()}
    if 0 < report.p_end_to_end:
        out["analytic"]["crossover_abs_distance_m"] = crossover_abs_distance(spec.system, report.p_end_to_end)
    if args.mc:
        s, u, e = simulate_all(spec.system, spec.mc)
        out["monte_carlo"] = {
            "p_s_gw": s.mean, "p_gw_u": u.mean, "p_end_to_end": e.mean,
            "ci_halfwidth": {"p_s_gw": s.ci_halfwidth, "p_gw_u": u.ci_halfwidth,
                             "p_end_to_end": e.ci_halfwidth},
            "trials": e.trials_used, "seed": e.seed,
        }
    print(json.dumps(out, indent=2))
    return 0


def cmd_sweep(args) -> int:
    spec = _mc_overrides(_spec(args), args)
    if spec.sweep is None:
        raise ConfigError("sweep: section missing")
    table = run_experiment(spec, workers=args.workers)
    path = args.output or spec.output
    if path:
        emit_table(table, path)
        print(f"wrote {len(table.rows)} rows to {path}", file=sys.stderr)
    else:
        sys.stdout.write(table_text(table))
    return 0


def cmd_validate(args) -> int:
    spec = _spec(args)
    mc = MCConfig(trials=args.trials, seed=args.seed, batch=min(args.trials, 10_000))
    failures = 0
    print("gamma_dB,altitude_km,count,quantity,analytic,mc,ci_halfwidth,status")
    for pt in regression_grid(spec.system, mc, k_sigma=args.k_sigma):
        for name, a, m, d in zip(("p_s_gw", "p_gw_u", "p_end_to_end"), pt.analytic, pt.mc, pt.deviations):
            ok = d < args.k_sigma * m.ci_halfwidth
            failures += not ok
            print(f"{pt.gamma_db:g},{pt.altitude_km:g},{pt.count},{name},{a!r},{m.mean!r},"
                  f"{m.ci_halfwidth!r},{'PASS' if ok else 'FAIL'}")
    print(f"# {failures} failure(s)", file=sys.stderr)
    return 1 if failures else 0


def cmd_dist(args) -> int:
    spec = _spec(args)
    d_max = None if args.d_max_km is None else args.d_max_km * 1e3
    table = distribution_table(spec.system.constellation, args.points, d_max)
    if args.output:
        emit_table(table, args.output)
    else:
        sys.stdout.write(table_text(table))
    return 0


def cmd_presets(args) -> int:
    for name in preset_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="leocov", description=__doc__)
    p.add_argument("--version", action="version", version=f"leocov {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_config(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("config", nargs="?", help="YAML config file (built-in defaults if omitted)")
        g.add_argument("--preset", help="use a bundled preset (see `leocov presets`)")

    sp = sub.add_parser("coverage", help="coverage report for one configuration")
    add_config(sp)
    sp.add_argument("--mc", action="store_true", help="also run the Monte-Carlo simulator")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_coverage)

    sp = sub.add_parser("sweep", help="run a parameter sweep and write a CSV table")
    add_config(sp)
    sp.add_argument("-o", "--output", help="CSV path (default: config 'output' or stdout)")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("validate", help="analytic vs Monte-Carlo regression grid")
    add_config(sp)
    sp.add_argument("--trials", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=2024)
    sp.add_argument("--k-sigma", type=float, default=3.0)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("dist", help="contact-distance CDF/PDF table")
    add_config(sp)
    sp.add_argument("--points", type=int, default=200)
    sp.add_argument("--d-max-km", type=float)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("presets", help="list bundled experiment presets")
    sp.set_defaults(func=cmd_presets)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
