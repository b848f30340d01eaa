"""Command-line entry point.

All results are CSV on stdout or ``--out``.  Every command accepts
``--config <json>`` whose keys mirror the flag names (flags override the
file) and ``--dump-config`` to print the resolved parameters as JSON for an
exact re-run.  Randomness flows from one ``--seed``; when the flag is
absent a seed is drawn and echoed on stderr.

Exit codes: 0 success, 1 runtime failure (e.g. bisection give-up),
2 argument/config errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import secrets
import sys

from . import experiments, theory
from .engine import RunConfig, run_gomea
from .experiments import (
    BisectionConfig,
    BisectionGiveUp,
    SWEEP_COLUMNS,
    bisect_min_population,
    record_growth_trajectory,
    sweep_conv_time,
    sweep_nfe,
    sweep_success_rate,
    two_layer_ratio_fit,
)
from .fos import parse_fos_text, resolve_fos
from .problems import make_problem

__all__ = ["main", "entry"]

_PROBLEM_NAMES = {"onemax": "onemax", "royal": "royal_road", "trap": "trap"}


class CliError(Exception):
    """Argument/config error (exit code 2)."""


def _int_list(text):
    if isinstance(text, list):
        return [int(v) for v in text]
    return [int(tok) for tok in str(text).split(",") if tok.strip()]


def _str_list(text):
    if isinstance(text, list):
        return [str(v) for v in text]
    return [tok.strip() for tok in str(text).split(",") if tok.strip()]


# Per-command defaults applied after merging config file and flags.
_DEFAULTS = {
    ("run",): {"fos": "f_k", "max_gens": 512, "chi": 2},
    ("bisect",): {
        "fos": "f_k",
        "repeats": 10,
        "n_floor": 1,
        "resolution": 0.05,
        "max_gens": 512,
    },
    ("theory", "pop-size"): {"chi": 2},
    ("theory", "conv-time"): {"chi": 2, "m": 1},
    ("theory", "nfe-bounds"): {"chi": 2},
    ("theory", "reverse-growth"): {},
    ("theory", "cross-competition"): {},
    ("sweep", "success-rate"): {"repeats": 100},
    ("sweep", "conv-time"): {"grid_param": "n", "repeats": 100},
    ("sweep", "nfe"): {
        "grid_param": "k",
        "problems": "onemax,royal,trap",
        "repeats": 50,
        "include_failures": False,
    },
    ("sweep", "trajectory"): {"repeats": 20},
    ("sweep", "two-layer"): {"repeats": 10, "alpha": 0.05},
}

_REQUIRED = {
    ("run",): ["problem", "ell", "n"],
    ("bisect",): ["problem", "ell"],
    ("theory", "pop-size"): ["k", "m", "alpha"],
    ("theory", "conv-time"): ["k", "n"],
    ("theory", "nfe-bounds"): ["k", "m", "n"],
    ("theory", "reverse-growth"): ["k"],
    ("theory", "cross-competition"): ["s", "alpha", "p0"],
    ("sweep", "success-rate"): ["ell", "k", "n_grid"],
    ("sweep", "conv-time"): ["grid", "k"],
    ("sweep", "nfe"): ["m", "grid"],
    ("sweep", "trajectory"): ["ell", "k", "n_grid"],
    ("sweep", "two-layer"): ["ell_grid", "k_list"],
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override its keys")
        p.add_argument(
            "--dump-config",
            action="store_true",
            default=argparse.SUPPRESS,
            help="print the resolved config as JSON and exit",
        )
        p.add_argument("--out", help="write CSV here instead of stdout")
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("--jobs", type=int, default=argparse.SUPPRESS)

    s = argparse.SUPPRESS

    run_p = sub.add_parser("run", help="one GOMEA run")
    run_p.add_argument("--problem", choices=sorted(_PROBLEM_NAMES), default=s)
    run_p.add_argument("--ell", type=int, default=s)
    run_p.add_argument("--k", type=int, default=s)
    run_p.add_argument("--fos", default=s, help="f_k or f_k,1")
    run_p.add_argument("--fos-file", default=s, help="FOS text file (1-based)")
    run_p.add_argument("--n", type=int, default=s)
    run_p.add_argument("--max-gens", type=int, default=s)
    run_p.add_argument("--trajectory-out", default=s)
    add_common(run_p)

    bis_p = sub.add_parser("bisect", help="minimal population via bisection")
    bis_p.add_argument("--problem", choices=sorted(_PROBLEM_NAMES), default=s)
    bis_p.add_argument("--ell", type=int, default=s)
    bis_p.add_argument("--k", type=int, default=s)
    bis_p.add_argument("--fos", default=s)
    bis_p.add_argument("--fos-file", default=s)
    bis_p.add_argument("--repeats", type=int, default=s)
    bis_p.add_argument("--n-floor", type=int, default=s)
    bis_p.add_argument("--resolution", type=float, default=s)
    bis_p.add_argument("--max-gens", type=int, default=s)
    add_common(bis_p)

    th_p = sub.add_parser("theory", help="closed-form model calculators")
    th_sub = th_p.add_subparsers(dest="subcommand", required=True)
    specs = {
        "pop-size": [("--chi", int), ("--k", int), ("--m", int), ("--alpha", float)],
        "conv-time": [("--chi", int), ("--k", int), ("--n", int), ("--m", int)],
        "nfe-bounds": [("--chi", int), ("--k", int), ("--m", int), ("--n", int)],
        "reverse-growth": [("--k", int)],
        "cross-competition": [("--s", float), ("--alpha", float), ("--p0", float)],
    }
    for name, flags in specs.items():
        p = th_sub.add_parser(name)
        for flag, typ in flags:
            p.add_argument(flag, type=typ, default=s)
        p.add_argument("--header", action="store_true", default=s)
        add_common(p)

    sw_p = sub.add_parser("sweep", help="theory-vs-simulation sweeps")
    sw_sub = sw_p.add_subparsers(dest="subcommand", required=True)

    p = sw_sub.add_parser("success-rate")
    p.add_argument("--ell", type=int, default=s)
    p.add_argument("--k", type=int, default=s)
    p.add_argument("--n-grid", default=s, help="comma-separated population sizes")
    p.add_argument("--repeats", type=int, default=s)
    add_common(p)

    p = sw_sub.add_parser("conv-time")
    p.add_argument("--grid-param", choices=["n", "ell"], default=s)
    p.add_argument("--grid", default=s, help="comma-separated grid values")
    p.add_argument("--k", type=int, default=s)
    p.add_argument("--n", type=int, default=s)
    p.add_argument("--ell", type=int, default=s)
    p.add_argument("--repeats", type=int, default=s)
    add_common(p)

    p = sw_sub.add_parser("nfe")
    p.add_argument("--problems", default=s, help="comma list of onemax,royal,trap")
    p.add_argument("--m", type=int, default=s)
    p.add_argument("--grid-param", choices=["k", "n"], default=s)
    p.add_argument("--grid", default=s)
    p.add_argument("--k", type=int, default=s)
    p.add_argument("--n", type=int, default=s)
    p.add_argument("--repeats", type=int, default=s)
    p.add_argument("--include-failures", action="store_true", default=s)
    add_common(p)

    p = sw_sub.add_parser("trajectory")
    p.add_argument("--ell", type=int, default=s)
    p.add_argument("--k", type=int, default=s)
    p.add_argument("--n-grid", default=s)
    p.add_argument("--repeats", type=int, default=s)
    add_common(p)

    p = sw_sub.add_parser("two-layer")
    p.add_argument("--ell-grid", default=s)
    p.add_argument("--k-list", default=s)
    p.add_argument("--repeats", type=int, default=s)
    p.add_argument("--alpha", type=float, default=s)
    add_common(p)

    return parser


def _resolve(ns: argparse.Namespace) -> dict:
    """Merge defaults, config file, and flags (flags win)."""
    provided = {k: v for k, v in vars(ns).items() if k not in ("command", "subcommand")}
    key = (ns.command,) if ns.command in ("run", "bisect") else (ns.command, ns.subcommand)
    cfg: dict = dict(_DEFAULTS.get(key, {}))
    config_path = provided.pop("config", None)
    if config_path:
        try:
            with open(config_path) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise CliError("config file must hold a JSON object")
        cfg.update({str(k).replace("-", "_"): v for k, v in file_cfg.items()})
    cfg.update(provided)
    if "seed" not in cfg or cfg["seed"] is None:
        cfg["seed"] = secrets.randbits(63)
        print(f"# seed {cfg['seed']}", file=sys.stderr)
    if "jobs" not in cfg or cfg["jobs"] is None:
        cfg["jobs"] = int(os.environ.get("OMLAB_JOBS", "1"))
    missing = [f for f in _REQUIRED.get(key, []) if cfg.get(f) is None]
    if missing:
        flags = ", ".join("--" + f.replace("_", "-") for f in missing)
        raise CliError(f"missing required parameter(s): {flags}")
    return cfg


def _emit_csv(rows: list[dict], columns: list[str], out: str | None, header=True):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] for c in columns])
    text = buf.getvalue()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_fos(cfg: dict, ell: int):
    if cfg.get("fos_file"):
        try:
            with open(cfg["fos_file"]) as fh:
                return parse_fos_text(fh.read(), ell)
        except OSError as exc:
            raise CliError(f"cannot read FOS file: {exc}") from exc
        except ValueError as exc:
            raise CliError(f"malformed FOS file: {exc}") from exc
    return resolve_fos(cfg.get("fos", "f_k"), ell, cfg.get("k"))


def _cmd_run(cfg: dict) -> int:
    kind = _PROBLEM_NAMES[cfg["problem"]]
    problem = make_problem(kind, cfg["ell"], cfg.get("k"))
    fos = _load_fos(cfg, cfg["ell"])
    rc = RunConfig(
        n=cfg["n"],
        seed=cfg["seed"],
        max_generations=cfg["max_gens"],
        record_trajectory=bool(cfg.get("trajectory_out")),
    )
    result = run_gomea(problem, fos, rc)
    if cfg.get("trajectory_out"):
        rows = [
            {"generation": pt.generation, "mask_index": pt.mask_index, "p_correct": pt.p_correct}
            for pt in result.trajectory
        ]
        _emit_csv(rows, ["generation", "mask_index", "p_correct"], cfg["trajectory_out"])
    row = {
        "success": int(result.success),
        "generations": result.generations,
        "nfe": result.nfe,
    }
    _emit_csv([row], ["success", "generations", "nfe"], cfg.get("out"))
    return 0


def _cmd_bisect(cfg: dict) -> int:
    kind = _PROBLEM_NAMES[cfg["problem"]]
    problem = make_problem(kind, cfg["ell"], cfg.get("k"))
    fos = _load_fos(cfg, cfg["ell"])
    bcfg = BisectionConfig(
        repeats=cfg["repeats"],
        n_floor=cfg["n_floor"],
        resolution=cfg["resolution"],
        base_seed=cfg["seed"],
        max_generations=cfg["max_gens"],
    )
    n_min = bisect_min_population(problem, fos, bcfg)
    _emit_csv(
        [{"problem": cfg["problem"], "ell": cfg["ell"], "n_min": n_min}],
        ["problem", "ell", "n_min"],
        cfg.get("out"),
    )
    return 0


def _cmd_theory(sub: str, cfg: dict) -> int:
    header = bool(cfg.get("header"))
    if sub == "pop-size":
        req = theory.required_population(cfg["chi"], cfg["k"], cfg["m"], cfg["alpha"])
        row = {
            "chi": cfg["chi"],
            "k": cfg["k"],
            "m": cfg["m"],
            "alpha": cfg["alpha"],
            "n": req.n,
            "n_ceil": req.n_ceil,
        }
    elif sub == "conv-time":
        bound = theory.conv_lower_bound_multi(cfg["n"], cfg["chi"], cfg["k"], cfg["m"])
        row = {
            "chi": cfg["chi"],
            "k": cfg["k"],
            "m": cfg["m"],
            "n": cfg["n"],
            "t_lower": bound.t_lower,
            "x1": bound.x1,
            "supply_starved": int(bound.supply_starved),
        }
    elif sub == "nfe-bounds":
        model = theory.nfe_bounds(cfg["n"], cfg["m"], cfg["chi"], cfg["k"])
        row = {
            "chi": cfg["chi"],
            "k": cfg["k"],
            "m": cfg["m"],
            "n": cfg["n"],
            "l_of_k": model.l_of_k,
            "u_of_k": model.u_of_k,
            "lower_total": model.lower_total,
            "upper_total": model.upper_total,
        }
    elif sub == "reverse-growth":
        rg = theory.reverse_growth(cfg["k"])
        row = {"k": rg.k, "p_gt": rg.p_gt, "p_eq": rg.p_eq, "p_lt": rg.p_lt, "p_rg": rg.p_rg}
    else:
        n_bound = theory.cross_competition_min_pop(cfg["s"], cfg["alpha"], cfg["p0"])
        row = {"s": cfg["s"], "alpha": cfg["alpha"], "p0": cfg["p0"], "n_bound": n_bound}
    _emit_csv([row], list(row.keys()), cfg.get("out"), header=header)
    return 0


def _cmd_sweep(sub: str, cfg: dict) -> int:
    jobs = cfg["jobs"]
    if sub == "success-rate":
        rows = sweep_success_rate(
            cfg["ell"], cfg["k"], _int_list(cfg["n_grid"]), cfg["repeats"], cfg["seed"], jobs
        )
        cols = SWEEP_COLUMNS["success_rate"]
    elif sub == "conv-time":
        rows = sweep_conv_time(
            cfg["grid_param"],
            _int_list(cfg["grid"]),
            k=cfg["k"],
            n=cfg.get("n"),
            ell=cfg.get("ell"),
            repeats=cfg["repeats"],
            base_seed=cfg["seed"],
            jobs=jobs,
        )
        cols = SWEEP_COLUMNS["conv_time"]
    elif sub == "nfe":
        problems = [_PROBLEM_NAMES[p] for p in _str_list(cfg["problems"])]
        key = {"k": "k_grid", "n": "n_grid"}[cfg["grid_param"]]
        rows = sweep_nfe(
            problems,
            cfg["m"],
            repeats=cfg["repeats"],
            base_seed=cfg["seed"],
            include_failures=bool(cfg.get("include_failures")),
            jobs=jobs,
            k=cfg.get("k"),
            n=cfg.get("n"),
            **{key: _int_list(cfg["grid"])},
        )
        cols = SWEEP_COLUMNS["nfe"]
    elif sub == "trajectory":
        rows = record_growth_trajectory(
            cfg["ell"], cfg["k"], _int_list(cfg["n_grid"]), cfg["repeats"], cfg["seed"], jobs
        )
        cols = SWEEP_COLUMNS["trajectory"]
    else:
        bcfg = BisectionConfig(repeats=cfg["repeats"], base_seed=cfg["seed"])
        _, rows = two_layer_ratio_fit(
            _int_list(cfg["ell_grid"]),
            _int_list(cfg["k_list"]),
            bcfg,
            alpha=cfg["alpha"],
            jobs=jobs,
        )
        cols = SWEEP_COLUMNS["two_layer"]
    _emit_csv(rows, cols, cfg.get("out"))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _resolve(ns)
    except CliError as exc:
        print(f"omlab: error: {exc}", file=sys.stderr)
        return 2
    if cfg.pop("dump_config", False):
        cfg.pop("out", None)
        print(json.dumps(cfg, indent=2, sort_keys=True))
        return 0
    try:
        if ns.command == "run":
            return _cmd_run(cfg)
        if ns.command == "bisect":
            return _cmd_bisect(cfg)
        if ns.command == "theory":
            return _cmd_theory(ns.subcommand, cfg)
        return _cmd_sweep(ns.subcommand, cfg)
    except CliError as exc:
        print(f"omlab: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"omlab: error: {exc}", file=sys.stderr)
        return 2
    except BisectionGiveUp as exc:
        print(f"omlab: bisection gave up: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
