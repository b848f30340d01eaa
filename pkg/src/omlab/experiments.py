"""Experiment harness: bisection population sizing, theory-vs-simulation
sweeps, growth trajectories, and the two-layer population-ratio fit.

Every run's seed derives from (base seed, experiment id, grid point, repeat)
via :func:`omlab.seeding.mix_seed`, so sweep outputs are deterministic and
independent of the worker count.  Repeats and grid points can execute on a
process pool; aggregation uses order-preserving maps over sums and counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .engine import RunConfig, run_gomea
from .fos import Fos, concat_fos, make_homogeneous_fos
from .problems import Problem, make_problem
from .seeding import EXPERIMENT_IDS, mix_seed
from .theory import (
    conv_lower_bound_multi,
    conv_lower_bound_single,
    nfe_bounds,
    required_population,
    success_probability_uniform,
)

__all__ = [
    "SweepSpec",
    "BisectionConfig",
    "BisectionGiveUp",
    "RatioFit",
    "run_sweep",
    "sweep_success_rate",
    "sweep_conv_time",
    "sweep_nfe",
    "record_growth_trajectory",
    "minimal_population",
    "bisect_min_population",
    "two_layer_ratio_fit",
    "SWEEP_COLUMNS",
]

SWEEP_COLUMNS = {
    "success_rate": ["n", "repeats", "success_rate", "theory_eq4"],
    "conv_time": [
        "grid_param",
        "grid_value",
        "n",
        "repeats",
        "mean_generations",
        "stderr",
        "theory_tL",
    ],
    "nfe": [
        "problem",
        "k",
        "m",
        "n",
        "repeats",
        "mean_nfe",
        "stderr",
        "bound_lower",
        "bound_upper",
    ],
    "trajectory": ["n", "generation", "mean_p"],
    "two_layer": ["k", "ell", "n_min_emp", "n_base_theory", "c_k", "rel_err"],
}


def _build_fos(fos_name: str, ell: int, k: int) -> Fos:
    if fos_name == "f_k":
        return make_homogeneous_fos(ell, k)
    if fos_name == "f_k,1":
        return concat_fos([make_homogeneous_fos(ell, k), make_homogeneous_fos(ell, 1)])
    raise ValueError(f"unknown FOS name {fos_name!r}")


def _run_task(task):
    """One GOMEA run from a picklable parameter tuple (worker entry point)."""
    kind, ell, k_struct, fos_name, k_fos, n, seed, record_traj, max_gens = task
    problem = make_problem(kind, ell, k_struct)
    fos = _build_fos(fos_name, ell, k_fos)
    cfg = RunConfig(n=n, seed=seed, max_generations=max_gens, record_trajectory=record_traj)
    result = run_gomea(problem, fos, cfg)
    traj = None
    if record_traj:
        traj = [(pt.generation, pt.mask_index, pt.p_correct) for pt in result.trajectory]
    return result.success, result.generations, result.nfe, traj


def _map_tasks(tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=chunk))


def _stderr(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def sweep_success_rate(
    ell: int,
    k: int,
    n_grid: Sequence[int],
    repeats: int,
    base_seed: int,
    jobs: int = 1,
    max_generations: int = 512,
) -> list[dict]:
    """Empirical success fraction of onemax with structure-matching masks
    against the initial-supply prediction, per population size."""
    exp_id = EXPERIMENT_IDS["success_rate"]
    m = ell // k
    rows = []
    for n in n_grid:
        tasks = [
            ("onemax", ell, None, "f_k", k, n, mix_seed(base_seed, exp_id, n, r), False, max_generations)
            for r in range(repeats)
        ]
        results = _map_tasks(tasks, jobs)
        successes = sum(1 for s, *_ in results if s)
        rows.append(
            {
                "n": n,
                "repeats": repeats,
                "success_rate": successes / repeats,
                "theory_eq4": success_probability_uniform(2, k, m, n),
            }
        )
    return rows


def sweep_conv_time(
    grid_param: str,
    grid_values: Sequence[int],
    *,
    k: int,
    n: int | None = None,
    ell: int | None = None,
    repeats: int,
    base_seed: int,
    jobs: int = 1,
    max_generations: int = 512,
) -> list[dict]:
    """Mean generations-to-convergence on onemax with size-k masks, plus the
    matching theoretical lower bound.  Failed runs are excluded (convergence
    time is undefined for them)."""
    if grid_param not in ("n", "ell"):
        raise ValueError("grid_param must be 'n' or 'ell'")
    exp_id = EXPERIMENT_IDS["conv_time"]
    rows = []
    for value in grid_values:
        n_v = value if grid_param == "n" else n
        ell_v = value if grid_param == "ell" else ell
        if n_v is None or ell_v is None:
            raise ValueError("both n and ell must be resolved per grid point")
        m = ell_v // k
        tasks = [
            ("onemax", ell_v, None, "f_k", k, n_v, mix_seed(base_seed, exp_id, value, r), False, max_generations)
            for r in range(repeats)
        ]
        results = _map_tasks(tasks, jobs)
        gens = [g for s, g, *_ in results if s]
        if m == 1:
            t_l = conv_lower_bound_single(n_v, 2, k)
        else:
            t_l = conv_lower_bound_multi(n_v, 2, k, m).t_lower
        rows.append(
            {
                "grid_param": grid_param,
                "grid_value": value,
                "n": n_v,
                "repeats": len(gens),
                "mean_generations": float(np.mean(gens)) if gens else math.nan,
                "stderr": _stderr(gens),
                "theory_tL": t_l,
            }
        )
    return rows


def sweep_nfe(
    problems: Sequence[str],
    m: int,
    *,
    k_grid: Sequence[int] | None = None,
    n_grid: Sequence[int] | None = None,
    k: int | None = None,
    n: int | None = None,
    repeats: int,
    base_seed: int,
    include_failures: bool = False,
    jobs: int = 1,
    max_generations: int = 512,
) -> list[dict]:
    """Mean measured evaluation counts per problem per grid point, with the
    theoretical lower/upper bounds.  Sweep either mask size (fixed n) or
    population size (fixed k); trap is omitted at k=1."""
    if (k_grid is None) == (n_grid is None):
        raise ValueError("provide exactly one of k_grid or n_grid")
    exp_id = EXPERIMENT_IDS["nfe"]
    grid = [("k", kv) for kv in k_grid] if k_grid else [("n", nv) for nv in n_grid]
    rows = []
    for param, value in grid:
        k_v = value if param == "k" else k
        n_v = value if param == "n" else n
        ell = k_v * m
        for kind in problems:
            if kind == "trap" and k_v == 1:
                continue
            k_struct = None if kind == "onemax" else k_v
            tasks = [
                (kind, ell, k_struct, "f_k", k_v, n_v, mix_seed(base_seed, exp_id, value, r), False, max_generations)
                for r in range(repeats)
            ]
            results = _map_tasks(tasks, jobs)
            nfes = [nfe for s, g, nfe, _ in results if include_failures or s]
            bounds = nfe_bounds(n_v, m, 2, k_v)
            rows.append(
                {
                    "problem": kind,
                    "k": k_v,
                    "m": m,
                    "n": n_v,
                    "repeats": len(nfes),
                    "mean_nfe": float(np.mean(nfes)) if nfes else math.nan,
                    "stderr": _stderr(nfes),
                    "bound_lower": bounds.lower_total,
                    "bound_upper": bounds.upper_total,
                }
            )
    return rows


def record_growth_trajectory(
    ell: int,
    k: int,
    n_grid: Sequence[int],
    repeats: int,
    base_seed: int,
    jobs: int = 1,
    max_generations: int = 512,
) -> list[dict]:
    """Per-generation mean correct-set proportion (across masks and repeats)
    on onemax with size-k masks, for each population size.  Runs converging
    early are padded with their final value so generation means stay
    comparable."""
    exp_id = EXPERIMENT_IDS["trajectory"]
    rows = []
    for n in n_grid:
        tasks = [
            ("onemax", ell, None, "f_k", k, n, mix_seed(base_seed, exp_id, n, r), True, max_generations)
            for r in range(repeats)
        ]
        results = _map_tasks(tasks, jobs)
        per_run: list[list[float]] = []
        for _, _, _, traj in results:
            by_gen: dict[int, list[float]] = {}
            for gen, _, p in traj:
                by_gen.setdefault(gen, []).append(p)
            per_run.append([float(np.mean(by_gen[g])) for g in sorted(by_gen)])
        horizon = max(len(series) for series in per_run)
        for series in per_run:
            series.extend([series[-1]] * (horizon - len(series)))
        means = np.mean(per_run, axis=0)
        for gen, p in enumerate(means):
            rows.append({"n": n, "generation": gen, "mean_p": float(p)})
    return rows


@dataclass(frozen=True)
class BisectionConfig:
    """Doubling-then-binary-search population sizing.

    The success rule is "all repeats succeed".  Probes at a given n reuse
    seeds derived from (base_seed, n, repeat), so repeated invocations are
    identical."""

    repeats: int = 10
    n_floor: int = 1
    growth_factor: int = 2
    resolution: float = 0.05
    hard_cap: int = 2**20
    base_seed: int = 0
    max_generations: int = 512

    def __post_init__(self):
        if self.repeats < 1 or self.n_floor < 1:
            raise ValueError("repeats and n_floor must be >= 1")
        if self.growth_factor < 2:
            raise ValueError("growth_factor must be >= 2")


class BisectionGiveUp(RuntimeError):
    """Raised when the doubling phase exceeds the hard cap."""


def minimal_population(
    run_success: Callable[[int, int], bool], cfg: BisectionConfig
) -> int:
    """Smallest probed population size at which all repeats succeed.

    ``run_success(n, seed)`` performs one run.  Probes short-circuit on the
    first failing repeat; the verdict is unchanged by the early exit."""

    def probe(n: int) -> bool:
        return all(
            run_success(n, mix_seed(cfg.base_seed, EXPERIMENT_IDS["bisect"], n, r))
            for r in range(cfg.repeats)
        )

    n = cfg.n_floor
    if probe(n):
        return n
    low = n
    while True:
        n *= cfg.growth_factor
        if n > cfg.hard_cap:
            raise BisectionGiveUp(
                f"no success up to hard cap {cfg.hard_cap} (last failure at {low})"
            )
        if probe(n):
            break
        low = n
    high = n
    while high - low > 1 and high / low > 1.0 + cfg.resolution:
        mid = (low + high) // 2
        if probe(mid):
            high = mid
        else:
            low = mid
    return high


def bisect_min_population(problem: Problem, fos: Fos, cfg: BisectionConfig) -> int:
    """Minimal population for which GOMEA solves the problem in all repeats."""

    def run_success(n: int, seed: int) -> bool:
        rc = RunConfig(n=n, seed=seed, max_generations=cfg.max_generations)
        return run_gomea(problem, fos, rc).success

    return minimal_population(run_success, cfg)


@dataclass(frozen=True)
class RatioFit:
    """Fitted constant multiple relating two-layer required populations to
    the single-bit theory curve, with the worst relative error on the grid."""

    k: int
    c_k: float
    max_rel_err: float


def _two_layer_point(args):
    k, ell, cfg, samples = args
    problem = make_problem("onemax", ell)
    if k == 1:
        fos = make_homogeneous_fos(ell, 1)
    else:
        fos = concat_fos([make_homogeneous_fos(ell, k), make_homogeneous_fos(ell, 1)])
    # n_min is a noisy estimator at desk scale; average independent bisections
    # (each with its own derived seed) when samples > 1.
    estimates = []
    for s in range(samples):
        scfg = BisectionConfig(
            repeats=cfg.repeats,
            n_floor=cfg.n_floor,
            growth_factor=cfg.growth_factor,
            resolution=cfg.resolution,
            hard_cap=cfg.hard_cap,
            base_seed=mix_seed(cfg.base_seed, EXPERIMENT_IDS["two_layer"], k, ell, s),
            max_generations=cfg.max_generations,
        )
        estimates.append(bisect_min_population(problem, fos, scfg))
    return k, ell, float(np.mean(estimates))


def two_layer_ratio_fit(
    ell_grid: Sequence[int],
    k_list: Sequence[int],
    cfg: BisectionConfig,
    alpha: float = 0.05,
    jobs: int = 1,
    samples: int = 1,
) -> tuple[list[RatioFit], list[dict]]:
    """Bisect the minimal population for each two-layer FOS over the length
    grid and fit a constant multiple of the single-bit supply prediction.

    The fit is least squares through the origin against the theoretical base
    curve: c_k = sum(n_emp * n_base) / sum(n_base^2).  ``samples`` averages
    that many independent bisections per grid point.
    """
    for k in k_list:
        for ell in ell_grid:
            if ell % k != 0:
                raise ValueError(f"length {ell} is not divisible by mask size {k}")
    points = [(k, ell, cfg, samples) for k in k_list for ell in ell_grid]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_two_layer_point, points))
    else:
        results = [_two_layer_point(p) for p in points]
    by_k: dict[int, list[tuple[int, int]]] = {}
    for k, ell, n_min in results:
        by_k.setdefault(k, []).append((ell, n_min))
    fits = []
    rows = []
    for k in k_list:
        pairs = sorted(by_k[k])
        base = np.array([required_population(2, 1, ell, alpha).n for ell, _ in pairs])
        emp = np.array([float(n_min) for _, n_min in pairs])
        c_k = float(np.dot(emp, base) / np.dot(base, base))
        rel_errs = np.abs(emp - c_k * base) / (c_k * base)
        fits.append(RatioFit(k, c_k, float(rel_errs.max())))
        for (ell, n_min), b, err in zip(pairs, base, rel_errs):
            rows.append(
                {
                    "k": k,
                    "ell": ell,
                    "n_min_emp": n_min,
                    "n_base_theory": float(b),
                    "c_k": c_k,
                    "rel_err": float(err),
                }
            )
    return fits, rows


@dataclass
class SweepSpec:
    """Declarative sweep description; `run_sweep` dispatches on `kind`."""

    kind: str  # success_rate | conv_time | nfe | trajectory | two_layer
    repeats: int
    base_seed: int
    ell: int | None = None
    k: int | None = None
    m: int | None = None
    n: int | None = None
    grid_param: str | None = None
    grid: list[int] = field(default_factory=list)
    problems: list[str] = field(default_factory=lambda: ["onemax"])
    include_failures: bool = False
    jobs: int = 1
    alpha: float = 0.05
    k_list: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.kind not in SWEEP_COLUMNS:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        if self.kind != "two_layer" and not self.grid:
            raise ValueError("sweep grid must be non-empty")


def run_sweep(spec: SweepSpec) -> list[dict]:
    """Execute a declarative sweep and return its CSV rows."""
    if spec.kind == "success_rate":
        return sweep_success_rate(
            spec.ell, spec.k, spec.grid, spec.repeats, spec.base_seed, spec.jobs
        )
    if spec.kind == "conv_time":
        return sweep_conv_time(
            spec.grid_param or "n",
            spec.grid,
            k=spec.k,
            n=spec.n,
            ell=spec.ell,
            repeats=spec.repeats,
            base_seed=spec.base_seed,
            jobs=spec.jobs,
        )
    if spec.kind == "nfe":
        key = {"k": "k_grid", "n": "n_grid"}[spec.grid_param or "k"]
        return sweep_nfe(
            spec.problems,
            spec.m,
            repeats=spec.repeats,
            base_seed=spec.base_seed,
            include_failures=spec.include_failures,
            jobs=spec.jobs,
            k=spec.k,
            n=spec.n,
            **{key: spec.grid},
        )
    if spec.kind == "trajectory":
        return record_growth_trajectory(
            spec.ell, spec.k, spec.grid, spec.repeats, spec.base_seed, spec.jobs
        )
    cfg = BisectionConfig(repeats=spec.repeats, base_seed=spec.base_seed)
    _, rows = two_layer_ratio_fit(
        spec.grid, spec.k_list, cfg, alpha=spec.alpha, jobs=spec.jobs
    )
    return rows
