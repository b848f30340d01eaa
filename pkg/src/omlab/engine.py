"""Gene-pool optimal mixing and the GOMEA generational loop.

The generational loop freezes the parent population, produces all n
offspring by mask-wise mixing, then replaces the population wholesale.
Per mask step, a uniformly random donor's fragment overwrites the working
buffer; the change is adopted iff fitness does not decrease.  Evaluation is
skipped (and not counted) when the donor fragment equals the offspring's
current fragment, which is exactly the quantity the evaluation-count model
accounts for.

For speed, one generation is processed mask-by-mask across the whole
population (:func:`mix_generation`); fitness comparisons are restricted to
the structure blocks the mask touches, which is equivalent to comparing
full evaluations because the problems are block-separable.  The per-receiver
reference path is :func:`gom`, which uses full evaluations; the two agree
given the same donor draws.

All donor randomness for generation t of a run comes from a stream derived
deterministically from (run seed, t), so results are bit-reproducible and
independent of any scheduling order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fos import Fos, Mask
from .problems import (
    EvalLedger,
    Problem,
    evaluate,
    royal_block_values,
    trap_block_values,
)

__all__ = [
    "RunConfig",
    "RunResult",
    "TrajectoryPoint",
    "gom",
    "mix_generation",
    "run_gomea",
    "has_converged",
    "measure_correct_proportion",
    "init_population",
    "generation_donors",
]

# Sub-stream tags for deriving independent RNG streams from one run seed.
_INIT_STREAM = 0x1317
_GEN_STREAM = 0x6047


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one GOMEA run."""

    n: int
    seed: int
    max_generations: int = 512
    record_trajectory: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"population size must be >= 1, got {self.n}")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")


@dataclass(frozen=True)
class TrajectoryPoint:
    generation: int
    mask_index: int
    p_correct: float


@dataclass
class RunResult:
    """Outcome of one run: success flag, generations at halt, evaluation
    ledger, optional growth trajectory, and the unanimous chromosome if the
    population converged."""

    success: bool
    generations: int
    ledger: EvalLedger
    halt_reason: str  # "converged" | "max_generations"
    converged_to: np.ndarray | None = None
    trajectory: list[TrajectoryPoint] | None = None

    @property
    def nfe(self) -> int:
        return self.ledger.total


def has_converged(pop: np.ndarray) -> bool:
    """True iff all population members are identical."""
    return bool(np.all(pop == pop[0]))


def measure_correct_proportion(
    pop: np.ndarray, mask: Mask, optimal_fragment: np.ndarray
) -> float:
    """Fraction of members whose mask-covered alleles equal the optimal
    fragment."""
    idx = mask.as_array()
    frag = np.asarray(optimal_fragment)
    if frag.shape != (len(idx),):
        raise ValueError("fragment length does not match mask size")
    return float(np.mean(np.all(pop[:, idx] == frag, axis=1)))


def init_population(problem: Problem, n: int, seed: int) -> np.ndarray:
    """Uniform-random initial population, (n, ell) uint8."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, _INIT_STREAM]))
    return rng.integers(0, problem.chi, size=(n, problem.ell), dtype=np.uint8)


def generation_donors(seed: int, generation: int, n: int, fos_len: int) -> np.ndarray:
    """Donor index matrix for one generation: row i holds receiver i's draws
    in mask order.  Derived from (run seed, generation) only."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, _GEN_STREAM, generation]))
    return rng.integers(0, n, size=(n, fos_len))


class _MixingPlan:
    """Precomputed index machinery shared by all generations of a run.

    For each FOS mask: its column array, the problem blocks it intersects,
    the concatenated affected columns, the positions of the mask's columns
    inside that concatenation, and per-block slices.
    """

    def __init__(self, problem: Problem, fos: Fos):
        self.problem = problem
        self.onemax = problem.kind == "onemax"
        self.cols: list[np.ndarray] = [m.as_array() for m in fos.masks]
        if self.onemax:
            return
        blocks = [b.as_array() for b in problem.structure.masks]
        block_sets = [set(b.tolist()) for b in blocks]
        self.aff_cols: list[np.ndarray] = []
        self.mask_pos: list[np.ndarray] = []
        self.block_slices: list[list[tuple[int, int, int]]] = []  # (start, end, size)
        for cols in self.cols:
            cset = set(cols.tolist())
            touched = [bi for bi, bs in enumerate(block_sets) if bs & cset]
            concat = np.concatenate([blocks[bi] for bi in touched])
            pos_of = {c: p for p, c in enumerate(concat.tolist())}
            self.aff_cols.append(concat)
            self.mask_pos.append(np.asarray([pos_of[c] for c in cols.tolist()], dtype=np.intp))
            slices = []
            start = 0
            for bi in touched:
                size = len(blocks[bi])
                slices.append((start, start + size, size))
                start += size
            self.block_slices.append(slices)

    def _block_sums(self, mat: np.ndarray, mask_index: int) -> np.ndarray:
        """Total fitness contribution of the affected blocks, rows of mat
        being the affected-column values of several chromosomes."""
        kind = self.problem.kind
        total = np.zeros(mat.shape[0])
        for start, end, size in self.block_slices[mask_index]:
            u = mat[:, start:end].sum(axis=1)
            if kind == "royal_road":
                total += royal_block_values(u, size)
            else:
                total += trap_block_values(u, size)
        return total


def mix_generation(
    problem: Problem,
    fos: Fos,
    parents: np.ndarray,
    donors: np.ndarray,
    ledger: EvalLedger,
    plan: _MixingPlan | None = None,
) -> np.ndarray:
    """Produce the full offspring population from frozen parents.

    ``donors[i, j]`` is the donor index for receiver i at mask j.  Returns
    the new population; increments ledger.om_evals once per mask step whose
    donor fragment differed from the offspring's current fragment.
    """
    if plan is None:
        plan = _MixingPlan(problem, fos)
    offspring = parents.copy()
    for j, cols in enumerate(plan.cols):
        frag_d = parents[donors[:, j][:, None], cols]
        frag_o = offspring[:, cols]
        differs = np.any(frag_d != frag_o, axis=1)
        nd = int(np.count_nonzero(differs))
        if nd == 0:
            continue
        ledger.om_evals += nd
        rows = np.nonzero(differs)[0]
        fd = frag_d[rows]
        if plan.onemax:
            new = fd.sum(axis=1, dtype=np.int64)
            old = frag_o[rows].sum(axis=1, dtype=np.int64)
        else:
            aff = plan.aff_cols[j]
            old_aff = offspring[rows[:, None], aff]
            new_aff = old_aff.copy()
            new_aff[:, plan.mask_pos[j]] = fd
            new = plan._block_sums(new_aff, j)
            old = plan._block_sums(old_aff, j)
        accept = new >= old
        acc_rows = rows[accept]
        if acc_rows.size:
            offspring[acc_rows[:, None], cols] = fd[accept]
    return offspring


def gom(
    problem: Problem,
    receiver: np.ndarray,
    pop: np.ndarray,
    fos: Fos,
    rng: np.random.Generator,
    ledger: EvalLedger,
    receiver_fitness: float | None = None,
) -> np.ndarray:
    """Per-receiver gene-pool optimal mixing (the reference path).

    Iterates the FOS masks in listed order; for each, a uniformly random
    donor (possibly the receiver's own parent) overwrites the buffer's mask
    fragment.  If the fragment differs from the offspring's, the buffer is
    evaluated and the change adopted iff fitness does not decrease.
    """
    receiver = np.asarray(receiver)
    offspring = receiver.copy()
    fitness = (
        evaluate(problem, receiver) if receiver_fitness is None else receiver_fitness
    )
    for mask in fos:
        idx = mask.as_array()
        donor = pop[rng.integers(0, len(pop))]
        frag_d = donor[idx]
        if np.array_equal(frag_d, offspring[idx]):
            continue
        buffer = offspring.copy()
        buffer[idx] = frag_d
        f_buf = evaluate(problem, buffer, ledger, phase="om")
        if f_buf >= fitness:
            offspring = buffer
            fitness = f_buf
    return offspring


def run_gomea(problem: Problem, fos: Fos, cfg: RunConfig) -> RunResult:
    """Run GOMEA until the population is unanimous or the generation cap.

    Success means the final best chromosome is the (unique, all-ones) global
    optimum.  Initialization costs n evaluations; the mixing evaluations are
    counted per differing-fragment mask step.
    """
    ledger = EvalLedger()
    pop = init_population(problem, cfg.n, cfg.seed)
    ledger.init_evals += cfg.n

    plan = _MixingPlan(problem, fos)
    optimal_frags = [np.ones(len(m), dtype=np.uint8) for m in fos.masks]
    trajectory: list[TrajectoryPoint] | None = [] if cfg.record_trajectory else None

    def record(t: int):
        if trajectory is None:
            return
        for j, mask in enumerate(fos.masks):
            p = measure_correct_proportion(pop, mask, optimal_frags[j])
            trajectory.append(TrajectoryPoint(t, j, p))

    t = 0
    record(t)
    converged = has_converged(pop)
    while not converged and t < cfg.max_generations:
        donors = generation_donors(cfg.seed, t, cfg.n, len(fos))
        pop = mix_generation(problem, fos, pop, donors, ledger, plan)
        t += 1
        record(t)
        converged = has_converged(pop)

    success = bool(np.any(np.all(pop == 1, axis=1)))
    return RunResult(
        success=success,
        generations=t,
        ledger=ledger,
        halt_reason="converged" if converged else "max_generations",
        converged_to=pop[0].copy() if converged else None,
        trajectory=trajectory,
    )
