"""Benchmark fitness functions with evaluation counting.

Chromosomes are fixed-length numpy integer vectors with alleles in
[0, chi).  The three benchmarks (onemax, Royal Road, deceptive trap) are
binary; the analytical layer in :mod:`omlab.theory` stays chi-parameterized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fos import Fos, make_homogeneous_fos, validate_fos

__all__ = [
    "EvalLedger",
    "Problem",
    "make_problem",
    "eval_onemax",
    "eval_royal_road",
    "eval_trap",
    "evaluate",
    "royal_block_values",
    "trap_block_values",
]

PROBLEM_KINDS = ("onemax", "royal_road", "trap")


@dataclass
class EvalLedger:
    """Counts fitness evaluations split into initialization and mixing."""

    init_evals: int = 0
    om_evals: int = 0

    @property
    def total(self) -> int:
        return self.init_evals + self.om_evals


@dataclass(frozen=True)
class Problem:
    """A benchmark instance: kind, length, alphabet, and block structure.

    ``structure`` is None for onemax (fully separable per bit) and a FOS of
    disjoint blocks for royal_road / trap.
    """

    kind: str
    ell: int
    chi: int = 2
    structure: Fos | None = None

    def __post_init__(self):
        if self.kind not in PROBLEM_KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.kind != "onemax":
            if self.structure is None:
                raise ValueError(f"{self.kind} needs a block structure FOS")
            if self.structure.ell != self.ell:
                raise ValueError("structure length does not match problem length")
            report = validate_fos(self.structure)
            if not report.ok:
                raise ValueError(f"invalid structure: {report.message()}")
            sizes = self.structure.mask_sizes()
            if sum(sizes) != self.ell:
                raise ValueError("structure blocks must be disjoint")
            if self.kind == "trap" and min(sizes) < 2:
                raise ValueError("trap blocks must have size >= 2")

    @property
    def optimum(self) -> float:
        """Fitness of the unique global optimum (the all-ones chromosome)."""
        if self.kind == "onemax":
            return float(self.ell)
        return float(len(self.structure.masks))


def make_problem(kind: str, ell: int, k: int | None = None) -> Problem:
    """Convenience factory; builds a homogeneous block structure for
    royal_road / trap from block size k."""
    if kind == "onemax":
        return Problem("onemax", ell)
    if k is None:
        raise ValueError(f"{kind} needs a block size k")
    return Problem(kind, ell, structure=make_homogeneous_fos(ell, k))


def eval_onemax(x: np.ndarray) -> float:
    """Number of ones in the chromosome."""
    return float(np.count_nonzero(np.asarray(x) == 1))


def royal_block_values(u: np.ndarray, block_size: int) -> np.ndarray:
    """Per-block Royal Road value from the ones-count u: 1 iff the block is
    complete."""
    return (np.asarray(u) == block_size).astype(np.float64)


def trap_block_values(u: np.ndarray, block_size: int) -> np.ndarray:
    """Per-block deceptive trap value from the ones-count u."""
    if block_size < 2:
        raise ValueError("trap blocks must have size >= 2")
    u = np.asarray(u)
    deceptive = 0.9 * (block_size - 1 - u) / (block_size - 1)
    return np.where(u == block_size, 1.0, deceptive)


def eval_royal_road(x: np.ndarray, structure: Fos) -> float:
    """Number of structure blocks whose covered bits are all ones."""
    x = np.asarray(x)
    total = 0.0
    for mask in structure:
        idx = mask.as_array()
        total += float(np.all(x[idx] == 1))
    return total


def eval_trap(x: np.ndarray, structure: Fos) -> float:
    """Sum of per-block deceptive trap values over the structure blocks."""
    x = np.asarray(x)
    total = 0.0
    for mask in structure:
        idx = mask.as_array()
        u = int(np.count_nonzero(x[idx] == 1))
        total += float(trap_block_values(np.asarray(u), len(mask)))
    return total


def evaluate(
    p: Problem,
    x: np.ndarray,
    ledger: EvalLedger | None = None,
    phase: str = "om",
) -> float:
    """Dispatch to the kind-specific evaluator and count the evaluation."""
    x = np.asarray(x)
    if x.shape != (p.ell,):
        raise ValueError(f"chromosome length {x.shape} does not match ell={p.ell}")
    if p.kind == "onemax":
        fit = eval_onemax(x)
    elif p.kind == "royal_road":
        fit = eval_royal_road(x, p.structure)
    else:
        fit = eval_trap(x, p.structure)
    if ledger is not None:
        if phase == "init":
            ledger.init_evals += 1
        elif phase == "om":
            ledger.om_evals += 1
        else:
            raise ValueError(f"unknown evaluation phase {phase!r}")
    return fit
