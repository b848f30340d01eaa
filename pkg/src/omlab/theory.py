"""Closed-form models: supply-based sizing, growth dynamics, convergence-time
lower bounds, evaluation-count bounds, reverse-growth probabilities, and the
cross-competition population bound.

All functions are pure and chi-parameterized even though the shipped
benchmarks are binary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import gammaln

__all__ = [
    "ConvergenceBound",
    "NfeModel",
    "ReverseGrowth",
    "RequiredPopulation",
    "goldberg_supply_size",
    "success_probability",
    "success_probability_uniform",
    "required_population",
    "growth_recurrence_step",
    "growth_closed_form",
    "conv_lower_bound_single",
    "expected_min_binomial",
    "conv_lower_bound_multi",
    "nfe_L",
    "nfe_U",
    "nfe_bounds",
    "nfe_bounds_hetero",
    "reverse_growth",
    "cross_competition_min_pop",
]


def goldberg_supply_size(chi: int, k: int, m: int) -> float:
    """Classical supply-model population size: chi^k (k ln chi + ln m)."""
    if chi < 2 or k < 1 or m < 1:
        raise ValueError("need chi >= 2, k >= 1, m >= 1")
    return chi**k * (k * math.log(chi) + math.log(m))


def success_probability(mask_sizes: Sequence[int], chi: int, n: int) -> float:
    """Probability that every mask has at least one correct set after uniform
    random initialization of n chromosomes."""
    if any(k < 1 for k in mask_sizes):
        raise ValueError("mask sizes must be >= 1")
    p = 1.0
    for k in mask_sizes:
        p *= 1.0 - (1.0 - chi ** (-k)) ** n
    return p


def success_probability_uniform(chi: int, k: int, m: int, n: int) -> float:
    """Equal-sized-mask special case: (1 - (1 - chi^-k)^n)^m."""
    return (1.0 - (1.0 - chi ** (-k)) ** n) ** m


@dataclass(frozen=True)
class RequiredPopulation:
    n: float
    n_ceil: int


def required_population(chi: int, k: int, m: int, alpha: float) -> RequiredPopulation:
    """Population size at which the success probability reaches 1 - alpha,
    for m equal-sized masks.  Reports the real-valued root and its ceiling."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if chi < 2 or k < 1 or m < 1:
        raise ValueError("need chi >= 2, k >= 1, m >= 1")
    n = math.log(1.0 - (1.0 - alpha) ** (1.0 / m)) / math.log(1.0 - chi ** (-k))
    return RequiredPopulation(n, math.ceil(n))


def growth_recurrence_step(p: float) -> float:
    """One generation of expected correct-set growth: p + p(1-p)."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"proportion must be in [0, 1], got {p}")
    return p + p * (1.0 - p)


def growth_closed_form(chi: int, k: int, t: float) -> float:
    """Correct-set proportion after t generations (continuous extension):
    1 - (1 - chi^-k)^(2^t), starting from p0 = chi^-k."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return 1.0 - (1.0 - chi ** (-k)) ** (2.0**t)


def conv_lower_bound_single(n: int, chi: int, k: int) -> float:
    """Convergence-time lower bound for a single mask of size k."""
    if n < 2:
        raise ValueError("the bound needs n >= 2")
    return math.log2(math.log(1.0 / n) / math.log(1.0 - chi ** (-k)))


def expected_min_binomial(n: int, p: float, m: int) -> float:
    """Exact expectation of the minimum of m iid Binomial(n, p) variables.

    Uses E[min] = sum_{x=0}^{n-1} S(x)^m with S(x) = P(X > x); the pmf is
    computed in log space and the survival function accumulated from the
    upper tail for numerical stability.
    """
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must be in (0, 1), got {p}")
    x = np.arange(n + 1)
    logpmf = (
        gammaln(n + 1)
        - gammaln(x + 1)
        - gammaln(n - x + 1)
        + x * math.log(p)
        + (n - x) * math.log1p(-p)
    )
    pmf = np.exp(logpmf)
    # S(x) = sum_{y > x} pmf(y), accumulated smallest-terms-first.
    tail = pmf[::-1].cumsum()[::-1]
    survival = np.clip(np.concatenate([tail[1:], [0.0]]), 0.0, 1.0)
    return float(np.sum(survival[:n] ** m))


@dataclass(frozen=True)
class ConvergenceBound:
    """Multi-mask convergence-time lower bound with the expected minimum
    initial supply.  supply_starved flags x1 < 1, where the bound's premise
    (supply exists) fails."""

    t_lower: float
    x1: float
    supply_starved: bool


def conv_lower_bound_multi(n: int, chi: int, k: int, m: int) -> ConvergenceBound:
    """Convergence-time lower bound for m disjoint size-k masks, driven by
    the mask with the least initial supply."""
    if n < 2:
        raise ValueError("the bound needs n >= 2")
    if m < 1:
        raise ValueError("need m >= 1")
    if m == 1:
        x1 = n * chi ** (-k)
    else:
        x1 = expected_min_binomial(n, chi ** (-k), m)
    starved = x1 < 1.0
    if x1 <= 0.0:
        return ConvergenceBound(math.inf, x1, True)
    t_lower = math.log2(math.log(1.0 / n) / math.log1p(-x1 / n))
    return ConvergenceBound(t_lower, x1, starved)


def nfe_L(chi: int, k: int) -> float:
    """Per-mask lower bound on mixing evaluations per capita: 2(1 - chi^-k)."""
    if k < 1:
        raise ValueError("need k >= 1")
    return 2.0 * (1.0 - chi ** (-k))


def nfe_U(chi: int, k: int, tol: float = 1e-12, max_terms: int = 64) -> float:
    """Per-mask upper bound on mixing evaluations per capita.

    Sums 1 - p_t^2 - (1-p_t)^2/(chi^k - 1) over generations until the term
    drops below tol; the proportion q_t squares each generation, so the
    series collapses double-exponentially.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    states = chi**k
    q = 1.0 - 1.0 / states
    total = 0.0
    for _ in range(max_terms):
        p = 1.0 - q
        term = 1.0 - p * p - q * q / (states - 1)
        if term < tol:
            break
        total += term
        q = q * q
    return total


@dataclass(frozen=True)
class NfeModel:
    u_of_k: float
    l_of_k: float
    lower_total: float
    upper_total: float


def nfe_bounds(n: int, m: int, chi: int, k: int) -> NfeModel:
    """Total-evaluation bounds for m equal-sized masks:
    n(1 + m L(k)) <= nfe <= n(1 + m U(k))."""
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    u = nfe_U(chi, k)
    l = nfe_L(chi, k)
    return NfeModel(u, l, n * (1.0 + m * l), n * (1.0 + m * u))


def nfe_bounds_hetero(n: int, mask_sizes: Sequence[int], chi: int) -> tuple[float, float]:
    """Heterogeneous-mask variant: bounds sum per-mask U/L values."""
    lower = n * (1.0 + sum(nfe_L(chi, k) for k in mask_sizes))
    upper = n * (1.0 + sum(nfe_U(chi, k) for k in mask_sizes))
    return lower, upper


@dataclass(frozen=True)
class ReverseGrowth:
    """Exact comparison of X1 = 1 + X0 against an independent copy of
    X0 ~ Binomial(k-1, 1/2); p_rg = P(X1 <= X0)."""

    k: int
    p_gt: float
    p_eq: float
    p_lt: float
    p_rg: float


def reverse_growth(k: int) -> ReverseGrowth:
    """Probability that a k-wide fragment swap ruins a correct bit without
    decreasing fitness, computed by exact convolution of the two binomial
    pmfs."""
    if k < 2:
        raise ValueError("need k >= 2")
    denom = 2 ** (k - 1)
    pmf = [Fraction(math.comb(k - 1, x), denom) for x in range(k)]
    p_gt = Fraction(0)
    p_eq = Fraction(0)
    p_lt = Fraction(0)
    for a in range(k):  # X0 of the chromosome whose first bit is 1
        for b in range(k):  # X0' of the chromosome whose first bit is 0
            w = pmf[a] * pmf[b]
            if 1 + a > b:
                p_gt += w
            elif 1 + a == b:
                p_eq += w
            else:
                p_lt += w
    return ReverseGrowth(k, float(p_gt), float(p_eq), float(p_lt), float(p_eq + p_lt))


def cross_competition_min_pop(s: float, alpha: float, p0: float) -> float:
    """Minimum population preventing cross-competitive failure:
    s ln(alpha) / ln(1 - p0)."""
    if s <= 0:
        raise ValueError("selection pressure must be > 0")
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must be in (0, 1)")
    if not (0.0 < p0 < 1.0):
        raise ValueError("p0 must be in (0, 1)")
    return s * math.log(alpha) / math.log(1.0 - p0)
