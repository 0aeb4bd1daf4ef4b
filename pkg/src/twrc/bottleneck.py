"""Bottleneck (min-link) error exponent and sum-rate-constrained rate allocation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from twrc.channel import ChannelConfig, Link, LinkStats, link_stats
from twrc.errors import DomainError, InfeasibleSumRate
from twrc.exponents import DEFAULT_QUAD, LinkSummary, link_summary, rcee
from twrc.numerics import QuadratureSpec, SearchSpec, find_root_decreasing

# Slack on closed-form branch conditions so equalities do not flap.
BRANCH_SLACK = 1e-12
ROOT_SEARCH = SearchSpec(tol=1e-10)


@dataclass(frozen=True)
class LinkModel:
    """A link's exponent parameters together with its rate summary."""

    stats: LinkStats
    summary: LinkSummary
    quad: QuadratureSpec = DEFAULT_QUAD

    @classmethod
    def from_stats(cls, stats: LinkStats, quad: QuadratureSpec = DEFAULT_QUAD) -> "LinkModel":
        return cls(stats, link_summary(stats, quad), quad)

    @classmethod
    def pair(cls, cfg: ChannelConfig, quad: QuadratureSpec = DEFAULT_QUAD) -> tuple["LinkModel", "LinkModel"]:
        return (cls.from_stats(link_stats(cfg, Link.L1), quad),
                cls.from_stats(link_stats(cfg, Link.L2), quad))

    @property
    def capacity(self) -> float:
        return self.summary.capacity

    @property
    def cutoff(self) -> float:
        return self.summary.cutoff_rate

    @property
    def critical(self) -> float:
        return self.summary.critical_rate

    def exponent(self, rate: float) -> float:
        return rcee(self.stats, max(float(rate), 0.0), quad=self.quad).exponent


@dataclass(frozen=True)
class RatePair:
    r1: float
    r2: float

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0:
            raise DomainError(f"rates must be nonnegative, got ({self.r1}, {self.r2})")

    @property
    def sum_rate(self) -> float:
        return self.r1 + self.r2


class Branch(str, enum.Enum):
    CLOSED_FORM_BELOW_DECISIVE = "closed_form"
    BOUNDARY_LOW_SUM = "boundary"
    EXACT_INTERSECTION = "intersection"
    EXACT_ZERO_TIE = "zero_tie"
    QUASI_OPTIMAL = "quasi"
    QUASI_BOUNDARY = "quasi_boundary"


class Method(str, enum.Enum):
    THEOREM = "theorem"
    EXACT = "exact"
    QUASI = "quasi"


@dataclass(frozen=True)
class AllocationResult:
    pair: RatePair
    bottleneck: float
    branch: Branch
    decisive_sum_rate: float
    quasi_decisive_sum_rate: float
    feasible: bool = True


def bottleneck_exponent(l1: LinkModel, l2: LinkModel, pair: RatePair) -> float:
    return min(l1.exponent(pair.r1), l2.exponent(pair.r2))


def bottleneck_probability_bound(l1: LinkModel, l2: LinkModel, pair: RatePair, N: int) -> float:
    """Random-coding upper bound on the worse link's block error probability at length N."""
    if N < 1:
        raise DomainError("block length must be at least 1")
    return math.exp(-N * bottleneck_exponent(l1, l2, pair))


def exponent_plane(l1: LinkModel, l2: LinkModel, r1_grid: Sequence[float], r2_grid: Sequence[float]) -> np.ndarray:
    """Bottleneck exponent on a rate grid; entry ``[i, j]`` is at ``(r1_grid[i], r2_grid[j])``."""
    e1 = np.array([l1.exponent(r) for r in r1_grid], dtype=float)
    e2 = np.array([l2.exponent(r) for r in r2_grid], dtype=float)
    return np.minimum.outer(e1, e2)


def plateau_edge(l1: LinkModel, l2: LinkModel, r2: float) -> float:
    """Smallest R1 >= 0 at which link 1 becomes the bottleneck for fixed R2."""
    target = l2.exponent(r2)
    g = lambda r1: l1.exponent(r1) - target
    if g(0.0) <= 0.0:
        return 0.0
    return find_root_decreasing(g, 0.0, l1.capacity, ROOT_SEARCH)


def decisive_sum_rate(l1: LinkModel, l2: LinkModel) -> float:
    """Largest sum rate at which the cutoff-rate closed form is exactly optimal."""
    d = l1.cutoff - l2.cutoff
    return min(2 * l1.critical - d, 2 * l2.critical + d)


def quasi_decisive_sum_rate(l1: LinkModel, l2: LinkModel) -> float:
    d = l1.cutoff - l2.cutoff
    return min(2 * l1.capacity - d, 2 * l2.capacity + d)


def _closed_form_low(l1: LinkModel, l2: LinkModel, R: float):
    """Cutoff-rate rule for sums up to the decisive sum rate; None if R exceeds it."""
    d = l1.cutoff - l2.cutoff
    if R < d - BRANCH_SLACK and d > 0:
        return (R, 0.0), Branch.BOUNDARY_LOW_SUM
    if R < -d - BRANCH_SLACK and d < 0:
        return (0.0, R), Branch.BOUNDARY_LOW_SUM
    if R <= decisive_sum_rate(l1, l2) + BRANCH_SLACK:
        return ((R + d) / 2, (R - d) / 2), Branch.CLOSED_FORM_BELOW_DECISIVE
    return None


def _quasi(l1: LinkModel, l2: LinkModel, R: float):
    low = _closed_form_low(l1, l2, R)
    if low is not None:
        return low
    d = l1.cutoff - l2.cutoff
    if R <= quasi_decisive_sum_rate(l1, l2) + BRANCH_SLACK:
        return ((R + d) / 2, (R - d) / 2), Branch.QUASI_OPTIMAL
    if l1.capacity >= l2.capacity:
        return (R - l2.capacity, l2.capacity), Branch.QUASI_BOUNDARY
    return (l1.capacity, R - l1.capacity), Branch.QUASI_BOUNDARY


def _exact(l1: LinkModel, l2: LinkModel, R: float):
    d = l1.cutoff - l2.cutoff
    if R < abs(d) - BRANCH_SLACK:
        return ((R, 0.0) if d > 0 else (0.0, R)), Branch.BOUNDARY_LOW_SUM
    c1, c2 = l1.capacity, l2.capacity
    lo, hi = max(0.0, R - c2), min(c1, R)
    if R >= c1 + c2 - BRANCH_SLACK:
        # Both exponents vanish on the whole feasible segment.
        mid = 0.5 * (lo + hi)
        return (mid, R - mid), Branch.EXACT_ZERO_TIE
    gap = lambda r1: l1.exponent(r1) - l2.exponent(R - r1)
    if gap(lo) <= 0.0:
        return (lo, R - lo), Branch.BOUNDARY_LOW_SUM
    if gap(hi) >= 0.0:
        return (hi, R - hi), Branch.BOUNDARY_LOW_SUM
    r1 = find_root_decreasing(gap, lo, hi, ROOT_SEARCH)
    return (r1, R - r1), Branch.EXACT_INTERSECTION


def allocate_rates(l1: LinkModel, l2: LinkModel, sum_rate: float, method: Method | str = Method.EXACT) -> AllocationResult:
    """Split ``sum_rate`` between the links to maximize the bottleneck exponent.

    ``exact`` solves the equal-exponent condition on the line R1 + R2 = sum_rate.
    ``theorem`` uses the cutoff-rate closed form, which is exact up to the
    decisive sum rate; above it, it falls back to the quasi-optimal rule that
    ``quasi`` always uses.
    """
    method = Method(method)
    R = float(sum_rate)
    if R < 0:
        raise DomainError(f"sum rate must be nonnegative, got {R}")
    feasible = R <= l1.capacity + l2.capacity + BRANCH_SLACK
    if method is Method.EXACT:
        if not feasible:
            raise InfeasibleSumRate(
                f"sum rate {R} exceeds the capacity sum {l1.capacity + l2.capacity}"
            )
        (r1, r2), branch = _exact(l1, l2, R)
    else:
        (r1, r2), branch = _quasi(l1, l2, R)
    pair = RatePair(max(r1, 0.0), max(r2, 0.0))
    feasible = feasible and pair.r1 <= l1.capacity + BRANCH_SLACK and pair.r2 <= l2.capacity + BRANCH_SLACK
    return AllocationResult(
        pair=pair,
        bottleneck=bottleneck_exponent(l1, l2, pair),
        branch=branch,
        decisive_sum_rate=decisive_sum_rate(l1, l2),
        quasi_decisive_sum_rate=quasi_decisive_sum_rate(l1, l2),
        feasible=feasible,
    )
