"""Per-fading-state terminal power allocation maximizing the bottleneck exponent.

For fixed rho and rate pair, the instantaneous min-link exponent is
quasi-concave in the powers, so its maximum under ``p1 + p2 <= P`` is found by
bisection on the level ``t``: each step asks whether the upper-level set at
``t`` meets the budget. In ``q = psi**2 = p`` coordinates every level-set
constraint is a half-plane,

    q_k / v_k >= 1 + pR * alpha_j + alpha_1 q_1 + alpha_2 q_2,

so each feasibility question is a two-variable linear program answered at
the apex of the cone cut out by the two link constraints. The same sets
written in ``psi`` are second-order cones; :func:`socp_constraints` exposes
that form.

All batch routines are vectorized over fading samples.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from twrc.bottleneck import RatePair
from twrc.channel import ChannelConfig, FadingState, Link, Mode, sample_fading, snr_from_powers
from twrc.errors import BracketError, DomainError
from twrc.numerics import golden_section_batch

log = logging.getLogger(__name__)

RHO_FLOOR = 1e-6
T_MAX_MARGIN = 1e-6
DEFAULT_EPS = 1e-5
RHO_TOL = 1e-5
RHO_GRID_POINTS = 33
RHO_GRID_DISAGREEMENT = 1e-4
CHUNK = 25_000


@dataclass(frozen=True)
class PowerProblem:
    state: FadingState
    pR: float
    P: float
    rho: float
    rates: RatePair

    def __post_init__(self):
        if not self.P > 0:
            raise DomainError("the power budget must be positive")
        if not 0.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must lie in [0, 1], got {self.rho}")


@dataclass(frozen=True)
class PowerSolution:
    p1: float
    p2: float
    instantaneous_exponent: float
    iterations: int
    gap: float


@dataclass(frozen=True)
class FeasibilitySpec:
    t: float

    def v(self, prob: PowerProblem) -> tuple[float, float]:
        """Per-link thresholds ``v_k``; nonpositive when link k's constraint is vacuous."""
        a1, a2 = prob.state.alpha1, prob.state.alpha2
        scale = (1.0 + prob.rho) / (prob.pR * a1 * a2)
        return tuple(
            scale * math.expm1((self.t + 2 * prob.rho * r) / prob.rho)
            for r in (prob.rates.r1, prob.rates.r2)
        )


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    psi: Optional[np.ndarray] = None

    @property
    def powers(self) -> Optional[tuple[float, float]]:
        if self.psi is None:
            return None
        return float(self.psi[0] ** 2), float(self.psi[1] ** 2)


class MCEstimate(NamedTuple):
    estimate: float
    std_error: float


# --- instantaneous exponent -------------------------------------------------


def _inst_exponent(pk, pj, pR, ak, aj, rho, rate):
    gamma = snr_from_powers(pk, pj, pR, ak, aj, Mode.TWO_WAY, noise_term=1.0)
    return rho * np.log1p(gamma / (1.0 + rho)) - 2.0 * rho * rate


def _min_exponent(q1, q2, a1, a2, pR, rho, r1, r2):
    e1 = _inst_exponent(q1, q2, pR, a1, a2, rho, r1)
    e2 = _inst_exponent(q2, q1, pR, a2, a1, rho, r2)
    return np.minimum(e1, e2)


def instantaneous_exponent(p1: float, p2: float, prob: PowerProblem, link: Link) -> float:
    """Per-state exponent of one link at fixed rho, using the exact effective SNR; may be negative."""
    if p1 < 0 or p2 < 0:
        raise DomainError("powers must be nonnegative")
    link = Link(link)
    st = prob.state
    if link is Link.L1:
        val = _inst_exponent(p1, p2, prob.pR, st.alpha1, st.alpha2, prob.rho, prob.rates.r1)
    else:
        val = _inst_exponent(p2, p1, prob.pR, st.alpha2, st.alpha1, prob.rho, prob.rates.r2)
    return float(val)


def bottleneck_instantaneous(p1: float, p2: float, prob: PowerProblem) -> float:
    return min(instantaneous_exponent(p1, p2, prob, Link.L1), instantaneous_exponent(p1, p2, prob, Link.L2))


# --- feasibility ------------------------------------------------------------


def _apex(a1, a2, pR, P, rho, r1, r2, t):
    """Least-budget point of the level set at ``t`` and a budget-filling interior witness.

    Returns ``(feasible, q1, q2)``; q is meaningful only where feasible.
    """
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        rho_safe = np.maximum(rho, 1e-300)
        arg1 = t + 2.0 * rho * r1
        arg2 = t + 2.0 * rho * r2
        act1 = arg1 > 0
        act2 = arg2 > 0
        u1 = np.where(act1, (1.0 + rho) * np.expm1(np.where(act1, arg1, 0.0) / rho_safe), 0.0)
        u2 = np.where(act2, (1.0 + rho) * np.expm1(np.where(act2, arg2, 0.0) / rho_safe), 0.0)
        s1 = a1 * (pR * a2 - u1)
        s2 = a2 * (pR * a1 - u2)
        ok = (~act1 | (np.isfinite(u1) & (s1 > 0))) & (~act2 | (np.isfinite(u2) & (s2 > 0)))
        s1 = np.where(ok & act1, s1, 1.0)
        s2 = np.where(ok & act2, s2, 1.0)
        c1 = np.where(act1, u1 * (pR * a2 + 1.0) / s1, 0.0)
        d1 = np.where(act1, u1 * a2 / s1, 0.0)
        c2 = np.where(act2, u2 * (pR * a1 + 1.0) / s2, 0.0)
        d2 = np.where(act2, u2 * a1 / s2, 0.0)
        det = 1.0 - d1 * d2
        ok &= det > 0
        det = np.where(ok, det, 1.0)
        q1 = (c1 + d1 * c2) / det
        q2 = (c2 + d2 * c1) / det
        spare = P - (q1 + q2)
        ok &= spare >= 0
        spare = np.where(ok, spare, 0.0)
        w = 2.0 + d1 + d2
        q1 = q1 + spare * (1.0 + d1) / w
        q2 = q2 + spare * (1.0 + d2) / w
    return ok, q1, q2


def feasibility(spec: FeasibilitySpec, prob: PowerProblem) -> FeasibilityResult:
    """Does some ``psi >= 0`` with ``|psi|**2 <= P`` reach level ``spec.t`` on both links?"""
    if not prob.rho > 0:
        raise DomainError("feasibility needs rho > 0")
    st = prob.state
    ok, q1, q2 = _apex(st.alpha1, st.alpha2, prob.pR, prob.P, prob.rho,
                       prob.rates.r1, prob.rates.r2, spec.t)
    if not bool(ok):
        return FeasibilityResult(False)
    return FeasibilityResult(True, np.sqrt(np.array([float(q1), float(q2)])))


def socp_constraints(spec: FeasibilitySpec, prob: PowerProblem):
    """Second-order-cone data ``(scale_k, rhs_k)`` for each link.

    Link k's level-set constraint reads
    ``psi[k] * scale_k >= || (sqrt(alpha_1) psi_1, sqrt(alpha_2) psi_2, rhs_k) ||``;
    ``None`` stands for a vacuous constraint. Together with ``|psi| <= sqrt(P)``
    these describe the same set as :func:`feasibility`.
    """
    v = spec.v(prob)
    st = prob.state
    out = []
    for k, vk in enumerate(v):
        aj = st.alpha2 if k == 0 else st.alpha1
        out.append(None if vk <= 0 else (1.0 / math.sqrt(vk), math.sqrt(1.0 + prob.pR * aj)))
    return out


# --- bisection --------------------------------------------------------------


def _bracket(a1, a2, pR, P, rho, r1, r2):
    """Uniform-split level (feasible) and an infeasible upper level."""
    t_lo = _min_exponent(P / 2, P / 2, a1, a2, pR, rho, r1, r2)
    g1 = snr_from_powers(P, 0.0, pR, a1, a2, Mode.TWO_WAY, noise_term=0.0)
    g2 = snr_from_powers(P, 0.0, pR, a2, a1, Mode.TWO_WAY, noise_term=0.0)
    ub1 = rho * np.log1p(g1 / (1.0 + rho)) - 2.0 * rho * r1
    ub2 = rho * np.log1p(g2 / (1.0 + rho)) - 2.0 * rho * r2
    return t_lo, np.minimum(ub1, ub2) + T_MAX_MARGIN


def _bisect(a1, a2, pR, P, rho, r1, r2, eps, t_lo, t_hi, q1, q2):
    gap0 = float(np.max(t_hi - t_lo)) if np.size(t_lo) else 0.0
    n_iter = 0 if gap0 < eps else int(math.ceil(math.log2(gap0 / eps))) + 1
    for _ in range(n_iter):
        mid = 0.5 * (t_lo + t_hi)
        ok, w1, w2 = _apex(a1, a2, pR, P, rho, r1, r2, mid)
        t_lo = np.where(ok, mid, t_lo)
        t_hi = np.where(ok, t_hi, mid)
        q1 = np.where(ok, w1, q1)
        q2 = np.where(ok, w2, q2)
    return t_lo, t_hi, q1, q2, n_iter


def optimize_power_batch(a1, a2, pR, P, rho, r1, r2, eps=DEFAULT_EPS):
    """Vectorized bisection; returns ``(q1, q2, exponent, gap)`` arrays.

    ``rho`` may be an array (one value per sample). Where ``rho == 0`` the
    exponent is identically 0 and the uniform split is returned.
    """
    a1, a2, rho = np.broadcast_arrays(np.asarray(a1, float), np.asarray(a2, float), np.asarray(rho, float))
    zero = rho <= 0
    rho_eff = np.where(zero, 1.0, rho)
    t_lo, t_hi = _bracket(a1, a2, pR, P, rho_eff, r1, r2)
    q1 = np.full(a1.shape, P / 2)
    q2 = np.full(a1.shape, P / 2)
    t_lo, t_hi, q1, q2, _ = _bisect(a1, a2, pR, P, rho_eff, r1, r2, eps, t_lo, t_hi, q1, q2)
    val = _min_exponent(q1, q2, a1, a2, pR, rho_eff, r1, r2)
    val = np.where(zero, 0.0, val)
    q1 = np.where(zero, P / 2, q1)
    q2 = np.where(zero, P / 2, q2)
    return q1, q2, val, np.where(zero, 0.0, t_hi - t_lo)


def optimize_power(
    prob: PowerProblem,
    eps: float = DEFAULT_EPS,
    t_min: Optional[float] = None,
    t_max: Optional[float] = None,
) -> PowerSolution:
    """Bisection over level-set feasibility until the level gap is below ``eps``.

    ``t_min`` defaults to the uniform-split exponent and ``t_max`` to a level
    no power split can reach (ideal SNR with the whole budget on one link).
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    st = prob.state
    half = prob.P / 2
    if prob.rho == 0:
        return PowerSolution(half, half, 0.0, 0, 0.0)
    args = (st.alpha1, st.alpha2, prob.pR, prob.P, prob.rho, prob.rates.r1, prob.rates.r2)
    lo_default, hi_default = (float(x) for x in _bracket(*args))
    q1, q2 = half, half
    if t_min is None:
        t_min = lo_default
    else:
        res = feasibility(FeasibilitySpec(t_min), prob)
        if not res.feasible:
            raise BracketError(f"t_min={t_min} is not attainable")
        q1, q2 = res.powers
    if t_max is None:
        t_max = hi_default
    elif feasibility(FeasibilitySpec(t_max), prob).feasible:
        raise BracketError(f"t_max={t_max} is attainable, so it does not bound the optimum")
    if t_max <= t_min:
        raise BracketError("t_max must exceed t_min")
    t_lo, t_hi, q1, q2, n = _bisect(*args, eps, np.float64(t_min), np.float64(t_max),
                                    np.float64(q1), np.float64(q2))
    q1, q2 = float(q1), float(q2)
    return PowerSolution(q1, q2, bottleneck_instantaneous(q1, q2, prob), n, float(t_hi - t_lo))


# --- fading average ---------------------------------------------------------


def _maximize_over_rho(value, n: int):
    """Per-sample max over rho in [0, 1] of ``value(rho_array)``.

    Golden-section on [RHO_FLOOR, 1], cross-checked against a coarse rho grid;
    samples where the grid beats golden-section by more than the threshold are
    re-searched around the best grid point. rho = 0 contributes the value 0.
    """
    lo = np.full(n, RHO_FLOOR)
    hi = np.ones(n)
    _, best = golden_section_batch(value, lo, hi, RHO_TOL)
    grid = np.linspace(RHO_FLOOR, 1.0, RHO_GRID_POINTS)
    grid_vals = np.stack([value(np.full(n, r)) for r in grid])
    gi = np.argmax(grid_vals, axis=0)
    gbest = grid_vals[gi, np.arange(n)]
    bad = gbest > best + RHO_GRID_DISAGREEMENT
    n_bad = int(np.count_nonzero(bad))
    if n_bad:
        log.info("rho search: coarse grid beat golden-section on %d of %d samples", n_bad, n)
        idx = np.flatnonzero(bad)
        r_lo = grid[np.maximum(gi[idx] - 1, 0)]
        r_hi = grid[np.minimum(gi[idx] + 1, RHO_GRID_POINTS - 1)]
        sub = _Subset(value, idx, n)
        _, refined = golden_section_batch(sub, r_lo, r_hi, RHO_TOL)
        best[idx] = np.maximum(best[idx], refined)
    best = np.maximum(best, gbest)
    return np.maximum(best, 0.0), n_bad


class _Subset:
    """Evaluate a full-batch rho function on a subset of samples."""

    def __init__(self, value, idx, n):
        self.value, self.idx, self.n = value, idx, n

    def __call__(self, rho_sub):
        return self.value(rho_sub, self.idx)


def _per_sample(cfg: ChannelConfig, rates: RatePair, batch, optimal: bool, eps: float):
    a1_all, a2_all = batch.alpha1, batch.alpha2
    out = np.empty(len(batch))
    for start in range(0, len(batch), CHUNK):
        a1 = a1_all[start:start + CHUNK]
        a2 = a2_all[start:start + CHUNK]

        def value(rho, idx=None):
            x1 = a1 if idx is None else a1[idx]
            x2 = a2 if idx is None else a2[idx]
            if optimal:
                return optimize_power_batch(x1, x2, cfg.pR, cfg.P, rho, rates.r1, rates.r2, eps)[2]
            return _min_exponent(cfg.P / 2, cfg.P / 2, x1, x2, cfg.pR, rho, rates.r1, rates.r2)

        vals, _ = _maximize_over_rho(value, len(a1))
        out[start:start + CHUNK] = vals
    return out


def _estimate(values: np.ndarray) -> MCEstimate:
    n = len(values)
    se = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return MCEstimate(float(np.mean(values)), se)


def _check_cfg(cfg: ChannelConfig, n_samples: int):
    if cfg.mode is not Mode.TWO_WAY:
        raise DomainError("power allocation is defined for two-way relaying")
    if n_samples < 1:
        raise DomainError("need at least one sample")


def averaged_optimized_exponent(
    cfg: ChannelConfig, rates: RatePair, n_samples: int, seed: int, eps: float = DEFAULT_EPS
) -> MCEstimate:
    """Fading average of the per-state max over rho of the power-optimized bottleneck exponent."""
    _check_cfg(cfg, n_samples)
    batch = sample_fading(cfg, seed, n_samples)
    return _estimate(_per_sample(cfg, rates, batch, True, eps))


def averaged_uniform_exponent(cfg: ChannelConfig, rates: RatePair, n_samples: int, seed: int) -> MCEstimate:
    """Same average with the uniform split ``p1 = p2 = P/2``."""
    _check_cfg(cfg, n_samples)
    batch = sample_fading(cfg, seed, n_samples)
    return _estimate(_per_sample(cfg, rates, batch, False, DEFAULT_EPS))


def paired_samples(cfg: ChannelConfig, rates: RatePair, n_samples: int, seed: int, eps: float = DEFAULT_EPS):
    """Per-sample (optimal, uniform) values on the same fading draws."""
    _check_cfg(cfg, n_samples)
    batch = sample_fading(cfg, seed, n_samples)
    return _per_sample(cfg, rates, batch, True, eps), _per_sample(cfg, rates, batch, False, eps)
