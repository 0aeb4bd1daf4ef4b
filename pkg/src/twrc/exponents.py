"""Random coding error exponent of one relay link under ideal AF relaying.

The ideal SNR of a link is ``eta * V * W / (V + W)`` with independent
exponential ``V`` and ``W``. All expectations over it are computed by
quadrature against its density, which involves K0 and K1. The exponent,
capacity, cutoff rate and critical rate follow from the Gallager function

    E0(rho) = -ln E[(1 + gamma / (1 + rho)) ** -rho].
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np

from twrc.channel import ChannelConfig, Link, LinkStats, Mode, link_stats
from twrc.errors import DomainError, NonConvergence
from twrc.numerics import (
    QuadratureSpec,
    SearchSpec,
    bessel_k0e,
    bessel_k1e,
    integrate_semi_infinite,
    maximize_concave_1d,
)

log = logging.getLogger(__name__)

DEFAULT_QUAD = QuadratureSpec()
DEFAULT_SEARCH = SearchSpec()


@dataclass(frozen=True)
class ExponentResult:
    rate: float
    rho_opt: float
    exponent: float
    link: Link
    mode: Mode


@dataclass(frozen=True)
class LinkSummary:
    capacity: float
    cutoff_rate: float
    critical_rate: float
    e0_at_1: float


def _shape(stats: LinkStats):
    b = (stats.lam + stats.mu) / stats.eta
    c = 2.0 * math.sqrt(stats.lam * stats.mu) / stats.eta
    return b, c


def gamma_ub_pdf(stats: LinkStats, gamma):
    """Density of the ideal-relay SNR at ``gamma >= 0`` (vectorized).

    At ``gamma = 0`` the finite limit ``(lam + mu) / eta`` is returned.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError("the SNR density is supported on gamma >= 0")
    lam, mu, eta = stats.lam, stats.mu, stats.eta
    b, c = _shape(stats)
    pos = g > 0
    gp = np.where(pos, g, 1.0)
    env = np.exp(-(b + c) * gp)
    k0 = bessel_k0e(c * gp)
    k1 = bessel_k1e(c * gp)
    val = (
        (4.0 / eta**2) * lam * mu * gp * k0 * env
        + (2.0 / eta**2) * (lam + mu) * math.sqrt(lam * mu) * gp * k1 * env
    )
    out = np.where(pos, val, (lam + mu) / eta)
    return float(out) if out.ndim == 0 else out


def gamma_ub_cdf(stats: LinkStats, gamma):
    """Closed-form CDF ``1 - c*gamma*exp(-b*gamma)*K1(c*gamma)`` of the same law."""
    g = np.asarray(gamma, dtype=float)
    b, c = _shape(stats)
    pos = g > 0
    gp = np.where(pos, g, 1.0)
    tail = c * gp * bessel_k1e(c * gp) * np.exp(-(b + c) * gp)
    out = np.where(pos, 1.0 - tail, 0.0)
    return float(out) if out.ndim == 0 else out


def expect(stats: LinkStats, h, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """E[h(gamma)] under the ideal-relay SNR law, by quadrature."""
    b, _ = _shape(stats)
    res = integrate_semi_infinite(lambda g: h(g) * gamma_ub_pdf(stats, g), quad, decay_rate=b)
    return res.value


@functools.lru_cache(maxsize=65536)
def _e0_cached(stats: LinkStats, rho: float, quad: QuadratureSpec) -> float:
    m = expect(stats, lambda g: (1.0 + g / (1.0 + rho)) ** (-rho), quad)
    return -math.log(m)


def e0(stats: LinkStats, rho: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Gallager function of the link; exactly 0 at ``rho = 0``."""
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    if rho == 0.0:
        return 0.0
    return max(_e0_cached(stats, rho, quad), 0.0)


def e0_derivative(stats: LinkStats, rho: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """dE0/drho, differentiating under the integral sign."""
    rho = float(rho)
    den = expect(stats, lambda g: (1.0 + g / (1.0 + rho)) ** (-rho), quad)

    def h(g):
        base = 1.0 + g / (1.0 + rho)
        return base ** (-rho) * (np.log(base) - rho * g / ((1.0 + rho) * (1.0 + rho + g)))

    return expect(stats, h, quad) / den


@functools.lru_cache(maxsize=4096)
def capacity(stats: LinkStats, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Ergodic capacity ``E[ln(1 + gamma)] / phases`` in nats/s/Hz."""
    return expect(stats, np.log1p, quad) / stats.phases


def cutoff_rate(stats: LinkStats, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    return e0(stats, 1.0, quad) / stats.phases


def critical_rate(stats: LinkStats, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Rate below which rho_opt pins to 1: ``E0'(1) / phases``."""
    try:
        d = e0_derivative(stats, 1.0, quad)
    except NonConvergence:
        h = 1e-4
        log.warning("derivative quadrature failed; using a one-sided difference at rho=1")
        d = (3 * e0(stats, 1.0, quad) - 4 * e0(stats, 1.0 - h, quad) + e0(stats, 1.0 - 2 * h, quad)) / (2 * h)
    return d / stats.phases


def rcee(
    stats: LinkStats,
    rate: float,
    search: SearchSpec = DEFAULT_SEARCH,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> ExponentResult:
    """Random coding error exponent ``max_rho {E0(rho) - phases * rho * rate}``, clamped at 0."""
    if rate < 0:
        raise DomainError(f"rate must be nonnegative, got {rate}")
    m = stats.phases
    if rate >= capacity(stats, quad):
        return ExponentResult(rate, 0.0, 0.0, stats.link, stats.mode)
    rho, val = maximize_concave_1d(lambda r: e0(stats, r, quad) - m * r * rate, 0.0, 1.0, search)
    if val <= 0.0:
        return ExponentResult(rate, 0.0, 0.0, stats.link, stats.mode)
    return ExponentResult(rate, rho, val, stats.link, stats.mode)


def link_summary(stats: LinkStats, quad: QuadratureSpec = DEFAULT_QUAD) -> LinkSummary:
    summary = LinkSummary(
        capacity=capacity(stats, quad),
        cutoff_rate=cutoff_rate(stats, quad),
        critical_rate=critical_rate(stats, quad),
        e0_at_1=e0(stats, 1.0, quad),
    )
    if summary.cutoff_rate > summary.capacity:
        log.warning("cutoff rate %.6g exceeds capacity %.6g for %s", summary.cutoff_rate, summary.capacity, stats)
    return summary


def link_stats_pair(cfg: ChannelConfig) -> tuple[LinkStats, LinkStats]:
    return link_stats(cfg, Link.L1), link_stats(cfg, Link.L2)
