import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twrc.bottleneck import (
    Branch,
    LinkModel,
    Method,
    RatePair,
    allocate_rates,
    bottleneck_exponent,
    bottleneck_probability_bound,
    decisive_sum_rate,
    exponent_plane,
    plateau_edge,
    quasi_decisive_sum_rate,
)
from twrc.channel import ChannelConfig
from twrc.errors import DomainError, InfeasibleSumRate


def brute_force_split(l1, l2, R, n=801):
    lo, hi = max(0.0, R - l2.capacity), min(l1.capacity, R)
    r1 = np.linspace(lo, hi, n)
    vals = np.array([min(l1.exponent(a), l2.exponent(R - a)) for a in r1])
    # exponent slopes are at most 2 in magnitude, so the grid max is within 2*dx of the optimum
    return vals.max(), 2 * (hi - lo) / (n - 1)


def test_rate_pair_validation():
    with pytest.raises(DomainError):
        RatePair(-0.1, 0.2)
    assert RatePair(0.1, 0.2).sum_rate == pytest.approx(0.3)


def test_bottleneck_is_min_of_links(s_star_links):
    l1, l2 = s_star_links
    p = RatePair(0.3, 0.6)
    assert bottleneck_exponent(l1, l2, p) == min(l1.exponent(0.3), l2.exponent(0.6))
    assert bottleneck_probability_bound(l1, l2, p, 100) == pytest.approx(
        math.exp(-100 * bottleneck_exponent(l1, l2, p)))
    with pytest.raises(DomainError):
        bottleneck_probability_bound(l1, l2, p, 0)


def test_plane_matches_pointwise(s_star_links):
    l1, l2 = s_star_links
    r1, r2 = [0.0, 0.5, 1.0], [0.2, 0.9]
    z = exponent_plane(l1, l2, r1, r2)
    assert z.shape == (3, 2)
    for i, a in enumerate(r1):
        for j, b in enumerate(r2):
            assert z[i, j] == bottleneck_exponent(l1, l2, RatePair(a, b))
    assert exponent_plane(l1, l2, [0.4], [0.4]).shape == (1, 1)


def test_plane_is_nonincreasing_in_each_rate(s_star_links):
    z = exponent_plane(*s_star_links, np.linspace(0, 1.3, 14), np.linspace(0, 1.3, 14))
    assert np.all(np.diff(z, axis=0) <= 1e-12)
    assert np.all(np.diff(z, axis=1) <= 1e-12)


def test_plateau_edge_is_where_links_tie(s_star_links):
    l1, l2 = s_star_links
    for r2 in (0.3, 0.8):
        r1 = plateau_edge(l1, l2, r2)
        assert l1.exponent(r1) == pytest.approx(l2.exponent(r2), abs=1e-8)
    assert plateau_edge(l1, l2, 0.0) == 0.0


def test_decisive_rates(s_star_links):
    l1, l2 = s_star_links
    d = l1.cutoff - l2.cutoff
    assert decisive_sum_rate(l1, l2) == pytest.approx(min(2 * l1.critical - d, 2 * l2.critical + d))
    assert quasi_decisive_sum_rate(l1, l2) > decisive_sum_rate(l1, l2)


@pytest.mark.parametrize("R", [0.0, 0.1, 0.148, 0.5, 0.8])
def test_closed_form_is_optimal_below_decisive(s_star_links, R):
    l1, l2 = s_star_links
    th = allocate_rates(l1, l2, R, Method.THEOREM)
    ex = allocate_rates(l1, l2, R, Method.EXACT)
    assert th.pair.sum_rate == pytest.approx(R)
    assert th.bottleneck == pytest.approx(ex.bottleneck, abs=1e-8)
    grid, slack = brute_force_split(l1, l2, R)
    assert grid - 1e-9 <= th.bottleneck <= grid + slack


def test_zero_sum_rate(s_star_links):
    res = allocate_rates(*s_star_links, 0.0)
    assert (res.pair.r1, res.pair.r2) == (0.0, 0.0)


def test_boundary_branch_below_cutoff_gap(s_star_links):
    l1, l2 = s_star_links
    gap = abs(l1.cutoff - l2.cutoff)
    res = allocate_rates(l1, l2, 0.5 * gap, Method.THEOREM)
    assert res.branch is Branch.BOUNDARY_LOW_SUM
    assert res.pair.r1 == 0.0 and res.pair.r2 == pytest.approx(0.5 * gap)


@settings(max_examples=10)
@given(st.floats(0.9, 2.3))
def test_exact_beats_any_split(s_star_links, R):
    l1, l2 = s_star_links
    res = allocate_rates(l1, l2, R, Method.EXACT)
    assert res.pair.sum_rate == pytest.approx(R, abs=1e-12)
    assert res.bottleneck >= brute_force_split(l1, l2, R, 201)[0] - 1e-9
    for m in (Method.QUASI, Method.THEOREM):
        assert allocate_rates(l1, l2, R, m).bottleneck <= res.bottleneck + 1e-9


def test_exact_sum_rate_above_capacity_sum(s_star_links):
    l1, l2 = s_star_links
    with pytest.raises(InfeasibleSumRate):
        allocate_rates(l1, l2, l1.capacity + l2.capacity + 0.1, Method.EXACT)
    res = allocate_rates(l1, l2, l1.capacity + l2.capacity + 0.1, Method.QUASI)
    assert res.feasible is False and res.bottleneck == 0.0


def test_quasi_boundary_above_quasi_decisive(s_star_links):
    l1, l2 = s_star_links
    R = 0.5 * (quasi_decisive_sum_rate(l1, l2) + l1.capacity + l2.capacity)
    res = allocate_rates(l1, l2, R, Method.QUASI)
    assert res.branch is Branch.QUASI_BOUNDARY
    assert res.pair.r1 == pytest.approx(l1.capacity)


def test_negative_sum_rate_rejected(s_star_links):
    with pytest.raises(DomainError):
        allocate_rates(*s_star_links, -1.0)


def test_symmetric_links_split_evenly():
    l1, l2 = LinkModel.pair(ChannelConfig.from_snr_db(20.0, omega1=1.0, omega2=1.0))
    for R in (0.4, 1.5):
        res = allocate_rates(l1, l2, R, Method.EXACT)
        assert res.pair.r1 == pytest.approx(res.pair.r2, abs=1e-8)
