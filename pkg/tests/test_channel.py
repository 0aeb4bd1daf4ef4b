import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twrc.channel import (
    ChannelConfig,
    FadingBatch,
    FadingState,
    Link,
    Mode,
    effective_snr,
    ideal_snr,
    link_stats,
    sample_fading,
    snr_from_powers,
)
from twrc.errors import DegeneratePower, DomainError

pos = st.floats(1e-3, 1e3)


def test_unit_example():
    cfg = ChannelConfig(omega1=1, omega2=1, n0=1, p1=1, p2=1, pR=1, P=2)
    s = FadingState(1.0, 1.0)
    # eta = 1/2, V = 1, W = 2
    assert effective_snr(cfg, s, Link.L1) == pytest.approx(0.25)
    assert ideal_snr(cfg, s, Link.L1) == pytest.approx(1 / 3)


@given(pos, pos, pos, pos, pos)
def test_effective_strictly_below_ideal(pk, pj, pR, ak, aj):
    eff = snr_from_powers(pk, pj, pR, ak, aj, noise_term=1.0)
    ub = snr_from_powers(pk, pj, pR, ak, aj, noise_term=0.0)
    assert 0 <= eff < ub


@given(pos, pos, pos, pos, st.floats(1.01, 10))
def test_effective_increases_with_own_gain(pk, pj, pR, ak, factor):
    lo = snr_from_powers(pk, pj, pR, ak, 5.0)
    hi = snr_from_powers(pk, pj, pR, ak * factor, 5.0)
    assert hi > lo


def test_zero_power_link_is_dead():
    cfg = ChannelConfig(omega1=1, omega2=1, n0=0.1, p1=0.0, p2=1.0, pR=1.0, P=1.0)
    s = FadingState(3.0, 4.0)
    assert effective_snr(cfg, s, Link.L1) == 0.0
    assert effective_snr(cfg, s, Link.L2) > 0.0
    with pytest.raises(DegeneratePower):
        link_stats(cfg, Link.L1)


def test_explicit_formula_two_way():
    pk, pj, pR, ak, aj = 0.3, 0.7, 1.2, 40.0, 90.0
    expected = pk * pR * ak * aj / (pk * ak + (pR + pj) * aj + 1)
    assert snr_from_powers(pk, pj, pR, ak, aj) == pytest.approx(expected, rel=1e-14)


def test_mirrored_config_swaps_links():
    cfg = ChannelConfig(omega1=0.5, omega2=2.0, n0=0.01, p1=0.3, p2=0.7, pR=1.0, P=1.0)
    mirror = ChannelConfig(omega1=2.0, omega2=0.5, n0=0.01, p1=0.7, p2=0.3, pR=1.0, P=1.0)
    a, b = link_stats(cfg, Link.L1), link_stats(mirror, Link.L2)
    assert (a.eta, a.lam, a.mu) == pytest.approx((b.eta, b.lam, b.mu))
    s = FadingState(11.0, 29.0)
    assert effective_snr(cfg, s, Link.L1) == pytest.approx(effective_snr(mirror, s.mirrored(), Link.L2))


def test_one_way_links_symmetric_under_equal_powers():
    cfg = ChannelConfig.from_snr_db(20.0, omega1=1.0, omega2=1.0, mode=Mode.ONE_WAY)
    a, b = link_stats(cfg, Link.L1), link_stats(cfg, Link.L2)
    assert a.eta == 1.0
    assert sorted([a.lam, a.mu]) == pytest.approx(sorted([b.lam, b.mu]))
    assert a.phases == 4


def test_from_snr_db_conversion():
    cfg = ChannelConfig.from_snr_db(20.0, P=2.0)
    assert cfg.n0 == pytest.approx(0.02)
    assert (cfg.p1, cfg.p2, cfg.pR) == (1.0, 1.0, 2.0)
    for bad in (math.inf, -math.inf, math.nan):
        with pytest.raises(DomainError):
            ChannelConfig.from_snr_db(bad)


@pytest.mark.parametrize("kw", [
    dict(omega1=0), dict(n0=-1), dict(p1=-0.1), dict(pR=0), dict(p1=0.8, p2=0.8),
])
def test_config_validation(kw):
    base = dict(omega1=1, omega2=1, n0=0.1, p1=0.5, p2=0.5, pR=1, P=1)
    base.update(kw)
    with pytest.raises(DomainError):
        ChannelConfig(**base)


def test_sampling_is_seeded_and_has_right_means(s_star):
    a = sample_fading(s_star, 3, 200_000)
    b = sample_fading(s_star, 3, 200_000)
    np.testing.assert_array_equal(a.alpha1, b.alpha1)
    assert np.mean(a.alpha1) == pytest.approx(s_star.omega1 / s_star.n0, rel=0.01)
    assert np.mean(a.alpha2) == pytest.approx(s_star.omega2 / s_star.n0, rel=0.01)
    with pytest.raises(DomainError):
        sample_fading(s_star, 0, 0)


def test_batch_is_a_sequence(s_star):
    batch = sample_fading(s_star, 1, 5)
    assert len(batch) == 5
    assert isinstance(batch[2], FadingState)
    assert len(batch[1:3]) == 2
    assert [s.alpha1 for s in batch] == list(batch.alpha1)
    eff = effective_snr(s_star, batch, Link.L2)
    assert eff.shape == (5,)
    assert eff[2] == pytest.approx(effective_snr(s_star, batch[2], Link.L2))


def test_link_other():
    assert Link.L1.other is Link.L2 and Link.L2.other is Link.L1
