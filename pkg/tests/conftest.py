import hypothesis
import numpy as np
import pytest

from twrc.bottleneck import LinkModel
from twrc.channel import ChannelConfig, Link, Mode, link_stats

hypothesis.settings.register_profile("default", deadline=None, max_examples=40)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=8)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def s_star():
    """20 dB, omega = (0.5, 2), pR = P = 1, uniform terminal split."""
    return ChannelConfig.from_snr_db(20.0)


@pytest.fixture(scope="session")
def s_star_stats(s_star):
    return link_stats(s_star, Link.L1), link_stats(s_star, Link.L2)


@pytest.fixture(scope="session")
def s_star_owrc_stats(s_star):
    cfg = s_star.with_mode(Mode.ONE_WAY)
    return link_stats(cfg, Link.L1), link_stats(cfg, Link.L2)


@pytest.fixture(scope="session")
def s_star_links(s_star):
    return LinkModel.pair(s_star)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
