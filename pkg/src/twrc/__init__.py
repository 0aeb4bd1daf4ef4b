"""Error exponents and resource allocation for amplify-and-forward two-way relay channels."""

from twrc.channel import (
    ChannelConfig,
    FadingBatch,
    FadingState,
    Link,
    LinkStats,
    Mode,
    effective_snr,
    ideal_snr,
    link_stats,
    sample_fading,
)
from twrc.bottleneck import LinkModel, Method, RatePair, allocate_rates, bottleneck_exponent
from twrc.errors import (
    BracketError,
    DegeneratePower,
    DomainError,
    InfeasibleSumRate,
    NonConvergence,
    TwrcError,
)
from twrc.exponents import capacity, critical_rate, cutoff_rate, e0, link_summary, rcee
from twrc.power import PowerProblem, averaged_optimized_exponent, optimize_power

__all__ = [
    "BracketError",
    "ChannelConfig",
    "DegeneratePower",
    "DomainError",
    "FadingBatch",
    "FadingState",
    "InfeasibleSumRate",
    "Link",
    "LinkStats",
    "Mode",
    "NonConvergence",
    "TwrcError",
    "LinkModel",
    "Method",
    "PowerProblem",
    "RatePair",
    "allocate_rates",
    "averaged_optimized_exponent",
    "bottleneck_exponent",
    "capacity",
    "critical_rate",
    "cutoff_rate",
    "e0",
    "link_summary",
    "optimize_power",
    "rcee",
    "effective_snr",
    "ideal_snr",
    "link_stats",
    "sample_fading",
]
