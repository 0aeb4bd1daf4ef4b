"""Physical scenario, per-link SNR expressions and fading sampling.

Everything here is linear (no dB). Link ``L1`` carries T1 -> R -> T2 and
``L2`` carries T2 -> R -> T1; for link k the "own" terminal is k and the
"other" terminal is j != k.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterator, Sequence, Union

import numpy as np

from twrc.errors import DegeneratePower, DomainError


class Mode(str, enum.Enum):
    TWO_WAY = "twrc"
    ONE_WAY = "owrc"

    @property
    def phases(self) -> int:
        """Number of half-duplex phases per exchange (the rate multiplier in the exponent)."""
        return 2 if self is Mode.TWO_WAY else 4


class Link(enum.IntEnum):
    L1 = 1
    L2 = 2

    @property
    def other(self) -> "Link":
        return Link.L2 if self is Link.L1 else Link.L1


@dataclass(frozen=True)
class ChannelConfig:
    omega1: float
    omega2: float
    n0: float
    p1: float
    p2: float
    pR: float
    P: float
    mode: Mode = Mode.TWO_WAY

    def __post_init__(self):
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise DomainError(f"fading variances must be positive, got {self.omega1}, {self.omega2}")
        if not self.n0 > 0:
            raise DomainError(f"noise density must be positive, got {self.n0}")
        if self.p1 < 0 or self.p2 < 0:
            raise DomainError(f"terminal powers must be nonnegative, got {self.p1}, {self.p2}")
        if not self.pR > 0:
            raise DomainError(f"relay power must be positive, got {self.pR}")
        if self.p1 + self.p2 > self.P * (1 + 1e-12):
            raise DomainError(f"p1 + p2 = {self.p1 + self.p2} exceeds the budget P = {self.P}")
        object.__setattr__(self, "mode", Mode(self.mode))

    @classmethod
    def from_snr_db(
        cls,
        snr_db: float,
        omega1: float = 0.5,
        omega2: float = 2.0,
        P: float = 1.0,
        pR: float | None = None,
        p1: float | None = None,
        p2: float | None = None,
        mode: Mode = Mode.TWO_WAY,
    ) -> "ChannelConfig":
        """Build a config from SNR = P/N0 in dB; defaults give the uniform split with pR = P."""
        if not np.isfinite(snr_db):
            raise DomainError(f"SNR must be finite, got {snr_db} dB")
        n0 = P / 10.0 ** (snr_db / 10.0)
        return cls(
            omega1=omega1,
            omega2=omega2,
            n0=n0,
            p1=P / 2 if p1 is None else p1,
            p2=P / 2 if p2 is None else p2,
            pR=P if pR is None else pR,
            P=P,
            mode=mode,
        )

    def with_mode(self, mode: Mode) -> "ChannelConfig":
        return replace(self, mode=Mode(mode))

    def omega(self, link: Link) -> float:
        return self.omega1 if Link(link) is Link.L1 else self.omega2

    def power(self, link: Link) -> float:
        return self.p1 if Link(link) is Link.L1 else self.p2


@dataclass(frozen=True)
class FadingState:
    alpha1: float
    alpha2: float

    def __post_init__(self):
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise DomainError("channel gains must be nonnegative")

    def alpha(self, link: Link) -> float:
        return self.alpha1 if Link(link) is Link.L1 else self.alpha2

    def mirrored(self) -> "FadingState":
        return FadingState(self.alpha2, self.alpha1)


@dataclass(frozen=True, eq=False)
class FadingBatch(Sequence[FadingState]):
    """Column storage for many fading states; behaves as a sequence of FadingState."""

    alpha1: np.ndarray
    alpha2: np.ndarray

    def __len__(self) -> int:
        return len(self.alpha1)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return FadingBatch(self.alpha1[i], self.alpha2[i])
        return FadingState(float(self.alpha1[i]), float(self.alpha2[i]))

    def __iter__(self) -> Iterator[FadingState]:
        for a1, a2 in zip(self.alpha1, self.alpha2):
            yield FadingState(float(a1), float(a2))

    def alpha(self, link: Link) -> np.ndarray:
        return self.alpha1 if Link(link) is Link.L1 else self.alpha2


State = Union[FadingState, FadingBatch]


@dataclass(frozen=True)
class LinkStats:
    """Hazard rates of the two exponential branches of the ideal-relay SNR of one link.

    The ideal SNR is ``eta * V * W / (V + W)`` with ``V ~ Exp(lam)`` and
    ``W ~ Exp(mu)``. ``mode`` fixes the phase count used by the exponent.
    """

    link: Link
    eta: float
    lam: float
    mu: float
    mode: Mode = Mode.TWO_WAY

    def __post_init__(self):
        if not (0 < self.eta <= 1):
            raise DomainError(f"eta must lie in (0, 1], got {self.eta}")
        if not (self.lam > 0 and self.mu > 0):
            raise DomainError(f"rate parameters must be positive, got {self.lam}, {self.mu}")
        object.__setattr__(self, "link", Link(self.link))
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def phases(self) -> int:
        return self.mode.phases


def _branch_powers(pk, pj, pR, mode: Mode):
    """Return (eta, own-branch gain, other-branch gain) multipliers for V = pk*alpha_k, W = c*alpha_j.

    Two-way: the relay forwards the superposition, W gain is pR + pj. One-way:
    the relay spends pR/2 on this link alone and no cross-term appears.
    """
    if mode is Mode.TWO_WAY:
        return pR / (pR + pj), pk, pR + pj
    return 1.0, pk, pR / 2.0


def snr_from_powers(pk, pj, pR, alpha_k, alpha_j, mode: Mode = Mode.TWO_WAY, noise_term: float = 1.0):
    """Vectorized link SNR in terms of own/other powers and gains.

    ``noise_term=1`` gives the exact effective SNR, ``noise_term=0`` the ideal
    upper bound. Uses ``p1*p2/pk = pj`` so a zero own power gives 0 without
    dividing by it.
    """
    eta, gv, gw = _branch_powers(pk, pj, pR, mode)
    V = gv * alpha_k
    W = gw * alpha_j
    num = eta * V * W
    den = V + W + noise_term
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return out if np.ndim(out) else float(out)


def effective_snr(cfg: ChannelConfig, state: State, link: Link) -> float | np.ndarray:
    """Effective SNR with self-interference removed, including the receiver noise term."""
    link = Link(link)
    return snr_from_powers(
        cfg.power(link), cfg.power(link.other), cfg.pR,
        state.alpha(link), state.alpha(link.other), cfg.mode, noise_term=1.0,
    )


def ideal_snr(cfg: ChannelConfig, state: State, link: Link) -> float | np.ndarray:
    """Ideal (hypothetical) AF relaying SNR: the effective SNR without the +1 noise term."""
    link = Link(link)
    return snr_from_powers(
        cfg.power(link), cfg.power(link.other), cfg.pR,
        state.alpha(link), state.alpha(link.other), cfg.mode, noise_term=0.0,
    )


def link_stats(cfg: ChannelConfig, link: Link) -> LinkStats:
    link = Link(link)
    pk, pj = cfg.power(link), cfg.power(link.other)
    if pk <= 0:
        raise DegeneratePower(f"link {link.name} has zero transmit power")
    eta, gv, gw = _branch_powers(pk, pj, cfg.pR, cfg.mode)
    lam = cfg.n0 / (gv * cfg.omega(link))
    mu = cfg.n0 / (gw * cfg.omega(link.other))
    return LinkStats(link=link, eta=eta, lam=lam, mu=mu, mode=cfg.mode)


def sample_fading(cfg: ChannelConfig, rng_seed: int, n: int) -> FadingBatch:
    """Draw ``n`` Rayleigh fading states; alpha_k is exponential with mean omega_k / n0."""
    if n < 1:
        raise DomainError(f"need at least one sample, got n={n}")
    rng = np.random.default_rng(rng_seed)
    a1 = rng.exponential(cfg.omega1 / cfg.n0, size=n)
    a2 = rng.exponential(cfg.omega2 / cfg.n0, size=n)
    return FadingBatch(a1, a2)
