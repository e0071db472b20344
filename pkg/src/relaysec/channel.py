"""Channel model: geometry, link statistics, and instantaneous rates.

All links are block Rayleigh: the received SNR gamma of a link with
average gain sigma^2 at transmit SNR rho is exponential with rate
lambda = 1 / (rho * sigma^2), constant within a packet slot and fresh
across slots. Average gains come from a d^-eta power law on the
source-destination segment of unit length.

Rates are in bits per channel use. Cooperative (two-phase) rates carry
the 0.5 half-duplex factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np

__all__ = [
    "CollusionModel",
    "DerivedThresholds",
    "Geometry",
    "LinkParams",
    "Protocol",
    "ReceiverModel",
    "Scenario",
    "derive_link_params",
    "derive_thresholds",
    "rate_af_dest",
    "rate_dbj_dest",
    "rate_dbj_pair",
    "rate_df_dest",
    "rate_direct",
    "rate_relay_eavesdrop",
    "sample_snr",
]


class Protocol(str, Enum):
    DIRECT = "Direct"
    DF = "DF"
    AF = "AF"
    DBJ = "DBJ"


class ReceiverModel(str, Enum):
    BASIC_ARQ = "BasicARQ"
    HARQ = "HARQ"


class CollusionModel(str, Enum):
    PER_SLOT_MAX = "PerSlotMax"
    ACCUMULATE = "Accumulate"


@dataclass(frozen=True)
class Geometry:
    """Node placement on the unit source-destination segment."""

    relay_fractions: tuple[float, ...]
    path_loss_exponent: float = 4.0
    direct_link_present: bool = True
    sd_distance: float = 1.0

    def __post_init__(self):
        if not self.relay_fractions:
            raise ValueError("at least one relay fraction is required")
        if not all(0.0 < f < 1.0 for f in self.relay_fractions):
            raise ValueError("relay fractions must lie strictly inside (0, 1)")
        if self.path_loss_exponent <= 0:
            raise ValueError("path_loss_exponent must be positive")
        if self.sd_distance != 1.0:
            raise ValueError("geometry is normalized to unit S-D distance")


@dataclass(frozen=True)
class Scenario:
    """Complete description of one experiment point."""

    protocol: Protocol
    k_relays: int
    rho_db: float
    rate_bpcu: float
    geometry: Geometry
    alpha: float = 1.0
    receiver_model: ReceiverModel = ReceiverModel.BASIC_ARQ
    collusion_model: CollusionModel = CollusionModel.PER_SLOT_MAX
    n_packets: int = 2

    def __post_init__(self):
        if self.k_relays < 1:
            raise ValueError("k_relays must be >= 1")
        if len(self.geometry.relay_fractions) != self.k_relays:
            raise ValueError(
                f"geometry lists {len(self.geometry.relay_fractions)} relay "
                f"fractions for k_relays={self.k_relays}"
            )
        if not math.isfinite(self.rho_db):
            raise ValueError("rho_db must be finite")
        if self.rate_bpcu <= 0:
            raise ValueError("rate_bpcu must be positive")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")
        if self.n_packets < 2 or self.n_packets % 2 != 0:
            raise ValueError("n_packets must be an even integer >= 2")
        if self.protocol is Protocol.DBJ:
            if self.geometry.direct_link_present:
                raise ValueError(
                    "DBJ assumes no direct source-destination link; "
                    "set direct_link_present=False"
                )
        else:
            if not self.geometry.direct_link_present:
                raise ValueError(
                    f"{self.protocol.value} requires a direct link; "
                    "set direct_link_present=True"
                )

    @property
    def rho_linear(self) -> float:
        return 10.0 ** (self.rho_db / 10.0)

    def with_(self, **kw) -> "Scenario":
        return replace(self, **kw)


@dataclass(frozen=True)
class LinkParams:
    """Exponential SNR rates for the three link classes.

    A single source-relay and relay-destination rate is kept because the
    closed forms assume statistically identical relays.
    """

    lambda_sd: float
    lambda_sr: float
    lambda_rd: float

    def __post_init__(self):
        for name in ("lambda_sd", "lambda_sr", "lambda_rd"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class DerivedThresholds:
    """SNR thresholds implied by the target rate (and power split for DBJ)."""

    tau: float
    tau_prime: float
    tau1: float
    tau2: float
    tau3: float

    def __post_init__(self):
        if not (0 < self.tau < self.tau_prime):
            raise ValueError("thresholds require 0 < tau < tau_prime")


def derive_thresholds(rate_bpcu: float, alpha: float = 1.0) -> DerivedThresholds:
    if rate_bpcu <= 0:
        raise ValueError("rate_bpcu must be positive")
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    two_2r = 2.0 ** (2.0 * rate_bpcu)
    return DerivedThresholds(
        tau=2.0 ** rate_bpcu - 1.0,
        tau_prime=two_2r - 1.0,
        tau1=two_2r - 0.75,
        tau2=(two_2r - 1.0) * (1.0 - alpha) / (2.0 - alpha),
        tau3=2.0 * ((two_2r - 1.0) * (2.0 - alpha) + 0.25),
    )


def derive_link_params(scenario: Scenario, analytic: bool = True) -> LinkParams:
    """Map geometry and transmit SNR to exponential link rates.

    With ``analytic=True`` (the default) all relays must sit at the same
    fraction, because the closed forms assume identical relay statistics.
    """
    geo = scenario.geometry
    fracs = geo.relay_fractions
    if analytic and len(set(fracs)) != 1:
        raise ValueError(
            "analytic mode requires all relay fractions equal; "
            f"got {sorted(set(fracs))}"
        )
    f = fracs[0]
    eta = geo.path_loss_exponent
    rho = scenario.rho_linear
    return LinkParams(
        lambda_sd=1.0 / rho,  # unit S-D distance
        lambda_sr=f**eta / rho,
        lambda_rd=(1.0 - f) ** eta / rho,
    )


def sample_snr(lam: float, rng: np.random.Generator):
    """One exponential SNR draw with rate ``lam`` via the inverse CDF.

    Uses -log(1-U) so that a uniform draw of u maps to the quantile
    exactly (u=0 gives 0), making streams reproducible draw-for-draw.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    return -np.log1p(-rng.random()) / lam


def rate_direct(gamma_sd):
    """Single-phase rate log2(1 + gamma)."""
    return np.log2(1.0 + np.asarray(gamma_sd, dtype=float))


def rate_relay_eavesdrop(gamma_sk, cooperative: bool):
    """Rate at an eavesdropping relay; halved when it also cooperates."""
    r = np.log2(1.0 + np.asarray(gamma_sk, dtype=float))
    return 0.5 * r if cooperative else r


def rate_df_dest(gamma_sd: float, relay_dest_snrs_of_decoders: Sequence[float]) -> float:
    """Destination rate under decode-and-forward with the given decoding set."""
    best = max(relay_dest_snrs_of_decoders, default=0.0)
    return 0.5 * math.log2(1.0 + gamma_sd + best)


def af_relay_gain(gamma_sk, gamma_kd):
    """Effective end-to-end SNR term of one amplify-and-forward relay."""
    gs = np.asarray(gamma_sk, dtype=float)
    gd = np.asarray(gamma_kd, dtype=float)
    return gs * gd / (1.0 + gs + gd)


def rate_af_dest(
    gamma_sd: float, relay_pairs: Sequence[tuple[float, float]]
) -> tuple[float, int]:
    """Destination rate under amplify-and-forward, plus the selected relay.

    Returns (rate, index of the relay maximizing the forwarded SNR term);
    ties break toward the lowest index for deterministic replay.
    """
    if not relay_pairs:
        raise ValueError("amplify-and-forward requires at least one relay")
    gains = [af_relay_gain(gs, gd) for gs, gd in relay_pairs]
    best = int(np.argmax(gains))
    rate = 0.5 * math.log2(1.0 + gamma_sd + gains[best])
    return rate, best


def rate_dbj_pair(alpha: float, gamma_sk, gamma_kd):
    """Per-relay quantities under destination-based jamming.

    Returns (relay eavesdrop rate, destination SNR term for this relay).
    The destination rate over K relays is 0.5*log2(1 + max of the terms).
    At alpha=1 both reduce exactly to the amplify-and-forward forms.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    gs = np.asarray(gamma_sk, dtype=float)
    gd = np.asarray(gamma_kd, dtype=float)
    relay_rate = 0.5 * np.log2(1.0 + alpha * gs / (1.0 + (1.0 - alpha) * gd))
    dest_term = alpha * gs * gd / (1.0 + alpha * gs + (2.0 - alpha) * gd)
    return relay_rate, dest_term


def rate_dbj_dest(alpha: float, relay_pairs: Sequence[tuple[float, float]]) -> tuple[float, int]:
    """Destination rate under jamming-assisted forwarding, plus selected relay."""
    if not relay_pairs:
        raise ValueError("at least one relay is required")
    terms = [rate_dbj_pair(alpha, gs, gd)[1] for gs, gd in relay_pairs]
    best = int(np.argmax(terms))
    return 0.5 * math.log2(1.0 + terms[best]), best
