"""Security analysis toolkit for cooperative relaying with untrusted relays.

The package couples three views of the same system and uses them to check
each other: an XOR self-encryption packet code, closed-form intercept
probabilities for four transmission modes over block Rayleigh fading, and
a reproducible Monte-Carlo simulation of the packet delivery race.
"""

from .analytic import (
    BoundVariant,
    DbjLowerCase,
    DbjRegime,
    Deviation,
    PerPacketIntercept,
    Provenance,
    message_intercept,
    message_intercept_bounds,
    per_packet_intercept_af,
    per_packet_intercept_dbj,
    per_packet_intercept_df,
    per_packet_intercept_direct,
)
from .channel import (
    CollusionModel,
    DerivedThresholds,
    Geometry,
    LinkParams,
    Protocol,
    ReceiverModel,
    Scenario,
    derive_link_params,
    derive_thresholds,
)
from .codec import (
    CodecMeta,
    OpCounter,
    PacketBlock,
    decode,
    encode,
    pad_to_even,
    recoverable_indices,
    unpad,
)
from .oracles import Event, OracleResult, oracle_epsilon
from .simulator import (
    InterceptEstimate,
    SlotCapExceeded,
    SweepAxes,
    SweepRow,
    TrialOutcome,
    analytic_per_packet,
    estimate_message,
    estimate_per_packet,
    run_packet_trial,
    simulate_outcomes,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BoundVariant",
    "CodecMeta",
    "CollusionModel",
    "DbjLowerCase",
    "DbjRegime",
    "DerivedThresholds",
    "Deviation",
    "Event",
    "Geometry",
    "InterceptEstimate",
    "LinkParams",
    "OpCounter",
    "OracleResult",
    "PacketBlock",
    "PerPacketIntercept",
    "Protocol",
    "Provenance",
    "ReceiverModel",
    "Scenario",
    "SlotCapExceeded",
    "SweepAxes",
    "SweepRow",
    "TrialOutcome",
    "analytic_per_packet",
    "decode",
    "derive_link_params",
    "derive_thresholds",
    "encode",
    "estimate_message",
    "estimate_per_packet",
    "message_intercept",
    "message_intercept_bounds",
    "oracle_epsilon",
    "pad_to_even",
    "per_packet_intercept_af",
    "per_packet_intercept_dbj",
    "per_packet_intercept_df",
    "per_packet_intercept_direct",
    "recoverable_indices",
    "run_packet_trial",
    "simulate_outcomes",
    "sweep",
    "unpad",
]
