"""Seeded Monte-Carlo simulation of the packet delivery race.

A packet is sent repeatedly (one slot per attempt, fresh fading each slot)
until the destination decodes it; the colluding relays intercept it if any
of them decodes it in some slot no later than the destination's first
success. Trials are independent races. Draws are addressed by
(seed, stream, slot, trial, link) through counter-based generators, so the
results are bit-identical no matter how trials are partitioned across
workers; aggregation is pure counting.

Receiver models: BasicARQ treats every slot standalone; HARQ lets every
receiver accumulate per-slot mutual information until the target rate is
reached. Collusion models: PerSlotMax intercepts when any single relay
decodes; Accumulate pools the best per-slot relay information into one
shared accumulator first (the stronger adversary).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from itertools import product
from typing import Optional, Sequence

import numpy as np

from . import analytic
from .channel import (
    CollusionModel,
    LinkParams,
    Protocol,
    ReceiverModel,
    Scenario,
    derive_link_params,
    derive_thresholds,
)
from .streams import slot_uniforms

__all__ = [
    "InterceptEstimate",
    "SlotCapExceeded",
    "SweepAxes",
    "SweepRow",
    "analytic_per_packet",
    "estimate_message",
    "estimate_per_packet",
    "run_packet_trial",
    "simulate_outcomes",
    "sweep",
    "wilson_interval",
]

SLOT_CAP = 1_000_000
_CHUNK = 1 << 16


class SlotCapExceeded(RuntimeError):
    """A packet race exceeded the slot cap; the scenario does not terminate
    in practical time (destination success probability too small)."""


@dataclass(frozen=True)
class TrialOutcome:
    """One simulated packet race."""

    slots_to_dest: int
    intercepted: bool
    slots_to_intercept: Optional[int]
    selected_relay_trace: tuple[Optional[int], ...]

    def __post_init__(self):
        if self.intercepted != (self.slots_to_intercept is not None):
            raise ValueError("intercepted flag must match slots_to_intercept")
        if self.slots_to_intercept is not None and not (
            1 <= self.slots_to_intercept <= self.slots_to_dest
        ):
            raise ValueError("interception must occur no later than delivery")


@dataclass(frozen=True)
class InterceptEstimate:
    """Estimated intercept probability with a 95% Wilson interval."""

    p_hat: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int
    log10_p_hat: Optional[float] = None
    log10_ci_low: Optional[float] = None
    log10_ci_high: Optional[float] = None
    note: str = ""


def wilson_interval(
    successes: int, trials: int, z: float = 1.959963984540054
) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def _columns(scenario: Scenario) -> int:
    k = scenario.k_relays
    if scenario.protocol is Protocol.DIRECT:
        return 1 + k
    if scenario.protocol is Protocol.DBJ:
        return 2 * k
    return 1 + 2 * k


def _snrs_from_uniforms(u: np.ndarray, scenario: Scenario, links: LinkParams):
    """Map a slot's uniform block to per-link SNRs. Column layout: direct
    link first when present, then source-relay, then relay-destination."""
    k = scenario.k_relays
    if scenario.protocol is Protocol.DIRECT:
        gsd = -np.log1p(-u[:, 0]) / links.lambda_sd
        gsr = -np.log1p(-u[:, 1 : 1 + k]) / links.lambda_sr
        return gsd, gsr, None
    if scenario.protocol is Protocol.DBJ:
        gsr = -np.log1p(-u[:, 0:k]) / links.lambda_sr
        grd = -np.log1p(-u[:, k : 2 * k]) / links.lambda_rd
        return None, gsr, grd
    gsd = -np.log1p(-u[:, 0]) / links.lambda_sd
    gsr = -np.log1p(-u[:, 1 : 1 + k]) / links.lambda_sr
    grd = -np.log1p(-u[:, 1 + k : 1 + 2 * k]) / links.lambda_rd
    return gsd, gsr, grd


def _relay_information(scenario: Scenario, gsr, grd) -> np.ndarray:
    """Per-slot mutual information available to each eavesdropping relay."""
    if scenario.protocol is Protocol.DIRECT:
        return np.log2(1.0 + gsr)
    if scenario.protocol is Protocol.DBJ:
        a = scenario.alpha
        return 0.5 * np.log2(1.0 + a * gsr / (1.0 + (1.0 - a) * grd))
    return 0.5 * np.log2(1.0 + gsr)


def _dest_information(scenario: Scenario, gsd, gsr, grd, relay_decoded) -> np.ndarray:
    """Per-slot mutual information at the destination.

    ``relay_decoded`` is the decode-and-forward decoding set (rows x K
    booleans); other protocols ignore it.
    """
    proto = scenario.protocol
    if proto is Protocol.DIRECT:
        return np.log2(1.0 + gsd)
    if proto is Protocol.DF:
        aided = np.where(relay_decoded, grd, 0.0).max(axis=1)
        return 0.5 * np.log2(1.0 + gsd + aided)
    if proto is Protocol.AF:
        gain = (gsr * grd / (1.0 + gsr + grd)).max(axis=1)
        return 0.5 * np.log2(1.0 + gsd + gain)
    a = scenario.alpha
    term = (a * gsr * grd / (1.0 + a * gsr + (2.0 - a) * grd)).max(axis=1)
    return 0.5 * np.log2(1.0 + term)


def _simulate_chunk(
    scenario: Scenario,
    links: LinkParams,
    seed: int,
    stream: int,
    row_start: int,
    rows: int,
    slot_cap: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Race trials [row_start, row_start+rows). Returns
    (slots_to_dest, intercepted, slots_to_intercept[0 = none])."""
    r_target = scenario.rate_bpcu
    k = scenario.k_relays
    cols = _columns(scenario)
    harq = scenario.receiver_model is ReceiverModel.HARQ
    pooled = scenario.collusion_model is CollusionModel.ACCUMULATE

    t_dest = np.zeros(rows, dtype=np.int64)
    t_int = np.zeros(rows, dtype=np.int64)
    active = np.ones(rows, dtype=bool)
    acc_dest = np.zeros(rows)
    acc_relays = np.zeros((rows, k))
    acc_pool = np.zeros(rows)

    slot = 0
    while active.any():
        slot += 1
        if slot > slot_cap:
            raise SlotCapExceeded(
                f"packet race still running after {slot_cap} slots; "
                "destination success probability is too small for simulation"
            )
        u = slot_uniforms(seed, slot, row_start, rows, cols, label=stream)
        gsd, gsr, grd = _snrs_from_uniforms(u, scenario, links)

        mi_relays = _relay_information(scenario, gsr, grd)
        if harq:
            acc_relays += mi_relays
            relay_decoded = acc_relays >= r_target
        else:
            relay_decoded = mi_relays >= r_target
        mi_dest = _dest_information(scenario, gsd, gsr, grd, relay_decoded)
        if harq:
            acc_dest += mi_dest
            dest_now = acc_dest >= r_target
        else:
            dest_now = mi_dest >= r_target

        if pooled:
            acc_pool += mi_relays.max(axis=1)
            relay_now = acc_pool >= r_target
        else:
            relay_now = relay_decoded.any(axis=1)

        newly_int = active & relay_now & (t_int == 0)
        t_int[newly_int] = slot
        t_dest[active & dest_now] = slot
        active &= ~dest_now

    intercepted = (t_int > 0) & (t_int <= t_dest)
    t_int = np.where(intercepted, t_int, 0)
    return t_dest, intercepted, t_int


def simulate_outcomes(
    scenario: Scenario,
    trials: int,
    seed: int,
    links: Optional[LinkParams] = None,
    workers: int = 1,
    stream: int = 0,
    slot_cap: Optional[int] = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Race ``trials`` packets; returns (slots_to_dest, intercepted,
    slots_to_intercept) arrays. Identical (scenario, seed, trials) give
    bit-identical arrays for any ``workers``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if slot_cap is None:
        slot_cap = SLOT_CAP
    if links is None:
        links = derive_link_params(scenario, analytic=False)
    t_dest = np.zeros(trials, dtype=np.int64)
    intercepted = np.zeros(trials, dtype=bool)
    t_int = np.zeros(trials, dtype=np.int64)

    spans = [(a, min(a + _CHUNK, trials)) for a in range(0, trials, _CHUNK)]

    def work(span):
        a, b = span
        td, ic, ti = _simulate_chunk(scenario, links, seed, stream, a, b - a, slot_cap)
        t_dest[a:b] = td
        intercepted[a:b] = ic
        t_int[a:b] = ti

    if workers <= 1 or len(spans) == 1:
        for span in spans:
            work(span)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, spans))
    return t_dest, intercepted, t_int


def run_packet_trial(
    scenario: Scenario,
    links: LinkParams,
    rng: np.random.Generator,
    slot_cap: Optional[int] = None,
) -> TrialOutcome:
    """Single packet race with an explicit generator, recording the relay
    selected each slot (the forwarding relay, or None when nothing is
    forwarded). Reference semantics for the vectorized engine."""
    if slot_cap is None:
        slot_cap = SLOT_CAP
    r_target = scenario.rate_bpcu
    k = scenario.k_relays
    harq = scenario.receiver_model is ReceiverModel.HARQ
    pooled = scenario.collusion_model is CollusionModel.ACCUMULATE
    acc_dest = 0.0
    acc_relays = np.zeros(k)
    acc_pool = 0.0
    t_int: Optional[int] = None
    trace: list[Optional[int]] = []

    for slot in range(1, slot_cap + 1):
        u = rng.random(_columns(scenario))[np.newaxis, :]
        gsd_a, gsr_a, grd_a = _snrs_from_uniforms(u, scenario, links)
        gsd = None if gsd_a is None else float(gsd_a[0])
        gsr = gsr_a[0]
        grd = None if grd_a is None else grd_a[0]

        mi_relays = _relay_information(scenario, gsr, grd)
        if harq:
            acc_relays += mi_relays
            relay_decoded = acc_relays >= r_target
        else:
            relay_decoded = mi_relays >= r_target

        if scenario.protocol is Protocol.DIRECT:
            selected = None
            mi_dest = math.log2(1.0 + gsd)
        elif scenario.protocol is Protocol.DF:
            if relay_decoded.any():
                selected = int(np.argmax(np.where(relay_decoded, grd, -np.inf)))
                mi_dest = 0.5 * math.log2(1.0 + gsd + grd[selected])
            else:
                selected = None
                mi_dest = 0.5 * math.log2(1.0 + gsd)
        elif scenario.protocol is Protocol.AF:
            gain = gsr * grd / (1.0 + gsr + grd)
            selected = int(np.argmax(gain))
            mi_dest = 0.5 * math.log2(1.0 + gsd + gain[selected])
        else:
            a = scenario.alpha
            term = a * gsr * grd / (1.0 + a * gsr + (2.0 - a) * grd)
            selected = int(np.argmax(term))
            mi_dest = 0.5 * math.log2(1.0 + term[selected])
        trace.append(selected)

        if harq:
            acc_dest += mi_dest
            dest_hit = acc_dest >= r_target
        else:
            dest_hit = mi_dest >= r_target
        if pooled:
            acc_pool += float(mi_relays.max())
            relay_hit = acc_pool >= r_target
        else:
            relay_hit = bool(relay_decoded.any())

        if relay_hit and t_int is None:
            t_int = slot
        if dest_hit:
            intercepted = t_int is not None and t_int <= slot
            return TrialOutcome(
                slots_to_dest=slot,
                intercepted=intercepted,
                slots_to_intercept=t_int if intercepted else None,
                selected_relay_trace=tuple(trace),
            )
    raise SlotCapExceeded(
        f"packet race still running after {slot_cap} slots; destination "
        "success probability is too small for simulation"
    )


def estimate_per_packet(
    scenario: Scenario,
    trials: int,
    seed: int,
    links: Optional[LinkParams] = None,
    workers: int = 1,
    stream: int = 0,
) -> InterceptEstimate:
    """Fraction of packet races intercepted, with a 95% Wilson interval."""
    _, intercepted, _ = simulate_outcomes(
        scenario, trials, seed, links=links, workers=workers, stream=stream
    )
    hits = int(intercepted.sum())
    lo, hi = wilson_interval(hits, trials)
    return InterceptEstimate(
        p_hat=hits / trials, ci_low=lo, ci_high=hi, trials=trials, seed=seed
    )


def _log10_or_neg_inf(p: float) -> float:
    return -math.inf if p <= 0.0 else math.log10(p)


def estimate_message(
    scenario: Scenario,
    n_packets: int,
    trials: int,
    seed: int,
    links: Optional[LinkParams] = None,
    workers: int = 1,
    stream: int = 0,
    method: str = "lifted",
) -> InterceptEstimate:
    """Message-level intercept estimate for a block of ``n_packets``.

    ``lifted`` raises the per-packet estimate to the N-th power in the log
    domain (packets are independent under block fading), usable at any N.
    ``direct`` simulates N races per trial and scores a message hit only
    when every packet is intercepted; meant for small-N validation.
    """
    if n_packets < 2 or n_packets % 2 != 0:
        raise ValueError("n_packets must be an even integer >= 2")
    if method == "lifted":
        per = estimate_per_packet(
            scenario, trials, seed, links=links, workers=workers, stream=stream
        )
        note = ""
        if per.p_hat == 0.0:
            note = (
                "per-packet estimate 0; message intercept below resolution "
                f"(1/{trials})^{n_packets}"
            )
        return InterceptEstimate(
            p_hat=per.p_hat**n_packets,
            ci_low=per.ci_low**n_packets,
            ci_high=per.ci_high**n_packets,
            trials=trials,
            seed=seed,
            log10_p_hat=n_packets * _log10_or_neg_inf(per.p_hat),
            log10_ci_low=n_packets * _log10_or_neg_inf(per.ci_low),
            log10_ci_high=n_packets * _log10_or_neg_inf(per.ci_high),
            note=note,
        )
    if method != "direct":
        raise ValueError("method must be 'lifted' or 'direct'")
    _, intercepted, _ = simulate_outcomes(
        scenario, trials * n_packets, seed, links=links, workers=workers, stream=stream
    )
    msg_hits = int(intercepted.reshape(trials, n_packets).all(axis=1).sum())
    lo, hi = wilson_interval(msg_hits, trials)
    p = msg_hits / trials
    return InterceptEstimate(
        p_hat=p,
        ci_low=lo,
        ci_high=hi,
        trials=trials,
        seed=seed,
        log10_p_hat=_log10_or_neg_inf(p),
        log10_ci_low=_log10_or_neg_inf(lo),
        log10_ci_high=_log10_or_neg_inf(hi),
    )


# --------------------------------------------------------------------------
# Analytic companion and sweeps
# --------------------------------------------------------------------------


def analytic_per_packet(
    scenario: Scenario,
    links: Optional[LinkParams] = None,
    check: bool = True,
) -> analytic.PerPacketIntercept:
    """Closed-form per-packet intercept for the scenario's protocol."""
    if links is None:
        links = derive_link_params(scenario, analytic=True)
    th = derive_thresholds(scenario.rate_bpcu, scenario.alpha)
    if scenario.protocol is Protocol.DIRECT:
        return analytic.per_packet_intercept_direct(links, scenario.k_relays, th)
    if scenario.protocol is Protocol.DF:
        return analytic.per_packet_intercept_df(links, scenario.k_relays, th)
    if scenario.protocol is Protocol.AF:
        return analytic.per_packet_intercept_af(links, scenario.k_relays, th)
    return analytic.per_packet_intercept_dbj(
        links, scenario.k_relays, scenario.alpha, th, check=check
    )


@dataclass(frozen=True)
class SweepAxes:
    """Grid axes; None leaves the base scenario's value untouched.

    Rows are emitted in product order with axes nested in field order
    (protocol outermost, collusion model innermost).
    """

    protocol: Optional[Sequence[Protocol]] = None
    k_relays: Optional[Sequence[int]] = None
    n_packets: Optional[Sequence[int]] = None
    relay_fraction: Optional[Sequence[float]] = None
    alpha: Optional[Sequence[float]] = None
    receiver_model: Optional[Sequence[ReceiverModel]] = None
    collusion_model: Optional[Sequence[CollusionModel]] = None


@dataclass(frozen=True)
class SweepRow:
    """One grid point: analytic values or bounds next to the simulated
    estimate. Message-level intercepts are log10; for bounded protocols
    the analytic log10 column carries the upper bound (the design value)."""

    protocol: str
    k_relays: int
    n_packets: int
    relay_fraction: float
    alpha: float
    receiver: str
    collusion: str
    p1_analytic: Optional[float]
    p1_lower: Optional[float]
    p1_upper: Optional[float]
    p1_sim: Optional[float]
    ci_low: Optional[float]
    ci_high: Optional[float]
    log10_pi_analytic: float
    log10_pi_sim: Optional[float]
    trials: int
    seed: int
    deviations: tuple[analytic.Deviation, ...] = ()


def _scenario_for_point(base: Scenario, point: dict) -> Scenario:
    sc = base
    if "protocol" in point:
        proto = point["protocol"]
        geo = replace(sc.geometry, direct_link_present=(proto is not Protocol.DBJ))
        sc = sc.with_(protocol=proto, geometry=geo)
    if "k_relays" in point:
        k = point["k_relays"]
        f = sc.geometry.relay_fractions[0]
        sc = sc.with_(k_relays=k, geometry=replace(sc.geometry, relay_fractions=(f,) * k))
    if "relay_fraction" in point:
        f = point["relay_fraction"]
        sc = sc.with_(geometry=replace(sc.geometry, relay_fractions=(f,) * sc.k_relays))
    for key in ("n_packets", "alpha", "receiver_model", "collusion_model"):
        if key in point:
            sc = sc.with_(**{key: point[key]})
    return sc


def sweep(
    base: Scenario,
    axes: SweepAxes,
    trials: int,
    seed: int,
    links: Optional[LinkParams] = None,
    workers: int = 1,
    simulate: bool = True,
    analytic_check: bool = True,
) -> list[SweepRow]:
    """One row per grid point, in deterministic grid order.

    Every row simulates under its own stream index, so draws never depend
    on the other grid points.
    """
    named = [
        ("protocol", axes.protocol),
        ("k_relays", axes.k_relays),
        ("n_packets", axes.n_packets),
        ("relay_fraction", axes.relay_fraction),
        ("alpha", axes.alpha),
        ("receiver_model", axes.receiver_model),
        ("collusion_model", axes.collusion_model),
    ]
    live = [(k, list(v)) for k, v in named if v is not None]
    if any(len(v) == 0 for _, v in live):
        raise ValueError("sweep axes must be nonempty")
    if not live:
        combos = [dict()]
    else:
        combos = [
            dict(zip([k for k, _ in live], values))
            for values in product(*[v for _, v in live])
        ]

    rows: list[SweepRow] = []
    for idx, point in enumerate(combos):
        sc = _scenario_for_point(base, point)
        row_links = links if links is not None else derive_link_params(sc, analytic=True)
        pp = analytic_per_packet(sc, links=row_links, check=analytic_check)
        ln_exact, ln_lo, ln_hi = analytic.message_intercept_bounds(pp, sc.n_packets)
        log10_pi = (ln_exact if ln_exact is not None else ln_hi) / math.log(10.0)

        p1_sim = ci_low = ci_high = log10_pi_sim = None
        row_trials = 0
        if simulate:
            est = estimate_per_packet(
                sc, trials, seed, links=row_links, workers=workers, stream=idx
            )
            p1_sim, ci_low, ci_high = est.p_hat, est.ci_low, est.ci_high
            log10_pi_sim = sc.n_packets * _log10_or_neg_inf(est.p_hat)
            row_trials = trials

        rows.append(
            SweepRow(
                protocol=sc.protocol.value,
                k_relays=sc.k_relays,
                n_packets=sc.n_packets,
                relay_fraction=sc.geometry.relay_fractions[0],
                alpha=sc.alpha,
                receiver=sc.receiver_model.value,
                collusion=sc.collusion_model.value,
                p1_analytic=pp.exact,
                p1_lower=pp.lower,
                p1_upper=pp.upper,
                p1_sim=p1_sim,
                ci_low=ci_low,
                ci_high=ci_high,
                log10_pi_analytic=log10_pi,
                log10_pi_sim=log10_pi_sim,
                trials=row_trials,
                seed=seed,
                deviations=pp.deviations,
            )
        )
    return rows
