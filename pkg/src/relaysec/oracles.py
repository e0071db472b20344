"""Defining-event oracles for every closed-form probability.

Each intercept-analysis epsilon is the probability of an explicit event
over exponential SNRs. The closed forms reduce those events with
order-statistics algebra; the oracles here evaluate the events themselves,
either by adaptive quadrature over the joint density (conditioning on one
variable and using nothing beyond the exponential CDF) or by seeded Monte
Carlo on the raw definition. They share no code with the closed forms, so
agreement is evidence and disagreement localizes transcription faults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import integrate

from .channel import DerivedThresholds, LinkParams

__all__ = ["Event", "OracleResult", "oracle_epsilon"]

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-11, limit=200)


class Event(str, Enum):
    DIRECT_DEST_FAIL = "direct/dest_fail"
    DIRECT_RELAYS_FAIL = "direct/relays_fail"
    DF_DEST_FAIL = "df/dest_fail"
    DF_RELAYS_FAIL = "df/relays_fail"
    AF_BOTH_FAIL_UPPER = "af/both_fail/upper"
    AF_ONLY_DEST_UPPER = "af/only_dest/upper"
    AF_BOTH_FAIL_LOWER = "af/both_fail/lower"
    AF_ONLY_DEST_LOWER = "af/only_dest/lower"
    DBJ_BOTH_FAIL_UPPER = "dbj/both_fail/upper"
    DBJ_ONLY_DEST_UPPER = "dbj/only_dest/upper"
    DBJ_BOTH_FAIL_LOWER_CASE1 = "dbj/both_fail/lower_case1"
    DBJ_ONLY_DEST_LOWER_CASE1 = "dbj/only_dest/lower_case1"
    DBJ_BOTH_FAIL_LOWER_CASE2 = "dbj/both_fail/lower_case2"
    DBJ_ONLY_DEST_LOWER_CASE2 = "dbj/only_dest/lower_case2"


@dataclass(frozen=True)
class OracleResult:
    value: float
    stderr: Optional[float] = None
    method: str = "quadrature"


def _exp_cdf(lam: float, x) -> float:
    return float(-np.expm1(-lam * max(0.0, x)))


def _piecewise_quad(fn, lo: float, hi: float, scales, kinks=()) -> float:
    """Adaptive quadrature over [lo, hi] segmented at a ladder of
    characteristic scales (plus exact kink locations), so features living
    on very different scales cannot be stepped over."""
    marks = set()
    for s in scales:
        if s is None or not math.isfinite(s) or s <= 0:
            continue
        for c in (0.1, 1.0, 10.0):
            m = c * s
            if lo < m < hi:
                marks.add(m)
    for kk in kinks:
        if kk is not None and lo < kk < hi:
            marks.add(kk)
    edges = [lo, *sorted(marks), hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(fn, a, b, **_QUAD_OPTS)
        total += val
    return total


# --------------------------------------------------------------------------
# Quadrature evaluations
# --------------------------------------------------------------------------


def _af_quadrature(
    links: LinkParams,
    k_relays: int,
    thresholds: DerivedThresholds,
    variant: str,
    only_dest: bool,
) -> float:
    lam_sd, lam_sr, lam_rd = links.lambda_sd, links.lambda_sr, links.lambda_rd
    tp = thresholds.tau_prime

    if variant == "upper":
        # Destination term bounded by 0.5*min - 0.25, so given gamma_SD = s
        # the miss event is min < 2*(tau1 - s).
        s_cut = thresholds.tau1

        def v_of(s: float) -> float:
            return 2.0 * (thresholds.tau1 - s)

    else:
        # Destination term bounded by min itself: miss event min < tau' - s.
        s_cut = tp

        def v_of(s: float) -> float:
            return tp - s

    relay_fail = _exp_cdf(lam_sr, tp)

    def per_relay(s: float) -> float:
        v = v_of(s)
        if v <= 0.0:
            return 0.0
        if v >= tp:
            return relay_fail
        # gamma_S < tau' and min(gamma_S, gamma_D) < v: remove the corner
        # where gamma_S in [v, tau') and gamma_D >= v.
        corner = (math.exp(-lam_sr * v) - math.exp(-lam_sr * tp)) * math.exp(-lam_rd * v)
        return relay_fail - corner

    # Kink of v(s) at v = tau' and the direct-link scale.
    kink = thresholds.tau1 - 0.5 * tp if variant == "upper" else 0.0
    scales = [1.0 / lam_sd]

    if only_dest:

        def integrand(s: float) -> float:
            return lam_sd * math.exp(-lam_sd * s) * (
                relay_fail**k_relays - per_relay(s) ** k_relays
            )

        head = _piecewise_quad(integrand, 0.0, s_cut, scales, kinks=(kink,))
        tail = relay_fail**k_relays * math.exp(-lam_sd * s_cut)
        return head + tail

    def integrand(s: float) -> float:
        return lam_sd * math.exp(-lam_sd * s) * per_relay(s) ** k_relays

    return _piecewise_quad(integrand, 0.0, s_cut, scales, kinks=(kink,))


def _dbj_upper_quadrature(
    links: LinkParams,
    k_relays: int,
    alpha: float,
    thresholds: DerivedThresholds,
    only_dest: bool,
) -> float:
    lam_x1 = links.lambda_sr / alpha
    lam_x2 = links.lambda_rd / (2.0 - alpha)
    t2, t3 = thresholds.tau2, thresholds.tau3
    if t2 <= 0.0:
        return 0.0

    def both_given_x2(u: float) -> float:
        cap = t2 * u if u < t3 else min(t2 * u, t3)
        return _exp_cdf(lam_x1, cap)

    def relay_given_x2(u: float) -> float:
        return _exp_cdf(lam_x1, t2 * u)

    def density(u: float) -> float:
        return lam_x2 * math.exp(-lam_x2 * u)

    # Scales: the density decay, the saturation of the ratio event, and
    # the destination threshold geometry.
    scales = [1.0 / lam_x2, 1.0 / (lam_x1 * t2), t3, t3 / t2]
    upper_lim = 60.0 * max(1.0 / lam_x2, t3, t3 / t2)

    both_one = _piecewise_quad(
        lambda u: density(u) * both_given_x2(u), 0.0, upper_lim, scales,
        kinks=(t3, t3 / t2),
    )
    both_one += _exp_cdf(lam_x1, min(t2 * upper_lim, t3)) * math.exp(-lam_x2 * upper_lim)
    if not only_dest:
        return both_one**k_relays
    relay_one = _piecewise_quad(
        lambda u: density(u) * relay_given_x2(u), 0.0, upper_lim, scales
    )
    relay_one += _exp_cdf(lam_x1, t2 * upper_lim) * math.exp(-lam_x2 * upper_lim)
    return relay_one**k_relays - both_one**k_relays


def _dbj_lower_quadrature(
    links: LinkParams,
    k_relays: int,
    alpha: float,
    thresholds: DerivedThresholds,
    case: int,
    only_dest: bool,
) -> float:
    lam_sr, lam_rd = links.lambda_sr, links.lambda_rd
    tp = thresholds.tau_prime

    def relay_fail_given_gd(y: float) -> float:
        # Exact relay event: alpha*gamma_S / (1 + (1-alpha)*gamma_D) < tau'.
        return _exp_cdf(lam_sr, tp * (1.0 + (1.0 - alpha) * y) / alpha)

    def density(y: float) -> float:
        return lam_rd * math.exp(-lam_rd * y)

    upper_lim = 60.0 * max(1.0 / lam_rd, 1.0)
    # Relay-event saturation scale: where the conditional CDF flattens.
    y_sat = alpha / ((1.0 - alpha) * tp * lam_sr) if alpha < 1.0 else None
    scales = [1.0 / lam_rd, y_sat]

    if case == 1:
        both_one = _piecewise_quad(
            lambda y: density(y) * relay_fail_given_gd(y), 0.0, tp, scales
        )
    else:
        cap = (2.0 - alpha) * tp / alpha

        def both_given_gd(y: float) -> float:
            return _exp_cdf(lam_sr, min(tp * (1.0 + (1.0 - alpha) * y) / alpha, cap))

        both_one = _piecewise_quad(
            lambda y: density(y) * both_given_gd(y), 0.0, upper_lim, scales,
            kinks=(1.0,),
        )
        both_one += _exp_cdf(lam_sr, cap) * math.exp(-lam_rd * upper_lim)

    if not only_dest:
        return both_one**k_relays

    relay_one = _piecewise_quad(
        lambda y: density(y) * relay_fail_given_gd(y), 0.0, upper_lim, scales
    )
    relay_one += relay_fail_given_gd(upper_lim) * math.exp(-lam_rd * upper_lim)
    return relay_one**k_relays - both_one**k_relays


# --------------------------------------------------------------------------
# Monte Carlo evaluations
# --------------------------------------------------------------------------


def _mc_event(
    event: Event,
    links: LinkParams,
    k_relays: int,
    alpha: float,
    thresholds: DerivedThresholds,
    samples: int,
    seed: int,
) -> tuple[float, float]:
    rng = np.random.Generator(
        np.random.Philox(key=np.random.SeedSequence(entropy=(seed, 0xE)).generate_state(2, np.uint64))
    )
    hits = 0
    total = 0
    chunk = min(samples, 1_000_000)
    tp = thresholds.tau_prime
    while total < samples:
        n = min(chunk, samples - total)
        if event in (Event.DIRECT_DEST_FAIL, Event.DF_DEST_FAIL):
            gsd = rng.exponential(1.0 / links.lambda_sd, n)
            thr = thresholds.tau if event is Event.DIRECT_DEST_FAIL else tp
            ok = gsd < thr
        elif event in (Event.DIRECT_RELAYS_FAIL, Event.DF_RELAYS_FAIL):
            gsr = rng.exponential(1.0 / links.lambda_sr, (n, k_relays))
            thr = thresholds.tau if event is Event.DIRECT_RELAYS_FAIL else tp
            ok = (gsr < thr).all(axis=1)
        elif event.value.startswith("af/"):
            gsd = rng.exponential(1.0 / links.lambda_sd, n)
            gsr = rng.exponential(1.0 / links.lambda_sr, (n, k_relays))
            grd = rng.exponential(1.0 / links.lambda_rd, (n, k_relays))
            relays_fail = (gsr < tp).all(axis=1)
            m = np.minimum(gsr, grd).max(axis=1)
            if event.value.endswith("upper"):
                dest_fail = gsd + 0.5 * m - 0.25 < tp
            else:
                dest_fail = gsd + m < tp
            ok = relays_fail & dest_fail if "both" in event.value else relays_fail & ~dest_fail
        elif event in (Event.DBJ_BOTH_FAIL_UPPER, Event.DBJ_ONLY_DEST_UPPER):
            x1 = alpha * rng.exponential(1.0 / links.lambda_sr, (n, k_relays))
            x2 = (2.0 - alpha) * rng.exponential(1.0 / links.lambda_rd, (n, k_relays))
            relays_fail = (x1 < thresholds.tau2 * x2).all(axis=1)
            dest_fail = np.minimum(x1, x2).max(axis=1) < thresholds.tau3
            ok = relays_fail & dest_fail if event is Event.DBJ_BOTH_FAIL_UPPER else relays_fail & ~dest_fail
        else:
            gsr = rng.exponential(1.0 / links.lambda_sr, (n, k_relays))
            grd = rng.exponential(1.0 / links.lambda_rd, (n, k_relays))
            relays_fail = (alpha * gsr / (1.0 + (1.0 - alpha) * grd) < tp).all(axis=1)
            if event.value.endswith("case1"):
                dest_fail = grd.max(axis=1) < tp
            else:
                dest_fail = (alpha * gsr / (2.0 - alpha)).max(axis=1) < tp
            ok = relays_fail & dest_fail if "both" in event.value else relays_fail & ~dest_fail
        hits += int(ok.sum())
        total += n
    p = hits / total
    stderr = math.sqrt(max(p * (1.0 - p), 1e-300) / total)
    return p, stderr


def oracle_epsilon(
    event: Event,
    links: LinkParams,
    k_relays: int,
    alpha: Optional[float] = None,
    thresholds: Optional[DerivedThresholds] = None,
    method: str = "quadrature",
    samples: int = 1_000_000,
    seed: int = 0,
) -> OracleResult:
    """Evaluate one defining event probability.

    Quadrature conditions on a single SNR and integrates the exponential
    density against elementary conditional CDFs; Monte Carlo samples the
    raw SNRs and scores the event as stated. Both are independent of the
    closed-form algebra.
    """
    if thresholds is None:
        raise ValueError("thresholds are required")
    if k_relays < 1:
        raise ValueError("k_relays must be >= 1")
    needs_alpha = event.value.startswith("dbj")
    if needs_alpha and (alpha is None or not (0.0 < alpha <= 1.0)):
        raise ValueError("dbj events require alpha in (0, 1]")

    if method == "mc":
        if samples < 1:
            raise ValueError("samples must be >= 1")
        p, se = _mc_event(event, links, k_relays, alpha or 1.0, thresholds, samples, seed)
        return OracleResult(value=p, stderr=se, method="mc")
    if method != "quadrature":
        raise ValueError("method must be 'quadrature' or 'mc'")

    if event is Event.DIRECT_DEST_FAIL:
        val = _exp_cdf(links.lambda_sd, thresholds.tau)
    elif event is Event.DIRECT_RELAYS_FAIL:
        val = _exp_cdf(links.lambda_sr, thresholds.tau) ** k_relays
    elif event is Event.DF_DEST_FAIL:
        val = _exp_cdf(links.lambda_sd, thresholds.tau_prime)
    elif event is Event.DF_RELAYS_FAIL:
        val = _exp_cdf(links.lambda_sr, thresholds.tau_prime) ** k_relays
    elif event.value.startswith("af/"):
        val = _af_quadrature(
            links,
            k_relays,
            thresholds,
            "upper" if event.value.endswith("upper") else "lower",
            only_dest="only_dest" in event.value,
        )
    elif event in (Event.DBJ_BOTH_FAIL_UPPER, Event.DBJ_ONLY_DEST_UPPER):
        val = _dbj_upper_quadrature(
            links, k_relays, alpha, thresholds, only_dest="only_dest" in event.value
        )
    else:
        case = 1 if event.value.endswith("case1") else 2
        val = _dbj_lower_quadrature(
            links, k_relays, alpha, thresholds, case, only_dest="only_dest" in event.value
        )
    return OracleResult(value=val, stderr=None, method="quadrature")
