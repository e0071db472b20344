"""Amplify-and-forward bound pair: ordering, oracle agreement, degenerate
summand branches, and simulated containment."""

import math

import numpy as np
import pytest

from relaysec.analytic import (
    BoundVariant,
    af_epsilons,
    af_terms,
    per_packet_intercept_af,
    race_intercept,
)
from relaysec.channel import LinkParams, derive_thresholds
from relaysec.oracles import Event, oracle_epsilon

TH = derive_thresholds(1.0)
LINKS_FIG = LinkParams(lambda_sd=0.01, lambda_sr=6.25e-4, lambda_rd=6.25e-4)

GRID_SD = [0.002, 0.01, 0.05, 0.2, 0.5]
GRID_SR = [6.25e-4, 0.005, 0.02, 0.1, 0.3]


class TestBoundOrdering:
    @pytest.mark.parametrize("lam_sd", GRID_SD)
    @pytest.mark.parametrize("lam_sr", GRID_SR)
    def test_lower_at_most_upper(self, lam_sd, lam_sr):
        links = LinkParams(lambda_sd=lam_sd, lambda_sr=lam_sr, lambda_rd=lam_sr)
        pp = per_packet_intercept_af(links, 2, TH)
        assert pp.lower <= pp.upper + 1e-12


class TestOracleAgreement:
    @pytest.mark.parametrize("variant", [BoundVariant.UPPER, BoundVariant.LOWER])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_epsilons_match_quadrature(self, variant, k):
        events = {
            BoundVariant.UPPER: (Event.AF_BOTH_FAIL_UPPER, Event.AF_ONLY_DEST_UPPER),
            BoundVariant.LOWER: (Event.AF_BOTH_FAIL_LOWER, Event.AF_ONLY_DEST_LOWER),
        }[variant]
        links = LinkParams(lambda_sd=0.05, lambda_sr=0.02, lambda_rd=0.03)
        both, only = af_epsilons(links, k, TH, variant)
        q_both = oracle_epsilon(events[0], links, k, thresholds=TH).value
        q_only = oracle_epsilon(events[1], links, k, thresholds=TH).value
        assert both == pytest.approx(q_both, rel=1e-3, abs=1e-12)
        assert only == pytest.approx(q_only, rel=1e-3, abs=1e-12)

    def test_fig_point_upper_both_fail(self):
        both, _ = af_epsilons(LINKS_FIG, 1, TH, BoundVariant.UPPER)
        ref = oracle_epsilon(
            Event.AF_BOTH_FAIL_UPPER, LINKS_FIG, 1, thresholds=TH
        ).value
        assert both == pytest.approx(ref, rel=1e-3)

    @pytest.mark.parametrize("lam_sd", GRID_SD)
    @pytest.mark.parametrize("lam_sr", GRID_SR)
    def test_grid_epsilons_match_quadrature(self, lam_sd, lam_sr):
        links = LinkParams(lambda_sd=lam_sd, lambda_sr=lam_sr, lambda_rd=lam_sr)
        for variant, ev_b, ev_o in (
            (BoundVariant.UPPER, Event.AF_BOTH_FAIL_UPPER, Event.AF_ONLY_DEST_UPPER),
            (BoundVariant.LOWER, Event.AF_BOTH_FAIL_LOWER, Event.AF_ONLY_DEST_LOWER),
        ):
            both, only = af_epsilons(links, 2, TH, variant)
            assert both == pytest.approx(
                oracle_epsilon(ev_b, links, 2, thresholds=TH).value, rel=1e-3, abs=1e-12
            )
            assert only == pytest.approx(
                oracle_epsilon(ev_o, links, 2, thresholds=TH).value, rel=1e-3, abs=1e-12
            )


class TestDegenerateBranches:
    def test_i2_zero_branch_upper(self):
        # I2 = I1 - lam_sd/2 = 0 at K=1 when lam_sd = 2(lam_sr + lam_rd).
        links = LinkParams(lambda_sd=0.2, lambda_sr=0.06, lambda_rd=0.04)
        t = af_terms(links, TH, BoundVariant.UPPER, 1, 0, 0)
        assert t.i2 == pytest.approx(0.0, abs=1e-15)
        both, only = af_epsilons(links, 1, TH, BoundVariant.UPPER)
        assert both == pytest.approx(
            oracle_epsilon(Event.AF_BOTH_FAIL_UPPER, links, 1, thresholds=TH).value,
            rel=1e-3,
        )
        assert only == pytest.approx(
            oracle_epsilon(Event.AF_ONLY_DEST_UPPER, links, 1, thresholds=TH).value,
            rel=1e-3,
        )

    def test_i2_equals_lam_sr_branch_upper(self):
        # I2 - lam_sr = 0 at K=1 when lam_sd = 2*lam_rd.
        links = LinkParams(lambda_sd=0.08, lambda_sr=0.05, lambda_rd=0.04)
        t = af_terms(links, TH, BoundVariant.UPPER, 1, 0, 0)
        assert t.i2 - links.lambda_sr == pytest.approx(0.0, abs=1e-15)
        both, only = af_epsilons(links, 1, TH, BoundVariant.UPPER)
        assert both == pytest.approx(
            oracle_epsilon(Event.AF_BOTH_FAIL_UPPER, links, 1, thresholds=TH).value,
            rel=1e-3,
        )
        assert only == pytest.approx(
            oracle_epsilon(Event.AF_ONLY_DEST_UPPER, links, 1, thresholds=TH).value,
            rel=1e-3,
        )

    def test_equal_sd_rd_rates_hit_lower_degenerate(self):
        # Lower variant I2 - lam_sr = 0 whenever lam_sd = lam_rd (K=1).
        links = LinkParams(lambda_sd=0.03, lambda_sr=0.02, lambda_rd=0.03)
        t = af_terms(links, TH, BoundVariant.LOWER, 1, 0, 0)
        assert t.i2 - links.lambda_sr == pytest.approx(0.0, abs=1e-15)
        both, only = af_epsilons(links, 1, TH, BoundVariant.LOWER)
        assert both == pytest.approx(
            oracle_epsilon(Event.AF_BOTH_FAIL_LOWER, links, 1, thresholds=TH).value,
            rel=1e-3,
        )
        assert only == pytest.approx(
            oracle_epsilon(Event.AF_ONLY_DEST_LOWER, links, 1, thresholds=TH).value,
            rel=1e-3,
        )


class TestSimulatedContainment:
    def test_mc_per_packet_within_bounds_fig_point(self):
        """Seeded event-level race sampling lands inside the bound pair."""
        pp = per_packet_intercept_af(LINKS_FIG, 1, TH)
        rng = np.random.Generator(np.random.Philox(key=1401))
        trials = 1_000_000
        tp = TH.tau_prime
        t_int = np.zeros(trials, dtype=np.int64)
        t_dest = np.zeros(trials, dtype=np.int64)
        active = np.ones(trials, dtype=bool)
        slot = 0
        while active.any():
            slot += 1
            gsd = rng.exponential(1 / LINKS_FIG.lambda_sd, trials)
            gsr = rng.exponential(1 / LINKS_FIG.lambda_sr, trials)
            grd = rng.exponential(1 / LINKS_FIG.lambda_rd, trials)
            relay_now = gsr >= tp
            dest_now = gsd + gsr * grd / (1 + gsr + grd) >= tp
            t_int[active & relay_now & (t_int == 0)] = slot
            t_dest[active & dest_now] = slot
            active &= ~dest_now
        p_hat = float(((t_int > 0) & (t_int <= t_dest)).mean())
        se = math.sqrt(p_hat * (1 - p_hat) / trials)
        assert p_hat >= pp.lower - 1.96 * se
        assert p_hat <= pp.upper + 1.96 * se

    def test_race_against_handicapped_destination_matches_upper(self):
        """Simulating the race with the pessimistic destination term
        reproduces the upper bound itself."""
        both, only = af_epsilons(LINKS_FIG, 1, TH, BoundVariant.UPPER)
        expected = race_intercept(both, only)
        rng = np.random.Generator(np.random.Philox(key=1402))
        trials = 1_000_000
        tp = TH.tau_prime
        t_int = np.zeros(trials, dtype=np.int64)
        t_dest = np.zeros(trials, dtype=np.int64)
        active = np.ones(trials, dtype=bool)
        slot = 0
        while active.any():
            slot += 1
            gsd = rng.exponential(1 / LINKS_FIG.lambda_sd, trials)
            gsr = rng.exponential(1 / LINKS_FIG.lambda_sr, trials)
            grd = rng.exponential(1 / LINKS_FIG.lambda_rd, trials)
            relay_now = gsr >= tp
            dest_now = gsd + 0.5 * np.minimum(gsr, grd) - 0.25 >= tp
            t_int[active & relay_now & (t_int == 0)] = slot
            t_dest[active & dest_now] = slot
            active &= ~dest_now
        p_hat = float(((t_int > 0) & (t_int <= t_dest)).mean())
        se = math.sqrt(expected * (1 - expected) / trials)
        assert abs(p_hat - expected) < 3 * se
