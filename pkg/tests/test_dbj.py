"""Jamming bound pair: regime and case selection, corrected-vs-verbatim
transcriptions against the defining-event oracles, and the deviations
report."""

import math

import numpy as np
import pytest

from relaysec.analytic import (
    BoundVariant,
    DbjLowerCase,
    DbjRegime,
    dbj_epsilons,
    dbj_lower_case,
    dbj_regime,
    dbj_terms,
    per_packet_intercept_dbj,
)
from relaysec.channel import LinkParams, derive_thresholds
from relaysec.oracles import Event, oracle_epsilon

LINKS_MID = LinkParams(lambda_sd=0.01, lambda_sr=6.25e-4, lambda_rd=6.25e-4)
LINKS_NEAR_SRC = LinkParams(lambda_sd=0.01, lambda_sr=8.1e-5, lambda_rd=2.401e-3)


class TestRegimesAndCases:
    def test_regime_by_alpha_at_unit_rate(self):
        assert dbj_regime(derive_thresholds(1.0, 0.2)) is DbjRegime.TAU2_GE_1
        assert dbj_regime(derive_thresholds(1.0, 0.5)) is DbjRegime.TAU2_GE_1
        assert dbj_regime(derive_thresholds(1.0, 0.8)) is DbjRegime.TAU2_LT_1

    def test_case_selection(self):
        # Midpoint geometry: scaled relay-destination variable is larger on
        # average for any alpha < 1, so the source-side cap is tighter.
        assert dbj_lower_case(LINKS_MID, 0.5) is DbjLowerCase.CASE2
        # Relays near the source flip the comparison.
        assert dbj_lower_case(LINKS_NEAR_SRC, 0.5) is DbjLowerCase.CASE1

    def test_terms_record(self):
        th = derive_thresholds(1.0, 0.5)
        t = dbj_terms(LINKS_MID, 2, 0.5, th, k1=0, k2=0)
        assert t.lambda_x1 == pytest.approx(LINKS_MID.lambda_sr / 0.5)
        assert t.lambda_x2 == pytest.approx(LINKS_MID.lambda_rd / 1.5)
        assert t.regime is DbjRegime.TAU2_GE_1
        assert t.i3 == pytest.approx(
            (t.lambda_x1 + t.lambda_x2) + (t.lambda_x2 + t.lambda_x1 * th.tau2)
        )
        assert t.i8 == pytest.approx(t.i7 + LINKS_MID.lambda_sr * 0.5 * 3.0 / 0.5)

    def test_alpha_one_structural_collapse(self):
        # With jamming off the ratio event vanishes (tau2 = 0) and the
        # destination threshold collapses onto the no-jamming min-bound
        # geometry, tau3 = 2 * tau1.
        th = derive_thresholds(1.0, 1.0)
        assert th.tau2 == 0.0
        assert th.tau3 == pytest.approx(2.0 * derive_thresholds(1.0).tau1)
        both, only = dbj_epsilons(LINKS_MID, 2, 1.0, th, BoundVariant.UPPER)
        assert both == 0.0 and only == 0.0


class TestCorrectedMatchesOracle:
    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("k", [1, 2, 4])
    @pytest.mark.parametrize("links", [LINKS_MID, LINKS_NEAR_SRC])
    def test_upper(self, alpha, k, links):
        th = derive_thresholds(1.0, alpha)
        both, only = dbj_epsilons(links, k, alpha, th, BoundVariant.UPPER)
        q_both = oracle_epsilon(
            Event.DBJ_BOTH_FAIL_UPPER, links, k, alpha=alpha, thresholds=th
        ).value
        q_only = oracle_epsilon(
            Event.DBJ_ONLY_DEST_UPPER, links, k, alpha=alpha, thresholds=th
        ).value
        assert both == pytest.approx(q_both, rel=1e-3, abs=1e-12)
        assert only == pytest.approx(q_only, rel=1e-3, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("k", [1, 2, 4])
    @pytest.mark.parametrize("links", [LINKS_MID, LINKS_NEAR_SRC])
    def test_lower(self, alpha, k, links):
        th = derive_thresholds(1.0, alpha)
        case = dbj_lower_case(links, alpha)
        ev_b, ev_o = {
            DbjLowerCase.CASE1: (
                Event.DBJ_BOTH_FAIL_LOWER_CASE1,
                Event.DBJ_ONLY_DEST_LOWER_CASE1,
            ),
            DbjLowerCase.CASE2: (
                Event.DBJ_BOTH_FAIL_LOWER_CASE2,
                Event.DBJ_ONLY_DEST_LOWER_CASE2,
            ),
        }[case]
        both, only = dbj_epsilons(links, k, alpha, th, BoundVariant.LOWER)
        assert both == pytest.approx(
            oracle_epsilon(ev_b, links, k, alpha=alpha, thresholds=th).value,
            rel=1e-3,
            abs=1e-12,
        )
        assert only == pytest.approx(
            oracle_epsilon(ev_o, links, k, alpha=alpha, thresholds=th).value,
            rel=1e-3,
            abs=1e-12,
        )

    def test_fig_point_quadrature_example(self):
        th = derive_thresholds(1.0, 0.5)
        both, _ = dbj_epsilons(LINKS_MID, 2, 0.5, th, BoundVariant.UPPER)
        ref = oracle_epsilon(
            Event.DBJ_BOTH_FAIL_UPPER, LINKS_MID, 2, alpha=0.5, thresholds=th
        ).value
        assert both == pytest.approx(ref, rel=1e-3)


class TestVerbatimTranscription:
    def test_k1_verbatim_upper_agrees(self):
        # The questionable scale argument multiplies out at one relay.
        th = derive_thresholds(1.0, 0.5)
        corr = dbj_epsilons(LINKS_MID, 1, 0.5, th, BoundVariant.UPPER, "corrected")
        verb = dbj_epsilons(LINKS_MID, 1, 0.5, th, BoundVariant.UPPER, "verbatim")
        assert corr == pytest.approx(verb, rel=1e-12)

    def test_k2_verbatim_upper_disagrees_with_event(self):
        th = derive_thresholds(1.0, 0.5)
        verb_both, verb_only = dbj_epsilons(
            LINKS_MID, 2, 0.5, th, BoundVariant.UPPER, "verbatim"
        )
        ref = oracle_epsilon(
            Event.DBJ_ONLY_DEST_UPPER, LINKS_MID, 2, alpha=0.5, thresholds=th
        ).value
        assert abs(verb_only - ref) / ref > 0.1

    def test_case2_verbatim_uses_direct_link_rate(self):
        # The printed positive exponential cites the direct link; with a
        # distinct direct-link rate the verbatim value drifts at any K.
        th = derive_thresholds(1.0, 0.5)
        links = LinkParams(lambda_sd=0.01, lambda_sr=0.3, lambda_rd=0.05)
        assert dbj_lower_case(links, 0.5) is DbjLowerCase.CASE2
        verb = dbj_epsilons(links, 1, 0.5, th, BoundVariant.LOWER, "verbatim")
        corr = dbj_epsilons(links, 1, 0.5, th, BoundVariant.LOWER, "corrected")
        ref_b = oracle_epsilon(
            Event.DBJ_BOTH_FAIL_LOWER_CASE2, links, 1, alpha=0.5, thresholds=th
        ).value
        assert corr[0] == pytest.approx(ref_b, rel=1e-3)
        assert verb[0] != pytest.approx(ref_b, rel=1e-3)

    def test_case1_has_no_transcription_fault(self):
        th = derive_thresholds(1.0, 0.5)
        verb = dbj_epsilons(LINKS_NEAR_SRC, 3, 0.5, th, BoundVariant.LOWER, "verbatim")
        corr = dbj_epsilons(LINKS_NEAR_SRC, 3, 0.5, th, BoundVariant.LOWER, "corrected")
        assert verb == pytest.approx(corr, rel=1e-12)


class TestPerPacketBounds:
    def test_alpha_one_rejected(self):
        th = derive_thresholds(1.0, 1.0)
        with pytest.raises(ValueError, match="alpha"):
            per_packet_intercept_dbj(LINKS_MID, 1, 1.0, th)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    def test_bounds_ordered_and_checked(self, alpha):
        th = derive_thresholds(1.0, alpha)
        pp = per_packet_intercept_dbj(LINKS_MID, 2, alpha, th)
        assert 0.0 <= pp.lower <= pp.upper <= 1.0
        assert pp.provenance.value == "ClosedForm"

    def test_deviations_report_flags_known_typos(self):
        th = derive_thresholds(1.0, 0.5)
        pp = per_packet_intercept_dbj(LINKS_MID, 2, 0.5, th)
        terms = {d.term for d in pp.deviations}
        assert "dbj/upper/both_fail" in terms
        assert "dbj/upper/only_dest" in terms
        assert any(t.startswith("dbj/lower_case2") for t in terms)
        for d in pp.deviations:
            assert d.corrected == pytest.approx(d.oracle, rel=1e-3, abs=1e-12)

    def test_no_deviations_where_print_is_correct(self):
        # tau2 < 1 regime and case 1 lower bound: print matches the events.
        th = derive_thresholds(1.0, 0.8)
        pp = per_packet_intercept_dbj(LINKS_NEAR_SRC, 2, 0.8, th)
        assert pp.deviations == ()

    def test_more_jamming_reduces_intercept(self):
        th = {a: derive_thresholds(1.0, a) for a in (0.2, 0.5, 0.8)}
        ups = [
            per_packet_intercept_dbj(LINKS_MID, 2, a, th[a], check=False).upper
            for a in (0.2, 0.5, 0.8)
        ]
        assert ups[0] < ups[1] < ups[2]

    def test_simulated_event_race_inside_bounds(self):
        alpha = 0.5
        th = derive_thresholds(1.0, alpha)
        pp = per_packet_intercept_dbj(LINKS_MID, 2, alpha, th)
        rng = np.random.Generator(np.random.Philox(key=88))
        trials = 1_000_000
        tp = th.tau_prime
        t_int = np.zeros(trials, dtype=np.int64)
        t_dest = np.zeros(trials, dtype=np.int64)
        active = np.ones(trials, dtype=bool)
        slot = 0
        while active.any():
            slot += 1
            gsr = rng.exponential(1 / LINKS_MID.lambda_sr, (trials, 2))
            grd = rng.exponential(1 / LINKS_MID.lambda_rd, (trials, 2))
            relay_now = (alpha * gsr / (1 + (1 - alpha) * grd) >= tp).any(axis=1)
            term = (alpha * gsr * grd / (1 + alpha * gsr + (2 - alpha) * grd)).max(axis=1)
            dest_now = term >= tp
            t_int[active & relay_now & (t_int == 0)] = slot
            t_dest[active & dest_now] = slot
            active &= ~dest_now
        p_hat = float(((t_int > 0) & (t_int <= t_dest)).mean())
        se = math.sqrt(p_hat * (1 - p_hat) / trials)
        assert p_hat >= pp.lower - 1.96 * se
        assert p_hat <= pp.upper + 1.96 * se
