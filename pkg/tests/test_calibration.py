"""Tests for implied-intensity calibration and the drift/vol estimator."""

import math

import numpy as np
import pytest

from inplay.calibration import (
    CalibrationResult,
    IdentifiabilityError,
    IntensitySeries,
    QuoteSnapshot,
    SeriesPoint,
    calibrate_series,
    calibrate_snapshot,
    estimate_drift_vol,
    objective,
    usable_quotes,
)
from inplay.contracts import (
    Bet,
    Intensities,
    MATCH_ODDS_DRAW,
    MATCH_ODDS_HOME,
    Quote,
    ScoreState,
)
from inplay import pricing
from inplay.synthetic import calibration_catalogue, make_snapshot

LAM_TRUE = Intensities(1.3, 0.7)
STATE = ScoreState(0, 0, 0.2)


def model_snapshot(noise=0.0, rng=None, spread=0.02, state=STATE, lam=LAM_TRUE, ts=1080.0):
    return make_snapshot(state, lam, timestamp_s=ts, spread=spread, noise=noise, rng=rng)


class TestObjective:
    def test_catalogue_has_31_bets(self):
        assert len(calibration_catalogue()) == 31

    def test_perfect_fit_is_zero(self):
        snap = model_snapshot()
        assert objective(LAM_TRUE, snap) == pytest.approx(0.0, abs=1e-13)

    def test_doubling_spreads_halves_the_objective(self):
        lam_off = Intensities(1.6, 0.9)
        narrow = model_snapshot(spread=0.02)
        wide = model_snapshot(spread=0.04)
        assert objective(lam_off, narrow) == pytest.approx(
            2.0 * objective(lam_off, wide), rel=1e-9
        )

    def test_one_quote_off_by_half_spread_is_unit(self):
        spread = 0.02
        mid = pricing.price(MATCH_ODDS_HOME, STATE, LAM_TRUE).value + spread / 2.0
        snap = QuoteSnapshot(
            0.0, STATE, (Quote.from_values(MATCH_ODDS_HOME, mid, spread),)
        )
        assert objective(LAM_TRUE, snap) == pytest.approx(1.0, rel=1e-12)

    def test_invariant_under_quote_reordering(self):
        snap = model_snapshot()
        reordered = QuoteSnapshot(snap.timestamp_s, snap.state, tuple(reversed(snap.quotes)))
        lam = Intensities(2.0, 1.5)
        assert objective(lam, snap) == objective(lam, reordered)

    def test_settled_quotes_are_filtered(self):
        locked = Quote.from_values(Bet.under(0.5), 0.9999, 0.02)
        snap = QuoteSnapshot(0.0, STATE, (locked,))
        assert usable_quotes(snap) == []
        with pytest.raises(ValueError, match="no usable quotes"):
            objective(LAM_TRUE, snap)

    def test_zero_spread_is_an_error(self):
        q = Quote(MATCH_ODDS_HOME, value_buy=0.5, value_sell=0.5)
        snap = QuoteSnapshot(0.0, STATE, (q,))
        with pytest.raises(ValueError, match="zero spread"):
            objective(LAM_TRUE, snap)


class TestCalibrateSnapshot:
    def test_round_trip_recovers_the_intensities(self):
        result = calibrate_snapshot(model_snapshot())
        assert result.converged
        assert result.intensities.home == pytest.approx(LAM_TRUE.home, abs=1e-6)
        assert result.intensities.away == pytest.approx(LAM_TRUE.away, abs=1e-6)
        assert result.residual < 1e-8

    def test_recovered_residual_never_beats_truth_materially(self):
        snap = model_snapshot(noise=0.25, rng=np.random.default_rng(42))
        result = calibrate_snapshot(snap)
        assert result.residual <= objective(LAM_TRUE, snap) + 1e-8

    def test_single_variant_is_unidentifiable(self):
        mid = pricing.price(MATCH_ODDS_DRAW, STATE, LAM_TRUE).value
        quotes = tuple(Quote.from_values(MATCH_ODDS_DRAW, mid, 0.02) for _ in range(5))
        with pytest.raises(IdentifiabilityError):
            calibrate_snapshot(QuoteSnapshot(0.0, STATE, quotes))

    def test_total_goal_bets_alone_are_unidentifiable(self):
        # Over/Under lines all have equal home and away deltas: the split
        # between the two intensities stays free.
        bets = [Bet.under(x + 0.5) for x in range(5)] + [Bet.over(x + 0.5) for x in range(3)]
        snap = make_snapshot(STATE, LAM_TRUE, timestamp_s=0.0, bets=bets)
        with pytest.raises(IdentifiabilityError):
            calibrate_snapshot(snap)

    def test_noise_recovery_within_three_stderr(self):
        hits = 0
        trials = 40
        for seed in range(trials):
            rng = np.random.default_rng(seed)
            snap = model_snapshot(noise=0.25, rng=rng)
            result = calibrate_snapshot(snap)
            ok_home = abs(result.intensities.home - LAM_TRUE.home) <= 3 * result.stderr_home
            ok_away = abs(result.intensities.away - LAM_TRUE.away) <= 3 * result.stderr_away
            hits += ok_home and ok_away
        assert hits >= 0.95 * trials

    def test_stderr_scales_with_spreads(self):
        narrow = calibrate_snapshot(model_snapshot(spread=0.02))
        wide = calibrate_snapshot(model_snapshot(spread=0.04))
        assert wide.stderr_home == pytest.approx(2 * narrow.stderr_home, rel=1e-4)
        assert wide.stderr_away == pytest.approx(2 * narrow.stderr_away, rel=1e-4)

    @pytest.mark.parametrize("lam", [(0.2, 0.2), (0.2, 4.0), (1.3, 0.7), (4.0, 4.0)])
    @pytest.mark.parametrize("score", [(0, 0), (1, 2), (3, 3)])
    @pytest.mark.parametrize("tau", [0.1, 0.5, 0.8])
    def test_recovery_grid(self, lam, score, tau):
        lam_ = Intensities(*lam)
        state = ScoreState(score[0], score[1], tau)
        snap = make_snapshot(state, lam_, timestamp_s=tau * 5400.0)
        result = calibrate_snapshot(snap)
        assert result.intensities.home == pytest.approx(lam_.home, abs=1e-6)
        assert result.intensities.away == pytest.approx(lam_.away, abs=1e-6)

    def test_warm_start_is_used(self):
        warm = calibrate_snapshot(model_snapshot(), init=LAM_TRUE)
        assert warm.intensities.home == pytest.approx(LAM_TRUE.home, abs=1e-8)


class TestCalibrateSeries:
    def test_flat_market_gives_flat_series(self):
        snaps = [model_snapshot(ts=60.0 * i, state=STATE.at_clock(0.01 * i)) for i in range(5)]
        series = calibrate_series(snaps, step_s=60.0)
        assert len(series) == 5
        for point in series:
            assert point.result is not None
            assert point.result.intensities.home == pytest.approx(LAM_TRUE.home, abs=1e-6)

    def test_growing_market_has_positive_drift(self):
        snaps = []
        for i in range(12):
            tau = 0.05 * i
            lam = Intensities(1.0 * math.exp(0.6 * tau), 0.8 * math.exp(0.6 * tau))
            snaps.append(model_snapshot(ts=270.0 * i, state=STATE.at_clock(tau), lam=lam))
        series = calibrate_series(snaps, step_s=270.0)
        mu, _sigma = estimate_drift_vol(series)
        assert mu > 0.0

    def test_missing_minute_becomes_a_gap(self):
        snaps = [
            model_snapshot(ts=0.0, state=STATE.at_clock(0.0)),
            model_snapshot(ts=60.0, state=STATE.at_clock(0.011)),
            model_snapshot(ts=180.0, state=STATE.at_clock(0.033)),
        ]
        series = calibrate_series(snaps, step_s=60.0)
        assert [p.timestamp_s for p in series] == [0.0, 60.0, 120.0, 180.0]
        assert series.points[2].result is None
        assert len(series.valid()) == 3

    def test_empty_timeline_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            calibrate_series([], step_s=60.0)


def series_from_totals(totals, step_s=60.0):
    points = []
    for i, tot in enumerate(totals):
        lam = Intensities(tot / 2.0, tot / 2.0)
        points.append(
            SeriesPoint(
                i * step_s,
                CalibrationResult(lam, 0.0, 0.0, 0.0, 1, True),
            )
        )
    return IntensitySeries(tuple(points))


class TestDriftVol:
    def test_constant_series(self):
        series = series_from_totals([2.0] * 20)
        mu, sigma = estimate_drift_vol(series)
        assert mu == pytest.approx(0.0, abs=1e-12)
        assert sigma == pytest.approx(0.0, abs=1e-12)

    def test_noiseless_exponential_trend(self):
        taus = np.arange(91) / 90.0
        series = series_from_totals(np.exp(0.55 * taus))
        mu, sigma = estimate_drift_vol(series)
        assert mu == pytest.approx(0.55, abs=1e-9)
        assert sigma < 1e-9

    def test_seeded_random_walk_recovers_sigma(self):
        # d ln(total) = sigma dW on a one-minute grid over a 90-minute match.
        sigma_true = 0.5
        hits = 0
        seeds = 200
        for seed in range(seeds):
            rng = np.random.default_rng(seed)
            steps = rng.normal(0.0, sigma_true * math.sqrt(1 / 90.0), size=90)
            totals = 2.0 * np.exp(np.cumsum(np.concatenate([[0.0], steps])))
            _mu, sigma = estimate_drift_vol(series_from_totals(totals))
            hits += 0.4 <= sigma <= 0.6
        assert hits >= 0.9 * seeds

    def test_needs_ten_valid_points(self):
        with pytest.raises(ValueError, match="at least 10"):
            estimate_drift_vol(series_from_totals([2.0] * 9))

    def test_gaps_skipped_pairwise(self):
        base = series_from_totals([2.0, 2.2, 2.4, 2.2, 2.0, 2.1, 2.3, 2.2, 2.4, 2.5, 2.6])
        holed = list(base.points)
        holed[5] = SeriesPoint(holed[5].timestamp_s, None)
        series = IntensitySeries(tuple(holed))
        mu, sigma = estimate_drift_vol(series)
        assert math.isfinite(mu) and math.isfinite(sigma)
