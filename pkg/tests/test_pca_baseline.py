"""PCA baseline: fitting, scoring, persistence and the threshold sweep."""

import numpy as np
import pytest

from tsadeval.data_io import (
    AnomalySignal,
    MvtsFrame,
    SyntheticSpec,
    generate_train_test,
)
from tsadeval.metrics import LabelSeries, PredictionSeries
from tsadeval.pca_baseline import (
    AnomalyScoreSeries,
    PcaConfig,
    ScoredModel,
    fit,
    predictions_at_threshold,
    score_frame,
    sweep_threshold,
)
from tsadeval.protocols import Protocol, score


def synthetic_pair(seed=7, signal=AnomalySignal.MEAN_SHIFT):
    spec = SyntheticSpec(
        total_points=4000,
        event_lengths=(80, 120, 60),
        n_channels=8,
        anomaly_signal=signal,
        seed=seed,
    )
    return generate_train_test(spec, train_points=3000)


def random_frame(rng, rows=500, cols=6):
    correlated = rng.standard_normal((rows, 2)) @ rng.standard_normal((2, cols))
    return MvtsFrame(values=correlated + 0.01 * rng.standard_normal((rows, cols)))


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(variance_target=0.0),
            dict(variance_target=1.1),
            dict(clip_quantiles=(0.5, 0.5)),
            dict(clip_quantiles=(-0.1, 0.9)),
            dict(clip_quantiles=(0.1, 1.2)),
            dict(smooth_window=0),
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            PcaConfig(**kwargs)

    def test_defaults(self):
        config = PcaConfig()
        assert config.variance_target == 0.9
        assert config.clip_quantiles == (0.001, 0.999)
        assert config.smooth_window == 5


class TestFit:
    def test_component_count_respects_variance_target(self):
        rng = np.random.default_rng(0)
        train = random_frame(rng)
        model = fit(train, PcaConfig(variance_target=0.9, smooth_window=1))
        # independent check on the model's own preprocessing output
        scaled = (train.values - model.center) / model.spread
        clipped = np.clip(scaled, model.clip_low, model.clip_high)
        eigvals = np.linalg.eigvalsh(np.cov(clipped, rowvar=False))[::-1]
        ratios = np.cumsum(eigvals) / eigvals.sum()
        k = model.n_components
        assert ratios[k - 1] >= 0.9 - 1e-9
        if k > 1:
            assert ratios[k - 2] < 0.9

    def test_two_factor_data_needs_two_components(self):
        rng = np.random.default_rng(1)
        model = fit(random_frame(rng), PcaConfig(variance_target=0.99))
        assert model.n_components <= 3

    def test_zero_iqr_channel_warns(self):
        values = np.column_stack(
            [np.ones(100), np.linspace(0.0, 1.0, 100)]
        )
        with pytest.warns(UserWarning, match="zero IQR"):
            model = fit(MvtsFrame(values=values))
        assert model.spread[0] == 1.0

    def test_needs_two_rows(self):
        with pytest.raises(ValueError, match="training rows"):
            fit(MvtsFrame(values=np.zeros((1, 3))))

    def test_single_channel(self):
        rng = np.random.default_rng(2)
        values = rng.standard_normal((200, 1))
        model = fit(MvtsFrame(values=values))
        assert model.n_components == 1

    def test_clipping_tames_training_outliers(self):
        rng = np.random.default_rng(3)
        base = random_frame(rng, rows=2000, cols=4)
        spiked = base.values.copy()
        spiked[500] += 100.0
        clean = fit(base, PcaConfig(smooth_window=1))
        dirty = fit(MvtsFrame(values=spiked), PcaConfig(smooth_window=1))
        # one huge training row must not tilt the principal subspace;
        # with clipping disabled the spike direction dominates the basis
        assert dirty.n_components == clean.n_components
        p_clean = clean.basis @ clean.basis.T
        p_dirty = dirty.basis @ dirty.basis.T
        assert np.linalg.norm(p_clean - p_dirty) < 0.3
        unclipped = fit(
            MvtsFrame(values=spiked),
            PcaConfig(clip_quantiles=(0.0, 1.0), smooth_window=1),
        )
        p_unclipped = unclipped.basis @ unclipped.basis.T
        assert np.linalg.norm(p_clean - p_unclipped) > 0.5


class TestScore:
    def test_full_rank_reconstruction_is_exact(self):
        rng = np.random.default_rng(4)
        train = random_frame(rng)
        model = fit(train, PcaConfig(variance_target=1.0, smooth_window=1))
        assert model.n_components == train.n_channels
        residuals = score_frame(model, train).scores
        assert residuals.max() <= 1e-8

    def test_channel_mismatch(self):
        rng = np.random.default_rng(5)
        model = fit(random_frame(rng, cols=4))
        with pytest.raises(ValueError, match="channels"):
            score_frame(model, random_frame(rng, cols=5))

    def test_scores_deterministic(self):
        rng = np.random.default_rng(6)
        train = random_frame(rng)
        test = random_frame(rng)
        a = score_frame(fit(train), test).scores
        b = score_frame(fit(train), test).scores
        assert np.array_equal(a, b)

    def test_smoothing_is_causal(self):
        rng = np.random.default_rng(7)
        train = random_frame(rng, rows=300)
        base = random_frame(rng, rows=100)
        changed_values = base.values.copy()
        changed_values[60:] += 50.0
        changed = MvtsFrame(values=changed_values)
        model = fit(train)
        a = score_frame(model, base).scores
        b = score_frame(model, changed).scores
        assert np.array_equal(a[:60], b[:60])
        assert not np.array_equal(a[60:], b[60:])

    def test_smoothing_window_math(self):
        rng = np.random.default_rng(8)
        train = random_frame(rng, rows=300)
        model5 = fit(train, PcaConfig(smooth_window=5))
        model1 = fit(train, PcaConfig(smooth_window=1))
        test = random_frame(rng, rows=50)
        raw = score_frame(model1, test).scores
        smooth = score_frame(model5, test).scores
        padded = np.concatenate([np.zeros(4), raw])
        expected = np.array(
            [padded[i : i + 5].mean() for i in range(50)]
        )
        assert np.allclose(smooth, expected, atol=1e-12)

    def test_score_series_validation(self):
        with pytest.raises(ValueError):
            AnomalyScoreSeries(np.array([-0.1, 0.2]))
        with pytest.raises(ValueError):
            AnomalyScoreSeries(np.array([np.nan]))
        with pytest.raises(ValueError):
            AnomalyScoreSeries(np.array([]))


class TestPersistence:
    def test_bit_exact_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        train = random_frame(rng)
        model = fit(train)
        path = tmp_path / "model.npz"
        model.save(path)
        loaded = ScoredModel.load(path)
        for name in ("center", "spread", "clip_low", "clip_high", "mean", "basis"):
            assert np.array_equal(getattr(model, name), getattr(loaded, name))
        assert loaded.smooth_window == model.smooth_window
        test = random_frame(rng)
        assert np.array_equal(
            score_frame(model, test).scores, score_frame(loaded, test).scores
        )

    def test_unknown_format_rejected(self, tmp_path):
        path = tmp_path / "weird.npz"
        np.savez(path, format=np.array("something-else"), x=np.zeros(3))
        with pytest.raises(ValueError, match="unknown model format"):
            ScoredModel.load(path)

    def test_model_validation(self):
        eye = np.eye(3)
        with pytest.raises(ValueError, match="orthonormal"):
            ScoredModel(
                center=np.zeros(3),
                spread=np.ones(3),
                clip_low=-np.ones(3),
                clip_high=np.ones(3),
                mean=np.zeros(3),
                basis=eye[:, :2] * 2.0,
                smooth_window=1,
            )


class TestSweep:
    def test_brute_force_agreement(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            n = int(rng.integers(5, 60))
            scores = AnomalyScoreSeries(rng.random(n).round(2))
            labels = LabelSeries((rng.random(n) < 0.3).astype(np.int8))
            threshold, report = sweep_threshold(scores, labels)
            candidates = np.concatenate(
                (np.unique(scores.scores), [np.inf])
            )
            best = max(
                score(
                    labels,
                    predictions_at_threshold(scores, float(t)),
                    Protocol.POINT_WISE,
                ).f1
                for t in candidates
            )
            assert report.f1 == pytest.approx(best, abs=1e-12)

    def test_tie_prefers_larger_threshold(self):
        # no anomalous point: every threshold scores 0, so the sweep must
        # settle on the all-negative prediction at +inf
        scores = AnomalyScoreSeries(np.array([0.3, 0.7]))
        labels = LabelSeries([0, 0])
        threshold, report = sweep_threshold(scores, labels)
        assert threshold == np.inf
        assert report.f1 == 0.0

    def test_perfect_separation(self):
        scores = AnomalyScoreSeries(np.array([0.1, 0.2, 0.9, 0.8, 0.1]))
        labels = LabelSeries([0, 0, 1, 1, 0])
        threshold, report = sweep_threshold(scores, labels)
        assert threshold == pytest.approx(0.8)
        assert report.f1 == 1.0

    def test_event_wise_sweep(self):
        train, test = synthetic_pair()
        model = fit(train)
        scores = score_frame(model, test)
        threshold, report = sweep_threshold(
            scores, test.labels, Protocol.EVENT_WISE
        )
        assert report.protocol is Protocol.EVENT_WISE
        assert report.f1 > 0.8

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            sweep_threshold(
                AnomalyScoreSeries(np.array([1.0])), LabelSeries([0, 1])
            )


class TestEndToEnd:
    @pytest.mark.parametrize("signal", list(AnomalySignal))
    def test_detects_synthetic_events(self, signal):
        train, test = synthetic_pair(seed=21, signal=signal)
        model = fit(train)
        scores = score_frame(model, test)
        _, report = sweep_threshold(scores, test.labels, Protocol.POINT_WISE)
        assert report.f1 > 0.5

    def test_mean_shift_event_wise_strong(self):
        train, test = synthetic_pair(seed=22)
        model = fit(train)
        scores = score_frame(model, test)
        _, report = sweep_threshold(scores, test.labels, Protocol.EVENT_WISE)
        assert report.f1 > 0.9
