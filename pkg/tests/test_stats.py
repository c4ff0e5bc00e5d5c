import numpy as np
import pytest

from eegattn.corpus import (
    DOMAIN_ORDER,
    N_DOMAINS,
    N_ELECTRODES,
    FrequencyBand,
    FrequencyDomain,
    SyntheticSpec,
    Task,
    generate_synthetic,
)
from eegattn.stats import (
    Direction,
    band_power,
    bootstrap_ttest,
    electrode_map,
    welch_t,
    write_electrode_map_tsv,
)

from conftest import make_corpus, make_record


class TestBandPower:
    def test_mean_of_the_two_source_domains(self):
        domains = np.zeros((N_DOMAINS, N_ELECTRODES))
        domains[FrequencyDomain.THETA1.index, :] = 2.0
        domains[FrequencyDomain.THETA2.index, :] = 4.0
        out = band_power([make_record(domains=domains)], FrequencyBand.THETA)
        assert out.shape == (1, N_ELECTRODES)
        assert np.all(out == 3.0)

    def test_equal_domains_give_the_domain_back(self):
        rng = np.random.default_rng(0)
        row = rng.uniform(0.5, 2.0, N_ELECTRODES)
        domains = np.tile(row, (N_DOMAINS, 1))
        out = band_power([make_record(domains=domains)], FrequencyBand.BETA)
        assert np.array_equal(out[0], row)

    def test_empty_record_set_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            band_power([], FrequencyBand.THETA)

    def test_mixed_et_features_rejected(self):
        from eegattn.corpus import EtFeature

        recs = [
            make_record(et_feature=EtFeature.TRT),
            make_record(et_feature=EtFeature.FFD),
        ]
        with pytest.raises(ValueError, match="mix"):
            band_power(recs, FrequencyBand.THETA)

    def test_planted_shift_shows_up_in_binned_mean(self):
        # Monte-carlo oracle: a theta shift of 1.0 in both source domains
        # moves the binned theta mean by about 1.0.
        shift = 1.0
        sigma = 0.3
        spec = SyntheticSpec(
            n_sentences_nr=20,
            n_sentences_ar=20,
            tokens_per_sentence_range=(5, 9),
            n_participants=2,
            informative_electrodes=(42,),
            band_shift={FrequencyBand.THETA: shift},
            noise_sigma=sigma,
            seed=5,
        )
        corpus = generate_synthetic(spec)
        nr = band_power(corpus.trt_records(Task.NR), FrequencyBand.THETA)[:, 42]
        ar = band_power(corpus.trt_records(Task.AR), FrequencyBand.THETA)[:, 42]
        n = min(len(nr), len(ar))
        diff = ar.mean() - nr.mean()
        assert abs(diff - shift) < 3 * sigma / np.sqrt(n)


class TestWelchT:
    def test_zero_for_identical_samples(self):
        x = np.array([1.0, 2.0, 3.0])
        assert welch_t(x, x) == 0.0

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(1)
        x = rng.normal(0, 1, 50)
        y = rng.normal(0.3, 2, 80)
        expected = (x.mean() - y.mean()) / np.sqrt(
            x.var(ddof=1) / 50 + y.var(ddof=1) / 80
        )
        assert welch_t(x, y) == pytest.approx(expected, rel=1e-12)

    def test_constant_unequal_samples_give_inf(self):
        assert welch_t(np.ones(3), np.zeros(3)) == np.inf
        assert welch_t(np.zeros(3), np.ones(3)) == -np.inf


class TestBootstrapTtest:
    def test_identical_samples_t_zero_p_large(self):
        x = np.array([0.3, 1.2, -0.5, 2.0, 0.0])
        t, p = bootstrap_ttest(x, x, n_boot=1000, seed=0)
        assert t == 0.0
        assert p >= 0.5

    def test_separated_normals_reject_in_99_of_100_trials(self):
        hits = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            x = rng.normal(0, 1, 200)
            y = rng.normal(1, 1, 200)
            _, p = bootstrap_ttest(x, y, n_boot=2000, seed=seed)
            hits += p < 0.01
        assert hits >= 99

    def test_null_rejection_rate_smoke(self):
        # Fast calibration smoke; the full 1000-trial version runs in the
        # acceptance suite.
        rejections = 0
        trials = 200
        for seed in range(trials):
            rng = np.random.default_rng(10_000 + seed)
            x = rng.normal(0, 1, 60)
            y = rng.normal(0, 1, 60)
            _, p = bootstrap_ttest(x, y, n_boot=1000, seed=seed)
            rejections += p < 0.01
        assert rejections / trials < 0.035

    def test_degenerate_constant_samples(self):
        t, p = bootstrap_ttest(np.ones(5), np.ones(5), n_boot=1000, seed=0)
        assert (t, p) == (0.0, 1.0)
        t, p = bootstrap_ttest(np.full(5, 2.0), np.ones(5), n_boot=1000, seed=0)
        assert t == np.inf
        assert p == pytest.approx(1 / 1001)

    def test_swap_negates_t_and_preserves_p_exactly(self):
        rng = np.random.default_rng(7)
        for seed in range(10):
            x = rng.normal(0, 1, 31)
            y = rng.normal(0.4, 1.5, 44)
            t1, p1 = bootstrap_ttest(x, y, n_boot=1000, seed=seed)
            t2, p2 = bootstrap_ttest(y, x, n_boot=1000, seed=seed)
            assert t1 == -t2
            assert p1 == p2

    def test_p_value_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            x = rng.normal(0, 1, 20)
            y = rng.normal(2.0, 1, 20)
            _, p = bootstrap_ttest(x, y, n_boot=1000, seed=0)
            assert 1 / 1001 <= p <= 1.0

    def test_preconditions(self):
        with pytest.raises(ValueError, match="at least 2"):
            bootstrap_ttest([1.0], [1.0, 2.0], n_boot=1000)
        with pytest.raises(ValueError, match="n_boot"):
            bootstrap_ttest([1.0, 2.0], [1.0, 2.0], n_boot=10)


class TestElectrodeMap:
    def _shifted_corpus(self, seed=0):
        return generate_synthetic(
            SyntheticSpec(
                n_sentences_nr=15,
                n_sentences_ar=15,
                tokens_per_sentence_range=(4, 8),
                n_participants=2,
                informative_electrodes=(10, 11, 12),
                band_shift={FrequencyBand.THETA: 1.0},
                noise_sigma=0.1,
                seed=seed,
            )
        )

    def test_planted_theta_shift_flagged_ar_higher(self):
        corpus = self._shifted_corpus(seed=2)
        results = electrode_map(
            corpus, FrequencyBand.THETA, alpha=0.01, n_boot=2000, seed=2
        )
        flagged = {r.electrode_index for r in results if r.direction is Direction.AR_HIGHER}
        assert {10, 11, 12} <= flagged
        false_flags = flagged - {10, 11, 12}
        false_flags |= {
            r.electrode_index for r in results if r.direction is Direction.NR_HIGHER
        }
        assert len(false_flags) <= 0.02 * N_ELECTRODES

    def test_unshifted_band_stays_null(self):
        corpus = self._shifted_corpus(seed=4)
        results = electrode_map(
            corpus, FrequencyBand.BETA, alpha=0.01, n_boot=1000, seed=4
        )
        assert sum(r.direction is not Direction.NONE for r in results) <= 2

    def test_single_task_corpus_rejected(self):
        corpus = generate_synthetic(SyntheticSpec(3, 0, seed=0))
        with pytest.raises(ValueError, match="AR"):
            electrode_map(corpus, FrequencyBand.THETA, n_boot=1000)

    def test_tsv_export_shape(self, tmp_path):
        corpus = generate_synthetic(
            SyntheticSpec(4, 4, tokens_per_sentence_range=(3, 5), seed=1)
        )
        results = electrode_map(corpus, FrequencyBand.ALPHA, n_boot=1000, seed=1)
        path = tmp_path / "map.tsv"
        write_electrode_map_tsv(results, corpus.electrode_labels, path)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 1 + N_ELECTRODES
        header = lines[0].split("\t")
        assert header == [
            "band",
            "electrode_index",
            "electrode_label",
            "mean_nr",
            "mean_ar",
            "t_stat",
            "p_value",
            "direction",
        ]
