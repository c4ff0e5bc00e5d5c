import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eegattn.corpus import (
    BAND_ORDER,
    DOMAIN_ORDER,
    N_DOMAINS,
    N_ELECTRODES,
    CorpusFormatError,
    EegCorpus,
    EtFeature,
    FrequencyBand,
    FrequencyDomain,
    Sentence,
    SyntheticSpec,
    Task,
    generate_synthetic,
    load_corpus,
    save_corpus,
)
from eegattn.stats import electrode_map

from conftest import make_corpus, make_record


class TestEnums:
    def test_eight_domains_with_expected_hz_ranges(self):
        expected = {
            "theta1": (4.0, 6.0),
            "theta2": (6.5, 8.0),
            "alpha1": (8.5, 10.0),
            "alpha2": (10.5, 13.0),
            "beta1": (13.5, 18.0),
            "beta2": (18.5, 30.0),
            "gamma1": (30.5, 40.0),
            "gamma2": (40.0, 49.5),
        }
        assert len(DOMAIN_ORDER) == 8
        for domain in FrequencyDomain:
            assert domain.hz_range == expected[domain.value]

    def test_band_binning_covers_all_domains_without_overlap(self):
        seen = []
        for band in FrequencyBand:
            a, b = band.source_domains
            assert a.value.startswith(band.value)
            assert b.value.startswith(band.value)
            seen += [a, b]
        assert sorted(seen, key=lambda d: d.index) == list(DOMAIN_ORDER)

    def test_five_et_features_including_trt(self):
        assert len(EtFeature) == 5
        assert EtFeature.TRT in EtFeature


class TestRecordValidation:
    def test_wrong_domain_shape_rejected(self):
        with pytest.raises(ValueError, match="105"):
            make_record(domains=np.ones((N_DOMAINS, 104)))

    def test_domains_are_read_only(self):
        rec = make_record()
        with pytest.raises(ValueError):
            rec.domains[0, 0] = 2.0

    def test_band_power_is_mean_of_source_domains(self):
        domains = np.zeros((N_DOMAINS, N_ELECTRODES))
        domains[FrequencyDomain.THETA1.index] = 2.0
        domains[FrequencyDomain.THETA2.index] = 4.0
        rec = make_record(domains=domains)
        assert np.all(rec.band_power(FrequencyBand.THETA) == 3.0)
        assert np.all(rec.band_power(FrequencyBand.ALPHA) == 0.0)

    def test_corpus_validate_catches_dangling_and_out_of_range(self):
        rec = make_record(sentence_id="s0", token_index=0)
        corpus = EegCorpus(
            (rec,), {"s1": Sentence("s1", Task.NR, 1, ("a",))}, (1,)
        )
        with pytest.raises(ValueError, match="unknown sentence"):
            corpus.validate()
        corpus = EegCorpus(
            (make_record(sentence_id="s0", token_index=5),),
            {"s0": Sentence("s0", Task.NR, 1, ("a", "b"))},
            (1,),
        )
        with pytest.raises(ValueError, match="token_index"):
            corpus.validate()


class TestRoundTrip:
    def test_empty_file_loads_as_empty_corpus(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        corpus = load_corpus(path)
        assert corpus.records == ()
        assert corpus.sentences == {}

    def test_empty_corpus_saves_header_only(self, tmp_path):
        corpus = EegCorpus((), {}, (1, 2))
        path = tmp_path / "empty.jsonl"
        save_corpus(corpus, path)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 1
        assert '"schema"' in lines[0]

    def test_single_record_round_trip(self, tmp_path):
        rec = make_record(value=0.5, token_text="t0")
        corpus = make_corpus([rec])
        path = tmp_path / "one.jsonl"
        save_corpus(corpus, path)
        loaded = load_corpus(path)
        assert len(loaded.records) == 1
        assert len(loaded.sentences) == 1
        assert loaded.equals(corpus)

    def test_synthetic_round_trip_seed_7(self, tmp_path):
        spec = SyntheticSpec(
            n_sentences_nr=4,
            n_sentences_ar=3,
            tokens_per_sentence_range=(2, 5),
            n_participants=2,
            informative_electrodes=(10, 11),
            band_shift={FrequencyBand.THETA: 0.8},
            noise_sigma=0.4,
            seed=7,
        )
        corpus = generate_synthetic(spec)
        path = tmp_path / "synth.jsonl"
        save_corpus(corpus, path)
        loaded = load_corpus(path)
        assert loaded.equals(corpus)
        # every loaded record carries the full 8 x 105 grid
        for rec in loaded.records:
            assert rec.domains.shape == (N_DOMAINS, N_ELECTRODES)

    @settings(max_examples=20, deadline=None)
    @given(
        values=st.lists(
            st.floats(
                allow_nan=False,
                allow_infinity=False,
                width=64,
                min_value=-1e12,
                max_value=1e12,
            ),
            min_size=3,
            max_size=3,
        )
    )
    def test_any_finite_floats_survive_round_trip(self, tmp_path_factory, values):
        domains = np.ones((N_DOMAINS, N_ELECTRODES))
        domains[0, :3] = values
        corpus = make_corpus([make_record(domains=domains)])
        path = tmp_path_factory.mktemp("rt") / "c.jsonl"
        save_corpus(corpus, path)
        assert load_corpus(path).equals(corpus)

    def test_refuses_to_write_non_finite_value(self, tmp_path):
        domains = np.ones((N_DOMAINS, N_ELECTRODES))
        domains[2, 7] = np.nan
        corpus = make_corpus([make_record(domains=domains, sentence_id="bad-sent")])
        with pytest.raises(ValueError, match="bad-sent"):
            save_corpus(corpus, tmp_path / "nope.jsonl")


class TestLoaderErrors:
    META = (
        '{"schema":"eeg-corpus/1","electrode_labels":['
        + ",".join(f'"E{i}"' for i in range(N_ELECTRODES))
        + '],"participants":[1]}'
    )
    SENT = '{"kind":"sentence","sentence_id":"s0","task":"NR","session":1,"tokens":["a"]}'

    def _word_line(self, n_values=N_ELECTRODES, domain_keys=None):
        keys = domain_keys or [d.value for d in DOMAIN_ORDER]
        domains = ",".join(
            f'"{k}":[{",".join(["1.0"] * n_values)}]' for k in keys
        )
        return (
            '{"kind":"word","participant_id":1,"sentence_id":"s0",'
            f'"token_index":0,"et_feature":"TRT","domains":{{{domains}}}}}'
        )

    def _load(self, tmp_path, lines):
        path = tmp_path / "c.jsonl"
        path.write_text("\n".join(lines) + "\n")
        return load_corpus(path)

    def test_wrong_electrode_count_names_line_and_expected_length(self, tmp_path):
        with pytest.raises(CorpusFormatError, match=r"line 3.*105"):
            self._load(tmp_path, [self.META, self.SENT, self._word_line(104)])

    def test_unknown_domain_key(self, tmp_path):
        keys = [d.value for d in DOMAIN_ORDER[:-1]] + ["delta1"]
        with pytest.raises(CorpusFormatError, match="delta1"):
            self._load(tmp_path, [self.META, self.SENT, self._word_line(domain_keys=keys)])

    def test_missing_domain_key(self, tmp_path):
        keys = [d.value for d in DOMAIN_ORDER[:-1]]
        with pytest.raises(CorpusFormatError, match="gamma2"):
            self._load(tmp_path, [self.META, self.SENT, self._word_line(domain_keys=keys)])

    def test_word_before_sentence_is_dangling(self, tmp_path):
        with pytest.raises(CorpusFormatError, match=r"line 2.*unknown sentence"):
            self._load(tmp_path, [self.META, self._word_line(), self.SENT])

    def test_malformed_json_reports_line(self, tmp_path):
        with pytest.raises(CorpusFormatError, match="line 2"):
            self._load(tmp_path, [self.META, "{not json"])

    def test_missing_metadata_line(self, tmp_path):
        with pytest.raises(CorpusFormatError, match="schema"):
            self._load(tmp_path, [self.SENT])


class TestSyntheticGenerator:
    def test_same_spec_same_seed_identical(self):
        spec = SyntheticSpec(n_sentences_nr=3, n_sentences_ar=3, seed=11)
        assert generate_synthetic(spec).equals(generate_synthetic(spec))

    def test_different_seed_differs(self):
        a = generate_synthetic(SyntheticSpec(2, 2, seed=1))
        b = generate_synthetic(SyntheticSpec(2, 2, seed=2))
        assert not a.equals(b)

    def test_empty_request_rejected(self):
        with pytest.raises(ValueError, match="empty corpus"):
            generate_synthetic(SyntheticSpec(0, 0))

    def test_bad_electrode_index_rejected(self):
        with pytest.raises(ValueError, match="0..104"):
            generate_synthetic(
                SyntheticSpec(1, 1, informative_electrodes=(105,))
            )

    def test_bad_sigma_rejected(self):
        with pytest.raises(ValueError, match="noise_sigma"):
            generate_synthetic(SyntheticSpec(1, 1, noise_sigma=0.0))

    def test_shift_applied_to_ar_source_domains_only(self):
        spec = SyntheticSpec(
            n_sentences_nr=10,
            n_sentences_ar=10,
            tokens_per_sentence_range=(4, 8),
            n_participants=2,
            informative_electrodes=(5,),
            band_shift={FrequencyBand.ALPHA: 3.0},
            noise_sigma=0.1,
            seed=3,
        )
        corpus = generate_synthetic(spec)
        rows = {d: [] for d in DOMAIN_ORDER}
        for rec in corpus.trt_records(Task.AR):
            for d in DOMAIN_ORDER:
                rows[d].append(rec.domain_power(d)[5])
        for d in DOMAIN_ORDER:
            mean = np.mean(rows[d])
            if d in FrequencyBand.ALPHA.source_domains:
                assert mean > 3.5
            else:
                assert mean < 1.5
        for rec in corpus.trt_records(Task.NR):
            assert rec.domain_power(FrequencyDomain.ALPHA1)[5] < 3.0

    def test_zero_shift_gives_null_electrode_map(self):
        # Oracle: the stats module itself. Pooled over 20 seeds, at most
        # 2% of electrode tests may reject at p < 0.01 when there is no
        # planted difference.
        total = 0
        rejected = 0
        for seed in range(20):
            spec = SyntheticSpec(
                n_sentences_nr=8,
                n_sentences_ar=8,
                tokens_per_sentence_range=(4, 7),
                n_participants=1,
                noise_sigma=0.5,
                seed=seed,
            )
            corpus = generate_synthetic(spec)
            results = electrode_map(
                corpus, FrequencyBand.THETA, alpha=0.01, n_boot=1000, seed=seed
            )
            total += len(results)
            rejected += sum(r.p_value < 0.01 for r in results)
        assert rejected / total <= 0.02
