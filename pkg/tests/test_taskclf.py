import numpy as np
import pytest

from eegattn.corpus import FrequencyBand, SyntheticSpec, generate_synthetic
from eegattn.neural import grad_check
from eegattn.reduction import ReductionConfig, run_reduction
from eegattn.taskclf import (
    EmbeddedSentence,
    LstmClassifier,
    TaskClfConfig,
    assemble_dataset,
    evaluate,
    train,
    write_train_log,
)

THETA = FrequencyBand.THETA


def shifted_pipeline(seed=0, shift=1.0, n=24, bands=(THETA,), k=5):
    corpus = generate_synthetic(
        SyntheticSpec(
            n_sentences_nr=n,
            n_sentences_ar=n,
            tokens_per_sentence_range=(3, 7),
            n_participants=2,
            informative_electrodes=(10, 11, 12),
            band_shift={b: shift for b in bands},
            noise_sigma=0.1,
            seed=seed,
        )
    )
    cfg = ReductionConfig(k=k, bands=bands, seed=seed)
    report, embeddings, (train_c, dev_c, test_c) = run_reduction(corpus, cfg)
    return embeddings, (train_c, dev_c, test_c)


class TestAssembleDataset:
    def test_concat_bands_gives_3k_dims(self):
        embeddings, (train_c, _, _) = shifted_pipeline(
            bands=ReductionConfig().bands, k=5
        )
        data = assemble_dataset(embeddings["train"], train_c.sentences)
        assert data[0].matrix.shape[1] == 15

    def test_single_band_k_dims(self):
        embeddings, (train_c, _, _) = shifted_pipeline(k=5)
        data = assemble_dataset(
            embeddings["train"], train_c.sentences, concat_bands=False
        )
        assert data[0].matrix.shape[1] == 5
        assert {d.label for d in data} == {0, 1}

    def test_average_participants_averages_matrices(self):
        embeddings, (train_c, _, _) = shifted_pipeline()
        per_part = assemble_dataset(
            embeddings["train"], train_c.sentences, concat_bands=False
        )
        averaged = assemble_dataset(
            embeddings["train"],
            train_c.sentences,
            concat_bands=False,
            average_participants=True,
        )
        assert len(averaged) == len(train_c.sentences)
        sid = averaged[0].sentence_id
        manual = np.mean(
            [d.matrix for d in per_part if d.sentence_id == sid], axis=0
        )
        assert np.allclose(averaged[0].matrix, manual)

    def test_session_labels(self):
        embeddings, (train_c, _, _) = shifted_pipeline()
        data = assemble_dataset(
            embeddings["train"], train_c.sentences, label_kind="session",
            concat_bands=False,
        )
        for d in data:
            assert d.label == (1 if train_c.sentences[d.sentence_id].session == 2 else 0)

    def test_mixed_selection_provenance_rejected(self):
        from eegattn.reduction import ReducedEmbedding

        a = ReducedEmbedding("s", 0, 1, THETA, (1, 2), np.array([0.1, 0.2]))
        b = ReducedEmbedding("s", 1, 1, THETA, (3, 4), np.array([0.1, 0.2]))
        with pytest.raises(ValueError, match="provenance"):
            assemble_dataset([a, b], {}, concat_bands=False)


def make_separable_dataset(n=60, T=5, dim=6, gap=3.0, seed=0):
    rng = np.random.default_rng(seed)
    data = []
    for i in range(n):
        label = i % 2
        base = rng.normal(0, 0.3, (T, dim)) + (gap if label else 0.0)
        data.append(EmbeddedSentence(f"s{i}", base, label))
    return data


class TestTraining:
    def test_learns_separable_sequences(self):
        data = make_separable_dataset(n=80, seed=1)
        cfg = TaskClfConfig(input_dim=6, hidden=12, epochs=60, seed=1)
        clf, log = train(cfg, data[:56], data[56:])
        result = evaluate(clf, data[56:])
        assert result.accuracy >= 0.95
        assert log[-1].train_loss < log[0].train_loss

    def test_random_labels_stay_at_chance_on_dev(self):
        rng = np.random.default_rng(2)
        data = []
        for i in range(120):
            data.append(
                EmbeddedSentence(f"s{i}", rng.normal(0, 1, (4, 5)), int(rng.integers(0, 2)))
            )
        cfg = TaskClfConfig(input_dim=5, hidden=10, epochs=8, seed=2)
        clf, log = train(cfg, data[:80], data[80:])
        dev = evaluate(clf, data[80:])
        assert abs(dev.accuracy - 0.5) <= 0.15

    def test_seeded_runs_reproduce_exactly(self):
        data = make_separable_dataset(n=40, seed=3)
        cfg = TaskClfConfig(input_dim=6, hidden=8, epochs=3, seed=3)
        clf1, log1 = train(cfg, data[:30], data[30:])
        clf2, log2 = train(cfg, data[:30], data[30:])
        assert clf1.params.checksum() == clf2.params.checksum()
        assert [r.dev_acc for r in log1] == [r.dev_acc for r in log2]

    def test_single_class_training_rejected(self):
        data = [d for d in make_separable_dataset(n=20) if d.label == 0]
        cfg = TaskClfConfig(input_dim=6, epochs=1)
        with pytest.raises(ValueError, match="both classes"):
            train(cfg, data, data)

    def test_defaults_are_pinned(self):
        cfg = TaskClfConfig(input_dim=15)
        assert (cfg.hidden, cfg.dropout, cfg.lr, cfg.batch) == (50, 0.5, 0.001, 32)

    def test_log_csv_records_averaging_flag(self, tmp_path):
        data = make_separable_dataset(n=20, seed=4)
        cfg = TaskClfConfig(input_dim=6, hidden=6, epochs=2, seed=4)
        _, log = train(cfg, data[:16], data[16:])
        path = tmp_path / "log.csv"
        write_train_log(log, path, average_participants=False)
        header, *rows = path.read_text().strip().splitlines()
        assert header.endswith("average_participants")
        assert len(rows) == 2


class TestEvaluate:
    def test_all_correct_is_one(self):
        # force a constant positive classifier onto all-positive data:
        # every prediction is correct by construction
        cfg = TaskClfConfig(input_dim=4, hidden=6, seed=5)
        clf = LstmClassifier(cfg)
        clf.params.values["out.w"][...] = 0.0
        clf.params.values["out.b"][...] = 5.0
        data = [
            EmbeddedSentence(f"s{i}", np.ones((3, 4)), 1) for i in range(10)
        ]
        result = evaluate(clf, data)
        assert result.accuracy == 1.0
        assert result.fp == result.fn == 0

    def test_constant_classifier_on_balanced_set_is_half(self):
        cfg = TaskClfConfig(input_dim=4, hidden=6, seed=0)
        clf = LstmClassifier(cfg)
        # untrained classifier is near-constant; force it exactly constant
        clf.params.values["out.w"][...] = 0.0
        clf.params.values["out.b"][...] = 5.0  # always predicts positive
        data = make_separable_dataset(n=40, T=3, dim=4, seed=6)
        result = evaluate(clf, data)
        assert result.accuracy == 0.5
        assert result.tn == 0

    def test_empty_set_rejected(self):
        cfg = TaskClfConfig(input_dim=4)
        clf = LstmClassifier(cfg)
        with pytest.raises(ValueError, match="empty"):
            evaluate(clf, [])


class TestGradientIntegrity:
    def test_classifier_gradients_match_finite_differences(self):
        # tiny dims keep the finite-difference sweep quick
        cfg = TaskClfConfig(input_dim=3, hidden=4, dropout=0.0, seed=7)
        clf = LstmClassifier(cfg)
        rng = np.random.default_rng(7)
        batch = [
            EmbeddedSentence("a", rng.normal(0, 1, (4, 3)), 1),
            EmbeddedSentence("b", rng.normal(0, 1, (2, 3)), 0),
        ]
        from eegattn.neural import bce, lstm_backward, lstm_forward, pad_batch, sigmoid

        def closure():
            xs, mask = pad_batch([s.matrix for s in batch])
            y = np.array([s.label for s in batch], dtype=float)
            h, cache = lstm_forward(clf.params, "lstm", xs, mask)
            h_last = h[:, -1, :]
            z = h_last @ clf.params.values["out.w"] + clf.params.values["out.b"]
            yhat = sigmoid(z)
            loss = bce(y, yhat)
            dz = (yhat - y) / len(batch)
            clf.params.grads["out.w"] += h_last.T @ dz
            clf.params.grads["out.b"] += dz.sum()
            grad_h = np.zeros_like(h)
            grad_h[:, -1, :] = np.outer(dz, clf.params.values["out.w"])
            lstm_backward(cache, grad_h)
            return loss

        report = grad_check(closure, clf.params, tolerance=1e-4)
        assert report.passed, str(report)


class TestEndToEndOnSyntheticCorpus:
    def test_strong_shift_is_separable_and_sessions_are_not(self):
        # compact version of the acceptance check: task labels separable,
        # session labels at chance, same corpus
        embeddings, (train_c, dev_c, test_c) = shifted_pipeline(
            seed=11, shift=1.0, n=30, bands=ReductionConfig().bands, k=5
        )
        sentences = {**train_c.sentences, **dev_c.sentences, **test_c.sentences}
        train_set = assemble_dataset(embeddings["train"], sentences)
        dev_set = assemble_dataset(embeddings["dev"], sentences)
        test_set = assemble_dataset(embeddings["test"], sentences)
        cfg = TaskClfConfig(input_dim=15, epochs=10, seed=11)
        clf, _ = train(cfg, train_set, dev_set)
        assert evaluate(clf, test_set).accuracy >= 0.95

        sess_train = assemble_dataset(embeddings["train"], sentences, label_kind="session")
        sess_dev = assemble_dataset(embeddings["dev"], sentences, label_kind="session")
        sess_test = assemble_dataset(embeddings["test"], sentences, label_kind="session")
        cfg = TaskClfConfig(input_dim=15, epochs=6, seed=11, label_kind="session")
        clf, _ = train(cfg, sess_train, sess_dev)
        assert abs(evaluate(clf, sess_test).accuracy - 0.5) <= 0.25
