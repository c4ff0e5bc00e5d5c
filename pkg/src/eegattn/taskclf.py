"""Reading-task sanity classifier.

A vanilla LSTM (1 layer, 50 hidden units, dropout 0.5 on the last
hidden state, Adam at 0.001, batch 32) reads sentences as sequences of
k-dimensional (or band-concatenated 3k) EEG word embeddings and
classifies NR vs AR, or session 1 vs session 2.  The task split should
be trivially separable when the reduction captured real differences;
the session split should stay at chance.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from ._rand import substream
from .corpus import FrequencyBand, Task
from .neural import (
    AdamState,
    ModelParams,
    adam_step,
    add_lstm_params,
    bce,
    dropout_mask,
    lstm_backward,
    lstm_forward,
    pad_batch,
    sigmoid,
)


@dataclass(frozen=True)
class TaskClfConfig:
    input_dim: int
    label_kind: str = "task"  # "task" or "session"
    hidden: int = 50
    dropout: float = 0.5
    lr: float = 0.001
    batch: int = 32
    epochs: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.label_kind not in ("task", "session"):
            raise ValueError("label_kind must be 'task' or 'session'")
        if self.input_dim < 1 or self.hidden < 1:
            raise ValueError("dimensions must be positive")


@dataclass(frozen=True)
class EmbeddedSentence:
    sentence_id: str
    matrix: np.ndarray  # (T, input_dim)
    label: int
    participant_id: int | None = None

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] < 1:
            raise ValueError("matrix must be (T, input_dim) with T >= 1")
        if not np.isfinite(matrix).all():
            raise ValueError(f"non-finite embedding for sentence {self.sentence_id!r}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


def assemble_dataset(
    embeddings,
    sentences,
    label_kind: str = "task",
    concat_bands: bool = True,
    average_participants: bool = False,
):
    """Group ReducedEmbedding records into per-sentence input matrices.

    ``sentences`` maps sentence_id to the corpus Sentence (source of the
    task/session label).  With ``concat_bands`` the per-band k-vectors
    are concatenated in canonical band order; otherwise all embeddings
    must share one band.  Without participant averaging each participant
    yields a separate EmbeddedSentence.
    """
    if label_kind not in ("task", "session"):
        raise ValueError("label_kind must be 'task' or 'session'")
    embeddings = list(embeddings)
    if not embeddings:
        raise ValueError("no embeddings given")
    bands = sorted({e.band for e in embeddings}, key=list(FrequencyBand).index)
    if not concat_bands and len(bands) > 1:
        raise ValueError("multiple bands present; enable concat_bands or filter")
    selections = {}
    for emb in embeddings:
        prior = selections.setdefault(emb.band, emb.selected_indices)
        if prior != emb.selected_indices:
            raise ValueError(
                "mixed selection provenance: embeddings disagree on the "
                f"selected electrodes for band {emb.band.value}"
            )
    k = len(embeddings[0].selected_indices)

    # (sentence, participant, band) -> {token_index: values}
    grouped: dict = {}
    for emb in embeddings:
        key = (emb.sentence_id, emb.participant_id)
        grouped.setdefault(key, {}).setdefault(emb.band, {})[emb.token_index] = emb.values

    def label_of(sent):
        if label_kind == "task":
            return 1 if sent.task is Task.AR else 0
        return 1 if sent.session == 2 else 0

    def build_matrix(per_band, n_tokens):
        rows = np.empty((n_tokens, k * len(bands)))
        for b, band in enumerate(bands):
            tokens = per_band.get(band, {})
            for t in range(n_tokens):
                if t not in tokens:
                    raise ValueError("token lacks an embedding for band " + band.value)
                rows[t, b * k : (b + 1) * k] = tokens[t]
        return rows

    out = []
    if average_participants:
        by_sentence: dict = {}
        for (sid, pid), per_band in grouped.items():
            by_sentence.setdefault(sid, []).append(per_band)
        for sid in by_sentence:
            sent = sentences[sid]
            n_tokens = len(sent.tokens)
            mats = [build_matrix(pb, n_tokens) for pb in by_sentence[sid]]
            out.append(
                EmbeddedSentence(sid, np.mean(mats, axis=0), label_of(sent), None)
            )
    else:
        for (sid, pid), per_band in grouped.items():
            sent = sentences[sid]
            out.append(
                EmbeddedSentence(
                    sid, build_matrix(per_band, len(sent.tokens)), label_of(sent), pid
                )
            )
    return out


class LstmClassifier:
    """LSTM -> last hidden state -> dropout -> dense(1) -> sigmoid."""

    def __init__(self, config: TaskClfConfig):
        self.config = config
        self.params = ModelParams(seed=config.seed)
        add_lstm_params(self.params, "lstm", config.input_dim, config.hidden)
        self.params.add("out.w", (config.hidden,), fan_in=config.hidden)
        self.params.add("out.b", (), fill=0.0)
        self.adam = AdamState(self.params, lr=config.lr)

    def _forward_batch(self, batch, drop=None):
        xs, mask = pad_batch([s.matrix for s in batch])
        h, cache = lstm_forward(self.params, "lstm", xs, mask)
        h_last = h[:, -1, :]  # masked forward freezes the last real state
        if drop is not None:
            h_last = h_last * drop
        z = h_last @ self.params.values["out.w"] + self.params.values["out.b"]
        yhat = sigmoid(z)
        return yhat, h_last, cache, mask

    def predict_proba(self, batch):
        yhat, _, _, _ = self._forward_batch(batch)
        return yhat

    def _loss_and_grads(self, batch, drop=None):
        """Mean-BCE loss and accuracy; accumulates gradients."""
        values, grads = self.params.values, self.params.grads
        B = len(batch)
        y = np.array([s.label for s in batch], dtype=np.float64)
        yhat, h_used, cache, mask = self._forward_batch(batch, drop=drop)
        loss = bce(y, yhat)

        dz = (yhat - y) / B  # d(mean BCE)/dz through the sigmoid
        grads["out.w"] += h_used.T @ dz
        grads["out.b"] += dz.sum()
        dh_last = np.outer(dz, values["out.w"])
        if drop is not None:
            dh_last = dh_last * drop
        grad_h = np.zeros((B, mask.shape[1], self.config.hidden))
        grad_h[:, -1, :] = dh_last
        lstm_backward(cache, grad_h)
        acc = float(((yhat >= 0.5).astype(int) == y).mean())
        return loss, acc

    def train_step(self, batch, drop_rng):
        """One Adam update on the mean BCE of the batch; returns (loss, acc)."""
        drop = dropout_mask((len(batch), self.config.hidden), self.config.dropout, drop_rng)
        self.params.zero_grads()
        loss, acc = self._loss_and_grads(batch, drop=drop)
        adam_step(self.params, self.params.grads, self.adam)
        return loss, acc

    def gradient_closure(self, batch):
        """Deterministic grad_check closure over the training path."""

        def closure():
            loss, _ = self._loss_and_grads(batch, drop=None)
            return loss

        return closure


@dataclass
class EvalResult:
    accuracy: float
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


def evaluate(classifier: LstmClassifier, dataset) -> EvalResult:
    """Accuracy and confusion counts at threshold 0.5 (no dropout)."""
    if not dataset:
        raise ValueError("empty evaluation set")
    tp = fp = fn = tn = 0
    batch = 256
    for start in range(0, len(dataset), batch):
        part = dataset[start : start + batch]
        yhat = classifier.predict_proba(part)
        pred = (yhat >= 0.5).astype(int)
        for s, p in zip(part, pred):
            if s.label == 1 and p == 1:
                tp += 1
            elif s.label == 0 and p == 1:
                fp += 1
            elif s.label == 1 and p == 0:
                fn += 1
            else:
                tn += 1
    accuracy = (tp + tn) / (tp + fp + fn + tn)
    return EvalResult(accuracy, tp, fp, fn, tn)


@dataclass
class TrainLogRow:
    epoch: int
    train_loss: float
    train_acc: float
    dev_acc: float


def train(config: TaskClfConfig, train_set, dev_set):
    """Train with dev-accuracy model selection; returns (classifier, log).

    Deterministic under config.seed: shuffling, dropout and the
    parameter initialisation each draw from named substreams.
    """
    if not train_set:
        raise ValueError("empty training set")
    labels = {s.label for s in train_set}
    if labels != {0, 1}:
        raise ValueError("training set must contain both classes")
    clf = LstmClassifier(config)
    shuffle_rng = substream(config.seed, "taskclf-shuffle")
    drop_rng = substream(config.seed, "taskclf-dropout")
    log = []
    best_acc = -1.0
    best_snapshot = clf.params.snapshot()
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(len(train_set))
        losses = []
        accs = []
        for start in range(0, len(order), config.batch):
            batch = [train_set[i] for i in order[start : start + config.batch]]
            loss, acc = clf.train_step(batch, drop_rng)
            if not np.isfinite(loss):
                raise ValueError(f"training diverged (non-finite loss) at epoch {epoch}")
            losses.append(loss * len(batch))
            accs.append(acc * len(batch))
        train_loss = float(np.sum(losses) / len(order))
        train_acc = float(np.sum(accs) / len(order))
        dev_acc = evaluate(clf, dev_set).accuracy if dev_set else train_acc
        log.append(TrainLogRow(epoch, train_loss, train_acc, dev_acc))
        if dev_acc > best_acc:
            best_acc = dev_acc
            best_snapshot = clf.params.snapshot()
    clf.params.restore(best_snapshot)
    return clf, log


def write_train_log(log, path, average_participants=None) -> None:
    """CSV log; the participant-averaging mode is recorded when given."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        header = ["epoch", "train_loss", "train_acc", "dev_acc"]
        if average_participants is not None:
            header.append("average_participants")
        writer.writerow(header)
        for row in log:
            out = [row.epoch, f"{row.train_loss:.6f}", f"{row.train_acc:.4f}", f"{row.dev_acc:.4f}"]
            if average_participants is not None:
                out.append(int(average_participants))
            writer.writerow(out)
