"""Multi-task biLSTM sentence classifier with a supervisable attention head.

Architecture: trained-from-scratch token embeddings -> biLSTM states
h_t (T, 2h) -> per-token pre-softmax score a_hat_t = sigmoid(w . tanh(W h_t + b))
-> attention weights alpha = softmax(a_hat) -> sentence vector
s = sum_t alpha_t h_t -> prediction y_hat = sigmoid(u . s + c).

Training alternates two kinds of step:
  main_step  - batch-summed squared error (y - y_hat)^2; updates ALL
               parameters.
  aux_step   - batch-summed squared error between external supervision
               scalars and the pre-softmax scores a_hat; updates ONLY
               the attention scorer (w, W, b).  Everything else is
               bit-frozen.
The supervision scalars live in [0, 1/e], which the sigmoid range of
a_hat covers.  Evaluation never touches auxiliary data.
"""

import csv
import json
from dataclasses import asdict, dataclass

import numpy as np

from ._rand import substream
from .neural import (
    AdamState,
    ModelParams,
    adam_step,
    add_bilstm_params,
    bilstm_backward,
    bilstm_forward,
    dropout_mask,
    pad_batch,
    sigmoid,
)
from .tasksets import LabeledSentence, TaskSplits  # noqa: F401  (re-export)

UNK = "<unk>"

ATTENTION_PARAMS = ("attn.W", "attn.b", "attn.w")


@dataclass(frozen=True)
class SeqModelConfig:
    embed_dim: int = 64
    hidden: int = 50  # per direction
    attn_hidden: int = 50
    dropout: float = 0.5
    lr: float = 0.001
    batch: int = 32
    epochs: int = 10
    aux_ratio: int = 1  # auxiliary batches per main batch; 0 = baseline
    e: float = 2.0
    seeds: tuple = (1, 2, 3, 4, 5)

    def __post_init__(self):
        if min(self.embed_dim, self.hidden, self.attn_hidden) < 1:
            raise ValueError("dimensions must be positive")
        if self.aux_ratio < 0:
            raise ValueError("aux_ratio must be non-negative")


@dataclass(frozen=True)
class AttentionTrace:
    """Per-sentence attention diagnostics from one forward pass."""

    sentence_id: str
    scores: tuple  # pre-softmax a_hat, one per token
    weights: tuple  # softmax weights alpha, sum to 1
    prediction: float


def build_vocab(sentences) -> dict:
    """Token -> id map from the training sentences; id 0 is <unk>."""
    tokens = sorted({tok for sent in sentences for tok in sent.tokens})
    vocab = {UNK: 0}
    for tok in tokens:
        vocab[tok] = len(vocab)
    return vocab


class AttentionClassifier:
    def __init__(self, config: SeqModelConfig, vocab: dict, seed: int = 0):
        if vocab.get(UNK) != 0:
            raise ValueError("vocab must map <unk> to id 0")
        self.config = config
        self.vocab = dict(vocab)
        self.seed = int(seed)
        self.params = ModelParams(seed=seed)
        # Embeddings are a trainable input representation, not a weight
        # matrix; the fan-in rule would leave biLSTM states too uniform
        # for the attention scorer to discriminate tokens.
        self.params.add("embed.table", (len(vocab), config.embed_dim), scale=0.5)
        add_bilstm_params(self.params, "bi", config.embed_dim, config.hidden)
        self.params.add("attn.W", (config.attn_hidden, 2 * config.hidden), fan_in=2 * config.hidden)
        self.params.add("attn.b", (config.attn_hidden,), fill=0.0)
        self.params.add("attn.w", (config.attn_hidden,), fan_in=config.attn_hidden)
        self.params.add("out.u", (2 * config.hidden,), fan_in=2 * config.hidden)
        self.params.add("out.c", (), fill=0.0)
        self.adam = AdamState(self.params, lr=config.lr)

    # -- forward pieces -------------------------------------------------

    def _ids(self, tokens):
        if not tokens:
            raise ValueError("empty sentence")
        return np.array([self.vocab.get(t, 0) for t in tokens], dtype=np.int64)

    def _encode(self, token_seqs):
        """Embed + biLSTM a batch of token sequences."""
        ids = [self._ids(toks) for toks in token_seqs]
        table = self.params.values["embed.table"]
        xs, mask = pad_batch([table[i] for i in ids])
        h, cache = bilstm_forward(self.params, "bi", xs, mask)
        return ids, mask, h, cache

    def _score_tokens(self, h):
        """Pre-softmax scores a_hat plus the tanh features M."""
        values = self.params.values
        M = np.tanh(h @ values["attn.W"].T + values["attn.b"])
        a_hat = sigmoid(M @ values["attn.w"])
        return a_hat, M

    @staticmethod
    def _masked_softmax(a_hat, mask):
        shifted = np.where(mask > 0, a_hat, -np.inf)
        e = np.exp(shifted - shifted.max(axis=1, keepdims=True))
        e = np.where(mask > 0, e, 0.0)
        return e / e.sum(axis=1, keepdims=True)

    def _forward_batch(self, token_seqs, drop=None):
        ids, mask, h, cache = self._encode(token_seqs)
        a_hat, M = self._score_tokens(h)
        alpha = self._masked_softmax(a_hat, mask)
        s = np.einsum("bt,bth->bh", alpha, h)
        s_use = s if drop is None else s * drop
        values = self.params.values
        yhat = sigmoid(s_use @ values["out.u"] + values["out.c"])
        return {
            "ids": ids,
            "mask": mask,
            "h": h,
            "cache": cache,
            "a_hat": a_hat,
            "M": M,
            "alpha": alpha,
            "s_use": s_use,
            "yhat": yhat,
        }

    def _scorer_grads(self, dz_score, M, h):
        """Accumulate attention-scorer gradients; returns the dh term."""
        grads = self.params.grads
        values = self.params.values
        grads["attn.w"] += np.einsum("bt,bta->a", dz_score, M)
        dpre = (dz_score[:, :, None] * values["attn.w"]) * (1.0 - M * M)
        grads["attn.W"] += np.einsum("bta,bth->ah", dpre, h)
        grads["attn.b"] += dpre.sum(axis=(0, 1))
        return dpre @ values["attn.W"]

    # -- public API ------------------------------------------------------

    def forward(self, sentence: LabeledSentence):
        """Prediction and attention trace for one sentence (no dropout)."""
        out = self._forward_batch([sentence.tokens])
        T = len(sentence.tokens)
        return float(out["yhat"][0]), AttentionTrace(
            sentence.sentence_id,
            tuple(out["a_hat"][0, :T]),
            tuple(out["alpha"][0, :T]),
            float(out["yhat"][0]),
        )

    def _main_loss_and_grads(self, batch, drop=None) -> float:
        """Batch-summed squared-error loss; accumulates all gradients."""
        y = np.array([s.label for s in batch], dtype=np.float64)
        out = self._forward_batch([s.tokens for s in batch], drop=drop)
        yhat = out["yhat"]
        loss = float(np.sum((y - yhat) ** 2))
        if not np.isfinite(loss):
            raise ValueError("non-finite main loss")

        grads, values = self.params.grads, self.params.values
        mask, h, alpha = out["mask"], out["h"], out["alpha"]

        dz_out = -2.0 * (y - yhat) * yhat * (1.0 - yhat)
        grads["out.u"] += out["s_use"].T @ dz_out
        grads["out.c"] += dz_out.sum()
        ds = np.outer(dz_out, values["out.u"])
        if drop is not None:
            ds = ds * drop
        dalpha = np.einsum("bh,bth->bt", ds, h)
        dh = alpha[:, :, None] * ds[:, None, :]
        inner = np.sum(alpha * dalpha, axis=1, keepdims=True)
        da_hat = alpha * (dalpha - inner)
        dz_score = da_hat * out["a_hat"] * (1.0 - out["a_hat"])
        dh += self._scorer_grads(dz_score, out["M"], h)
        dh *= mask[:, :, None]

        dx = bilstm_backward(out["cache"], dh)
        table_grad = grads["embed.table"]
        for b, ids in enumerate(out["ids"]):
            np.add.at(table_grad, ids, dx[b, : len(ids)])
        return loss

    def main_step(self, batch, drop_rng=None):
        """Main-task update on the batch-summed squared error; returns loss.

        Updates every parameter.  Dropout (when a generator is given)
        applies to the attention-pooled sentence vector.
        """
        if not batch:
            raise ValueError("empty batch")
        drop = None
        if drop_rng is not None and self.config.dropout > 0:
            drop = dropout_mask(
                (len(batch), 2 * self.config.hidden), self.config.dropout, drop_rng
            )
        self.params.zero_grads()
        loss = self._main_loss_and_grads(batch, drop=drop)
        adam_step(self.params, self.params.grads, self.adam)
        return loss

    def aux_step(self, batch):
        """Attention-supervision update; returns the Eq-style token loss.

        Only the scorer parameters (attn.w, attn.W, attn.b) move; the
        embeddings, biLSTM and output head are bit-frozen.
        """
        if not batch:
            raise ValueError("empty batch")
        token_seqs = []
        for seq in batch:
            if len(seq.tokens) != len(seq.scores):
                raise ValueError(
                    f"alignment mismatch for sentence {seq.sentence_id!r}"
                )
            token_seqs.append(seq.tokens)
        ids, mask, h, _ = self._encode(token_seqs)
        a_hat, M = self._score_tokens(h)
        targets = np.zeros_like(a_hat)
        for b, seq in enumerate(batch):
            targets[b, : len(seq.scores)] = seq.scores
        diff = (a_hat - targets) * mask
        loss = float(np.sum(diff**2))
        if not np.isfinite(loss):
            raise ValueError("non-finite auxiliary loss")

        self.params.zero_grads(ATTENTION_PARAMS)
        dz_score = 2.0 * diff * a_hat * (1.0 - a_hat)
        self._scorer_grads(dz_score, M, h)
        adam_step(self.params, self.params.grads, self.adam, names=ATTENTION_PARAMS)
        return loss

    # -- persistence -----------------------------------------------------

    def save(self, path) -> None:
        id_to_token = [None] * len(self.vocab)
        for tok, i in self.vocab.items():
            id_to_token[i] = tok
        self.params.save(
            path,
            step=max(self.adam.steps.values(), default=0),
            extra={
                "kind": "attention-classifier",
                "config": asdict(self.config),
                "vocab": id_to_token,
            },
        )

    @classmethod
    def load(cls, path) -> "AttentionClassifier":
        params, manifest = ModelParams.load(path)
        extra = manifest.get("extra", {})
        if extra.get("kind") != "attention-classifier":
            raise ValueError(f"{path} is not an attention-classifier checkpoint")
        cfg = dict(extra["config"])
        cfg["seeds"] = tuple(cfg.get("seeds", (1, 2, 3, 4, 5)))
        config = SeqModelConfig(**cfg)
        vocab = {tok: i for i, tok in enumerate(extra["vocab"])}
        model = cls.__new__(cls)
        model.config = config
        model.vocab = vocab
        model.seed = manifest["seed"]
        model.params = params
        model.adam = AdamState(params, lr=config.lr)
        return model


@dataclass(frozen=True)
class PrfResult:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int


def evaluate(model: AttentionClassifier, test, threshold: float = 0.5) -> PrfResult:
    """Positive-class precision/recall/F1 at the given threshold."""
    if not test:
        raise ValueError("empty test set")
    tp = fp = fn = tn = 0
    batch = 128
    for start in range(0, len(test), batch):
        part = test[start : start + batch]
        out = model._forward_batch([s.tokens for s in part])
        pred = (out["yhat"] >= threshold).astype(int)
        for s, p in zip(part, pred):
            if p == 1 and s.label == 1:
                tp += 1
            elif p == 1 and s.label == 0:
                fp += 1
            elif p == 0 and s.label == 1:
                fn += 1
            else:
                tn += 1
    precision = tp / (tp + fp) if (tp + fp) else 1.0
    recall = tp / (tp + fn) if (tp + fn) else 1.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    return PrfResult(precision, recall, f1, tp, fp, fn, tn)


@dataclass
class MultitaskLogRow:
    epoch: int
    main_loss: float
    aux_loss: float
    dev_precision: float
    dev_recall: float
    dev_f1: float


def train_multitask(
    config: SeqModelConfig,
    main_train,
    main_dev,
    aux_scores,
    seed: int = 0,
):
    """Alternating training; returns (model, log).

    Per main batch, ``aux_ratio`` auxiliary batches run first (auxiliary
    data is recycled cyclically; it is usually much smaller than the
    main set).  Model selection is by dev F1.  With aux_ratio = 0 or no
    aux data this is exactly the unsupervised baseline.
    """
    if not main_train:
        raise ValueError("empty main training set")
    aux_scores = list(aux_scores) if aux_scores else []
    if config.aux_ratio > 0 and not aux_scores:
        raise ValueError("aux_ratio > 0 but no auxiliary score sequences given")
    model = AttentionClassifier(config, build_vocab(main_train), seed=seed)
    shuffle_rng = substream(seed, "seqlabel-shuffle")
    drop_rng = substream(seed, "seqlabel-dropout")

    aux_ptr = 0

    def next_aux_batch():
        nonlocal aux_ptr
        batch = []
        for _ in range(min(config.batch, len(aux_scores))):
            batch.append(aux_scores[aux_ptr])
            aux_ptr = (aux_ptr + 1) % len(aux_scores)
        return batch

    log = []
    best_f1 = -1.0
    best_snapshot = model.params.snapshot()
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(len(main_train))
        main_losses = []
        aux_losses = []
        n_examples = 0
        for start in range(0, len(order), config.batch):
            batch = [main_train[i] for i in order[start : start + config.batch]]
            for _ in range(config.aux_ratio):
                aux_losses.append(model.aux_step(next_aux_batch()))
            main_losses.append(model.main_step(batch, drop_rng))
            n_examples += len(batch)
        main_loss = float(np.sum(main_losses) / n_examples)
        aux_loss = float(np.mean(aux_losses)) if aux_losses else 0.0
        dev = evaluate(model, main_dev) if main_dev else None
        row = MultitaskLogRow(
            epoch,
            main_loss,
            aux_loss,
            dev.precision if dev else float("nan"),
            dev.recall if dev else float("nan"),
            dev.f1 if dev else float("nan"),
        )
        log.append(row)
        if dev and dev.f1 > best_f1:
            best_f1 = dev.f1
            best_snapshot = model.params.snapshot()
    if main_dev:
        model.params.restore(best_snapshot)
    return model, log


def main_gradient_closure(model: AttentionClassifier, batch):
    """Deterministic closure over the real training-gradient path.

    Suitable for grad_check: no dropout, loss exactly as main_step
    computes it, gradients accumulated into model.params.grads.
    """

    def closure():
        return model._main_loss_and_grads(batch, drop=None)

    return closure


def randomize_parameters(model: AttentionClassifier, rng, scale: float = 0.7) -> None:
    """Redraw every parameter uniform(-scale, scale) for gradient checks.

    At the tiny training-init scales many gradient coordinates are
    second-order small, where finite differences see only rounding
    noise; healthy random draws keep every path exercised.
    """
    for arr in model.params.values.values():
        arr[...] = rng.uniform(-scale, scale, arr.shape)
    model.params.version += 1


def supervision_distance(model: AttentionClassifier, aux_scores) -> float:
    """Mean squared distance between a_hat and the supervision targets."""
    total = 0.0
    count = 0
    for seq in aux_scores:
        out = model._forward_batch([seq.tokens])
        a_hat = out["a_hat"][0, : len(seq.tokens)]
        total += float(np.sum((a_hat - np.asarray(seq.scores)) ** 2))
        count += len(seq.tokens)
    return total / count if count else 0.0


def write_multitask_log(log, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["epoch", "main_loss", "aux_loss", "dev_precision", "dev_recall", "dev_f1"]
        )
        for row in log:
            writer.writerow(
                [
                    row.epoch,
                    f"{row.main_loss:.6f}",
                    f"{row.aux_loss:.6f}",
                    f"{row.dev_precision:.4f}",
                    f"{row.dev_recall:.4f}",
                    f"{row.dev_f1:.4f}",
                ]
            )


def write_run_manifest(path, config: SeqModelConfig, seeds, inputs, results) -> None:
    """JSON manifest of a multi-seed protocol run."""
    import hashlib
    import os

    def digest(p):
        h = hashlib.sha256()
        with open(p, "rb") as fh:
            for chunk in iter(lambda: fh.read(65536), b""):
                h.update(chunk)
        return h.hexdigest()

    obj = {
        "schema": "seqlabel-run/1",
        "config": asdict(config),
        "seeds": list(seeds),
        "inputs": [
            {"path": str(p), "sha256": digest(p)} for p in inputs if os.path.exists(p)
        ],
        "results": results,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
