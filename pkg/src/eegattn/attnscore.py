"""Token-level attention supervision scalars.

The EEG path turns per-band k-dimensional word embeddings into one
scalar per token: max-pool the k values per token (per participant),
average the pooled values across participants, normalize by the
sentence maximum, then divide by the damping constant e (default 2).
The result lives in [0, 1/e] with at least one token exactly at 1/e.

Baseline producers share the normalize-and-damp tail: inverse corpus
frequency, an ingested fixation-scalar table, and keyword oracles for
synthetic end-to-end runs.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import FrequencyBand, Task


@dataclass(frozen=True)
class ScalarConfig:
    e: float = 2.0
    pooling: str = "max"  # "mean" exists only for the worse-by-design comparison
    participant_average: bool = True

    def __post_init__(self):
        if not self.e > 0:
            raise ValueError("damping constant e must be positive")
        if self.pooling not in ("max", "mean"):
            raise ValueError(f"pooling must be 'max' or 'mean', got {self.pooling!r}")


@dataclass(frozen=True)
class Provenance:
    kind: str  # "eeg" | "freq_inverse" | "fixation" | "oracle"
    band: FrequencyBand | None = None
    k: int | None = None
    task: Task | None = None

    def to_json(self):
        obj = {"kind": self.kind}
        if self.band is not None:
            obj["band"] = self.band.value
        if self.k is not None:
            obj["k"] = self.k
        if self.task is not None:
            obj["task"] = self.task.value
        return obj

    @classmethod
    def from_json(cls, obj):
        return cls(
            kind=obj["kind"],
            band=FrequencyBand(obj["band"]) if "band" in obj else None,
            k=obj.get("k"),
            task=Task(obj["task"]) if "task" in obj else None,
        )


@dataclass(frozen=True)
class AttentionScoreSeq:
    """Token-aligned supervision scalars for one sentence."""

    sentence_id: str
    tokens: tuple
    scores: tuple
    provenance: Provenance

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        if len(self.tokens) != len(self.scores):
            raise ValueError(
                f"{len(self.tokens)} tokens but {len(self.scores)} scores "
                f"for sentence {self.sentence_id!r}"
            )


def pool_token(x) -> float:
    """Collapse one token's k-vector to a scalar (maximum entry)."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot pool an empty vector")
    return float(x.max())


def normalize_sentence(a) -> np.ndarray:
    """Divide by the sentence maximum; the output max is exactly 1."""
    a = np.asarray(a, dtype=np.float64)
    peak = a.max()
    if not peak > 0:
        raise ValueError(
            "sentence maximum must be positive to normalize "
            f"(got max {peak!r})"
        )
    return a / peak


def damp(a, e: float = 2.0) -> np.ndarray:
    """Divide normalized scores by the constant e (range becomes [0, 1/e])."""
    if not e > 0:
        raise ValueError("damping constant e must be positive")
    return np.asarray(a, dtype=np.float64) / e


def _finish(raw, e):
    return damp(normalize_sentence(raw), e)


def sentence_scores(
    embeddings,
    tokens,
    config: ScalarConfig = ScalarConfig(),
    task: Task | None = None,
) -> AttentionScoreSeq:
    """Eq-chain scores for one sentence from its per-participant embeddings.

    ``embeddings`` must all belong to one sentence and one band; every
    token needs at least one participant.  Pooled raw values are averaged
    across participants before normalization and damping.
    """
    embeddings = list(embeddings)
    if not embeddings:
        raise ValueError("no embeddings given")
    sentence_ids = {e.sentence_id for e in embeddings}
    bands = {e.band for e in embeddings}
    if len(sentence_ids) != 1:
        raise ValueError(f"embeddings span several sentences: {sorted(sentence_ids)}")
    if len(bands) != 1:
        raise ValueError("embeddings span several bands; score one band at a time")
    sid = embeddings[0].sentence_id
    band = embeddings[0].band
    k = len(embeddings[0].selected_indices)
    tokens = tuple(tokens)

    pooled: dict = {}
    for emb in embeddings:
        if config.pooling == "max":
            value = pool_token(emb.values)
        else:
            value = float(np.asarray(emb.values, dtype=np.float64).mean())
        pooled.setdefault(emb.token_index, []).append(value)
    raw = np.empty(len(tokens))
    for t in range(len(tokens)):
        if t not in pooled:
            raise ValueError(f"token {t} of sentence {sid!r} has no embeddings")
        values = pooled[t]
        raw[t] = float(np.mean(values)) if config.participant_average else values[0]
    return AttentionScoreSeq(
        sid,
        tokens,
        _finish(raw, config.e),
        Provenance("eeg", band=band, k=k, task=task),
    )


def eeg_scores(embeddings, sentences, band, config: ScalarConfig = ScalarConfig()):
    """sentence_scores over a whole embedding list, one band.

    ``sentences`` maps sentence_id to an object with .tokens (and
    optionally .task for provenance).
    """
    band = FrequencyBand(band)
    by_sentence: dict = {}
    for emb in embeddings:
        if emb.band is band:
            by_sentence.setdefault(emb.sentence_id, []).append(emb)
    out = []
    for sid in by_sentence:
        sent = sentences[sid]
        out.append(
            sentence_scores(
                by_sentence[sid],
                sent.tokens,
                config,
                task=getattr(sent, "task", None),
            )
        )
    return out


def freq_inverse_scores(sentences, frequency_table, config: ScalarConfig = ScalarConfig()):
    """Inverse-corpus-frequency baseline: raw score 1/count per token.

    Lookup is lowercased; unseen tokens count 1 (maximal raw score).
    """
    if not frequency_table:
        raise ValueError("empty frequency table")
    out = []
    for sent in sentences:
        raw = np.array(
            [1.0 / frequency_table.get(tok.lower(), 1) for tok in sent.tokens]
        )
        out.append(
            AttentionScoreSeq(
                sent.sentence_id,
                tuple(sent.tokens),
                _finish(raw, config.e),
                Provenance("freq_inverse"),
            )
        )
    return out


def fixation_scores(sentences, fixation_table, config: ScalarConfig = ScalarConfig(), default=None):
    """Ingested fixation-scalar baseline; raw score straight from the table.

    Tokens absent from the table raise unless ``default`` is given.
    """
    if not fixation_table:
        raise ValueError("empty fixation table")
    out = []
    for sent in sentences:
        raw = np.empty(len(sent.tokens))
        for t, tok in enumerate(sent.tokens):
            key = tok.lower()
            if key in fixation_table:
                raw[t] = fixation_table[key]
            elif default is not None:
                raw[t] = default
            else:
                raise ValueError(
                    f"token {tok!r} missing from the fixation table "
                    "and no default given"
                )
        out.append(
            AttentionScoreSeq(
                sent.sentence_id,
                tuple(sent.tokens),
                _finish(raw, config.e),
                Provenance("fixation"),
            )
        )
    return out


def oracle_scores(sentences, keyword_set, config: ScalarConfig = ScalarConfig(), invert=False):
    """Synthetic supervision: raw 1.0 on keywords, 0.1 elsewhere.

    ``invert=True`` produces the adversarial control (high scores on
    non-keywords).  A sentence without keywords normalizes to a uniform
    1/e everywhere.
    """
    if not keyword_set:
        raise ValueError("empty keyword set")
    keywords = {k.lower() for k in keyword_set}
    hi, lo = (0.1, 1.0) if invert else (1.0, 0.1)
    out = []
    for sent in sentences:
        raw = np.array(
            [hi if tok.lower() in keywords else lo for tok in sent.tokens]
        )
        out.append(
            AttentionScoreSeq(
                sent.sentence_id,
                tuple(sent.tokens),
                _finish(raw, config.e),
                Provenance("oracle"),
            )
        )
    return out


def save_scores(score_seqs, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seq in score_seqs:
            scores = ",".join(np.char.mod("%.17g", np.asarray(seq.scores)))
            fh.write(
                f'{{"sentence_id":{json.dumps(seq.sentence_id)},'
                f'"tokens":{json.dumps(list(seq.tokens))},'
                f'"scores":[{scores}],'
                f'"provenance":{json.dumps(seq.provenance.to_json())}}}\n'
            )


def load_scores(path):
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                out.append(
                    AttentionScoreSeq(
                        obj["sentence_id"],
                        tuple(obj["tokens"]),
                        tuple(obj["scores"]),
                        Provenance.from_json(obj["provenance"]),
                    )
                )
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    return out


def load_frequency_table(path) -> dict:
    """TSV token<TAB>count; counts must be positive integers."""
    table = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected token<TAB>count")
            token, count = parts
            count = int(count)
            if count < 1:
                raise ValueError(f"{path}: line {lineno}: count must be positive")
            table[token.lower()] = count
    return table


def save_frequency_table(table, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for token in sorted(table):
            fh.write(f"{token}\t{table[token]}\n")


def score_entropy(scores) -> float:
    """Shannon entropy of softmax(scores); used to show damping flattens."""
    scores = np.asarray(scores, dtype=np.float64)
    e = np.exp(scores - scores.max())
    p = e / e.sum()
    return float(-np.sum(p * np.log(p)))
