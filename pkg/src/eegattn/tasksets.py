"""Binary sentence-classification datasets.

Two sources: a generic adapter that labels annotated sentences by a
tag rule (relation/entity tags), and a synthetic keyword task whose
positives contain at least one planted keyword.  Token draws are
Zipf-distributed so frequency baselines have signal to exploit.

Annotated source JSONL:
    {"sentence_id": str, "tokens": [str, ...],
     "tags": [{"kind": "relation"|"entity", "value": str}, ...],
     "split": "train"|"dev"|"test"}        # optional, defaults to train
Output JSONL:
    {"sentence_id": str, "tokens": [...], "label": 0|1}
"""

import json
from dataclasses import dataclass, field

import numpy as np

from ._rand import substream

ZIPF_EXPONENT = 1.1


@dataclass(frozen=True)
class LabeledSentence:
    sentence_id: str
    tokens: tuple
    label: int

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError(f"sentence {self.sentence_id!r} has no tokens")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


@dataclass
class TaskSplits:
    train: list
    dev: list
    test: list

    def __iter__(self):
        return iter((self.train, self.dev, self.test))


@dataclass(frozen=True)
class BinaryTaskSpec:
    """Tag rule: label 1 iff the sentence carries a matching tag."""

    name: str
    tag_kind: str  # "relation" or "entity"
    positive_values: frozenset

    def __post_init__(self):
        if self.tag_kind not in ("relation", "entity"):
            raise ValueError(f"unknown tag scheme {self.tag_kind!r}")
        object.__setattr__(self, "positive_values", frozenset(self.positive_values))


# The three benchmark adaptations, as published: SemEval relations
# Entity-Origin/Entity-Destination, Wikipedia relation "job title",
# and the four NER classes in Ontonotes.
SEMEVAL_RULE = BinaryTaskSpec(
    "semeval2010", "relation", frozenset({"Entity-Origin", "Entity-Destination"})
)
WIKIPEDIA_RULE = BinaryTaskSpec("wikipedia", "relation", frozenset({"job title"}))
ONTONOTES_RULE = BinaryTaskSpec(
    "ontonotes", "entity", frozenset({"PER", "LOC", "ORG", "MISC"})
)


def adapt_generic(source_path, spec: BinaryTaskSpec, exclude_ids=None) -> TaskSplits:
    """Label an annotated-sentence file with the spec's tag rule.

    Sentences whose id appears in ``exclude_ids`` are dropped from all
    splits (used to filter overlap with the EEG reading corpus).
    """
    exclude = set(exclude_ids) if exclude_ids else set()
    splits = {"train": [], "dev": [], "test": []}
    with open(source_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {lineno}: invalid JSON: {exc}") from exc
            sid = obj["sentence_id"]
            if sid in exclude:
                continue
            split = obj.get("split", "train")
            if split not in splits:
                raise ValueError(f"line {lineno}: unknown split {split!r}")
            label = 0
            for tag in obj.get("tags", []):
                kind = tag.get("kind")
                if kind not in ("relation", "entity"):
                    raise ValueError(f"line {lineno}: unknown tag scheme {kind!r}")
                if kind == spec.tag_kind and tag.get("value") in spec.positive_values:
                    label = 1
            splits[split].append(LabeledSentence(sid, tuple(obj["tokens"]), label))
    return TaskSplits(splits["train"], splits["dev"], splits["test"])


@dataclass(frozen=True)
class SyntheticTaskSpec:
    """Shape of a generated keyword task (sizes/ratios mirror published sets)."""

    vocab_size: int = 1000
    n_train: int = 2000
    n_dev: int = 400
    n_test: int = 400
    positive_rate: float = 0.2
    n_keywords: int = 20
    length_range: tuple = (5, 15)
    label_noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.positive_rate < 1.0:
            raise ValueError("positive_rate must lie in (0, 1)")
        if self.n_keywords >= self.vocab_size:
            raise ValueError("keywords would exhaust the vocabulary")
        if not 0.0 <= self.label_noise < 1.0:
            raise ValueError("label_noise must lie in [0, 1)")
        lo, hi = self.length_range
        if not 1 <= lo <= hi:
            raise ValueError(f"bad length_range {self.length_range}")


# Split shapes of the published benchmark adaptations (train size,
# % positive in train, dev size, test size).
SEMEVAL_SHAPE = SyntheticTaskSpec(
    vocab_size=5000, n_train=8096, n_dev=1361, n_test=1372, positive_rate=0.193
)
WIKIPEDIA_SHAPE = SyntheticTaskSpec(
    vocab_size=3000, n_train=1733, n_dev=361, n_test=354, positive_rate=0.100
)
ONTONOTES_SHAPE = SyntheticTaskSpec(
    vocab_size=8000, n_train=89389, n_dev=11289, n_test=11318, positive_rate=0.297
)


@dataclass
class SyntheticTask:
    splits: TaskSplits
    keywords: frozenset
    spec: SyntheticTaskSpec
    token_frequencies: dict = field(default_factory=dict)


def _zipf_probs(vocab_size):
    ranks = np.arange(1, vocab_size + 1, dtype=np.float64)
    p = ranks**-ZIPF_EXPONENT
    return p / p.sum()


def generate_task(spec: SyntheticTaskSpec) -> SyntheticTask:
    """Deterministic keyword task; returns splits plus the keyword set.

    Positives contain at least one keyword, negatives none (before label
    noise flips).  Keywords come from the rarer half of the Zipf vocab
    so inverse-frequency supervision correlates with them.
    """
    rng = substream(spec.seed, "synthetic-task")
    vocab = np.array([f"w{r:04d}" for r in range(spec.vocab_size)])
    probs = _zipf_probs(spec.vocab_size)

    kw_ranks = rng.choice(
        np.arange(spec.vocab_size // 2, spec.vocab_size),
        size=spec.n_keywords,
        replace=False,
    )
    keywords = frozenset(vocab[r] for r in kw_ranks)
    kw_list = sorted(keywords)

    non_kw = np.setdiff1d(np.arange(spec.vocab_size), kw_ranks)
    non_kw_probs = probs[non_kw] / probs[non_kw].sum()

    lo, hi = spec.length_range
    freq: dict = {}

    def draw_sentence(sid, positive):
        length = int(rng.integers(lo, hi + 1))
        ranks = non_kw[rng.choice(len(non_kw), size=length, p=non_kw_probs)]
        tokens = [str(vocab[r]) for r in ranks]
        if positive:
            slot = int(rng.integers(0, length))
            tokens[slot] = kw_list[int(rng.integers(0, len(kw_list)))]
        for tok in tokens:
            freq[tok] = freq.get(tok, 0) + 1
        return tokens

    def build_split(name, n):
        n_pos = int(round(n * spec.positive_rate))
        labels = np.zeros(n, dtype=np.int64)
        labels[:n_pos] = 1
        rng.shuffle(labels)
        sentences = []
        for i, label in enumerate(labels):
            tokens = draw_sentence(f"{name}-{i:05d}", bool(label))
            final = int(label)
            if spec.label_noise and rng.random() < spec.label_noise:
                final = 1 - final
            sentences.append(LabeledSentence(f"{name}-{i:05d}", tuple(tokens), final))
        return sentences

    splits = TaskSplits(
        build_split("train", spec.n_train),
        build_split("dev", spec.n_dev),
        build_split("test", spec.n_test),
    )
    return SyntheticTask(splits, keywords, spec, freq)


@dataclass(frozen=True)
class TaskSummary:
    n_train: int
    n_dev: int
    n_test: int
    pct_positive_train: float

    def __str__(self):
        return (
            f"train {self.n_train} ({self.pct_positive_train:.1f}% positive), "
            f"dev {self.n_dev}, test {self.n_test}"
        )


def summarize(splits: TaskSplits) -> TaskSummary:
    n_train = len(splits.train)
    positive = sum(s.label for s in splits.train)
    pct = 100.0 * positive / n_train if n_train else 0.0
    return TaskSummary(n_train, len(splits.dev), len(splits.test), pct)


def keyword_detector_prf(sentences, keywords):
    """Bag-of-words oracle: predict positive iff a keyword is present.

    Returns (precision, recall, f1); the upper bound for noise-free data.
    """
    keywords = {k.lower() for k in keywords}
    tp = fp = fn = 0
    for sent in sentences:
        pred = any(tok.lower() in keywords for tok in sent.tokens)
        if pred and sent.label == 1:
            tp += 1
        elif pred and sent.label == 0:
            fp += 1
        elif not pred and sent.label == 1:
            fn += 1
    precision = tp / (tp + fp) if (tp + fp) else 1.0
    recall = tp / (tp + fn) if (tp + fn) else 1.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    return precision, recall, f1


def save_labeled(sentences, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sent in sentences:
            fh.write(
                json.dumps(
                    {
                        "sentence_id": sent.sentence_id,
                        "tokens": list(sent.tokens),
                        "label": sent.label,
                    }
                )
                + "\n"
            )


def load_labeled(path):
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                out.append(
                    LabeledSentence(obj["sentence_id"], tuple(obj["tokens"]), obj["label"])
                )
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    return out
