"""Data model and IO for word-aligned EEG reading corpora.

A corpus couples tokenized sentences, read under one of two task
conditions (normal reading NR vs. annotation reading AR), with per-word
brain activity: for every word occurrence, participant and eye-tracking
feature there is one record holding a 105-electrode power vector in each
of eight frequency domains (840 values per record).

The module also provides a seeded synthetic generator that plants
controllable NR/AR power differences in chosen electrodes and frequency
bands.  Tests and demos run on such corpora; real recordings enter
through the same JSONL format.

File format (UTF-8 JSONL)::

    line 1:  {"schema": "eeg-corpus/1",
              "electrode_labels": [... 105 strings ...],
              "participants": [ints]}
    then     {"kind": "sentence", "sentence_id": str, "task": "NR"|"AR",
              "session": 1|2, "tokens": [str, ...]}
    then     {"kind": "word", "participant_id": int, "sentence_id": str,
              "token_index": int, "et_feature": "TRT"|...,
              "domains": {"theta1": [105 floats], ..., "gamma2": [...]}}

Sentence records must precede the word records that reference them.
Floats are written as decimal text with 17 significant digits, which
makes save -> load bit-exact.
"""

import enum
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._rand import substream

N_ELECTRODES = 105
N_DOMAINS = 8
SCHEMA = "eeg-corpus/1"

# Size of the toy vocabulary used by the synthetic generator.
_SYNTH_VOCAB = 200


class CorpusFormatError(ValueError):
    """Raised when a corpus file violates the eeg-corpus/1 schema."""


class Task(str, enum.Enum):
    """Reading condition a sentence was recorded under."""

    NR = "NR"  # normal reading
    AR = "AR"  # annotation reading (extra task while reading)


class EtFeature(str, enum.Enum):
    """Eye-tracking event windows EEG activity is aligned to.

    Only TRT (total reading time) is consumed by the reduction pipeline;
    the remaining members exist so ingestion can represent full records.
    """

    FFD = "FFD"  # first fixation duration
    GD = "GD"  # gaze duration
    GPT = "GPT"  # go-past time
    SFD = "SFD"  # single fixation duration
    TRT = "TRT"  # total reading time


class FrequencyDomain(str, enum.Enum):
    """The eight recorded frequency domains, in canonical row order."""

    THETA1 = "theta1"
    THETA2 = "theta2"
    ALPHA1 = "alpha1"
    ALPHA2 = "alpha2"
    BETA1 = "beta1"
    BETA2 = "beta2"
    GAMMA1 = "gamma1"
    GAMMA2 = "gamma2"

    @property
    def hz_range(self):
        """(low, high) frequency bounds in Hz."""
        return _DOMAIN_HZ[self]

    @property
    def index(self):
        """Row index of this domain inside a record's (8, 105) array."""
        return _DOMAIN_INDEX[self]


DOMAIN_ORDER = tuple(FrequencyDomain)

_DOMAIN_HZ = {
    FrequencyDomain.THETA1: (4.0, 6.0),
    FrequencyDomain.THETA2: (6.5, 8.0),
    FrequencyDomain.ALPHA1: (8.5, 10.0),
    FrequencyDomain.ALPHA2: (10.5, 13.0),
    FrequencyDomain.BETA1: (13.5, 18.0),
    FrequencyDomain.BETA2: (18.5, 30.0),
    FrequencyDomain.GAMMA1: (30.5, 40.0),
    FrequencyDomain.GAMMA2: (40.0, 49.5),
}

_DOMAIN_INDEX = {d: i for i, d in enumerate(DOMAIN_ORDER)}


class FrequencyBand(str, enum.Enum):
    """The four conventional bands, each binning two recorded domains."""

    THETA = "theta"
    ALPHA = "alpha"
    BETA = "beta"
    GAMMA = "gamma"

    @property
    def source_domains(self):
        """The two recorded domains binned into this band."""
        return _BAND_SOURCES[self]

    @property
    def source_rows(self):
        """Row indices of the two source domains in a record array."""
        a, b = _BAND_SOURCES[self]
        return a.index, b.index


BAND_ORDER = tuple(FrequencyBand)

_BAND_SOURCES = {
    FrequencyBand.THETA: (FrequencyDomain.THETA1, FrequencyDomain.THETA2),
    FrequencyBand.ALPHA: (FrequencyDomain.ALPHA1, FrequencyDomain.ALPHA2),
    FrequencyBand.BETA: (FrequencyDomain.BETA1, FrequencyDomain.BETA2),
    FrequencyBand.GAMMA: (FrequencyDomain.GAMMA1, FrequencyDomain.GAMMA2),
}


def default_electrode_labels():
    """Placeholder labels E001..E105 for synthetic corpora."""
    return tuple(f"E{i + 1:03d}" for i in range(N_ELECTRODES))


@dataclass(frozen=True)
class Sentence:
    """One recorded sentence: an ordered token list plus its condition."""

    sentence_id: str
    task: Task
    session: int
    tokens: tuple

    def __post_init__(self):
        object.__setattr__(self, "task", Task(self.task))
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.session not in (1, 2):
            raise ValueError(f"session must be 1 or 2, got {self.session!r}")
        if not self.tokens:
            raise ValueError(f"sentence {self.sentence_id!r} has no tokens")


@dataclass(frozen=True)
class EegWordRecord:
    """EEG activity for one word occurrence, participant and ET feature.

    ``domains`` is an (8, 105) float64 array whose rows follow
    ``DOMAIN_ORDER``; it is marked read-only on construction.
    """

    participant_id: int
    task: Task
    session: int
    sentence_id: str
    token_index: int
    token_text: str
    et_feature: EtFeature
    domains: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "task", Task(self.task))
        object.__setattr__(self, "et_feature", EtFeature(self.et_feature))
        arr = np.asarray(self.domains, dtype=np.float64)
        if arr.shape != (N_DOMAINS, N_ELECTRODES):
            raise ValueError(
                f"domains must have shape ({N_DOMAINS}, {N_ELECTRODES}), "
                f"got {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "domains", arr)

    def domain_power(self, domain: FrequencyDomain) -> np.ndarray:
        """105-electrode power vector for one frequency domain."""
        return self.domains[FrequencyDomain(domain).index]

    def band_power(self, band: FrequencyBand) -> np.ndarray:
        """Electrode-wise mean of the band's two source domains."""
        i, j = FrequencyBand(band).source_rows
        return (self.domains[i] + self.domains[j]) / 2.0


@dataclass(frozen=True)
class EegCorpus:
    """Immutable collection of sentences and their word records."""

    records: tuple
    sentences: Mapping[str, Sentence]
    participants: tuple
    electrode_labels: tuple = field(default_factory=default_electrode_labels)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "sentences", dict(self.sentences))
        object.__setattr__(self, "participants", tuple(self.participants))
        object.__setattr__(self, "electrode_labels", tuple(self.electrode_labels))

    def validate(self):
        """Check referential invariants; raise ValueError on violation."""
        if len(self.electrode_labels) != N_ELECTRODES:
            raise ValueError(
                f"expected {N_ELECTRODES} electrode labels, "
                f"got {len(self.electrode_labels)}"
            )
        for rec in self.records:
            sent = self.sentences.get(rec.sentence_id)
            if sent is None:
                raise ValueError(
                    f"record references unknown sentence {rec.sentence_id!r}"
                )
            if not 0 <= rec.token_index < len(sent.tokens):
                raise ValueError(
                    f"token_index {rec.token_index} out of range for sentence "
                    f"{rec.sentence_id!r} with {len(sent.tokens)} tokens"
                )
            if rec.task is not sent.task or rec.session != sent.session:
                raise ValueError(
                    f"record disagrees with sentence {rec.sentence_id!r} "
                    "on task or session"
                )
        return self

    def sentence_ids(self, task: Task | None = None):
        """Sentence ids in insertion order, optionally filtered by task."""
        if task is None:
            return list(self.sentences)
        task = Task(task)
        return [sid for sid, s in self.sentences.items() if s.task is task]

    def trt_records(self, task: Task | None = None):
        """All TRT records, optionally restricted to one task."""
        recs = [r for r in self.records if r.et_feature is EtFeature.TRT]
        if task is not None:
            task = Task(task)
            recs = [r for r in recs if r.task is task]
        return recs

    def subset(self, sentence_ids) -> "EegCorpus":
        """New corpus restricted to the given sentences (order preserved)."""
        keep = set(sentence_ids)
        missing = keep - set(self.sentences)
        if missing:
            raise ValueError(f"unknown sentence ids: {sorted(missing)[:5]}")
        sentences = {sid: s for sid, s in self.sentences.items() if sid in keep}
        records = tuple(r for r in self.records if r.sentence_id in keep)
        return EegCorpus(records, sentences, self.participants, self.electrode_labels)

    def equals(self, other: "EegCorpus") -> bool:
        """Field-for-field equality, bit-exact on the power values."""
        if (
            self.electrode_labels != other.electrode_labels
            or self.participants != other.participants
            or self.sentences != other.sentences
            or len(self.records) != len(other.records)
        ):
            return False
        for a, b in zip(self.records, other.records):
            if (
                a.participant_id != b.participant_id
                or a.sentence_id != b.sentence_id
                or a.token_index != b.token_index
                or a.token_text != b.token_text
                or a.task is not b.task
                or a.session != b.session
                or a.et_feature is not b.et_feature
                or not np.array_equal(a.domains, b.domains)
            ):
                return False
        return True


def _format_floats(vec: np.ndarray) -> str:
    # 17 significant digits round-trip any finite float64 exactly.
    return ",".join(np.char.mod("%.17g", vec))


def save_corpus(corpus: EegCorpus, path) -> None:
    """Write a corpus as eeg-corpus/1 JSONL. Refuses non-finite values."""
    corpus.validate()
    for rec in corpus.records:
        if not np.isfinite(rec.domains).all():
            raise ValueError(
                "refusing to write non-finite power value in record "
                f"(sentence {rec.sentence_id!r}, token {rec.token_index}, "
                f"participant {rec.participant_id})"
            )
    with open(path, "w", encoding="utf-8") as fh:
        meta = {
            "schema": SCHEMA,
            "electrode_labels": list(corpus.electrode_labels),
            "participants": list(corpus.participants),
        }
        fh.write(json.dumps(meta) + "\n")
        for sent in corpus.sentences.values():
            fh.write(
                json.dumps(
                    {
                        "kind": "sentence",
                        "sentence_id": sent.sentence_id,
                        "task": sent.task.value,
                        "session": sent.session,
                        "tokens": list(sent.tokens),
                    }
                )
                + "\n"
            )
        for rec in corpus.records:
            domains = ",".join(
                f'"{d.value}":[{_format_floats(rec.domains[i])}]'
                for i, d in enumerate(DOMAIN_ORDER)
            )
            fh.write(
                f'{{"kind":"word","participant_id":{rec.participant_id},'
                f'"sentence_id":{json.dumps(rec.sentence_id)},'
                f'"token_index":{rec.token_index},'
                f'"et_feature":"{rec.et_feature.value}",'
                f'"domains":{{{domains}}}}}\n'
            )


def _parse_domains(obj, lineno: int) -> np.ndarray:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"line {lineno}: domains must be an object")
    expected = {d.value for d in DOMAIN_ORDER}
    unknown = set(obj) - expected
    if unknown:
        raise CorpusFormatError(
            f"line {lineno}: unknown domain key {sorted(unknown)[0]!r}"
        )
    missing = expected - set(obj)
    if missing:
        raise CorpusFormatError(
            f"line {lineno}: missing domain key {sorted(missing)[0]!r}"
        )
    arr = np.empty((N_DOMAINS, N_ELECTRODES), dtype=np.float64)
    for i, d in enumerate(DOMAIN_ORDER):
        values = obj[d.value]
        if not isinstance(values, list) or len(values) != N_ELECTRODES:
            got = len(values) if isinstance(values, list) else type(values).__name__
            raise CorpusFormatError(
                f"line {lineno}: domain {d.value!r} must hold exactly "
                f"{N_ELECTRODES} electrode values, got {got}"
            )
        arr[i] = values
    if not np.isfinite(arr).all():
        raise CorpusFormatError(f"line {lineno}: non-finite power value")
    return arr


def load_corpus(path) -> EegCorpus:
    """Read an eeg-corpus/1 JSONL file; errors carry the offending line."""
    sentences: dict = {}
    records: list = []
    meta = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON: {exc}") from exc
            if meta is None:
                if not isinstance(obj, dict) or obj.get("schema") != SCHEMA:
                    raise CorpusFormatError(
                        f"line {lineno}: expected metadata object with "
                        f'schema "{SCHEMA}"'
                    )
                if len(obj.get("electrode_labels", [])) != N_ELECTRODES:
                    raise CorpusFormatError(
                        f"line {lineno}: metadata must list {N_ELECTRODES} "
                        "electrode labels"
                    )
                meta = obj
                continue
            kind = obj.get("kind")
            if kind == "sentence":
                sid = obj["sentence_id"]
                if sid in sentences:
                    raise CorpusFormatError(f"line {lineno}: duplicate sentence {sid!r}")
                try:
                    sentences[sid] = Sentence(
                        sid, Task(obj["task"]), obj["session"], obj["tokens"]
                    )
                except (KeyError, ValueError) as exc:
                    raise CorpusFormatError(f"line {lineno}: {exc}") from exc
            elif kind == "word":
                sid = obj.get("sentence_id")
                sent = sentences.get(sid)
                if sent is None:
                    raise CorpusFormatError(
                        f"line {lineno}: word record references unknown sentence "
                        f"{sid!r} (sentence records must precede word records)"
                    )
                token_index = obj.get("token_index")
                if not isinstance(token_index, int) or not (
                    0 <= token_index < len(sent.tokens)
                ):
                    raise CorpusFormatError(
                        f"line {lineno}: token_index {token_index!r} out of range "
                        f"for sentence {sid!r}"
                    )
                try:
                    et = EtFeature(obj["et_feature"])
                except (KeyError, ValueError) as exc:
                    raise CorpusFormatError(
                        f"line {lineno}: bad et_feature: {exc}"
                    ) from exc
                domains = _parse_domains(obj.get("domains"), lineno)
                records.append(
                    EegWordRecord(
                        participant_id=int(obj["participant_id"]),
                        task=sent.task,
                        session=sent.session,
                        sentence_id=sid,
                        token_index=token_index,
                        token_text=sent.tokens[token_index],
                        et_feature=et,
                        domains=domains,
                    )
                )
            else:
                raise CorpusFormatError(f"line {lineno}: unknown kind {kind!r}")
    if meta is None and (sentences or records):
        raise CorpusFormatError("file has content but no metadata line")
    labels = (
        tuple(meta["electrode_labels"]) if meta else default_electrode_labels()
    )
    participants = tuple(meta["participants"]) if meta else ()
    corpus = EegCorpus(tuple(records), sentences, participants, labels)
    corpus.validate()
    return corpus


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the synthetic corpus generator.

    Baseline powers are |N(1.0, noise_sigma)| i.i.d. draws.  For AR
    records only, each electrode in ``informative_electrodes`` gets
    ``band_shift[band]`` added to both source domains of every shifted
    band.  Sessions are assigned uniformly at random per sentence, so
    they carry no signal by construction.
    """

    n_sentences_nr: int
    n_sentences_ar: int
    tokens_per_sentence_range: tuple = (5, 12)
    n_participants: int = 3
    informative_electrodes: tuple = ()
    band_shift: Mapping[FrequencyBand, float] = field(default_factory=dict)
    noise_sigma: float = 0.3
    seed: int = 0


def generate_synthetic(spec: SyntheticSpec) -> EegCorpus:
    """Deterministically generate a corpus from a SyntheticSpec."""
    if spec.n_sentences_nr < 0 or spec.n_sentences_ar < 0:
        raise ValueError("sentence counts must be non-negative")
    if spec.n_sentences_nr + spec.n_sentences_ar == 0:
        raise ValueError("empty corpus request: no sentences")
    if spec.n_participants < 1:
        raise ValueError("need at least one participant")
    if not spec.noise_sigma > 0:
        raise ValueError("noise_sigma must be positive")
    lo, hi = spec.tokens_per_sentence_range
    if not 1 <= lo <= hi:
        raise ValueError(f"bad tokens_per_sentence_range {spec.tokens_per_sentence_range}")
    informative = np.array(sorted(set(int(e) for e in spec.informative_electrodes)), dtype=int)
    if informative.size and (informative.min() < 0 or informative.max() >= N_ELECTRODES):
        raise ValueError(f"electrode indices must lie in 0..{N_ELECTRODES - 1}")
    shifts = {FrequencyBand(b): float(v) for b, v in spec.band_shift.items()}

    rng = substream(spec.seed, "synthetic-corpus")
    participants = tuple(range(1, spec.n_participants + 1))
    sentences: dict = {}
    records: list = []
    plan = (
        (Task.NR, spec.n_sentences_nr, "nr"),
        (Task.AR, spec.n_sentences_ar, "ar"),
    )
    for task, count, stem in plan:
        for s_i in range(count):
            sid = f"{stem}-{s_i:04d}"
            n_tok = int(rng.integers(lo, hi + 1))
            tokens = tuple(
                f"w{int(v):03d}" for v in rng.integers(0, _SYNTH_VOCAB, size=n_tok)
            )
            session = int(rng.integers(1, 3))
            sentences[sid] = Sentence(sid, task, session, tokens)
            block = np.abs(
                rng.normal(
                    1.0,
                    spec.noise_sigma,
                    size=(spec.n_participants, n_tok, N_DOMAINS, N_ELECTRODES),
                )
            )
            if task is Task.AR and informative.size:
                for band in BAND_ORDER:
                    shift = shifts.get(band, 0.0)
                    if shift:
                        for row in band.source_rows:
                            block[:, :, row, informative] += shift
            for p in participants:
                for t in range(n_tok):
                    records.append(
                        EegWordRecord(
                            participant_id=p,
                            task=task,
                            session=session,
                            sentence_id=sid,
                            token_index=t,
                            token_text=tokens[t],
                            et_feature=EtFeature.TRT,
                            domains=block[p - 1, t],
                        )
                    )
    corpus = EegCorpus(tuple(records), sentences, participants, default_electrode_labels())
    return corpus.validate()
