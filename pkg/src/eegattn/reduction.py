"""Feature-reduction pipeline: bands, TRT, forest-selected electrodes.

The chain is: split the corpus by sentence (70/15/15, stratified by
task), bin the eight domains into bands and keep TRT records only, train
one random forest per band on the train split's word-level 105-electrode
band powers to separate NR from AR, keep each band's top-k electrodes,
and emit k-dimensional per-band word embeddings.

Gamma is excluded from the default band set; selection can still be run
on it for reporting, but embeddings are only emitted for the configured
bands.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._rand import derive_seed, substream
from .corpus import (
    BAND_ORDER,
    N_ELECTRODES,
    EegCorpus,
    EtFeature,
    FrequencyBand,
    Task,
)
from .forest import fit_forest, predict, top_k_features
from .stats import band_power

PAPER_K = (5, 15, 30)
DEFAULT_BANDS = (FrequencyBand.THETA, FrequencyBand.ALPHA, FrequencyBand.BETA)

# A band forest whose best importance stays under this has found no
# stable signal (2/105 is about twice the uniform share).
WEAK_SIGNAL_IMPORTANCE = 2.0 / N_ELECTRODES


def canonical_bands(bands):
    """Validate and order a band collection canonically (theta first)."""
    bands = {FrequencyBand(b) for b in bands}
    if not bands:
        raise ValueError("bands must be non-empty")
    return tuple(b for b in BAND_ORDER if b in bands)


@dataclass(frozen=True)
class ReductionConfig:
    k: int = 5
    bands: tuple = DEFAULT_BANDS
    n_trees: int = 100
    seed: int = 0
    et_feature: EtFeature = EtFeature.TRT

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        object.__setattr__(self, "bands", canonical_bands(self.bands))
        if EtFeature(self.et_feature) is not EtFeature.TRT:
            raise ValueError("the reduction pipeline is fixed to the TRT feature")
        if self.k not in PAPER_K:
            warnings.warn(
                f"k={self.k} is outside the studied values {PAPER_K}",
                stacklevel=2,
            )


def split_corpus(corpus: EegCorpus, ratios=(0.70, 0.15, 0.15), seed: int = 0):
    """Sentence-level split into (train, dev, test), stratified by task."""
    if len(ratios) != 3 or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("ratios must be three numbers summing to 1")
    if len(corpus.sentences) < 3:
        raise ValueError("need at least 3 sentences to split")
    rng = substream(seed, "corpus-split")
    parts = ([], [], [])
    for task in (Task.NR, Task.AR):
        ids = sorted(corpus.sentence_ids(task))
        if not ids:
            continue
        order = rng.permutation(len(ids))
        shuffled = [ids[i] for i in order]
        n = len(ids)
        n_train = int(np.floor(n * ratios[0]))
        n_dev = int(np.floor(n * ratios[1]))
        parts[0].extend(shuffled[:n_train])
        parts[1].extend(shuffled[n_train : n_train + n_dev])
        parts[2].extend(shuffled[n_train + n_dev :])
    return tuple(corpus.subset(ids) for ids in parts)


@dataclass
class FeatureMatrix:
    """Word-level design matrix: one row per (word, participant) record."""

    X: np.ndarray  # (N, 105 * n_bands), band-major then electrode-ascending
    y: np.ndarray  # (N,) 1 for AR
    rows: list  # (sentence_id, token_index, participant_id) per row
    bands: tuple


def build_feature_matrix(corpus_part: EegCorpus, bands) -> FeatureMatrix:
    bands = canonical_bands(bands)
    records = corpus_part.trt_records()
    if not records:
        raise ValueError("corpus part has no TRT records")
    X = np.empty((len(records), N_ELECTRODES * len(bands)))
    for b, band in enumerate(bands):
        X[:, b * N_ELECTRODES : (b + 1) * N_ELECTRODES] = band_power(records, band)
    y = np.array([1 if r.task is Task.AR else 0 for r in records], dtype=np.int64)
    rows = [(r.sentence_id, r.token_index, r.participant_id) for r in records]
    return FeatureMatrix(X, y, rows, bands)


@dataclass
class BandSelection:
    band: FrequencyBand
    electrodes: tuple  # k indices, importance-descending
    importances: np.ndarray  # (105,)
    raw_decrease: np.ndarray  # (105,) unnormalized impurity-decrease totals
    weak_signal: bool


@dataclass
class SelectionReport:
    k: int
    bands: tuple
    selections: dict  # FrequencyBand -> BandSelection
    context: dict = field(default_factory=dict)

    def global_top2(self):
        """Top two (band, electrode) columns by raw impurity decrease."""
        scored = []
        for band in self.bands:
            sel = self.selections[band]
            for e in range(N_ELECTRODES):
                scored.append((-sel.raw_decrease[e], band.value, e))
        scored.sort()
        return [(FrequencyBand(b), e) for _, b, e in scored[:2]]


def select_electrodes(train_matrix: FeatureMatrix, config: ReductionConfig) -> SelectionReport:
    """Fit one forest per band on the train matrix, keep the top k."""
    if config.k > N_ELECTRODES:
        raise ValueError(f"k must be at most {N_ELECTRODES}")
    y = train_matrix.y
    if len(np.unique(y)) < 2:
        raise ValueError("training data contains a single class")
    if tuple(train_matrix.bands) != tuple(config.bands):
        raise ValueError("train matrix bands do not match the config")
    selections = {}
    for b, band in enumerate(config.bands):
        cols = train_matrix.X[:, b * N_ELECTRODES : (b + 1) * N_ELECTRODES]
        forest = fit_forest(
            cols,
            y,
            n_trees=config.n_trees,
            seed=derive_seed(config.seed, f"band-{band.value}"),
        )
        raw = np.zeros(N_ELECTRODES)
        for tree in forest.trees:
            raw += tree.impurity_decrease
        top = tuple(top_k_features(forest, config.k))
        selections[band] = BandSelection(
            band=band,
            electrodes=top,
            importances=forest.feature_importances,
            raw_decrease=raw,
            weak_signal=bool(forest.feature_importances.max() < WEAK_SIGNAL_IMPORTANCE),
        )
    context = {
        "n_rows": int(len(y)),
        "n_nr": int((y == 0).sum()),
        "n_ar": int((y == 1).sum()),
        "n_trees": config.n_trees,
        "seed": config.seed,
    }
    return SelectionReport(config.k, config.bands, selections, context)


@dataclass(frozen=True)
class ReducedEmbedding:
    """k selected band-binned electrode powers for one word occurrence."""

    sentence_id: str
    token_index: int
    participant_id: int
    band: FrequencyBand
    selected_indices: tuple
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (len(self.selected_indices),):
            raise ValueError("values must align with selected_indices")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "band", FrequencyBand(self.band))
        object.__setattr__(self, "selected_indices", tuple(int(i) for i in self.selected_indices))


def embed_words(corpus_part: EegCorpus, report: SelectionReport, config: ReductionConfig):
    """Project every TRT word record onto the selected electrodes per band."""
    if tuple(report.bands) != tuple(config.bands) or report.k != config.k:
        raise ValueError("selection report does not match the config")
    records = corpus_part.trt_records()
    if not records:
        return []
    embeddings = []
    for band in config.bands:
        sel = report.selections[band]
        idx = np.array(sel.electrodes, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= N_ELECTRODES):
            raise ValueError("selected electrode index out of range")
        powers = band_power(records, band)
        for n, rec in enumerate(records):
            embeddings.append(
                ReducedEmbedding(
                    sentence_id=rec.sentence_id,
                    token_index=rec.token_index,
                    participant_id=rec.participant_id,
                    band=band,
                    selected_indices=sel.electrodes,
                    values=powers[n, idx],
                )
            )
    return embeddings


def run_reduction(corpus: EegCorpus, config: ReductionConfig, ratios=(0.70, 0.15, 0.15)):
    """Full pipeline; returns (report, embeddings dict, split corpora).

    Selection sees only the train split.  Embeddings are emitted for all
    three splits with the train-derived selection.
    """
    train, dev, test = split_corpus(corpus, ratios=ratios, seed=config.seed)
    matrix = build_feature_matrix(train, config.bands)
    report = select_electrodes(matrix, config)
    embeddings = {
        "train": embed_words(train, report, config),
        "dev": embed_words(dev, report, config),
        "test": embed_words(test, report, config),
    }
    return report, embeddings, (train, dev, test)


def save_embeddings(embeddings, path) -> None:
    """JSONL export; float values keep 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        for emb in embeddings:
            values = ",".join(np.char.mod("%.17g", emb.values))
            indices = ",".join(str(i) for i in emb.selected_indices)
            fh.write(
                f'{{"sentence_id":{json.dumps(emb.sentence_id)},'
                f'"token_index":{emb.token_index},'
                f'"participant_id":{emb.participant_id},'
                f'"band":"{emb.band.value}",'
                f'"indices":[{indices}],"values":[{values}]}}\n'
            )


def load_embeddings(path):
    embeddings = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                embeddings.append(
                    ReducedEmbedding(
                        sentence_id=obj["sentence_id"],
                        token_index=obj["token_index"],
                        participant_id=obj["participant_id"],
                        band=FrequencyBand(obj["band"]),
                        selected_indices=tuple(obj["indices"]),
                        values=np.asarray(obj["values"], dtype=np.float64),
                    )
                )
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    return embeddings


def save_selection_report(report: SelectionReport, path) -> None:
    obj = {
        "schema": "selection-report/1",
        "k": report.k,
        "bands": [b.value for b in report.bands],
        "context": report.context,
        "selections": {
            band.value: {
                "electrodes": list(sel.electrodes),
                "importances": sel.importances.tolist(),
                "raw_decrease": sel.raw_decrease.tolist(),
                "weak_signal": sel.weak_signal,
            }
            for band, sel in report.selections.items()
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)


def load_selection_report(path) -> SelectionReport:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("schema") != "selection-report/1":
        raise ValueError('expected schema "selection-report/1"')
    selections = {}
    for band_key, sel in obj["selections"].items():
        band = FrequencyBand(band_key)
        selections[band] = BandSelection(
            band=band,
            electrodes=tuple(sel["electrodes"]),
            importances=np.asarray(sel["importances"], dtype=np.float64),
            raw_decrease=np.asarray(sel["raw_decrease"], dtype=np.float64),
            weak_signal=bool(sel["weak_signal"]),
        )
    return SelectionReport(
        obj["k"],
        tuple(FrequencyBand(b) for b in obj["bands"]),
        selections,
        obj.get("context", {}),
    )
