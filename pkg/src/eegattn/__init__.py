"""EEG band-power feature reduction and attention supervision, desk scale.

The package covers the full chain: synthetic or ingested word-aligned
EEG corpora, per-electrode NR/AR statistics, random-forest electrode
selection, compact per-band EEG word embeddings, an LSTM reading-task
classifier, token-level attention supervision scalars, and a multi-task
biLSTM sentence classifier whose attention is regularised by those
scalars.  Everything is seeded and reproducible; all gradients are
hand-derived and checked against finite differences.
"""

from .corpus import (
    BAND_ORDER,
    DOMAIN_ORDER,
    N_DOMAINS,
    N_ELECTRODES,
    CorpusFormatError,
    EegCorpus,
    EegWordRecord,
    EtFeature,
    FrequencyBand,
    FrequencyDomain,
    Sentence,
    SyntheticSpec,
    Task,
    default_electrode_labels,
    generate_synthetic,
    load_corpus,
    save_corpus,
)
from .forest import (
    DecisionTree,
    RandomForest,
    fit_forest,
    fit_tree,
    gini,
    load_forest,
    predict,
    save_forest,
    top_k_features,
)
from .stats import (
    Direction,
    ElectrodeTestResult,
    band_power,
    bootstrap_ttest,
    electrode_map,
    welch_t,
    write_electrode_map_tsv,
)
from .reduction import (
    DEFAULT_BANDS,
    PAPER_K,
    ReducedEmbedding,
    ReductionConfig,
    SelectionReport,
    build_feature_matrix,
    embed_words,
    load_embeddings,
    load_selection_report,
    run_reduction,
    save_embeddings,
    save_selection_report,
    select_electrodes,
    split_corpus,
)
from .attnscore import (
    AttentionScoreSeq,
    Provenance,
    ScalarConfig,
    damp,
    eeg_scores,
    fixation_scores,
    freq_inverse_scores,
    load_frequency_table,
    load_scores,
    normalize_sentence,
    oracle_scores,
    pool_token,
    save_frequency_table,
    save_scores,
    sentence_scores,
)
from .tasksets import (
    BinaryTaskSpec,
    LabeledSentence,
    SyntheticTask,
    SyntheticTaskSpec,
    TaskSplits,
    adapt_generic,
    generate_task,
    keyword_detector_prf,
    load_labeled,
    save_labeled,
    summarize,
)
from .taskclf import (
    EmbeddedSentence,
    LstmClassifier,
    TaskClfConfig,
    assemble_dataset,
)
from .taskclf import evaluate as evaluate_classifier
from .taskclf import train as train_classifier
from .seqlabel import (
    AttentionClassifier,
    AttentionTrace,
    PrfResult,
    SeqModelConfig,
    build_vocab,
    supervision_distance,
    train_multitask,
)
from .seqlabel import evaluate as evaluate_multitask

__version__ = "0.1.0"
