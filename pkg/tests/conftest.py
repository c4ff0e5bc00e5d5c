import os

# Single-threaded BLAS: the models' matmuls are small enough that thread
# sync costs dominate, and fixed threading keeps runs bit-reproducible.
for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")

try:
    from threadpoolctl import threadpool_limits

    threadpool_limits(limits=1)
except ImportError:
    pass

import numpy as np
import pytest

from eegattn.corpus import (
    N_DOMAINS,
    N_ELECTRODES,
    EegCorpus,
    EegWordRecord,
    EtFeature,
    Sentence,
    Task,
)


def make_record(
    value=1.0,
    participant_id=1,
    task=Task.NR,
    session=1,
    sentence_id="s0",
    token_index=0,
    token_text=None,
    et_feature=EtFeature.TRT,
    domains=None,
):
    """One word record with constant (or given) domain powers."""
    if token_text is None:
        token_text = f"t{token_index}"
    if domains is None:
        domains = np.full((N_DOMAINS, N_ELECTRODES), value, dtype=np.float64)
    return EegWordRecord(
        participant_id=participant_id,
        task=task,
        session=session,
        sentence_id=sentence_id,
        token_index=token_index,
        token_text=token_text,
        et_feature=et_feature,
        domains=domains,
    )


def make_corpus(records, sentences=None):
    if sentences is None:
        seen = {}
        for r in records:
            length = seen.get(r.sentence_id, 0)
            seen[r.sentence_id] = max(length, r.token_index + 1)
        sentences = {
            sid: Sentence(
                sid,
                next(r.task for r in records if r.sentence_id == sid),
                next(r.session for r in records if r.sentence_id == sid),
                tuple(f"t{i}" for i in range(n)),
            )
            for sid, n in seen.items()
        }
    participants = tuple(sorted({r.participant_id for r in records}))
    return EegCorpus(tuple(records), sentences, participants)


@pytest.fixture
def record_factory():
    return make_record
