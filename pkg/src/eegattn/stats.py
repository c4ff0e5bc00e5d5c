"""Bootstrap comparison of per-electrode band power between reading tasks.

For each electrode the NR and AR word-level band powers are compared
with a Welch t statistic whose null distribution is estimated by
resampling: both samples are shifted to the pooled mean, resampled with
replacement, and the two-sided p-value is the add-one fraction of
resampled |t*| that reach the observed |t|.

Observations are pooled across words and participants; each word
occurrence contributes one sample per electrode.
"""

import enum
from dataclasses import dataclass

import numpy as np

from ._rand import mask64
from .corpus import (
    N_ELECTRODES,
    EegCorpus,
    EegWordRecord,
    FrequencyBand,
    Task,
)


class Direction(str, enum.Enum):
    AR_HIGHER = "AR_higher"
    NR_HIGHER = "NR_higher"
    NONE = "none"


@dataclass(frozen=True)
class ElectrodeTestResult:
    """Outcome of one electrode's NR-vs-AR comparison in one band."""

    electrode_index: int
    band: FrequencyBand
    mean_nr: float
    mean_ar: float
    t_stat: float
    p_value: float
    direction: Direction


def band_power(records, band: FrequencyBand) -> np.ndarray:
    """Per-word 105-vectors of band power (mean of the two source domains).

    All records must carry the same ET feature; raises on an empty set.
    """
    records = list(records)
    if not records:
        raise ValueError("empty record set")
    feats = {r.et_feature for r in records}
    if len(feats) > 1:
        raise ValueError(f"records mix ET features: {sorted(f.value for f in feats)}")
    i, j = FrequencyBand(band).source_rows
    out = np.empty((len(records), N_ELECTRODES), dtype=np.float64)
    for n, rec in enumerate(records):
        np.add(rec.domains[i], rec.domains[j], out=out[n])
    out *= 0.5
    return out


def welch_t(x: np.ndarray, y: np.ndarray) -> float:
    """Welch (unequal variance) t statistic for mean(x) - mean(y)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    nx, ny = x.size, y.size
    if nx < 2 or ny < 2:
        raise ValueError("need at least 2 observations per sample")
    se2 = x.var(ddof=1) / nx + y.var(ddof=1) / ny
    diff = x.mean() - y.mean()
    if se2 == 0.0:
        if diff == 0.0:
            return 0.0
        return np.inf if diff > 0 else -np.inf
    return float(diff / np.sqrt(se2))


def bootstrap_ttest(x, y, n_boot: int = 2000, seed: int = 0):
    """Two-sided bootstrap Welch test; returns (t_stat, p_value).

    The resampler is seeded on the unordered pair, so swapping x and y
    negates t_stat and reproduces the p-value exactly.  p-values use the
    add-one estimator (c + 1) / (n_boot + 1) and never reach 0.
    """
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    y = np.ascontiguousarray(y, dtype=np.float64).ravel()
    if x.size < 2 or y.size < 2:
        raise ValueError("need at least 2 observations per sample")
    if n_boot < 1000:
        raise ValueError("n_boot must be at least 1000")

    t_obs = welch_t(x, y)
    if np.isinf(t_obs):
        return t_obs, 1.0 / (n_boot + 1)
    if x.var(ddof=1) == 0.0 and y.var(ddof=1) == 0.0:
        # both samples constant with equal means
        return 0.0, 1.0

    pooled = (x.sum() + y.sum()) / (x.size + y.size)
    xs = x - x.mean() + pooled
    ys = y - y.mean() + pooled

    # Canonical order makes the index draws symmetric in (x, y).
    swapped = x.tobytes() > y.tobytes()
    first, second = (ys, xs) if swapped else (xs, ys)
    rng = np.random.default_rng(mask64(seed))
    idx_first = rng.integers(0, first.size, size=(n_boot, first.size))
    idx_second = rng.integers(0, second.size, size=(n_boot, second.size))
    if swapped:
        xb, yb = second[idx_second], first[idx_first]
    else:
        xb, yb = first[idx_first], second[idx_second]

    mx, my = xb.mean(axis=1), yb.mean(axis=1)
    vx, vy = xb.var(axis=1, ddof=1), yb.var(axis=1, ddof=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_star = (mx - my) / np.sqrt(vx / x.size + vy / y.size)
    t_star = np.nan_to_num(t_star, nan=0.0, posinf=np.inf, neginf=-np.inf)
    count = int(np.count_nonzero(np.abs(t_star) >= abs(t_obs)))
    return t_obs, (count + 1) / (n_boot + 1)


def electrode_map(
    corpus: EegCorpus,
    band: FrequencyBand,
    alpha: float = 0.01,
    n_boot: int = 2000,
    seed: int = 0,
):
    """Per-electrode AR-vs-NR test map for one band (105 results).

    t > 0 means higher AR band power.  Each electrode uses the derived
    seed ``seed ^ electrode_index`` so the map does not depend on
    evaluation order.
    """
    band = FrequencyBand(band)
    nr = corpus.trt_records(Task.NR)
    ar = corpus.trt_records(Task.AR)
    if not nr or not ar:
        missing = "NR" if not nr else "AR"
        raise ValueError(f"corpus has no TRT records for task {missing}")
    p_nr = band_power(nr, band)
    p_ar = band_power(ar, band)
    results = []
    for e in range(N_ELECTRODES):
        t, p = bootstrap_ttest(p_ar[:, e], p_nr[:, e], n_boot=n_boot, seed=mask64(seed) ^ e)
        mean_nr = float(p_nr[:, e].mean())
        mean_ar = float(p_ar[:, e].mean())
        if p >= alpha or mean_ar == mean_nr:
            direction = Direction.NONE
        elif mean_ar > mean_nr:
            direction = Direction.AR_HIGHER
        else:
            direction = Direction.NR_HIGHER
        results.append(
            ElectrodeTestResult(e, band, mean_nr, mean_ar, float(t), float(p), direction)
        )
    return results


def write_electrode_map_tsv(results, electrode_labels, path) -> None:
    """Plot-ready TSV export, one row per electrode per band."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            "band\telectrode_index\telectrode_label\tmean_nr\tmean_ar"
            "\tt_stat\tp_value\tdirection\n"
        )
        for r in results:
            fh.write(
                f"{r.band.value}\t{r.electrode_index}"
                f"\t{electrode_labels[r.electrode_index]}"
                f"\t{r.mean_nr:.10g}\t{r.mean_ar:.10g}"
                f"\t{r.t_stat:.10g}\t{r.p_value:.10g}\t{r.direction.value}\n"
            )
