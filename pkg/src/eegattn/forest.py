"""CART decision trees and a random forest with Gini feature importances.

Binary classification only.  Trees grow greedily to purity (no depth
limit, min 2 samples to split); at each node ``max_features`` candidate
features are sampled without replacement and the split maximising the
sample-weighted Gini decrease wins.  Candidate thresholds are midpoints
between consecutive distinct sorted values; ties break toward the lower
feature index, then the lower threshold.

With ``bootstrap=False`` (the default) every tree sees the full training
set and diversity comes from feature subsampling alone.
"""

import json
from dataclasses import dataclass

import numpy as np

from ._rand import mask64

FOREST_SCHEMA = "forest/1"

# Impurity decreases below this are treated as zero (stops splitting).
_MIN_DECREASE = 1e-12


def gini(class_counts) -> float:
    """Gini impurity 1 - sum((c_i / N)^2) of a count vector."""
    counts = np.asarray(class_counts, dtype=np.float64)
    if (counts < 0).any():
        raise ValueError("class counts must be non-negative")
    total = counts.sum()
    if total == 0:
        raise ValueError("all-zero class counts")
    p = counts / total
    return float(1.0 - np.dot(p, p))


@dataclass
class DecisionTree:
    """Flat-array CART tree; ``feature[i] == -1`` marks a leaf."""

    feature: np.ndarray  # (n_nodes,) int, split feature or -1
    threshold: np.ndarray  # (n_nodes,) float, split threshold (nan at leaves)
    left: np.ndarray  # (n_nodes,) int child index, -1 at leaves
    right: np.ndarray
    class_counts: np.ndarray  # (n_nodes, 2) samples per class at the node
    n_features: int
    impurity_decrease: np.ndarray  # (d,) sample-weighted Gini decrease sums

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row of X."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(len(X), dtype=np.int64)
        while True:
            feat = self.feature[node]
            active = feat >= 0
            if not active.any():
                return node
            rows = np.nonzero(active)[0]
            f = feat[rows]
            go_left = X[rows, f] <= self.threshold[node[rows]]
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """(N, 2) leaf class frequencies for each row."""
        leaves = self.apply(X)
        counts = self.class_counts[leaves].astype(np.float64)
        return counts / counts.sum(axis=1, keepdims=True)


def _best_split(X, y, idx, cand, gini_parent):
    """Best (feature, threshold, decrease) over candidate columns, or None."""
    Xn = X[np.ix_(idx, cand)]
    yn = y[idx]
    n = idx.size
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = yn[order]
    ones = np.cumsum(ys, axis=0, dtype=np.float64)
    total1 = float(yn.sum())
    nl = np.arange(1, n, dtype=np.float64)[:, None]
    nr = n - nl
    l1 = ones[:-1]
    l0 = nl - l1
    r1 = total1 - l1
    r0 = nr - r1
    child = 1.0 - ((l1 * l1 + l0 * l0) / nl + (r1 * r1 + r0 * r0) / nr) / n
    decrease = gini_parent - child
    decrease[xs[1:] <= xs[:-1]] = -np.inf
    col_best = decrease.max(axis=0)
    c = int(np.argmax(col_best))
    best = col_best[c]
    if not np.isfinite(best) or best <= _MIN_DECREASE:
        return None
    r = int(np.argmax(decrease[:, c]))
    lo, hi = xs[r, c], xs[r + 1, c]
    thr = 0.5 * (lo + hi)
    if thr >= hi:  # midpoint rounded up to the higher value
        thr = lo
    return int(cand[c]), float(thr), float(best)


def fit_tree(X, y, max_features=None, rng=None) -> DecisionTree:
    """Grow one CART tree (greedy, fully grown, left branch is <=)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("X must be a non-empty 2-D matrix")
    if y.shape != (X.shape[0],):
        raise ValueError("y must have one label per row of X")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be binary 0/1")
    y = y.astype(np.int64)
    N, d = X.shape
    mf = d if max_features is None else int(max_features)
    if not 1 <= mf <= d:
        raise ValueError(f"max_features must be in 1..{d}")
    if rng is None:
        rng = np.random.default_rng()

    feature: list = []
    threshold: list = []
    left: list = []
    right: list = []
    counts: list = []
    decrease_acc = np.zeros(d, dtype=np.float64)

    stack = [(np.arange(N), -1, False)]
    while stack:
        idx, parent, is_left = stack.pop()
        ni = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = ni
        c1 = int(y[idx].sum())
        c0 = idx.size - c1
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        counts.append((c0, c1))
        if idx.size < 2 or c0 == 0 or c1 == 0:
            continue
        n = idx.size
        gini_parent = 1.0 - (c0 * c0 + c1 * c1) / (n * n)
        cand = np.sort(rng.choice(d, size=mf, replace=False))
        split = _best_split(X, y, idx, cand, gini_parent)
        if split is None:
            continue
        feat, thr, dec = split
        feature[ni] = feat
        threshold[ni] = thr
        decrease_acc[feat] += (n / N) * dec
        mask = X[idx, feat] <= thr
        stack.append((idx[~mask], ni, False))
        stack.append((idx[mask], ni, True))

    return DecisionTree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        class_counts=np.asarray(counts, dtype=np.int64),
        n_features=d,
        impurity_decrease=decrease_acc,
    )


@dataclass
class RandomForest:
    trees: list
    n_features: int
    max_features: int
    bootstrap: bool
    seed: int
    feature_importances: np.ndarray  # (d,) non-negative, sums to 1 if any split

    @property
    def n_trees(self) -> int:
        return len(self.trees)


def fit_forest(
    X,
    y,
    n_trees: int = 100,
    max_features=None,
    bootstrap: bool = False,
    seed: int = 0,
) -> RandomForest:
    """Train a forest; per-tree seed is ``seed ^ tree_index``."""
    if n_trees < 1:
        raise ValueError("n_trees must be at least 1")
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    d = X.shape[1]
    mf = int(np.sqrt(d)) if max_features is None else int(max_features)
    mf = max(1, mf)
    trees = []
    raw = np.zeros(d, dtype=np.float64)
    for t in range(n_trees):
        rng = np.random.default_rng(mask64(seed) ^ t)
        if bootstrap:
            rows = rng.integers(0, len(X), size=len(X))
            tree = fit_tree(X[rows], y[rows], max_features=mf, rng=rng)
        else:
            tree = fit_tree(X, y, max_features=mf, rng=rng)
        trees.append(tree)
        raw += tree.impurity_decrease
    total = raw.sum()
    importances = raw / total if total > 0 else raw
    return RandomForest(trees, d, mf, bootstrap, seed, importances)


def predict(forest: RandomForest, X):
    """(labels, probabilities); probability is the mean over tree leaves."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise ValueError(
            f"X must have {forest.n_features} columns, got shape {X.shape}"
        )
    probs = np.zeros((len(X), 2), dtype=np.float64)
    for tree in forest.trees:
        probs += tree.predict_proba(X)
    probs /= forest.n_trees
    labels = (probs[:, 1] > probs[:, 0]).astype(np.int64)  # tie -> class 0
    return labels, probs


def top_k_features(forest: RandomForest, k: int):
    """Indices of the k most important features, descending importance.

    Ties break toward the lower feature index.
    """
    d = forest.n_features
    if not 1 <= k <= d:
        raise ValueError(f"k must be in 1..{d}")
    imp = forest.feature_importances
    order = np.lexsort((np.arange(d), -imp))
    return [int(i) for i in order[:k]]


def save_forest(forest: RandomForest, path) -> None:
    obj = {
        "schema": FOREST_SCHEMA,
        "n_features": forest.n_features,
        "max_features": forest.max_features,
        "bootstrap": forest.bootstrap,
        "seed": forest.seed,
        "feature_importances": forest.feature_importances.tolist(),
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": [None if np.isnan(v) else v for v in t.threshold],
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "class_counts": t.class_counts.tolist(),
                "impurity_decrease": t.impurity_decrease.tolist(),
            }
            for t in forest.trees
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh)


def load_forest(path) -> RandomForest:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("schema") != FOREST_SCHEMA:
        raise ValueError(f'expected schema "{FOREST_SCHEMA}"')
    trees = [
        DecisionTree(
            feature=np.asarray(t["feature"], dtype=np.int64),
            threshold=np.asarray(
                [np.nan if v is None else v for v in t["threshold"]], dtype=np.float64
            ),
            left=np.asarray(t["left"], dtype=np.int64),
            right=np.asarray(t["right"], dtype=np.int64),
            class_counts=np.asarray(t["class_counts"], dtype=np.int64),
            n_features=obj["n_features"],
            impurity_decrease=np.asarray(t["impurity_decrease"], dtype=np.float64),
        )
        for t in obj["trees"]
    ]
    return RandomForest(
        trees,
        obj["n_features"],
        obj["max_features"],
        obj["bootstrap"],
        obj["seed"],
        np.asarray(obj["feature_importances"], dtype=np.float64),
    )


def write_importances_tsv(forest: RandomForest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("feature_index\timportance\n")
        for i, v in enumerate(forest.feature_importances):
            fh.write(f"{i}\t{v:.10g}\n")
