"""CART regression trees: exact variance-reduction splits, array storage.

Trees are stored as parallel arrays (feature, threshold, children, value)
so they serialize to JSON directly and predict with vectorized traversal.
Ties between equal-gain splits break toward the lowest feature index, then
the lowest threshold, which keeps fits independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

LEAF = -1


@dataclass
class Tree:
    feature: list = field(default_factory=list)    # split feature, LEAF for leaves
    threshold: list = field(default_factory=list)  # go left when x < threshold
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    value: list = field(default_factory=list)      # leaf prediction, 0.0 internally

    def _add_node(self) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(0.0)
        return len(self.feature) - 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        feature = np.asarray(self.feature, dtype=np.int64)
        threshold = np.asarray(self.threshold, dtype=np.float64)
        left = np.asarray(self.left, dtype=np.int64)
        right = np.asarray(self.right, dtype=np.int64)
        value = np.asarray(self.value, dtype=np.float64)
        node = np.zeros(len(X), dtype=np.int64)
        while True:
            feat = feature[node]
            active = feat >= 0
            if not active.any():
                break
            rows = np.nonzero(active)[0]
            x = X[rows, feat[rows]]
            goes_left = x < threshold[node[rows]]
            node[rows] = np.where(goes_left, left[node[rows]], right[node[rows]])
        return value[node]


def _best_split(
    X: np.ndarray,
    y: np.ndarray,
    feat_ids: np.ndarray,
    min_child_weight: float,
) -> tuple[int, float] | None:
    """Exact best split over the given features; None when nothing is admissible.

    Gain is the SSE reduction, computed from prefix sums over each sorted
    column. Splits where either child would hold fewer than
    ``min_child_weight`` samples or where adjacent x values tie are masked.
    """
    n = len(y)
    if n < 2:
        return None
    Xn = X[:, feat_ids]
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = y[order]
    csum = np.cumsum(ys, axis=0)
    total = csum[-1]
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    s_left = csum[:-1]
    s_right = total[None, :] - s_left
    # maximizing s_l^2/n_l + s_r^2/n_r is equivalent to maximizing SSE reduction
    gain = s_left**2 / n_left + s_right**2 / n_right
    valid = (xs[1:] > xs[:-1]) & (n_left >= min_child_weight) & (n_right >= min_child_weight)
    gain = np.where(valid, gain, -np.inf)
    best_pos = np.argmax(gain, axis=0)          # first max -> lowest threshold
    best_gain = gain[best_pos, np.arange(gain.shape[1])]
    if not np.isfinite(best_gain).any():
        return None
    j = int(np.argmax(best_gain))               # first max -> lowest feature id
    baseline = float(total[j]) ** 2 / n
    if best_gain[j] <= baseline + 1e-12:        # no strict variance reduction
        return None
    i = int(best_pos[j])
    lo, hi = float(xs[i, j]), float(xs[i + 1, j])
    thr = lo + (hi - lo) / 2.0
    if thr <= lo:  # adjacent floats: midpoint rounded onto the left value
        thr = hi
    return int(feat_ids[j]), thr


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    *,
    max_depth: int,
    min_child_weight: float,
    colsample: float,
    rng: np.random.Generator,
    leaf_value: Callable[[float, int], float],
) -> Tree:
    """Grow one regression tree depth-first (left before right).

    ``leaf_value`` maps (sum of targets, sample count) to the stored leaf
    prediction; plain trees pass the mean, boosting passes its regularized
    leaf rule. ``colsample`` subsamples candidate features per split using
    ``rng``, so the traversal order fixes the random stream.
    """
    tree = Tree()
    n_features = X.shape[1]
    n_sampled = max(1, int(round(colsample * n_features)))

    def build(idx: np.ndarray, depth: int) -> int:
        node = tree._add_node()
        yn = y[idx]
        split = None
        if depth < max_depth and len(idx) >= 2:
            if n_sampled < n_features:
                feat_ids = np.sort(rng.choice(n_features, size=n_sampled, replace=False))
            else:
                feat_ids = np.arange(n_features)
            split = _best_split(X[idx], yn, feat_ids, min_child_weight)
        if split is None:
            tree.value[node] = float(leaf_value(float(yn.sum()), len(idx)))
            return node
        feat, thr = split
        tree.feature[node] = feat
        tree.threshold[node] = thr
        goes_left = X[idx, feat] < thr
        tree.left[node] = build(idx[goes_left], depth + 1)
        tree.right[node] = build(idx[~goes_left], depth + 1)
        return node

    build(np.arange(len(y)), 0)
    return tree
