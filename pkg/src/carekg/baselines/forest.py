"""Random forest: bootstrapped CART trees with Gini splits.

Trees grow to purity or the min-leaf floor. Each split draws sqrt(d)
candidate features and scans every threshold of all candidates in one
vectorized pass (per-column argsort + cumulative class counts). Class
probabilities are hard-vote fractions across trees.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError


@dataclass
class _Tree:
    feature: list = field(default_factory=list)    # -1 marks a leaf
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    vote: list = field(default_factory=list)

    def new_node(self):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.vote.append(0)
        return len(self.feature) - 1


def _best_split(X, y, rows, feats, n_classes, min_leaf):
    """Best (feature, threshold, gini) over the candidate features.

    Scans all split positions of all candidates at once: sort each
    candidate column, accumulate class counts, and score the Gini of
    every boundary between distinct values.
    """
    n = rows.size
    sub = X[np.ix_(rows, feats)]
    order = np.argsort(sub, axis=0, kind="stable")
    sorted_vals = np.take_along_axis(sub, order, axis=0)
    labels = y[rows][order]                                   # (n, f)
    onehot = np.zeros((n, feats.size, n_classes))
    np.put_along_axis(onehot, labels[:, :, None], 1.0, axis=2)
    cum = np.cumsum(onehot, axis=0)                           # counts left of each cut
    total = cum[-1]                                           # (f, K)

    sizes_l = np.arange(1, n + 1, dtype=np.float64)[:, None]
    sizes_r = n - sizes_l
    with np.errstate(invalid="ignore", divide="ignore"):
        gini_l = 1.0 - (cum ** 2).sum(axis=2) / sizes_l ** 2
        right = total[None, :, :] - cum
        gini_r = 1.0 - (right ** 2).sum(axis=2) / sizes_r ** 2
        score = (sizes_l * gini_l + sizes_r * gini_r) / n
    # a cut after position i is valid when the value changes and both sides
    # keep at least min_leaf rows
    valid = np.zeros_like(score, dtype=bool)
    valid[:-1] = sorted_vals[1:] != sorted_vals[:-1]
    pos_ok = (sizes_l >= min_leaf) & (sizes_r >= min_leaf)
    valid &= pos_ok
    if not valid.any():
        return None
    score = np.where(valid, score, np.inf)
    flat = np.argmin(score)
    cut, f = np.unravel_index(flat, score.shape)
    thr = 0.5 * (sorted_vals[cut, f] + sorted_vals[cut + 1, f])
    return int(feats[f]), float(thr), float(score[cut, f])


def _grow_tree(X, y, rng, n_classes, min_leaf, max_features):
    n, d = X.shape
    rows0 = rng.integers(0, n, size=n)           # bootstrap sample
    tree = _Tree()
    root = tree.new_node()
    stack = [(root, rows0)]
    while stack:
        node, rows = stack.pop()
        counts = np.bincount(y[rows], minlength=n_classes)
        tree.vote[node] = int(np.argmax(counts))
        if counts.max() == rows.size or rows.size < 2 * min_leaf:
            continue
        feats = rng.choice(d, size=min(max_features, d), replace=False)
        feats.sort()
        found = _best_split(X, y, rows, feats, n_classes, min_leaf)
        if found is None:
            continue
        f, thr, _ = found
        mask = X[rows, f] <= thr
        tree.feature[node] = f
        tree.threshold[node] = thr
        left = tree.new_node()
        right = tree.new_node()
        tree.left[node], tree.right[node] = left, right
        stack.append((left, rows[mask]))
        stack.append((right, rows[~mask]))
    return tree


class RFModel:
    def __init__(self, trees, n_classes):
        self.trees = [
            {k: np.asarray(getattr(t, k)) for k in ("feature", "threshold", "left", "right", "vote")}
            for t in trees
        ]
        self.n_classes = n_classes

    def _tree_votes(self, tree, X):
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = tree["feature"][node] >= 0
        while active.any():
            f = tree["feature"][node[active]]
            go_left = X[active, f] <= tree["threshold"][node[active]]
            nxt = np.where(go_left, tree["left"][node[active]], tree["right"][node[active]])
            node[active] = nxt
            active = tree["feature"][node] >= 0
        return tree["vote"][node]

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        votes = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            v = self._tree_votes(tree, X)
            votes[np.arange(X.shape[0]), v] += 1.0
        return votes / len(self.trees)

    def predict(self, X):
        return self.predict_proba(X).argmax(axis=1)


def train_rf(X, y, trees=100, n_classes=3, seed=0, min_leaf=2):
    """Fit the forest; tree t draws its randomness from stream (seed, t)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise UsageError(f"train_rf needs a non-empty 2-d matrix, got shape {X.shape}")
    if y.shape[0] != X.shape[0]:
        raise UsageError("X and y row counts differ")
    max_features = max(1, int(np.sqrt(X.shape[1])))
    grown = []
    for t in range(trees):
        rng = np.random.default_rng([seed, t])
        grown.append(_grow_tree(X, y, rng, n_classes, min_leaf, max_features))
    return RFModel(grown, n_classes)
