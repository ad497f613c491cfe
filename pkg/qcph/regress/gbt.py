"""
Gradient-boosted regression trees with squared-error loss.

Splits are exact: every midpoint between consecutive distinct values of every
non-constant column is scored, ties going to the lowest column and then the
lowest threshold. The split structure of each tree is learned on a row
subsample; leaf values are then refitted on every training row reaching the
leaf, so the training MSE cannot increase from one round to the next.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..config.settings import GbtParams
from ..exceptions import RegressionError, ShapeMismatch

logger = logging.getLogger(__name__)

LEAF = -1
_GAIN_EPS = 1e-12


@dataclass
class RegressionTree:
    """Node arrays; `feature[i] == -1` marks a leaf. Rows with x < threshold go left."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] != LEAF:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row."""
        node = np.zeros(X.shape[0], dtype=int)
        while True:
            feat = self.feature[node]
            active = np.flatnonzero(feat != LEAF)
            if active.size == 0:
                return node
            at = node[active]
            go_left = X[active, feat[active]] < self.threshold[at]
            node[active] = np.where(go_left, self.left[at], self.right[at])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, document: dict) -> "RegressionTree":
        return cls(
            feature=np.asarray(document["feature"], dtype=int),
            threshold=np.asarray(document["threshold"], dtype=float),
            left=np.asarray(document["left"], dtype=int),
            right=np.asarray(document["right"], dtype=int),
            value=np.asarray(document["value"], dtype=float),
        )


@dataclass
class GbtModel:
    base_prediction: float
    learning_rate: float
    n_features: int
    trees: List[RegressionTree] = field(default_factory=list)
    degenerate: bool = False
    train_loss: List[float] = field(default_factory=list)


def _as_matrix(X, n_features: Optional[int] = None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeMismatch(f"feature matrix must be 2-D, got shape {X.shape}")
    if n_features is not None and X.shape[1] != n_features:
        raise ShapeMismatch(f"model expects {n_features} columns, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise ShapeMismatch("feature matrix contains NaN or infinite values")
    return X


def _best_split(Xn: np.ndarray, rn: np.ndarray) -> Optional[Tuple[int, float, float]]:
    """(column, threshold, gain) of the best split of one node, None if nothing helps."""
    n = rn.shape[0]
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    left_sum = np.cumsum(rn[order], axis=0)[:-1]
    left_n = np.arange(1, n, dtype=float)[:, None]
    total = float(rn.sum())
    # SSE reduction up to a constant: S_L²/n_L + S_R²/n_R
    gain = left_sum ** 2 / left_n + (total - left_sum) ** 2 / (n - left_n)
    gain = np.where(xs[1:] > xs[:-1], gain, -np.inf)

    # row-major argmax over (column, position) picks the lowest column, then the lowest threshold
    by_column = gain.T
    flat = int(np.argmax(by_column))
    column, pos = divmod(flat, n - 1)
    best = float(by_column[column, pos])
    parent = total ** 2 / n
    if not best > parent + _GAIN_EPS * (abs(parent) + 1.0):
        return None
    lo, hi = xs[pos, column], xs[pos + 1, column]
    threshold = (lo + hi) / 2.0
    if not lo < threshold <= hi:
        threshold = hi
    return column, float(threshold), best - parent


def _grow_tree(X: np.ndarray, residual: np.ndarray, rows: np.ndarray,
               columns: np.ndarray, p: GbtParams) -> RegressionTree:
    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []

    def new_node() -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        return len(feature) - 1

    stack = [(new_node(), rows, 0)]
    while stack:
        node, node_rows, depth = stack.pop()
        if depth >= p.max_depth or node_rows.size < p.min_samples_split or columns.size == 0:
            continue
        split = _best_split(X[np.ix_(node_rows, columns)], residual[node_rows])
        if split is None:
            continue
        local_column, cut, _ = split
        column = int(columns[local_column])
        goes_left = X[node_rows, column] < cut
        feature[node], threshold[node] = column, cut
        left[node], right[node] = new_node(), new_node()
        stack.append((right[node], node_rows[~goes_left], depth + 1))
        stack.append((left[node], node_rows[goes_left], depth + 1))

    tree = RegressionTree(
        feature=np.asarray(feature, dtype=int),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=int),
        right=np.asarray(right, dtype=int),
        value=np.zeros(len(feature)),
    )
    # leaf values from all training rows, not just the subsample
    leaves = tree.apply(X)
    sums = np.bincount(leaves, weights=residual, minlength=tree.n_nodes)
    counts = np.bincount(leaves, minlength=tree.n_nodes)
    reached = counts > 0
    tree.value[reached] = sums[reached] / counts[reached]
    return tree


def fit(X, y, p: Optional[GbtParams] = None) -> GbtModel:
    """Boost `p.n_estimators` trees on the residuals of a mean-initialized model."""
    p = p or GbtParams()
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float).ravel()
    n = X.shape[0]
    if y.shape[0] != n:
        raise ShapeMismatch(f"{n} feature rows but {y.shape[0]} targets")
    if n < 2:
        raise ShapeMismatch("at least two training rows are needed")
    if not np.all(np.isfinite(y)):
        raise ShapeMismatch("targets contain NaN or infinite values")

    base = float(y.mean())
    model = GbtModel(base_prediction=base, learning_rate=p.learning_rate, n_features=X.shape[1])
    if np.ptp(y) == 0:
        logger.warning("constant target, model reduced to its mean")
        model.degenerate = True
        return model

    columns = np.flatnonzero(np.ptp(X, axis=0) > 0)
    if columns.size < X.shape[1]:
        logger.debug(f"{X.shape[1] - columns.size} constant column(s) ignored")
    n_sub = min(n, max(1, int(round(p.subsample * n))))
    rng = np.random.default_rng(p.seed)

    prediction = np.full(n, base)
    for round_ in range(p.n_estimators):
        if n_sub < n:
            rows = np.sort(rng.choice(n, size=n_sub, replace=False))
        else:
            rows = np.arange(n)
        tree = _grow_tree(X, y - prediction, rows, columns, p)
        prediction += p.learning_rate * tree.predict(X)
        model.trees.append(tree)
        model.train_loss.append(float(np.mean((y - prediction) ** 2)))
        if (round_ + 1) % 100 == 0:
            logger.debug(f"round {round_ + 1}: training MSE {model.train_loss[-1]:.6g}")
    return model


def predict(m: GbtModel, X) -> np.ndarray:
    X = _as_matrix(X, m.n_features)
    out = np.full(X.shape[0], m.base_prediction)
    for tree in m.trees:
        out += m.learning_rate * tree.predict(X)
    return out


def split_counts(m: GbtModel) -> np.ndarray:
    """How many internal nodes split on each column, over all trees."""
    counts = np.zeros(m.n_features, dtype=int)
    for tree in m.trees:
        used = tree.feature[tree.feature != LEAF]
        counts += np.bincount(used, minlength=m.n_features)
    return counts


def model_to_json(m: GbtModel, feature_names: Optional[List[str]] = None) -> str:
    document = {
        "base": m.base_prediction,
        "lr": m.learning_rate,
        "n_features": m.n_features,
        "degenerate": m.degenerate,
        "trees": [tree.to_dict() for tree in m.trees],
        "split_counts": split_counts(m).tolist(),
    }
    if feature_names is not None:
        document["feature_names"] = list(feature_names)
    return json.dumps(document)


def model_from_json(text: str) -> GbtModel:
    try:
        document = json.loads(text)
        return GbtModel(
            base_prediction=float(document["base"]),
            learning_rate=float(document["lr"]),
            n_features=int(document["n_features"]),
            trees=[RegressionTree.from_dict(t) for t in document["trees"]],
            degenerate=bool(document.get("degenerate", False)),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise RegressionError(f"not a model file: {e}") from None
