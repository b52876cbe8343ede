"""Induction algorithms over symbolic feature matrices.

All three learners share the same contract: training is deterministic,
``predict`` is total over any value vector (missing and never-seen values
included), and every model exposes ``default_class``, the training majority
label with ties resolved to 0.

* decision tree: multiway splits on the feature with maximal information
  gain (index ties to the lower index).  A split is admissible only when
  every child keeps at least ``min_leaf`` examples, which is what stops
  id-like columns from being used.  Unseen split values route to the
  fallback child, the child that held the most training examples.
* k-NN: Hamming distance over value vectors, distance ties to the lower
  stored row, vote ties to 0.
* linear: hinge-loss subgradient descent over one-hot encoded values with a
  1/(lambda*t) step size, cycling the training rows in a fixed order so the
  trajectory is reproducible and doubling the data (concatenated) with
  half the epochs traces the identical weight path.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from kbfg.data import Dataset, FeatureMatrix, materialize
from kbfg.values import FeatureValue, value_from_json, value_sort_key, value_to_json


@dataclass
class TrainConfig:
    max_depth: int = 12
    min_leaf: int = 2
    knn_k: int = 3
    epochs: int = 50
    regularization: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        for name in ("max_depth", "min_leaf", "knn_k", "epochs"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.regularization <= 0:
            raise ValueError("regularization must be positive")


LEARNER_KINDS = ("tree", "knn", "linear")


def majority_label(labels: Iterable[int]) -> int:
    """Majority vote over binary labels; ties go to 0."""
    labels = list(labels)
    return int(sum(labels) * 2 > len(labels))


def entropy(labels: Sequence[int]) -> float:
    """Binary entropy of a label sequence, in bits; 0*log0 counts as 0."""
    n = len(labels)
    if n == 0:
        return 0.0
    ones = sum(labels)
    h = 0.0
    for c in (ones, n - ones):
        if c:
            p = c / n
            h -= p * math.log2(p)
    return h


def information_gain(labels: Sequence[int], partition: Iterable[Sequence[int]]) -> float:
    """Entropy reduction of `labels` under a partition of its indices.

    `partition` groups every index exactly once (guarded).  Result is in
    bits and clamped to be non-negative against rounding.
    """
    groups = [list(g) for g in partition]
    n = len(labels)
    if n == 0:
        raise ValueError("information_gain requires labels")
    covered = sorted(i for g in groups for i in g)
    if covered != list(range(n)):
        raise ValueError("partition must cover every label index exactly once")
    cond = 0.0
    for g in groups:
        cond += len(g) / n * entropy([labels[i] for i in g])
    return max(0.0, entropy(labels) - cond)


def _groups_by_value(column: Sequence[FeatureValue]) -> Dict[FeatureValue, List[int]]:
    groups: Dict[FeatureValue, List[int]] = {}
    for i, v in enumerate(column):
        groups.setdefault(v, []).append(i)
    return groups


def column_information_gain(matrix: FeatureMatrix, j: int) -> float:
    """IG of splitting the matrix's labels by column j's values (missing included)."""
    groups = _groups_by_value(matrix.column(j))
    return information_gain(matrix.labels, groups.values())


# --- decision tree ---------------------------------------------------------


@dataclass
class TreeNode:
    label: Optional[int] = None          # set on leaves
    feature: Optional[int] = None        # set on internal nodes
    children: Optional[List[Tuple[FeatureValue, "TreeNode"]]] = None
    fallback: Optional[int] = None       # index into children for unseen values
    n: int = 0                           # training examples that reached this node

    @property
    def is_leaf(self) -> bool:
        return self.label is not None

    def to_json(self) -> dict:
        if self.is_leaf:
            return {"leaf": self.label, "n": self.n}
        return {
            "feature": self.feature,
            "n": self.n,
            "fallback": self.fallback,
            "children": [[value_to_json(v), c.to_json()] for v, c in self.children],
        }

    @staticmethod
    def from_json(obj: dict) -> "TreeNode":
        if "leaf" in obj:
            return TreeNode(label=obj["leaf"], n=obj["n"])
        children = [(value_from_json(v), TreeNode.from_json(c)) for v, c in obj["children"]]
        return TreeNode(feature=obj["feature"], children=children,
                        fallback=obj["fallback"], n=obj["n"])


@dataclass
class TreeModel:
    root: TreeNode
    default_class: int
    n_features: int

    kind = "tree"

    def predict(self, row: Sequence[FeatureValue]) -> int:
        node = self.root
        while not node.is_leaf:
            v = row[node.feature] if node.feature < len(row) else None
            for value, child in node.children:
                if value == v:
                    node = child
                    break
            else:
                node = node.children[node.fallback][1]
        return node.label

    def to_json(self) -> dict:
        return {"kind": "tree", "default_class": self.default_class,
                "n_features": self.n_features, "root": self.root.to_json()}


def train_decision_tree(matrix: FeatureMatrix, cfg: Optional[TrainConfig] = None) -> TreeModel:
    cfg = cfg or TrainConfig()
    if not matrix.rows:
        raise ValueError("cannot train on an empty matrix")
    n_features = len(matrix.rows[0])

    def build(indices: List[int], depth: int) -> TreeNode:
        labels = [matrix.labels[i] for i in indices]
        node_majority = majority_label(labels)
        if len(set(labels)) == 1:
            return TreeNode(label=labels[0], n=len(indices))
        if depth >= cfg.max_depth:
            return TreeNode(label=node_majority, n=len(indices))

        # groups hold positions local to `indices`
        best_j, best_gain, best_groups = None, 0.0, None
        for j in range(n_features):
            groups = _groups_by_value([matrix.rows[i][j] for i in indices])
            if len(groups) < 2:
                continue
            if any(len(g) < cfg.min_leaf for g in groups.values()):
                continue  # split would create an undersized leaf
            gain = information_gain(labels, groups.values())
            if gain > best_gain + 1e-12:
                best_j, best_gain, best_groups = j, gain, groups
        if best_j is None:
            return TreeNode(label=node_majority, n=len(indices))

        items = sorted(best_groups.items(), key=lambda kv: value_sort_key(kv[0]))
        children = [(v, build([indices[p] for p in g], depth + 1)) for v, g in items]
        sizes = [len(g) for _, g in items]
        fallback = max(range(len(sizes)), key=lambda k: (sizes[k], -k))
        return TreeNode(feature=best_j, children=children, fallback=fallback,
                        n=len(indices))

    root = build(list(range(len(matrix.rows))), 0)
    return TreeModel(root, majority_label(matrix.labels), n_features)


# --- k nearest neighbours ---------------------------------------------------


@dataclass
class KnnModel:
    rows: List[List[FeatureValue]]
    labels: List[int]
    k: int
    default_class: int

    kind = "knn"

    def predict(self, row: Sequence[FeatureValue]) -> int:
        def dist(stored: Sequence[FeatureValue]) -> int:
            m = max(len(stored), len(row))
            return sum(1 for i in range(m)
                       if (stored[i] if i < len(stored) else None)
                       != (row[i] if i < len(row) else None))

        order = sorted(range(len(self.rows)), key=lambda i: (dist(self.rows[i]), i))
        votes = [self.labels[i] for i in order[: self.k]]
        return majority_label(votes)

    def to_json(self) -> dict:
        return {"kind": "knn", "k": self.k, "default_class": self.default_class,
                "labels": self.labels,
                "rows": [[value_to_json(v) for v in row] for row in self.rows]}


def train_knn(matrix: FeatureMatrix, cfg: Optional[TrainConfig] = None) -> KnnModel:
    cfg = cfg or TrainConfig()
    if not matrix.rows:
        raise ValueError("cannot train on an empty matrix")
    return KnnModel([list(r) for r in matrix.rows], list(matrix.labels),
                    cfg.knn_k, majority_label(matrix.labels))


# --- linear (hinge loss, one-hot encoding) ----------------------------------


@dataclass
class LinearModel:
    weights: Dict[Tuple[int, str], float]  # (column, encoded value) -> weight
    bias: float
    default_class: int
    constant: bool = False

    kind = "linear"

    def _score(self, row: Sequence[FeatureValue]) -> float:
        s = self.bias
        for j, v in enumerate(row):
            s += self.weights.get((j, _encode(v)), 0.0)
        return s

    def predict(self, row: Sequence[FeatureValue]) -> int:
        if self.constant:
            return self.default_class
        return int(self._score(row) > 0)

    def to_json(self) -> dict:
        return {"kind": "linear", "default_class": self.default_class,
                "constant": self.constant, "bias": self.bias,
                "weights": [[j, enc, w] for (j, enc), w in sorted(self.weights.items())]}


def _encode(v: FeatureValue) -> str:
    if v is None:
        return "\x00missing"
    if isinstance(v, str):
        return "a:" + v
    return "s:" + "\x1f".join(sorted(v))


def train_linear(matrix: FeatureMatrix, cfg: Optional[TrainConfig] = None) -> LinearModel:
    cfg = cfg or TrainConfig()
    if not matrix.rows:
        raise ValueError("cannot train on an empty matrix")
    default = majority_label(matrix.labels)
    if len(set(matrix.labels)) == 1:
        return LinearModel({}, 0.0, default, constant=True)

    lam = cfg.regularization
    weights: Dict[Tuple[int, str], float] = {}
    bias = 0.0
    keys = [[(j, _encode(v)) for j, v in enumerate(row)] for row in matrix.rows]
    signed = [1 if y == 1 else -1 for y in matrix.labels]
    t = 0
    for _ in range(cfg.epochs):
        for i in range(len(keys)):
            t += 1
            eta = 1.0 / (lam * t)
            score = bias + sum(weights.get(k, 0.0) for k in keys[i])
            shrink = 1.0 - eta * lam
            for k in list(weights):
                weights[k] *= shrink
            bias *= shrink
            if signed[i] * score < 1.0:
                for k in keys[i]:
                    weights[k] = weights.get(k, 0.0) + eta * signed[i]
                bias += eta * signed[i]
    return LinearModel(weights, bias, default)


# --- (de)serialization shared by feature documents --------------------------


def model_from_json(obj: dict):
    kind = obj["kind"]
    if kind == "tree":
        return TreeModel(TreeNode.from_json(obj["root"]), obj["default_class"],
                         obj["n_features"])
    if kind == "knn":
        rows = [[value_from_json(v) for v in row] for row in obj["rows"]]
        return KnnModel(rows, list(obj["labels"]), obj["k"], obj["default_class"])
    if kind == "linear":
        weights = {(j, enc): w for j, enc, w in obj["weights"]}
        return LinearModel(weights, obj["bias"], obj["default_class"], obj["constant"])
    raise ValueError(f"unknown model kind {kind!r}")


def train_model(kind: str, matrix: FeatureMatrix, cfg: Optional[TrainConfig] = None):
    if kind == "tree":
        return train_decision_tree(matrix, cfg)
    if kind == "knn":
        return train_knn(matrix, cfg)
    if kind == "linear":
        return train_linear(matrix, cfg)
    raise ValueError(f"unknown learner kind {kind!r}")


# --- cross-validation --------------------------------------------------------


def stratified_folds(labels: Sequence[int], folds: int, seed: int) -> List[List[int]]:
    """Seeded stratified fold assignment.

    Indices of each class are shuffled, then dealt round-robin with a fold
    pointer that rolls over across classes, keeping both the fold sizes and
    the per-fold label mix as even as integrally possible.
    """
    if folds < 2:
        raise ValueError("folds must be at least 2")
    if len(labels) < folds:
        raise ValueError(f"need at least {folds} examples for {folds} folds")
    rng = random.Random(seed)
    assignment: List[List[int]] = [[] for _ in range(folds)]
    pointer = 0
    for cls in (0, 1):
        members = [i for i, y in enumerate(labels) if y == cls]
        rng.shuffle(members)
        for i in members:
            assignment[pointer % folds].append(i)
            pointer += 1
    return [sorted(fold) for fold in assignment]


def accuracy(model, matrix: FeatureMatrix) -> float:
    if not matrix.rows:
        return 0.0
    hits = sum(1 for row, y in zip(matrix.rows, matrix.labels) if model.predict(row) == y)
    return hits / len(matrix.rows)


def cross_validate(ds: Dataset, features, kb, learner_kind: str, folds: int = 10,
                   seed: int = 0, train_cfg: Optional[TrainConfig] = None,
                   feature_generator=None) -> List[float]:
    """Per-fold accuracies under seeded stratified cross-validation.

    When `feature_generator` is given it is called with the training-fold
    dataset only and must return extra features to append; held-out
    examples never influence generation.
    """
    fold_sets = stratified_folds(ds.labels, folds, seed)
    accs = []
    for f in range(folds):
        test_idx = fold_sets[f]
        train_idx = [i for i in range(len(ds)) if i not in set(test_idx)]
        train_ds = ds.subset(train_idx)
        feats = list(features)
        if feature_generator is not None:
            feats = feats + list(feature_generator(train_ds))
        model = train_model(learner_kind, materialize(train_ds, feats, kb), train_cfg)
        accs.append(accuracy(model, materialize(ds.subset(test_idx), feats, kb)))
    return accs
