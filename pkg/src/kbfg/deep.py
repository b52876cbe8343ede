"""Divide-&-conquer feature generation over an information-gain split tree.

The training set is split recursively the way a decision tree would be
built: at each node the recursive generator runs on the node's examples,
its output joins the node's feature set, and the feature (original or
generated) with the highest information gain becomes the split.  Splitting
stops on pure nodes, nodes below ``min_node_size``, or the tree-depth
safeguard.  The tree itself is thrown away; the value of the procedure is
the pool of features generated inside the local contexts, which a single
global generation pass can miss when an uninformative majority of examples
drowns out a locally strong candidate.

The report aggregates, per split-tree depth: candidate problems tried by
the node-level generator (its own sources only, not nested recursion),
features generated, candidates filtered, the size of surviving problems
relative to the node, the information gain of the generated features at
their node, and the best information gain among the node's plain (not
induced) features.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from kbfg.data import Dataset, materialize
from kbfg.features import ClassifierFeature, Feature, serialize_feature
from kbfg.kb import KnowledgeBase
from kbfg.learners import column_information_gain
from kbfg.recursive import GenerationConfig, GenerationStats, _generate
from kbfg.values import value_sort_key


@dataclass
class DeepConfig:
    min_node_size: int = 10
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    max_tree_depth: int = 10

    def __post_init__(self):
        if self.min_node_size < 2:
            raise ValueError("min_node_size must be >= 2")


@dataclass
class DepthStats:
    candidates_tried: int = 0
    features_generated: int = 0
    filtered_count: int = 0
    size_ratios: List[float] = field(default_factory=list)
    generated_igs: List[float] = field(default_factory=list)
    best_plain_igs: List[float] = field(default_factory=list)

    def row(self, depth: int) -> dict:
        def mean(xs):
            return sum(xs) / len(xs) if xs else None

        return {
            "depth": depth,
            "candidates_tried": self.candidates_tried,
            "features_generated": self.features_generated,
            "filtered_count": self.filtered_count,
            "mean_size_ratio": mean(self.size_ratios),
            "mean_generated_ig": mean(self.generated_igs),
            "mean_best_plain_ig": mean(self.best_plain_igs),
        }


@dataclass
class GenerationReport:
    per_depth: Dict[int, DepthStats] = field(default_factory=dict)

    def at(self, depth: int) -> DepthStats:
        return self.per_depth.setdefault(depth, DepthStats())

    def check(self) -> None:
        for depth, row in self.per_depth.items():
            if row.candidates_tried != row.features_generated + row.filtered_count:
                raise AssertionError(
                    f"depth {depth}: tried {row.candidates_tried} != generated "
                    f"{row.features_generated} + filtered {row.filtered_count}")

    def rows(self) -> List[dict]:
        return [self.per_depth[d].row(d) for d in sorted(self.per_depth)]

    def to_json(self) -> dict:
        return {"per_depth": self.rows()}

    def to_text(self) -> str:
        header = f"{'depth':>5} {'tried':>6} {'generated':>9} {'filtered':>8} " \
                 f"{'size-ratio':>10} {'gen-IG':>8} {'plain-IG':>8}"
        lines = [header, "-" * len(header)]
        for row in self.rows():
            def fmt(x):
                return f"{x:.4f}" if isinstance(x, float) else ("-" if x is None else str(x))

            lines.append(f"{row['depth']:>5} {row['candidates_tried']:>6} "
                         f"{row['features_generated']:>9} {row['filtered_count']:>8} "
                         f"{fmt(row['mean_size_ratio']):>10} "
                         f"{fmt(row['mean_generated_ig']):>8} "
                         f"{fmt(row['mean_best_plain_ig']):>8}")
        return "\n".join(lines)


def feature_igs(ds: Dataset, features: Sequence[Feature], kb: KnowledgeBase) -> List[float]:
    matrix = materialize(ds, features, kb)
    return [column_information_gain(matrix, j) for j in range(len(features))]


def select_feature(ds: Dataset, features: Sequence[Feature], kb: KnowledgeBase) -> Feature:
    """The feature with maximal information gain on the node; name ties break low."""
    if not features:
        raise ValueError("select_feature requires at least one feature")
    igs = feature_igs(ds, features, kb)
    best_ig = max(igs)
    tied = [j for j in range(len(features)) if abs(igs[j] - best_ig) <= 1e-12]
    return features[min(tied, key=lambda j: features[j].name)]


def deep_generate(ds: Dataset, features: Sequence[Feature], kb: KnowledgeBase,
                  cfg: Optional[DeepConfig] = None) -> Tuple[List[Feature], GenerationReport]:
    """Generate features in the local contexts of an IG-driven split tree.

    Returns every feature generated at any node (deduplicated, pre-order)
    plus the per-depth report.  The split tree is not returned; it only
    steers where generation runs.
    """
    cfg = cfg or DeepConfig()
    report = GenerationReport()
    collected: List[Feature] = []
    seen: set = set()

    def visit(node_ds: Dataset, feats: List[Feature], depth: int) -> None:
        labels = node_ds.labels
        if len(set(labels)) <= 1:
            return
        if len(node_ds) < cfg.min_node_size:
            return
        if depth >= cfg.max_tree_depth:
            return

        stats = GenerationStats()
        generated = _generate(node_ds, feats, kb, cfg.generation,
                              cfg.generation.depth, stats, level=0)
        row = report.at(depth)
        top = [r for r in stats.records if r.level == 0]
        row.candidates_tried += len(top)
        row.features_generated += sum(1 for r in top if r.status == "generated")
        row.filtered_count += sum(1 for r in top if r.status != "generated")
        row.size_ratios += [r.n_objects / len(node_ds) for r in top
                            if r.status == "generated"]
        if generated:
            row.generated_igs += feature_igs(node_ds, generated, kb)
        plain = [f for f in feats if not isinstance(f, ClassifierFeature)]
        if plain:
            row.best_plain_igs.append(max(feature_igs(node_ds, plain, kb)))

        for g in generated:
            key = serialize_feature(g)
            if key not in seen:
                seen.add(key)
                collected.append(g)

        have = {f.name for f in feats}
        extended = feats + [g for g in generated if g.name not in have]
        best = select_feature(node_ds, extended, kb)
        column = materialize(node_ds, [best], kb).column(0)
        groups: Dict = {}
        for i, v in enumerate(column):
            groups.setdefault(v, []).append(i)
        if len(groups) < 2:
            return
        for v in sorted(groups, key=value_sort_key):
            visit(node_ds.subset(groups[v]), extended, depth + 1)

    visit(ds if isinstance(ds, Dataset) else Dataset(list(ds), []), list(features), 0)
    report.check()
    return collected, report
