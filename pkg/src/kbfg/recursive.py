"""Feature generation by recursive induction over feature values.

For each source feature a derived induction problem is built: its objects
are the distinct values the feature takes on the training examples, each
labeled with the majority label of the examples carrying that value (ties
to 0).  Relations applicable to those values become the derived problem's
features; below the depth limit the generator recurses on the derived
problem to extend that feature map.  A classifier trained on the derived
problem is then composed back onto the source feature and emitted as a new
feature for the original examples.

Set-valued sources contribute every member token as an object.  Their
objects are first split into one candidate problem per knowledge-base
departure type covering them, and each surviving candidate emits its own
feature.

Candidates are silently discarded (but counted) when they have fewer than
``min_recursive_size`` objects, a single object class, or no applicable
relations.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from kbfg.data import Dataset, Example, materialize
from kbfg.expand import _expand_one
from kbfg.features import (
    VALUE_COLUMN,
    BaseFeature,
    ClassifierFeature,
    Feature,
    evaluate_feature,
)
from kbfg.kb import KnowledgeBase, Relation
from kbfg.learners import TrainConfig, majority_label, train_model
from kbfg.values import iter_atoms


class FilteredOut(Exception):
    """Every candidate problem for the feature was discarded."""

    def __init__(self, reasons: List[str]):
        super().__init__("; ".join(reasons))
        self.reasons = reasons


@dataclass
class GenerationConfig:
    depth: int = 2
    min_recursive_size: int = 8
    coverage_threshold: float = 1.0
    aggregator_family: str = "any"
    learner_kind: str = "tree"
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.min_recursive_size < 1:
            raise ValueError("min_recursive_size must be >= 1")


@dataclass
class RecursiveProblem:
    source_name: str
    objects: List[Tuple[str, int]]      # (value token, majority label), sorted by token
    features: List[Feature]             # feature map over the value column
    depth: int
    partition_type: Optional[str] = None

    def as_dataset(self) -> Dataset:
        vtype = self.partition_type or VALUE_COLUMN
        examples = [Example(v, y, {VALUE_COLUMN: v}) for v, y in self.objects]
        return Dataset(examples, [(VALUE_COLUMN, vtype)])


@dataclass
class CandidateRecord:
    """Bookkeeping for one candidate problem, kept for reports."""

    source_name: str
    level: int                  # 0 = problem over the caller's own features
    n_objects: int
    n_examples: int
    status: str                 # generated | too_small | single_class | no_relations
    partition_type: Optional[str] = None


@dataclass
class GenerationStats:
    records: List[CandidateRecord] = field(default_factory=list)

    def add(self, rec: CandidateRecord) -> None:
        self.records.append(rec)

    def summary(self) -> dict:
        by_reason = Counter(r.status for r in self.records if r.status != "generated")
        return {
            "candidates_tried": len(self.records),
            "features_generated": sum(1 for r in self.records if r.status == "generated"),
            "filtered": dict(sorted(by_reason.items())),
        }


def _value_labels(values_per_example: List[List[str]], labels: Sequence[int]) -> Dict[str, int]:
    """Majority label of the examples carrying each token (ties to 0)."""
    carried: Dict[str, List[int]] = {}
    for toks, y in zip(values_per_example, labels):
        for tok in set(toks):
            carried.setdefault(tok, []).append(y)
    return {tok: majority_label(ys) for tok, ys in carried.items()}


def _coverage(rel: Relation, values: Sequence[str]) -> float:
    return sum(1 for v in values if v in rel.index) / len(values)


def _candidate_features(values: List[str], relations: List[Relation], kb: KnowledgeBase,
                        family: str) -> List[Feature]:
    base = BaseFeature(VALUE_COLUMN)
    out: List[Feature] = []
    for rel in relations:
        out.extend(_expand_one(base, rel, values, kb, family))
    return out


def create_new_problem(f: Feature, ds: Dataset, kb: KnowledgeBase,
                       cfg: GenerationConfig, depth: Optional[int] = None,
                       stats: Optional[GenerationStats] = None,
                       level: int = 0) -> List[RecursiveProblem]:
    """Candidate problems for one source feature.

    Atom-valued sources yield at most one problem; set-valued sources yield
    one per covering departure type.  Raises FilteredOut when no candidate
    survives the size / single-class / no-relations filters.
    """
    depth = cfg.depth if depth is None else depth
    stats = stats if stats is not None else GenerationStats()
    per_example: List[List[str]] = []
    any_set = False
    for x in ds.examples:
        v = evaluate_feature(f, x, kb)
        any_set = any_set or isinstance(v, frozenset)
        per_example.append(list(iter_atoms(v)))
    label_of = _value_labels(per_example, ds.labels)
    all_values = sorted(label_of)

    if any_set:
        candidates = _partition_by_type(all_values, kb)
    else:
        candidates = [(None, all_values)]

    problems: List[RecursiveProblem] = []
    reasons: List[str] = []
    for ptype, values in candidates:
        status = None
        feats: List[Feature] = []
        if len(values) < cfg.min_recursive_size:
            status = "too_small"
        elif len({label_of[v] for v in values}) == 1:
            status = "single_class"
        else:
            if ptype is None:
                rels = kb.applicable_relations(values, cfg.coverage_threshold)
            else:
                rels = [r for r in kb.relations_of_departure_type(ptype)
                        if _coverage(r, values) >= cfg.coverage_threshold]
            feats = _candidate_features(values, rels, kb, cfg.aggregator_family)
            if not feats:
                status = "no_relations"
        stats.add(CandidateRecord(f.name, level, len(values), len(ds.examples),
                                  status or "generated", ptype))
        if status is None:
            problems.append(RecursiveProblem(
                f.name, [(v, label_of[v]) for v in values], feats, depth, ptype))
        else:
            tag = f"{ptype}: {status}" if ptype else status
            reasons.append(tag)
    if not problems:
        raise FilteredOut(reasons or ["no values"])
    return problems


def _partition_by_type(values: List[str], kb: KnowledgeBase) -> List[Tuple[str, List[str]]]:
    """Group tokens by the departure types of the relations they appear in."""
    by_type: Dict[str, List[str]] = {}
    for v in values:
        types: Set[str] = set()
        for name in kb.relations:
            rel = kb.relations[name]
            if v in rel.index:
                types.add(rel.departure_type)
        for t in types:
            by_type.setdefault(t, []).append(v)
    return [(t, sorted(vs)) for t, vs in sorted(by_type.items())]


def generate_features(ds: Dataset, features: Sequence[Feature], kb: KnowledgeBase,
                      cfg: Optional[GenerationConfig] = None, depth: Optional[int] = None,
                      stats: Optional[GenerationStats] = None) -> List[Feature]:
    """Emit one induced feature per surviving (source feature x partition).

    Below the depth limit each derived problem's feature map is first
    extended by recursive generation over the problem itself; the
    configured learner is then trained on the materialized problem and the
    resulting model composed onto the source feature.  Output follows the
    input feature order.
    """
    cfg = cfg or GenerationConfig()
    depth = cfg.depth if depth is None else depth
    stats = stats if stats is not None else GenerationStats()
    return _generate(ds, features, kb, cfg, depth, stats, level=0)


def _generate(ds: Dataset, features: Sequence[Feature], kb: KnowledgeBase,
              cfg: GenerationConfig, depth: int, stats: GenerationStats,
              level: int) -> List[Feature]:
    out: List[Feature] = []
    seen_names = {f.name for f in features}
    for f in features:
        try:
            problems = create_new_problem(f, ds, kb, cfg, depth, stats, level)
        except FilteredOut:
            continue
        for problem in problems:
            feats = list(problem.features)
            problem_ds = problem.as_dataset()
            if depth > 0:
                nested = _generate(problem_ds, feats, kb, cfg, depth - 1, stats,
                                   level + 1)
                have = {g.name for g in feats}
                feats.extend(g for g in nested if g.name not in have)
            model = train_model(cfg.learner_kind, materialize(problem_ds, feats, kb),
                                cfg.train)
            new = ClassifierFeature(inner=f, model=model, value_features=tuple(feats),
                                    partition_type=problem.partition_type)
            if new.name not in seen_names:
                seen_names.add(new.name)
                out.append(new)
    return out


def apply_generated(feature: ClassifierFeature, x, kb: KnowledgeBase) -> int:
    """The induced feature's label for one example (composition of model and inner)."""
    if not isinstance(feature, ClassifierFeature):
        raise TypeError("apply_generated expects an induced classifier feature")
    return int(evaluate_feature(feature, x, kb))
