"""Feature definitions and their evaluation against a knowledge base.

Three feature kinds compose into trees:

* ``BaseFeature`` reads a stored column of the example.
* ``RelationFeature`` composes a KB relation onto an inner feature.  With
  no aggregator (function relations) the value is the looked-up object(s);
  with an aggregator it is a binary indicator over the multiset of objects
  looked up from every token of the inner value.
* ``ClassifierFeature`` applies a trained model to the inner feature's
  value.  The model consumes a vector of value-level features (features
  whose base column is the reserved ``value`` column); for set-valued inner
  values the per-token predictions are combined by majority vote.

Evaluation is pure: the same example and knowledge base always produce the
same value, and nothing is mutated.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Union

from kbfg.aggregators import AggregatorInstance
from kbfg.kb import KnowledgeBase
from kbfg.values import FeatureValue, atom_or_set, iter_atoms

# reserved column name for the objects of a derived value-level problem
VALUE_COLUMN = "value"


@dataclass(frozen=True)
class BaseFeature:
    name: str

    def to_json(self) -> dict:
        return {"kind": "base", "name": self.name}


@dataclass(frozen=True)
class RelationFeature:
    inner: "Feature"
    relation: str
    aggregator: Optional[AggregatorInstance] = None

    @property
    def name(self) -> str:
        stem = f"{self.relation}({self.inner.name})"
        if self.aggregator is None:
            return stem
        return f"{stem}:{self.aggregator.family}={self.aggregator.value}"

    def to_json(self) -> dict:
        return {
            "kind": "relation",
            "name": self.name,
            "relation": self.relation,
            "aggregator": self.aggregator.to_json() if self.aggregator else None,
            "inner": self.inner.to_json(),
        }


@dataclass(frozen=True, eq=False)
class ClassifierFeature:
    inner: "Feature"
    model: object  # trained classifier: predict(row) -> 0|1, default_class, to_json()
    value_features: tuple  # features over VALUE_COLUMN, the model's input columns
    partition_type: Optional[str] = None
    name: str = field(default="")

    def __post_init__(self):
        if not self.name:
            object.__setattr__(self, "name", self._derive_name())

    def __eq__(self, other):
        return isinstance(other, ClassifierFeature) and serialize_feature(self) == serialize_feature(other)

    def __hash__(self):
        return hash(self.name)

    def _derive_name(self) -> str:
        payload = {
            "inner": self.inner.to_json(),
            "model": self.model.to_json(),
            "value_features": [vf.to_json() for vf in self.value_features],
            "partition_type": self.partition_type,
        }
        digest = hashlib.sha1(_canon(payload).encode("utf-8")).hexdigest()[:8]
        scope = self.inner.name if self.partition_type is None \
            else f"{self.inner.name}|{self.partition_type}"
        return f"induced[{scope}]#{digest}"

    def to_json(self) -> dict:
        return {
            "kind": "classifier",
            "name": self.name,
            "inner": self.inner.to_json(),
            "model": self.model.to_json(),
            "value_features": [vf.to_json() for vf in self.value_features],
            "partition_type": self.partition_type,
        }


Feature = Union[BaseFeature, RelationFeature, ClassifierFeature]


def _canon(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def serialize_feature(f: Feature) -> str:
    """Canonical one-line JSON for a feature; equal text means equal feature."""
    return _canon(f.to_json())


def feature_from_json(obj: dict) -> Feature:
    kind = obj["kind"]
    if kind == "base":
        return BaseFeature(obj["name"])
    if kind == "relation":
        agg = AggregatorInstance.from_json(obj["aggregator"]) if obj["aggregator"] else None
        return RelationFeature(feature_from_json(obj["inner"]), obj["relation"], agg)
    if kind == "classifier":
        from kbfg.learners import model_from_json  # deferred: learners imports data

        return ClassifierFeature(
            inner=feature_from_json(obj["inner"]),
            model=model_from_json(obj["model"]),
            value_features=tuple(feature_from_json(v) for v in obj["value_features"]),
            partition_type=obj.get("partition_type"),
            name=obj.get("name", ""),
        )
    raise ValueError(f"unknown feature kind {kind!r}")


def features_to_document(features: Sequence[Feature], summary: Optional[dict] = None) -> dict:
    doc = {"format": "kbfg-features", "features": [f.to_json() for f in features]}
    if summary is not None:
        doc["summary"] = summary
    return doc


def features_from_document(doc: dict) -> List[Feature]:
    if doc.get("format") != "kbfg-features":
        raise ValueError("not a feature document")
    return [feature_from_json(obj) for obj in doc["features"]]


def composition_layers(f: Feature) -> int:
    """Number of induced-classifier layers stacked beyond the source column.

    Relation hops ride along with the classifier that consumes them, so a
    single induced feature counts 1 regardless of how many relations its
    model reads, and each nested induced feature adds 1.
    """
    if isinstance(f, BaseFeature):
        return 0
    if isinstance(f, RelationFeature):
        return composition_layers(f.inner)
    inner = composition_layers(f.inner)
    nested = max((composition_layers(vf) for vf in f.value_features), default=0)
    return 1 + max(inner, nested)


def evaluate_feature(f: Feature, x, kb: KnowledgeBase) -> FeatureValue:
    """Evaluate a feature on an example (anything with an ``assignment`` map)."""
    return _eval(f, x.assignment, kb)


def _eval(f: Feature, assignment: Mapping[str, FeatureValue], kb: KnowledgeBase) -> FeatureValue:
    if isinstance(f, BaseFeature):
        return assignment.get(f.name)

    if isinstance(f, RelationFeature):
        inner = _eval(f.inner, assignment, kb)
        if inner is None:
            return None
        if f.aggregator is None:
            objects = []
            for tok in iter_atoms(inner):
                objects.extend(kb.lookup(f.relation, tok))
            return atom_or_set(objects)
        # multiset semantics: multiplicities accumulate across inner tokens
        multiset: List[str] = []
        for tok in iter_atoms(inner):
            multiset.extend(sorted(kb.lookup(f.relation, tok)))
        return str(f.aggregator.apply(multiset))

    if isinstance(f, ClassifierFeature):
        inner = _eval(f.inner, assignment, kb)
        if inner is None:
            return str(f.model.default_class)
        votes = [predict_on_token(f, tok, kb) for tok in iter_atoms(inner)]
        ones = sum(votes)
        # majority vote over per-token predictions, ties to 0
        return str(int(ones * 2 > len(votes)))

    raise TypeError(f"not a feature: {f!r}")


def predict_on_token(f: ClassifierFeature, token: str, kb: KnowledgeBase) -> int:
    """Apply the embedded model to one value token via the value-level features."""
    row = [_eval(vf, {VALUE_COLUMN: token}, kb) for vf in f.value_features]
    return f.model.predict(row)
