"""Labeled symbolic datasets and feature-matrix materialization.

Datasets are JSON-lines files.  An optional first line declares the schema::

    {"schema": {"gender": "gender", "surname": "surname"}}

mapping base feature names to value-type names.  Every following line is one
example::

    {"id": "p1", "label": 1, "features": {"surname": "haddad", "gender": "f"}}

Feature values are strings (atoms) or arrays of strings (value sets; an
empty array means missing).  Without a header the schema is inferred as the
union of observed feature names, typed by their own name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from kbfg.features import Feature, evaluate_feature
from kbfg.kb import KnowledgeBase
from kbfg.values import FeatureValue, normalize_value, value_to_json


class DatasetError(Exception):
    """Malformed dataset input."""


@dataclass
class Example:
    id: str
    label: int
    assignment: Dict[str, FeatureValue]


@dataclass
class Dataset:
    examples: List[Example]
    schema: List[Tuple[str, str]]  # (feature name, value type name), declared order

    @property
    def feature_names(self) -> List[str]:
        return [name for name, _ in self.schema]

    def value_type(self, feature_name: str) -> str:
        for name, vtype in self.schema:
            if name == feature_name:
                return vtype
        raise KeyError(feature_name)

    @property
    def labels(self) -> List[int]:
        return [x.label for x in self.examples]

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset([self.examples[i] for i in indices], list(self.schema))

    def __len__(self) -> int:
        return len(self.examples)


def _parse_record(obj: dict, lineno: int, schema_names: Optional[List[str]]) -> Example:
    try:
        ex_id = obj["id"]
        label = obj["label"]
        feats = obj.get("features", {})
    except (KeyError, TypeError):
        raise DatasetError(f"line {lineno}: record must carry id, label, features") from None
    if not isinstance(ex_id, str) or not ex_id:
        raise DatasetError(f"line {lineno}: id must be a non-empty string")
    if label not in (0, 1) or isinstance(label, bool):
        raise DatasetError(f"line {lineno}: label must be 0 or 1, got {label!r}")
    assignment: Dict[str, FeatureValue] = {}
    for name, raw in feats.items():
        if schema_names is not None and name not in schema_names:
            raise DatasetError(f"line {lineno}: feature {name!r} not in schema header")
        if raw is not None and not isinstance(raw, (str, list)):
            raise DatasetError(f"line {lineno}: feature {name!r} must be a string, "
                               f"an array of strings, or null")
        try:
            assignment[name] = normalize_value(raw)
        except ValueError as e:
            raise DatasetError(f"line {lineno}: feature {name!r}: {e}") from None
    return Example(ex_id, label, assignment)


def load_dataset(source: Iterable[str]) -> Dataset:
    """Parse a JSON-lines dataset, enforcing unique ids and schema membership."""
    schema: Optional[List[Tuple[str, str]]] = None
    examples: List[Example] = []
    seen_ids = set()
    first_content = True
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise DatasetError(f"line {lineno}: invalid JSON ({e.msg})") from None
        if first_content and isinstance(obj, dict) and "schema" in obj:
            declared = obj["schema"]
            names = list(declared)
            if len(set(names)) != len(names):
                raise DatasetError(f"line {lineno}: duplicate feature in schema header")
            schema = [(name, declared[name]) for name in names]
            first_content = False
            continue
        first_content = False
        ex = _parse_record(obj, lineno, [n for n, _ in schema] if schema else None)
        if ex.id in seen_ids:
            raise DatasetError(f"line {lineno}: duplicate example id {ex.id!r}")
        seen_ids.add(ex.id)
        examples.append(ex)

    if schema is None:
        names: List[str] = []
        for ex in examples:
            for name in ex.assignment:
                if name not in names:
                    names.append(name)
        schema = [(name, name) for name in names]

    schema_names = [n for n, _ in schema]
    for ex in examples:
        for name in schema_names:
            ex.assignment.setdefault(name, None)
    return Dataset(examples, schema)


def load_dataset_file(path) -> Dataset:
    with open(path, encoding="utf-8") as f:
        return load_dataset(f)


def dataset_lines(ds: Dataset) -> List[str]:
    header = {"schema": {name: vtype for name, vtype in ds.schema}}
    out = [json.dumps(header, sort_keys=True)]
    for ex in ds.examples:
        rec = {
            "id": ex.id,
            "label": ex.label,
            "features": {name: value_to_json(ex.assignment.get(name))
                         for name, _ in ds.schema
                         if ex.assignment.get(name) is not None},
        }
        out.append(json.dumps(rec, sort_keys=True))
    return out


def save_dataset(ds: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(dataset_lines(ds)) + "\n")


@dataclass
class FeatureMatrix:
    rows: List[List[FeatureValue]]
    labels: List[int]
    feature_names: List[str]

    def column(self, j: int) -> List[FeatureValue]:
        return [row[j] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


def materialize(ds, features: Sequence[Feature], kb: KnowledgeBase) -> FeatureMatrix:
    """Evaluate every feature on every example; labels ride along.

    Accepts a Dataset or a plain sequence of examples.  Evaluation is pure,
    so rows are independent and the result is deterministic.
    """
    examples = ds.examples if isinstance(ds, Dataset) else list(ds)
    if not features:
        raise ValueError("materialize requires at least one feature")
    rows = [[evaluate_feature(f, x, kb) for f in features] for x in examples]
    return FeatureMatrix(rows, [x.label for x in examples], [f.name for f in features])
