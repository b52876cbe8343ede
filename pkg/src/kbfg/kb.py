"""In-memory store for typed binary relations.

A knowledge base is a set of named binary relations.  Each relation has a
departure type and a codomain type (bare type tokens, used for domain
partitioning), a set of (subject, object) pairs, and a flag marking it as
functional (at most one object per subject).  Relations are forward-indexed
by subject; the store is immutable after loading and safe for concurrent
reads.

File formats (UTF-8, tab-separated, ``#`` comment lines and blank lines
skipped):

* schema:  ``name<TAB>departure_type<TAB>codomain_type<TAB>fn|rel``
* triples: ``relation<TAB>subject<TAB>object``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple


class KBError(Exception):
    """Malformed schema/triples input or reference to an undeclared relation."""


@dataclass
class Relation:
    name: str
    departure_type: str
    codomain_type: str
    is_function: bool
    pairs: FrozenSet[Tuple[str, str]] = frozenset()
    index: Dict[str, FrozenSet[str]] = field(default_factory=dict)

    @property
    def subjects(self) -> FrozenSet[str]:
        return frozenset(self.index)

    def objects(self) -> FrozenSet[str]:
        return frozenset(o for _, o in self.pairs)


def _build_relation(name: str, departure: str, codomain: str, is_function: bool,
                    pairs: Iterable[Tuple[str, str]]) -> Relation:
    pair_set = frozenset(pairs)
    index: Dict[str, Set[str]] = {}
    for s, o in pair_set:
        index.setdefault(s, set()).add(o)
    frozen = {s: frozenset(objs) for s, objs in index.items()}
    return Relation(name, departure, codomain, is_function, pair_set, frozen)


@dataclass
class KnowledgeBase:
    relations: Dict[str, Relation]

    def relation(self, name: str) -> Relation:
        try:
            return self.relations[name]
        except KeyError:
            raise KBError(f"undeclared relation {name!r}") from None

    def lookup(self, relation: str, subject: str) -> FrozenSet[str]:
        """All objects paired with `subject`; empty when the subject is unknown."""
        return self.relation(relation).index.get(subject, frozenset())

    def applicable_relations(self, values: Iterable[str],
                             coverage_threshold: float = 1.0) -> List[Relation]:
        """Relations whose subjects cover at least `coverage_threshold` of `values`.

        Ordered by relation name.  The threshold generalizes the strict
        "every value is a subject" test, which real knowledge bases rarely
        satisfy; 1.0 recovers the strict test.
        """
        vals = sorted(set(values))
        if not vals:
            raise ValueError("applicable_relations requires a non-empty value set")
        out = []
        for name in sorted(self.relations):
            rel = self.relations[name]
            covered = sum(1 for v in vals if v in rel.index)
            if covered / len(vals) >= coverage_threshold:
                out.append(rel)
        return out

    def relations_of_departure_type(self, type_name: str) -> List[Relation]:
        return [self.relations[n] for n in sorted(self.relations)
                if self.relations[n].departure_type == type_name]


def _content_lines(source: Iterable[str]) -> Iterable[Tuple[int, str]]:
    for i, raw in enumerate(source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield i, line


def load_kb(triples_source: Iterable[str], schema_source: Iterable[str]) -> KnowledgeBase:
    """Build a KnowledgeBase from schema and triple lines.

    Rejects: malformed lines (with line number), duplicate relation
    declarations, triples on undeclared relations, and functional relations
    with two distinct objects for one subject.
    """
    decls: Dict[str, Tuple[str, str, bool]] = {}
    for lineno, line in _content_lines(schema_source):
        fields = line.split("\t")
        if len(fields) != 4:
            raise KBError(f"schema line {lineno}: expected 4 tab-separated fields, got {len(fields)}")
        name, departure, codomain, kind = (f.strip() for f in fields)
        if not name or not departure or not codomain:
            raise KBError(f"schema line {lineno}: empty field")
        if kind not in ("fn", "rel"):
            raise KBError(f"schema line {lineno}: kind must be 'fn' or 'rel', got {kind!r}")
        if name in decls:
            raise KBError(f"schema line {lineno}: duplicate relation declaration {name!r}")
        decls[name] = (departure, codomain, kind == "fn")

    pairs: Dict[str, Set[Tuple[str, str]]] = {name: set() for name in decls}
    fn_object: Dict[Tuple[str, str], str] = {}
    for lineno, line in _content_lines(triples_source):
        fields = line.split("\t")
        if len(fields) != 3:
            raise KBError(f"triples line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        rel, subj, obj = (f.strip() for f in fields)
        if rel not in decls:
            raise KBError(f"triples line {lineno}: undeclared relation {rel!r}")
        if not subj or not obj:
            raise KBError(f"triples line {lineno}: empty subject or object")
        if decls[rel][2]:
            prev = fn_object.get((rel, subj))
            if prev is not None and prev != obj:
                raise KBError(
                    f"triples line {lineno}: function relation {rel!r} maps {subj!r} "
                    f"to both {prev!r} and {obj!r}")
            fn_object[(rel, subj)] = obj
        pairs[rel].add((subj, obj))

    relations = {
        name: _build_relation(name, dep, cod, fn, pairs[name])
        for name, (dep, cod, fn) in decls.items()
    }
    return KnowledgeBase(relations)


def schema_lines(kb: KnowledgeBase) -> List[str]:
    """Serialize the schema back to its file format (sorted by relation name)."""
    out = []
    for name in sorted(kb.relations):
        r = kb.relations[name]
        kind = "fn" if r.is_function else "rel"
        out.append(f"{r.name}\t{r.departure_type}\t{r.codomain_type}\t{kind}")
    return out


def triple_lines(kb: KnowledgeBase) -> List[str]:
    """Serialize all pairs back to the triples file format (sorted)."""
    out = []
    for name in sorted(kb.relations):
        for s, o in sorted(kb.relations[name].pairs):
            out.append(f"{name}\t{s}\t{o}")
    return out


def save_kb(kb: KnowledgeBase, schema_path, triples_path) -> None:
    with open(schema_path, "w", encoding="utf-8") as f:
        f.write("\n".join(schema_lines(kb)) + "\n")
    with open(triples_path, "w", encoding="utf-8") as f:
        f.write("\n".join(triple_lines(kb)) + "\n")


def load_kb_files(schema_path, triples_path) -> KnowledgeBase:
    with open(schema_path, encoding="utf-8") as sf:
        schema = sf.readlines()
    with open(triples_path, encoding="utf-8") as tf:
        triples = tf.readlines()
    return load_kb(triples, schema)
