"""Deduplicated evidence-graph memory.

The store is the agent's persistent record of what it has learned: biomedical
entities keyed by canonical identifier, typed relations between them, short
factual observations, and provenance for every node and edge. Writes happen in
merge cycles (batches) that are validated up front and applied atomically;
reads may run concurrently between merges.
"""
from __future__ import annotations

import json
import logging
import re
import threading
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

ENTITY_KINDS = frozenset({
    "GENE_PROTEIN",
    "DISEASE_PHENOTYPE",
    "CHEMICAL_DRUG",
    "CELL_TISSUE",
    "PATHWAY_GENESET",
    "PAPER",
    "FINDING",
})

RELATION_PREDICATES = frozenset({
    # mechanistic
    "ACTIVATES", "INHIBITS", "BINDS", "PHOSPHORYLATES", "REGULATES_EXPRESSION",
    # membership / annotation
    "MEMBER_OF_PATHWAY", "HAS_GENESET_MEMBER", "EXPRESSED_IN",
    # association
    "ASSOCIATED_WITH", "CO_OCCURS",
    # evidence level / provenance
    "SUPPORTS", "REFUTES", "INCONCLUSIVE_FOR", "CITES", "DERIVED_FROM_KG",
})

# Predicates that attach context (assay, tissue, co-mention) to a finding
# rather than stating a mechanism. Findings with more than
# MAX_CONTEXT_EDGES_PER_FINDING of these only produce a lint warning, because
# recognising "contextual" is heuristic.
CONTEXT_PREDICATES = frozenset({"ASSOCIATED_WITH", "CO_OCCURS", "EXPRESSED_IN"})
MAX_CONTEXT_EDGES_PER_FINDING = 2

MAX_NEW_ENTITIES_PER_BATCH = 10
MAX_NEW_RELATIONS_PER_BATCH = 16
MAX_OBSERVATION_WORDS = 30
MAX_NAME_WORDS = 5
MAX_NAME_CHARS = 40

_OUTER_PUNCT = re.compile(r"^[\W_]+|[\W_]+$", re.UNICODE)


class EvidenceGraphError(Exception):
    """Base class for evidence-graph failures."""


class EmptyLabel(EvidenceGraphError):
    pass


class InvalidName(EvidenceGraphError):
    pass


class InvalidObservation(EvidenceGraphError):
    pass


class MissingEvidence(EvidenceGraphError):
    pass


class UnknownPredicate(EvidenceGraphError):
    pass


class BatchLimitExceeded(EvidenceGraphError):
    pass


class RelationNotFound(EvidenceGraphError):
    pass


class MismatchedEndpoints(EvidenceGraphError):
    pass


class WorkspaceUnavailable(EvidenceGraphError):
    pass


def normalize_label(raw: str) -> str:
    """Collapse a display label to its deduplication key.

    Case-folds, collapses internal whitespace to single spaces, and strips
    leading/trailing punctuation. Idempotent on every value it returns.
    """
    if raw is None or not raw.strip():
        raise EmptyLabel("label is blank after trimming")
    key = " ".join(raw.split()).casefold()
    key = _OUTER_PUNCT.sub("", key)
    if not key:
        raise EmptyLabel(f"label {raw!r} is only punctuation")
    return key


def normalize_curie(curie: str) -> str:
    """Canonical form of a CURIE: namespace compared case-insensitively."""
    curie = curie.strip()
    if ":" in curie:
        ns, rest = curie.split(":", 1)
        return f"{ns.strip().lower()}:{rest.strip()}"
    return curie.lower()


def name_is_valid(name: str) -> bool:
    """Short-label rule: at most 5 words or at most 40 characters."""
    return bool(name.strip()) and (len(name.split()) <= MAX_NAME_WORDS or len(name) <= MAX_NAME_CHARS)


@dataclass(frozen=True)
class EntityRef:
    """A biomedical entity reference.

    `source` is a knowledge-base tag with version (e.g. ``kegg@r109`` or a
    PMID) and doubles as the node's provenance note.
    """

    name: str
    kind: str
    curie: str | None = None
    source: str = "unattributed"

    def validate(self) -> None:
        if self.kind not in ENTITY_KINDS:
            raise InvalidName(f"unknown entity kind {self.kind!r} for {self.name!r}")
        if not name_is_valid(self.name):
            raise InvalidName(
                f"name {self.name!r} violates the {MAX_NAME_WORDS}-word/"
                f"{MAX_NAME_CHARS}-char rule"
            )
        if self.kind == "PAPER" and not self.name.startswith("PMID:"):
            raise InvalidName(f"PAPER entity name must begin with 'PMID:', got {self.name!r}")


@dataclass(frozen=True)
class RelationEdge:
    """A directed subject→object relation with provenance.

    In a :class:`MergeBatch`, `subject` and `object` may be CURIEs or display
    names; they are resolved against the batch and the store at merge time.
    """

    subject: str
    predicate: str
    object: str
    evidence: tuple[str, ...]
    conflict_group: str | None = None

    def validate(self) -> None:
        if self.predicate not in RELATION_PREDICATES:
            raise UnknownPredicate(
                f"predicate {self.predicate!r} on {self.subject!r}->{self.object!r} "
                "is not in the relation vocabulary"
            )
        if not self.evidence:
            raise MissingEvidence(
                f"relation {self.subject!r} {self.predicate} {self.object!r} has no evidence"
            )


@dataclass(frozen=True)
class Observation:
    """A short factual sentence attached to an entity."""

    entity: str
    text: str

    @property
    def word_count(self) -> int:
        return len(self.text.split())

    def validate(self) -> None:
        if not self.text.strip():
            raise InvalidObservation(f"empty observation for {self.entity!r}")
        if self.word_count > MAX_OBSERVATION_WORDS:
            raise InvalidObservation(
                f"observation for {self.entity!r} has {self.word_count} words "
                f"(limit {MAX_OBSERVATION_WORDS}): {self.text[:60]!r}..."
            )


@dataclass(frozen=True)
class MergeBatch:
    """One merge cycle's worth of additions."""

    entities: tuple[EntityRef, ...] = ()
    relations: tuple[RelationEdge, ...] = ()
    observations: tuple[Observation, ...] = ()
    cycle_id: str = ""


@dataclass
class MergeReport:
    created: int = 0
    merged: int = 0
    relations_added: int = 0
    rejected: int = 0
    warnings: list[str] = field(default_factory=list)


@dataclass
class StoredEntity:
    key: str
    name: str
    kind: str
    curie: str | None
    sources: list[str]
    observations: list[str] = field(default_factory=list)


RelationKey = tuple[str, str, str]  # (subject key, predicate, object key)


@dataclass
class StoredRelation:
    subject: str
    predicate: str
    object: str
    evidence: list[str]
    conflict_group: str | None = None

    @property
    def key(self) -> RelationKey:
        return (self.subject, self.predicate, self.object)


class EvidenceGraphStore:
    """In-memory deduplicated entity/relation store with snapshot export.

    Single-writer, many-reader: merge cycles and conflict tagging are
    serialized behind a lock; read operations work on plain dict lookups and
    may interleave freely between merges.
    """

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._entities: dict[str, StoredEntity] = {}
        self._curie_index: dict[str, str] = {}
        self._label_index: dict[tuple[str, str], str] = {}
        self._relations: dict[RelationKey, StoredRelation] = {}
        self._adjacency: dict[str, set[str]] = {}
        self._conflict_groups: dict[str, list[RelationKey]] = {}
        self._conflict_seq = 0

    # -- lookups ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._entities)

    @property
    def relation_count(self) -> int:
        return len(self._relations)

    def get(self, ref: str) -> StoredEntity | None:
        key = self.resolve_key(ref)
        return self._entities.get(key) if key else None

    def resolve_key(self, ref: str, kind: str | None = None) -> str | None:
        """Resolve a CURIE, display name, or storage key to a storage key."""
        if ref in self._entities:
            return ref
        hit = self._curie_index.get(normalize_curie(ref))
        if hit:
            return hit
        try:
            label = normalize_label(ref)
        except EmptyLabel:
            return None
        if kind is not None:
            return self._label_index.get((kind, label))
        for k in ENTITY_KINDS:
            hit = self._label_index.get((k, label))
            if hit:
                return hit
        return None

    def _match(self, entity: EntityRef) -> str | None:
        """Dedup match: CURIE first, then normalized label within kind."""
        if entity.curie:
            hit = self._curie_index.get(normalize_curie(entity.curie))
            if hit:
                return hit
        return self._label_index.get((entity.kind, normalize_label(entity.name)))

    # -- merge cycle ---------------------------------------------------------

    def upsert_batch(self, batch: MergeBatch) -> MergeReport:
        """Apply one merge cycle atomically.

        The whole batch is validated first; a batch that trips the new-entity
        or new-relation cap is rejected without touching the store. Entities
        that match an existing node (by CURIE, then by normalized label within
        kind) update that node in place instead of creating a duplicate.
        """
        with self._lock:
            for entity in batch.entities:
                entity.validate()
            for relation in batch.relations:
                relation.validate()
            for obs in batch.observations:
                obs.validate()

            new_entities = self._count_new_entities(batch.entities)
            if new_entities > MAX_NEW_ENTITIES_PER_BATCH:
                raise BatchLimitExceeded(
                    f"batch introduces {new_entities} new entities "
                    f"(limit {MAX_NEW_ENTITIES_PER_BATCH})"
                )
            new_relations = self._count_new_relations(batch)
            if new_relations > MAX_NEW_RELATIONS_PER_BATCH:
                raise BatchLimitExceeded(
                    f"batch introduces {new_relations} new relations "
                    f"(limit {MAX_NEW_RELATIONS_PER_BATCH})"
                )

            report = MergeReport()
            for entity in batch.entities:
                self._apply_entity(entity, report)
            for relation in batch.relations:
                self._apply_relation(relation, report)
            for obs in batch.observations:
                self._apply_observation(obs, report)
            self._lint_context_edges(report)
            return report

    def _count_new_entities(self, entities: tuple[EntityRef, ...]) -> int:
        seen: set[tuple[str, str]] = set()
        curies: set[str] = set()
        count = 0
        for entity in entities:
            if self._match(entity) is not None:
                continue
            label_key = (entity.kind, normalize_label(entity.name))
            curie_key = normalize_curie(entity.curie) if entity.curie else None
            # duplicates inside the batch collapse onto the first occurrence
            if label_key in seen or (curie_key and curie_key in curies):
                continue
            seen.add(label_key)
            if curie_key:
                curies.add(curie_key)
            count += 1
        return count

    def _count_new_relations(self, batch: MergeBatch) -> int:
        # Endpoint resolution can only be approximated before entities are
        # applied; count relations whose triple is not already stored.
        count = 0
        seen: set[tuple[str, str, str]] = set()
        for relation in batch.relations:
            skey = self._resolve_or_raw(relation.subject)
            okey = self._resolve_or_raw(relation.object)
            triple = (skey, relation.predicate, okey)
            if triple in self._relations or triple in seen:
                continue
            seen.add(triple)
            count += 1
        return count

    def _resolve_or_raw(self, ref: str) -> str:
        key = self.resolve_key(ref)
        if key:
            return key
        try:
            return normalize_label(ref)
        except EmptyLabel:
            return ref

    def _apply_entity(self, entity: EntityRef, report: MergeReport) -> None:
        existing_key = self._match(entity)
        if existing_key is not None:
            stored = self._entities[existing_key]
            if entity.curie and not stored.curie:
                stored.curie = entity.curie
                self._curie_index[normalize_curie(entity.curie)] = existing_key
            if entity.source not in stored.sources:
                stored.sources.append(entity.source)
            report.merged += 1
            return
        key = normalize_curie(entity.curie) if entity.curie else (
            f"{entity.kind.lower()}/{normalize_label(entity.name)}"
        )
        stored = StoredEntity(
            key=key,
            name=entity.name,
            kind=entity.kind,
            curie=entity.curie,
            sources=[entity.source],
        )
        self._entities[key] = stored
        self._label_index[(entity.kind, normalize_label(entity.name))] = key
        if entity.curie:
            self._curie_index[normalize_curie(entity.curie)] = key
        self._adjacency.setdefault(key, set())
        report.created += 1

    def _apply_relation(self, relation: RelationEdge, report: MergeReport) -> None:
        skey = self.resolve_key(relation.subject)
        okey = self.resolve_key(relation.object)
        if skey is None or okey is None:
            missing = relation.subject if skey is None else relation.object
            report.rejected += 1
            report.warnings.append(
                f"relation {relation.subject!r} {relation.predicate} "
                f"{relation.object!r} rejected: endpoint {missing!r} unknown"
            )
            return
        triple = (skey, relation.predicate, okey)
        stored = self._relations.get(triple)
        if stored is not None:
            for ev in relation.evidence:
                if ev not in stored.evidence:
                    stored.evidence.append(ev)
            return
        self._relations[triple] = StoredRelation(
            subject=skey,
            predicate=relation.predicate,
            object=okey,
            evidence=list(relation.evidence),
            conflict_group=relation.conflict_group,
        )
        self._adjacency.setdefault(skey, set()).add(okey)
        self._adjacency.setdefault(okey, set()).add(skey)
        report.relations_added += 1

    def _apply_observation(self, obs: Observation, report: MergeReport) -> None:
        key = self.resolve_key(obs.entity)
        if key is None:
            report.rejected += 1
            report.warnings.append(
                f"observation for unknown entity {obs.entity!r} rejected"
            )
            return
        stored = self._entities[key]
        if obs.text not in stored.observations:
            stored.observations.append(obs.text)

    def _lint_context_edges(self, report: MergeReport) -> None:
        counts: dict[str, int] = {}
        for (skey, predicate, _okey) in self._relations:
            entity = self._entities.get(skey)
            if entity and entity.kind == "FINDING" and predicate in CONTEXT_PREDICATES:
                counts[skey] = counts.get(skey, 0) + 1
        for key, n in sorted(counts.items()):
            if n > MAX_CONTEXT_EDGES_PER_FINDING:
                msg = (
                    f"finding {key!r} carries {n} contextual edges "
                    f"(recommended max {MAX_CONTEXT_EDGES_PER_FINDING})"
                )
                report.warnings.append(msg)
                logger.warning(msg)

    # -- conflicts ------------------------------------------------------------

    def tag_conflict(self, relation_a: RelationKey, relation_b: RelationKey) -> str:
        """Mark two relations over the same entity pair as conflicting.

        Both relations are retained; they receive a shared group id which is
        reused when either relation is already grouped.
        """
        with self._lock:
            rel_a = self._lookup_relation(relation_a)
            rel_b = self._lookup_relation(relation_b)
            if (rel_a.subject, rel_a.object) != (rel_b.subject, rel_b.object):
                raise MismatchedEndpoints(
                    f"{rel_a.key} and {rel_b.key} do not share endpoints"
                )
            group = rel_a.conflict_group or rel_b.conflict_group
            if group is None:
                self._conflict_seq += 1
                group = f"cg-{self._conflict_seq}"
                self._conflict_groups[group] = []
            members = self._conflict_groups.setdefault(group, [])
            for rel in (rel_a, rel_b):
                rel.conflict_group = group
                if rel.key not in members:
                    members.append(rel.key)
            return group

    def _lookup_relation(self, ref: RelationKey) -> StoredRelation:
        subject, predicate, object_ = ref
        skey = self.resolve_key(subject) or subject
        okey = self.resolve_key(object_) or object_
        stored = self._relations.get((skey, predicate, okey))
        if stored is None:
            raise RelationNotFound(f"no stored relation {ref!r}")
        return stored

    # -- reads ----------------------------------------------------------------

    def query_subgraph(self, seeds: list[str], depth: int) -> dict:
        """Entities within `depth` undirected hops of any seed, plus induced relations."""
        if depth < 0:
            raise ValueError("depth must be >= 0")
        frontier = {k for k in (self.resolve_key(s) for s in seeds) if k is not None}
        reached = set(frontier)
        for _ in range(depth):
            nxt = set()
            for key in frontier:
                nxt |= self._adjacency.get(key, set())
            frontier = nxt - reached
            if not frontier:
                break
            reached |= frontier
        entities = {k: self._entities[k] for k in sorted(reached)}
        relations = [
            rel for (s, _p, o), rel in sorted(self._relations.items())
            if s in reached and o in reached
        ]
        return {"entities": entities, "relations": relations}

    def relations(self) -> list[StoredRelation]:
        return [self._relations[k] for k in sorted(self._relations)]

    def entities(self) -> list[StoredEntity]:
        return [self._entities[k] for k in sorted(self._entities)]

    def stats(self) -> dict:
        kind_counts: dict[str, int] = {}
        for entity in self._entities.values():
            kind_counts[entity.kind] = kind_counts.get(entity.kind, 0) + 1
        return {
            "entities": len(self._entities),
            "relations": len(self._relations),
            "observations": sum(len(e.observations) for e in self._entities.values()),
            "conflict_groups": len(self._conflict_groups),
            "entities_by_kind": dict(sorted(kind_counts.items())),
        }

    # -- snapshot -------------------------------------------------------------

    def to_document(self) -> dict:
        """Snapshot with stable ordering; round-trips through `from_document`."""
        return {
            "entities": [
                {
                    "key": e.key,
                    "name": e.name,
                    "kind": e.kind,
                    "curie": e.curie,
                    "sources": list(e.sources),
                }
                for e in self.entities()
            ],
            "relations": [
                {
                    "subject": r.subject,
                    "predicate": r.predicate,
                    "object": r.object,
                    "evidence": list(r.evidence),
                    "conflict_group": r.conflict_group,
                }
                for r in self.relations()
            ],
            "observations": [
                {"entity": e.key, "text": text}
                for e in self.entities()
                for text in e.observations
            ],
            "conflict_groups": [
                {"id": gid, "relations": [list(k) for k in members]}
                for gid, members in sorted(self._conflict_groups.items())
            ],
        }

    @classmethod
    def from_document(cls, doc: dict) -> "EvidenceGraphStore":
        store = cls()
        for e in doc.get("entities", []):
            stored = StoredEntity(
                key=e["key"],
                name=e["name"],
                kind=e["kind"],
                curie=e.get("curie"),
                sources=list(e.get("sources", [])),
            )
            store._entities[stored.key] = stored
            store._label_index[(stored.kind, normalize_label(stored.name))] = stored.key
            if stored.curie:
                store._curie_index[normalize_curie(stored.curie)] = stored.key
            store._adjacency.setdefault(stored.key, set())
        for r in doc.get("relations", []):
            rel = StoredRelation(
                subject=r["subject"],
                predicate=r["predicate"],
                object=r["object"],
                evidence=list(r["evidence"]),
                conflict_group=r.get("conflict_group"),
            )
            store._relations[rel.key] = rel
            store._adjacency.setdefault(rel.subject, set()).add(rel.object)
            store._adjacency.setdefault(rel.object, set()).add(rel.subject)
        for o in doc.get("observations", []):
            entity = store._entities.get(o["entity"])
            if entity is not None and o["text"] not in entity.observations:
                entity.observations.append(o["text"])
        max_seq = 0
        for g in doc.get("conflict_groups", []):
            store._conflict_groups[g["id"]] = [tuple(k) for k in g["relations"]]
            m = re.match(r"cg-(\d+)$", g["id"])
            if m:
                max_seq = max(max_seq, int(m.group(1)))
        store._conflict_seq = max_seq
        return store


def export_graph(store: EvidenceGraphStore, destination) -> dict:
    """Write the store snapshot as one JSON document; returns the document.

    `destination` is a path or a writable file object.
    """
    doc = store.to_document()
    payload = json.dumps(doc, indent=2, sort_keys=True)
    try:
        if hasattr(destination, "write"):
            destination.write(payload)
        else:
            with open(destination, "w", encoding="utf-8") as fh:
                fh.write(payload)
    except OSError as exc:
        raise WorkspaceUnavailable(f"cannot write snapshot to {destination}: {exc}") from exc
    return doc


def import_graph(source) -> EvidenceGraphStore:
    """Load a snapshot written by :func:`export_graph`."""
    try:
        if hasattr(source, "read"):
            doc = json.load(source)
        else:
            with open(source, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
    except OSError as exc:
        raise WorkspaceUnavailable(f"cannot read snapshot from {source}: {exc}") from exc
    return EvidenceGraphStore.from_document(doc)
