"""Typed orchestrator actions, research tasks, and agent reports."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from biokgr.evidence import MergeBatch

MAX_REPORT_LINES = 10
_MAX_LISTED_FILES = 5


class BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class ResearchTask:
    """A delegated search target for one subagent invocation."""

    description: str
    entities: tuple[str, ...] = ()
    knowledge_bases: tuple[str, ...] = ()
    budget: int = 3                 # max federation invocations
    mode: str = "breadth"           # breadth | depth
    seeds: tuple[str, ...] = ()     # depth mode starting points
    entity_kind: str = "gene"

    def validate(self) -> None:
        if self.budget < 1:
            raise ValueError("task budget must be >= 1")
        if self.mode not in ("breadth", "depth"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "depth" and not (self.seeds or self.description):
            raise ValueError("depth mode requires seeds or an initial query")

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "entities": list(self.entities),
            "knowledge_bases": list(self.knowledge_bases),
            "budget": self.budget,
            "mode": self.mode,
            "seeds": list(self.seeds),
            "entity_kind": self.entity_kind,
        }


@dataclass
class AgentReport:
    """Subagent deliverable: saved-file manifest plus short findings."""

    files: list[tuple[str, str]] = field(default_factory=list)  # (path, description)
    findings: str = ""
    key_entities: list[str] = field(default_factory=list)       # not rendered
    invocations: int = 0

    def render(self) -> str:
        lines = ["# Files saved:"]
        listed = self.files[:_MAX_LISTED_FILES]
        if len(self.files) > _MAX_LISTED_FILES:
            listed = self.files[: _MAX_LISTED_FILES - 1]
        for path, description in listed:
            lines.append(f"- {path}: {description}")
        if len(self.files) > _MAX_LISTED_FILES:
            lines.append(f"- (+{len(self.files) - len(listed)} more files; see manifest.json)")
        if not self.files:
            lines.append("- (none)")
        lines.append("")
        lines.append("Main findings:")
        findings = self.findings.strip() or "No findings."
        lines.extend(findings.splitlines()[:2])
        text = "\n".join(lines)
        assert len(text.splitlines()) <= MAX_REPORT_LINES
        return text


@dataclass(frozen=True)
class InvokeBFRS:
    task: ResearchTask


@dataclass(frozen=True)
class InvokeDFRS:
    task: ResearchTask


@dataclass(frozen=True)
class AnalyzeWorkspace:
    spec: dict


@dataclass(frozen=True)
class UpdateGraph:
    batch: MergeBatch


@dataclass(frozen=True)
class RetrieveGraph:
    seeds: tuple[str, ...]
    depth: int = 1


@dataclass(frozen=True)
class Finalize:
    answer: str


@dataclass(frozen=True)
class Halt:
    reason: str = ""


Action = Union[InvokeBFRS, InvokeDFRS, AnalyzeWorkspace, UpdateGraph, RetrieveGraph, Finalize, Halt]


def action_to_dict(action: Action) -> dict:
    if isinstance(action, InvokeBFRS):
        return {"action": "invoke_bfrs", "task": action.task.to_dict()}
    if isinstance(action, InvokeDFRS):
        return {"action": "invoke_dfrs", "task": action.task.to_dict()}
    if isinstance(action, AnalyzeWorkspace):
        return {"action": "analyze_workspace", "spec": dict(action.spec)}
    if isinstance(action, UpdateGraph):
        batch = action.batch
        return {
            "action": "update_graph",
            "batch": {
                "entities": [
                    {"name": e.name, "kind": e.kind, "curie": e.curie, "source": e.source}
                    for e in batch.entities
                ],
                "relations": [
                    {"subject": r.subject, "predicate": r.predicate, "object": r.object,
                     "evidence": list(r.evidence)}
                    for r in batch.relations
                ],
                "observations": [
                    {"entity": o.entity, "text": o.text} for o in batch.observations
                ],
                "cycle_id": batch.cycle_id,
            },
        }
    if isinstance(action, RetrieveGraph):
        return {"action": "retrieve_graph", "seeds": list(action.seeds), "depth": action.depth}
    if isinstance(action, Finalize):
        return {"action": "finalize", "answer": action.answer}
    if isinstance(action, Halt):
        return {"action": "halt", "reason": action.reason}
    raise TypeError(f"not an action: {action!r}")
