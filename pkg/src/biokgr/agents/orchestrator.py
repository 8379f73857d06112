"""The orchestrator: budget-guarded action selection and the run loop.

`step_orchestrator` validates one oracle proposal against the remaining
subagent budgets (a subagent proposal with zero budget left coerces to
Finalize; no proposal at all yields Halt) and appends it to the append-only
step log. `OrchestratorRunner.run` drives the full loop, executing actions,
marking plan steps, persisting the transcript and the evidence-graph
snapshot into the run workspace.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from biokgr.agents.actions import (
    Action,
    AnalyzeWorkspace,
    Finalize,
    Halt,
    InvokeBFRS,
    InvokeDFRS,
    RetrieveGraph,
    UpdateGraph,
    action_to_dict,
)
from biokgr.agents.oracle import DefaultOracle
from biokgr.agents.plan import PlanChecklist, update_plan
from biokgr.agents.research import run_bfrs, run_dfrs
from biokgr.agents.workspace import AnalysisError, Workspace, run_analysis
from biokgr.evidence import EvidenceGraphStore, EvidenceGraphError, export_graph

logger = logging.getLogger(__name__)


@dataclass
class OrchestratorState:
    query: str
    plan: PlanChecklist
    budgets: dict
    workspace: Workspace
    graph: EvidenceGraphStore
    step_log: list = field(default_factory=list)   # append-only
    notes: dict = field(default_factory=dict)
    answer: str | None = None

    def log(self, entry: dict) -> None:
        self.step_log.append(entry)


def step_orchestrator(state: OrchestratorState, observation: str, oracle) -> Action:
    """One decision step: oracle proposal validated against budgets."""
    for budget in state.budgets.values():
        if budget < 0:
            raise ValueError("budgets must never go negative")

    proposed = oracle.choose_action(state, observation)
    if proposed is None:
        action: Action = Halt(reason="oracle proposed no tool action")
    elif isinstance(proposed, InvokeBFRS) and state.budgets.get("bfrs", 0) <= 0:
        action = Finalize(answer=_exhausted_answer(state, "BFRS"))
        state.log({"coerced": "invoke_bfrs with zero budget -> finalize"})
    elif isinstance(proposed, InvokeDFRS) and state.budgets.get("dfrs", 0) <= 0:
        action = Finalize(answer=_exhausted_answer(state, "DFRS"))
        state.log({"coerced": "invoke_dfrs with zero budget -> finalize"})
    else:
        action = proposed
    state.log({"step": len(state.step_log), "action": action_to_dict(action)})
    return action


def _exhausted_answer(state: OrchestratorState, kind: str) -> str:
    stats = state.graph.stats()
    return (
        f"{kind} budget exhausted; finalizing with current evidence "
        f"({stats['entities']} entities, {stats['relations']} relations)."
    )


@dataclass
class RunResult:
    answer: str
    state: OrchestratorState
    transcript_path: str
    halted: bool = False


class OrchestratorRunner:
    def __init__(
        self,
        federation,
        oracle=None,
        bfrs_budget: int = 2,
        dfrs_budget: int = 2,
    ):
        self.federation = federation
        self.oracle = oracle or DefaultOracle()
        self.bfrs_budget = bfrs_budget
        self.dfrs_budget = dfrs_budget

    def run(self, query: str, workspace_root) -> RunResult:
        workspace = Workspace(workspace_root)
        state = OrchestratorState(
            query=query,
            plan=self.oracle.plan(query),
            budgets={"bfrs": self.bfrs_budget, "dfrs": self.dfrs_budget},
            workspace=workspace,
            graph=EvidenceGraphStore(),
        )
        transcript: list[dict] = []
        observation = "run started"
        halted = False
        max_steps = self.bfrs_budget + self.dfrs_budget + 2 * len(state.plan.steps) + 8

        for _step in range(max_steps):
            before = (tuple(sorted(state.budgets.items())), state.plan.signature())
            action = step_orchestrator(state, observation, self.oracle)
            observation = self._execute(state, action)
            transcript.append(
                {"step": _step, "action": action_to_dict(action), "observation": observation}
            )
            if isinstance(action, (Finalize, Halt)):
                halted = isinstance(action, Halt)
                break
            after = (tuple(sorted(state.budgets.items())), state.plan.signature())
            if before == after:
                # the action neither consumed budget nor advanced the plan
                transcript.append(
                    {"step": _step + 1, "action": {"action": "halt",
                     "reason": "no progress"}, "observation": "halted: no progress"}
                )
                halted = True
                break

        transcript_path = workspace.root / "transcript.jsonl"
        with open(transcript_path, "w", encoding="utf-8") as fh:
            for entry in transcript:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
        workspace.register("transcript.jsonl", "orchestrator action/observation log")
        export_graph(state.graph, workspace.root / "evidence_graph.json")
        workspace.register("evidence_graph.json", "final evidence-graph snapshot")

        return RunResult(
            answer=state.answer or "halted without final answer",
            state=state,
            transcript_path=str(transcript_path),
            halted=halted,
        )

    # -- action execution ------------------------------------------------------

    def _execute(self, state: OrchestratorState, action: Action) -> str:
        if isinstance(action, InvokeBFRS):
            report = run_bfrs(action.task, self.federation, self.oracle, state.workspace)
            state.budgets["bfrs"] -= 1
            merged = sorted(set(state.notes.get("candidates", [])) | set(report.key_entities))
            state.notes["candidates"] = merged
            self._mark(state, "bfrs")
            return report.render()
        if isinstance(action, InvokeDFRS):
            report = run_dfrs(action.task, self.federation, self.oracle, state.workspace)
            state.budgets["dfrs"] -= 1
            merged = sorted(set(state.notes.get("candidates", [])) | set(report.key_entities))
            state.notes["candidates"] = merged
            self._mark(state, "dfrs")
            return report.render()
        if isinstance(action, UpdateGraph):
            try:
                report = state.graph.upsert_batch(action.batch)
            except EvidenceGraphError as exc:
                self._mark(state, "update_graph", outcome="failed", note=str(exc))
                return f"graph update rejected: {exc}"
            self._mark(state, "update_graph")
            return (
                f"graph updated: created={report.created} merged={report.merged} "
                f"relations={report.relations_added} rejected={report.rejected}"
            )
        if isinstance(action, RetrieveGraph):
            subgraph = state.graph.query_subgraph(list(action.seeds), action.depth)
            self._mark(state, "retrieve_graph")
            return (
                f"retrieved subgraph: {len(subgraph['entities'])} entities, "
                f"{len(subgraph['relations'])} relations"
            )
        if isinstance(action, AnalyzeWorkspace):
            try:
                out = run_analysis(state.workspace, action.spec)
            except (AnalysisError, KeyError) as exc:
                self._mark(state, "analyze", outcome="failed", note=str(exc))
                return f"analysis failed: {exc}"
            self._mark(state, "analyze")
            return f"analysis wrote {out}"
        if isinstance(action, Finalize):
            state.answer = action.answer
            for i, step in enumerate(state.plan.steps):
                if step.status == "open" and step.hint == "finalize":
                    update_plan(state.plan, i, "done")
            return "finalized"
        if isinstance(action, Halt):
            return f"halted: {action.reason}" if action.reason else "halted"
        raise TypeError(f"unknown action {action!r}")

    @staticmethod
    def _mark(state: OrchestratorState, hint: str, outcome: str = "done", note: str = "") -> None:
        for i, step in enumerate(state.plan.steps):
            if step.status == "open" and step.hint == hint:
                update_plan(state.plan, i, outcome, note=note)
                return
        index = state.plan.first_open()
        if index is not None and not state.plan.steps[index].hint:
            update_plan(state.plan, index, outcome, note=note)
