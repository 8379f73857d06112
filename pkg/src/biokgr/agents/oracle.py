"""Decision oracles: the pluggable planner / action chooser / relevance scorer.

`DefaultOracle` is fully deterministic so the entire pipeline is testable
without any model: plans come from task templates, relevance is normalized
lexical overlap, expansion order breaks ties lexicographically. `HttpOracle`
speaks a chat-completion-style JSON protocol to an external endpoint and is
treated strictly as a wire format.
"""
from __future__ import annotations

import json
import re

import requests

from biokgr.agents.actions import (
    Action,
    AnalyzeWorkspace,
    Finalize,
    Halt,
    InvokeBFRS,
    InvokeDFRS,
    ResearchTask,
    RetrieveGraph,
    UpdateGraph,
)
from biokgr.agents.plan import PlanChecklist, PlanStep
from biokgr.evidence import EntityRef, MergeBatch, Observation, RelationEdge

_TOKEN = re.compile(r"[A-Za-z0-9:]+")
_PMID_TOKEN = re.compile(r"^pmid:?\d*$|^\d{4,}$")

ORACLE_SYSTEM_GUIDE = (
    "You drive a budgeted knowledge-graph research loop. Requests arrive as "
    "JSON with an 'op' field (plan, choose_action, score). Reply with a single "
    "JSON object. For plan: {\"steps\": [{\"text\":..., \"hint\":...}]} where "
    "hint is one of bfrs, dfrs, update_graph, retrieve_graph, analyze, "
    "finalize. For choose_action: one action object such as "
    "{\"action\": \"invoke_bfrs\", \"task\": {...}} or {\"action\": \"none\"}. "
    "For score: {\"score\": <float in [0,1]>}. Keep subagent reports under 10 "
    "lines; render plans as numbered checkboxes ([ ] open, [v] done, [x] failed)."
)


class OracleUnavailable(Exception):
    pass


def tokenize(text: str) -> set[str]:
    return {t.casefold() for t in _TOKEN.findall(text or "") if len(t) > 1}


class DefaultOracle:
    """Deterministic planner and scorer; the reference pipeline driver."""

    def __init__(self, knowledge_bases=("mygene", "kegg", "pubmed"), task_budget: int = 3):
        self.knowledge_bases = tuple(knowledge_bases)
        self.task_budget = task_budget

    # -- planning -------------------------------------------------------------

    def plan(self, query: str) -> PlanChecklist:
        return PlanChecklist(
            steps=[
                PlanStep(text=f"Survey knowledge bases for entities related to: {query}",
                         hint="bfrs"),
                PlanStep(text="Deepen evidence chains from the strongest candidates",
                         hint="dfrs"),
                PlanStep(text="Record screened findings in the evidence graph",
                         hint="update_graph"),
                PlanStep(text="Review the accumulated evidence and finalize the answer",
                         hint="finalize"),
            ]
        )

    # -- relevance ---------------------------------------------------------------

    def score_relevance(self, candidate: str, target: str) -> float:
        """Normalized lexical/identifier overlap between candidate and target.

        Exact token overlap is the base signal; a candidate carrying a
        publication identifier counts as half-relevant whenever the target is
        itself framed around publication identifiers (citation chains).
        """
        target_tokens = tokenize(target)
        if not target_tokens:
            return 0.0
        candidate_tokens = tokenize(candidate)
        score = min(1.0, len(candidate_tokens & target_tokens) / len(target_tokens))
        if any(_PMID_TOKEN.match(t) for t in candidate_tokens) and any(
            _PMID_TOKEN.match(t) for t in target_tokens
        ):
            score = max(score, 0.5)
        return score

    # -- action choice --------------------------------------------------------------

    def choose_action(self, state, observation: str) -> Action | None:
        index = state.plan.first_open()
        if index is None:
            return Finalize(answer=self._answer(state))
        hint = state.plan.steps[index].hint

        if hint == "bfrs":
            return InvokeBFRS(
                ResearchTask(
                    description=state.query,
                    entities=tuple(sorted(tokenize(state.query)))[:5],
                    knowledge_bases=self.knowledge_bases,
                    budget=self.task_budget,
                    mode="breadth",
                )
            )
        if hint == "dfrs":
            seeds = tuple(state.notes.get("candidates", ())[:3])
            return InvokeDFRS(
                ResearchTask(
                    description=state.query,
                    knowledge_bases=self.knowledge_bases,
                    budget=self.task_budget,
                    mode="depth",
                    seeds=seeds or (state.query,),
                )
            )
        if hint == "update_graph":
            return UpdateGraph(self._batch_from_notes(state))
        if hint == "retrieve_graph":
            return RetrieveGraph(seeds=tuple(sorted(tokenize(state.query)))[:3])
        if hint == "analyze":
            return AnalyzeWorkspace(state.notes.get("analysis_spec", {
                "op": "dedup", "input": "bfrs_screened.json", "key": "name",
                "out": "bfrs_deduped.json",
            }))
        if hint == "finalize":
            return Finalize(answer=self._answer(state))
        return Halt(reason=f"no handler for plan hint {hint!r}")

    def _batch_from_notes(self, state) -> MergeBatch:
        candidates = list(state.notes.get("candidates", ()))[:8]
        entities = tuple(
            EntityRef(name=name, kind="GENE_PROTEIN", source="federated-search")
            for name in candidates
            if name
        )
        observations = tuple(
            Observation(entity=name, text=f"Surfaced while researching: {state.query[:80]}")
            for name in candidates[:3]
        )
        return MergeBatch(entities=entities, observations=observations,
                          cycle_id=f"cycle-{len(state.step_log)}")

    def _answer(self, state) -> str:
        stats = state.graph.stats()
        top = ", ".join(list(state.notes.get("candidates", ()))[:5]) or "none"
        return (
            f"Research complete for: {state.query}. Evidence graph holds "
            f"{stats['entities']} entities and {stats['relations']} relations. "
            f"Leading candidates: {top}."
        )


# -- external oracle ------------------------------------------------------------------


def action_from_dict(payload: dict) -> Action | None:
    """Parse one wire-format action; unknown or 'none' actions map to None."""
    kind = (payload or {}).get("action", "none")
    if kind in ("none", ""):
        return None
    if kind in ("invoke_bfrs", "invoke_dfrs"):
        task_payload = payload.get("task", {})
        task = ResearchTask(
            description=task_payload.get("description", ""),
            entities=tuple(task_payload.get("entities", ())),
            knowledge_bases=tuple(task_payload.get("knowledge_bases", ())),
            budget=int(task_payload.get("budget", 1)),
            mode="breadth" if kind == "invoke_bfrs" else "depth",
            seeds=tuple(task_payload.get("seeds", ())),
            entity_kind=task_payload.get("entity_kind", "gene"),
        )
        return InvokeBFRS(task) if kind == "invoke_bfrs" else InvokeDFRS(task)
    if kind == "update_graph":
        raw = payload.get("batch", {})
        batch = MergeBatch(
            entities=tuple(
                EntityRef(name=e["name"], kind=e.get("kind", "FINDING"),
                          curie=e.get("curie"), source=e.get("source", "oracle"))
                for e in raw.get("entities", [])
            ),
            relations=tuple(
                RelationEdge(subject=r["subject"], predicate=r["predicate"],
                             object=r["object"], evidence=tuple(r.get("evidence", ())))
                for r in raw.get("relations", [])
            ),
            observations=tuple(
                Observation(entity=o["entity"], text=o["text"])
                for o in raw.get("observations", [])
            ),
            cycle_id=raw.get("cycle_id", ""),
        )
        return UpdateGraph(batch)
    if kind == "retrieve_graph":
        return RetrieveGraph(seeds=tuple(payload.get("seeds", ())),
                             depth=int(payload.get("depth", 1)))
    if kind == "analyze_workspace":
        return AnalyzeWorkspace(spec=dict(payload.get("spec", {})))
    if kind == "finalize":
        return Finalize(answer=payload.get("answer", ""))
    if kind == "halt":
        return Halt(reason=payload.get("reason", ""))
    return None


class HttpOracle:
    """Chat-completion-style JSON-over-HTTP oracle client.

    Request body: {"messages": [{"role": "system", ...}, {"role": "user", ...}]}
    where the user content is the JSON-encoded request. Response body:
    {"message": {"role": "assistant", "content": "<json>"}}.
    """

    def __init__(self, endpoint: str, session=None, max_attempts: int = 3,
                 timeout: float = 15.0):
        self.endpoint = endpoint
        self._session = session or requests.Session()
        self._max_attempts = max_attempts
        self._timeout = timeout

    def _call(self, request: dict) -> dict:
        body = {
            "messages": [
                {"role": "system", "content": ORACLE_SYSTEM_GUIDE},
                {"role": "user", "content": json.dumps(request, sort_keys=True)},
            ]
        }
        last = ""
        for _attempt in range(self._max_attempts):
            try:
                response = self._session.post(self.endpoint, json=body, timeout=self._timeout)
                if response.status_code >= 500:
                    last = f"HTTP {response.status_code}"
                    continue
                payload = response.json()
                content = (payload.get("message") or {}).get("content", "")
                return json.loads(content)
            except (requests.RequestException, ValueError) as exc:
                last = str(exc)
        raise OracleUnavailable(
            f"oracle endpoint {self.endpoint} unreachable after "
            f"{self._max_attempts} attempts: {last}"
        )

    def plan(self, query: str) -> PlanChecklist:
        payload = self._call({"op": "plan", "query": query})
        steps = [
            PlanStep(text=s.get("text", ""), hint=s.get("hint", ""))
            for s in payload.get("steps", [])
        ]
        if not steps:
            steps = [PlanStep(text=f"Investigate: {query}", hint="finalize")]
        return PlanChecklist(steps=steps)

    def score_relevance(self, candidate: str, target: str) -> float:
        payload = self._call({"op": "score", "candidate": candidate, "target": target})
        try:
            return max(0.0, min(1.0, float(payload.get("score", 0.0))))
        except (TypeError, ValueError):
            return 0.0

    def choose_action(self, state, observation: str) -> Action | None:
        payload = self._call({
            "op": "choose_action",
            "query": state.query,
            "plan": state.plan.render(),
            "budgets": dict(state.budgets),
            "observation": observation,
            "graph_stats": state.graph.stats(),
        })
        return action_from_dict(payload)
