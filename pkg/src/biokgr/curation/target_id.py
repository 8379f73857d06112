"""Target-identification items from signed pathway topology.

Gain scoring combines three signals: average path polarity toward the disease
endpoints, betweenness centrality (top decile elevates positive-polarity
genes), and a druggability blacklist that forces gain 0. Disease-specific
logic profiles lower the gain-2 polarity threshold for prioritized
functional classes.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from biokgr.curation.items import McqItem, finalize_item
from biokgr.pathways.analytics import betweenness, path_polarity
from biokgr.pathways.families import infer_functional_type
from biokgr.pathways.graphs import SignedPathwayGraph

GAIN2_THRESHOLD = 0.5
PRIORITIZED_GAIN2_THRESHOLD = 0.3
CENTRALITY_PERCENTILE = 90


class NoEndpoints(Exception):
    pass


class InsufficientCandidates(Exception):
    pass


class NoCorrectOption(Exception):
    pass


@dataclass(frozen=True)
class GainScore:
    value: int
    rationale: str  # positive_polarity_central | positive_polarity | neutral |
    #                 protective | non_druggable | mass_balance_violation |
    #                 feedback_transient | endpoint_suppression


@dataclass(frozen=True)
class LogicProfile:
    """Disease-specific weighting of functional classes.

    The priority bonus is a lowered gain-2 polarity threshold for the
    prioritized functional types (0.3 instead of the default 0.5).
    """

    category: str  # cancer | drug_resistance | infection | other
    prioritized_types: tuple[str, ...]
    prioritized_threshold: float = PRIORITIZED_GAIN2_THRESHOLD


PROFILES = {
    "cancer": LogicProfile("cancer", ("kinase", "enzyme")),
    "drug_resistance": LogicProfile("drug_resistance", ("transporter", "receptor")),
    "infection": LogicProfile("infection", ("pattern recognition receptor", "cytokine")),
    "other": LogicProfile("other", ()),
}


@lru_cache(maxsize=1)
def _load_blacklist() -> dict:
    path = resources.files("biokgr.data").joinpath("druggability_blacklist.json")
    return json.loads(path.read_text(encoding="utf-8"))


def is_blacklisted(graph: SignedPathwayGraph, symbol: str, blacklist: dict | None = None) -> bool:
    rules = blacklist if blacklist is not None else _load_blacklist()
    upper = symbol.upper()
    if any(upper.startswith(p.upper()) for p in rules.get("prefixes", [])):
        return True
    node = graph.nodes.get(symbol)
    haystack = symbol.casefold()
    if node is not None:
        haystack = " ".join((node.graphics_label, *node.aliases, symbol)).casefold()
    return any(w.casefold() in haystack for w in rules.get("words", []))


def nearest_rank_percentile(values: list[float], percentile: int) -> float:
    """Nearest-rank percentile; ties at the cut are included by callers."""
    if not values:
        return math.inf
    ordered = sorted(values)
    rank = max(1, math.ceil(percentile / 100.0 * len(ordered)))
    return ordered[rank - 1]


def assign_target_gains(
    graph: SignedPathwayGraph,
    candidates: list[str],
    profile: LogicProfile,
    endpoints: set[str] | None = None,
    blacklist: dict | None = None,
) -> dict[str, GainScore]:
    """Score each candidate gene for therapeutic-target plausibility."""
    targets = set(endpoints) if endpoints is not None else set(graph.endpoints)
    if not targets:
        raise NoEndpoints(f"pathway {graph.pathway_id or '?'} has no disease endpoints")

    centrality = betweenness(graph)
    candidate_centrality = {c: centrality.get(c, 0.0) for c in candidates}
    cutoff = nearest_rank_percentile(list(candidate_centrality.values()), CENTRALITY_PERCENTILE)

    scores: dict[str, GainScore] = {}
    for candidate in candidates:
        if is_blacklisted(graph, candidate, blacklist):
            scores[candidate] = GainScore(0, "non_druggable")
            continue
        polarity = path_polarity(graph, candidate, targets)
        node = graph.nodes[candidate]
        ftype = node.functional_type or infer_functional_type(node)
        threshold = (
            profile.prioritized_threshold
            if ftype in profile.prioritized_types
            else GAIN2_THRESHOLD
        )
        if polarity.value < 0:
            scores[candidate] = GainScore(0, "protective")
        elif candidate_centrality[candidate] >= cutoff and polarity.value > 0:
            scores[candidate] = GainScore(2, "positive_polarity_central")
        elif polarity.value > threshold:
            scores[candidate] = GainScore(2, "positive_polarity")
        else:
            scores[candidate] = GainScore(1, "neutral")
    return scores


def build_target_item(
    graph: SignedPathwayGraph,
    profile: LogicProfile,
    option_count: int = 10,
    seed: int = 0,
    endpoints: set[str] | None = None,
    blacklist: dict | None = None,
    disease_context: str | None = None,
) -> McqItem:
    """One target-identification MCQ from a parsed disease pathway.

    All gain-2 candidates enter the option set first; the remainder is filled
    with the highest-centrality non-answer candidates, then the set is
    shuffled by the seeded RNG.
    """
    candidates = graph.gene_symbols()
    if len(candidates) < option_count:
        raise InsufficientCandidates(
            f"{len(candidates)} candidates < option count {option_count}"
        )
    gains = assign_target_gains(graph, candidates, profile, endpoints, blacklist)
    answers = sorted(c for c, s in gains.items() if s.value == 2)
    if not answers:
        raise NoCorrectOption(f"no gain-2 candidate in pathway {graph.pathway_id or '?'}")

    centrality = betweenness(graph)
    chosen = answers[:option_count]
    fillers = sorted(
        (c for c in candidates if c not in set(chosen)),
        key=lambda c: (-centrality.get(c, 0.0), c),
    )
    chosen = chosen + fillers[: option_count - len(chosen)]

    def render(symbol: str) -> str:
        node = graph.nodes[symbol]
        ftype = node.functional_type or infer_functional_type(node)
        return f"{symbol} : {ftype}"

    scored = [(render(c), gains[c].value) for c in chosen]
    context = disease_context or graph.title or graph.pathway_id or "this disease"
    question = (
        f"Which genes represent the most promising therapeutic targets for "
        f"modulating {context}? Focus on targets that can be inhibited to "
        f"interrupt disease progression. Select the most promising genes."
    )
    rng = random.Random(seed)
    return finalize_item(
        item_id=f"target-{graph.pathway_id or 'pathway'}-{seed}",
        task_type="target_id",
        question=question,
        scored_options=scored,
        rng=rng,
        metadata={
            "pathway_id": graph.pathway_id,
            "pathway_title": graph.title,
            "profile": profile.category,
            "seed": seed,
            "gain_rationales": {c: gains[c].rationale for c in chosen},
        },
    )
