"""Helpers to synthesize KGML documents and random signed digraphs for tests."""
from __future__ import annotations

import random
from xml.sax.saxutils import quoteattr

from biokgr.pathways.graphs import PathwayNode, SignedEdge, SignedPathwayGraph


def make_kgml(
    pathway_id: str = "hsa99999",
    title: str = "Test pathway",
    entries: list[dict] | None = None,
    relations: list[tuple] | None = None,
    reactions: list[dict] | None = None,
) -> str:
    """Render a KGML document.

    entries: {"id", "name", "type", "graphics", "reaction"(opt), "components"(opt)}
    relations: (entry1, entry2, [subtype names]) tuples
    reactions: {"name", "type", "substrates": [(id, name)], "products": [(id, name)]}
    """
    lines = [
        '<?xml version="1.0"?>',
        f'<pathway name={quoteattr("path:" + pathway_id)} org="hsa" number="99999" '
        f"title={quoteattr(title)}>",
    ]
    for entry in entries or []:
        attrs = f'id="{entry["id"]}" name={quoteattr(entry.get("name", ""))} type="{entry.get("type", "gene")}"'
        if entry.get("reaction"):
            attrs += f' reaction={quoteattr(entry["reaction"])}'
        lines.append(f"  <entry {attrs}>")
        if entry.get("graphics") is not None:
            lines.append(f"    <graphics name={quoteattr(entry['graphics'])} type=\"rectangle\"/>")
        for comp in entry.get("components", []):
            lines.append(f'    <component id="{comp}"/>')
        lines.append("  </entry>")
    for entry1, entry2, subtypes in relations or []:
        lines.append(f'  <relation entry1="{entry1}" entry2="{entry2}" type="PPrel">')
        for subtype in subtypes:
            lines.append(f"    <subtype name={quoteattr(subtype)} value=\"--&gt;\"/>")
        lines.append("  </relation>")
    for reaction in reactions or []:
        lines.append(
            f'  <reaction id="{reaction.get("id", "0")}" '
            f"name={quoteattr(reaction['name'])} type=\"{reaction.get('type', 'irreversible')}\">"
        )
        for sid, sname in reaction.get("substrates", []):
            lines.append(f'    <substrate id="{sid}" name={quoteattr(sname)}/>')
        for pid, pname in reaction.get("products", []):
            lines.append(f'    <product id="{pid}" name={quoteattr(pname)}/>')
        lines.append("  </reaction>")
    lines.append("</pathway>")
    return "\n".join(lines)


def ulcerative_colitis_kgml() -> str:
    """Hand-built pathway echoing the inflammatory-disease option pattern.

    Topology is tuned so that TNF and IL6 (and only they) end up with both
    positive polarity toward the inflammation endpoint and top-decile
    betweenness: IL10/PTPN2/SMAD7 suppress the endpoint, VEGFA/MMP9/STAT3 have
    sign-balanced routes, NOD2/CXCR2 reach no endpoint.
    """
    genes = [
        (1, "hsa:7124", "TNF, DIF, TNF-alpha"),
        (2, "hsa:3586", "IL10, CSIF"),
        (3, "hsa:7422", "VEGFA, VEGF"),
        (4, "hsa:4318", "MMP9, GELB"),
        (5, "hsa:5771", "PTPN2, PTN2"),
        (6, "hsa:4092", "SMAD7, MADH7"),
        (7, "hsa:64127", "NOD2, CARD15"),
        (8, "hsa:3569", "IL6, BSF-2"),
        (9, "hsa:6774", "STAT3, APRF"),
        (10, "hsa:3579", "CXCR2, IL8RB"),
    ]
    entries = [
        {"id": str(i), "name": name, "type": "gene", "graphics": label}
        for i, name, label in genes
    ]
    entries.append(
        {"id": "11", "name": "path:hsa04750", "type": "map", "graphics": "Inflammation"}
    )
    relations = [
        ("1", "11", ["activation"]),   # TNF -> Inflammation
        ("1", "8", ["activation"]),    # TNF -> IL6
        ("8", "11", ["activation"]),   # IL6 -> Inflammation
        ("2", "11", ["inhibition"]),   # IL10 -| Inflammation
        ("5", "11", ["inhibition"]),   # PTPN2 -| Inflammation
        ("6", "11", ["inhibition"]),   # SMAD7 -| Inflammation
        ("3", "1", ["activation"]),    # VEGFA -> TNF
        ("3", "2", ["activation"]),    # VEGFA -> IL10
        ("4", "11", ["activation"]),   # MMP9 -> Inflammation
        ("4", "2", ["activation"]),    # MMP9 -> IL10
        ("9", "8", ["activation"]),    # STAT3 -> IL6
        ("9", "5", ["activation"]),    # STAT3 -> PTPN2
        ("1", "7", ["activation"]),    # TNF -> NOD2 (dead end)
        ("8", "10", ["activation"]),   # IL6 -> CXCR2 (dead end)
    ]
    return make_kgml(
        pathway_id="hsa04750",
        title="Inflammatory bowel disease",
        entries=entries,
        relations=relations,
    )


def shmt2_flux_kgml() -> str:
    """Reaction-graph fixture: SHMT2 feeds a chain with a terminal endpoint
    and a two-compound feedback cycle branching off it."""
    entries = [
        {"id": "1", "name": "hsa:6472", "type": "gene", "graphics": "SHMT2",
         "reaction": "rn:R00945"},
        {"id": "20", "name": "cpd:C00065", "type": "compound", "graphics": "Serine"},
        {"id": "21", "name": "cpd:C00037", "type": "compound", "graphics": "Glycine"},
        {"id": "22", "name": "cpd:C00058", "type": "compound", "graphics": "Formate"},
        {"id": "23", "name": "cpd:C00144", "type": "compound", "graphics": "Purine"},
        {"id": "24", "name": "cpd:C90001", "type": "compound", "graphics": "CycloA"},
        {"id": "25", "name": "cpd:C90002", "type": "compound", "graphics": "CycloB"},
        {"id": "11", "name": "path:hsa00000", "type": "map", "graphics": "Nucleotide biosynthesis"},
    ]
    reactions = [
        {"id": "1", "name": "rn:R00945", "substrates": [("20", "cpd:C00065")],
         "products": [("21", "cpd:C00037")]},
        {"id": "2", "name": "rn:R00946", "substrates": [("21", "cpd:C00037")],
         "products": [("22", "cpd:C00058")]},
        {"id": "3", "name": "rn:R00947", "substrates": [("22", "cpd:C00058")],
         "products": [("23", "cpd:C00144")]},
        {"id": "4", "name": "rn:R90001", "substrates": [("21", "cpd:C00037")],
         "products": [("24", "cpd:C90001")]},
        {"id": "5", "name": "rn:R90002", "substrates": [("24", "cpd:C90001")],
         "products": [("25", "cpd:C90002")]},
        {"id": "6", "name": "rn:R90003", "substrates": [("25", "cpd:C90002")],
         "products": [("24", "cpd:C90001")]},
    ]
    return make_kgml(
        pathway_id="hsa00670",
        title="One carbon pool by folate",
        entries=entries,
        reactions=reactions,
    )


def random_signed_graph(rng: random.Random, max_nodes: int = 30) -> SignedPathwayGraph:
    """Random signed digraph with stable, lexicographically ordered node names."""
    n = rng.randint(3, max_nodes)
    names = [f"N{i:02d}" for i in range(n)]
    graph = SignedPathwayGraph(pathway_id="random", title="random")
    for name in names:
        graph.nodes[name] = PathwayNode(symbol=name)
    target_edges = rng.randint(n, 2 * n)
    seen: set[tuple[str, str]] = set()
    for _ in range(target_edges):
        src, dst = rng.sample(names, 2)
        if (src, dst) in seen:
            continue
        seen.add((src, dst))
        weight = rng.choice((1, -1))
        graph.edges.append(SignedEdge(src, dst, weight, "activation" if weight > 0 else "inhibition"))
    return graph


def pde4_inflammation_kgml() -> str:
    """Drug-target pathway: PDE4B upstream of NF-kB-driven cytokine markers."""
    entries = [
        {"id": "1", "name": "hsa:5142", "type": "gene", "graphics": "PDE4B"},
        {"id": "2", "name": "hsa:4790", "type": "gene", "graphics": "NFKB1"},
        {"id": "3", "name": "hsa:7124", "type": "gene", "graphics": "TNF, DIF"},
        {"id": "4", "name": "hsa:3569", "type": "gene", "graphics": "IL6, BSF-2"},
        {"id": "5", "name": "hsa:3553", "type": "gene", "graphics": "IL1B"},
        {"id": "6", "name": "path:hsa04064", "type": "map", "graphics": "Inflammation"},
    ]
    relations = [
        ("1", "2", ["activation"]),
        ("2", "3", ["expression"]),
        ("2", "4", ["expression"]),
        ("2", "5", ["expression"]),
        ("3", "6", ["activation"]),
        ("4", "6", ["activation"]),
    ]
    return make_kgml(
        pathway_id="hsa04064",
        title="cAMP signaling pathway",
        entries=entries,
        relations=relations,
    )


def egfr_cancer_kgml() -> str:
    """Second drug-target pathway: EGFR driving proliferation/apoptosis markers."""
    entries = [
        {"id": "1", "name": "hsa:1956", "type": "gene", "graphics": "EGFR, ERBB1"},
        {"id": "2", "name": "hsa:4609", "type": "gene", "graphics": "MYC"},
        {"id": "3", "name": "hsa:595", "type": "gene", "graphics": "CCND1"},
        {"id": "4", "name": "hsa:836", "type": "gene", "graphics": "CASP3"},
        {"id": "5", "name": "path:hsa05200", "type": "map", "graphics": "Proliferation"},
    ]
    relations = [
        ("1", "2", ["activation"]),
        ("1", "3", ["expression"]),
        ("2", "5", ["activation"]),
        ("1", "4", ["inhibition"]),
    ]
    return make_kgml(
        pathway_id="hsa05200",
        title="Pathways in cancer",
        entries=entries,
        relations=relations,
    )
