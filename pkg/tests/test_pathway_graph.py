"""KGML/flat parsing and graph analytics against brute-force oracles."""
import random

import pytest

from biokgr.pathways import (
    MalformedKgml,
    MalformedRecord,
    NodeNotFound,
    betweenness,
    infer_functional_type,
    k_step_neighborhood,
    parse_flat_record,
    parse_kgml,
    path_polarity,
    strongly_connected_components,
    terminal_endpoints,
)
from biokgr.pathways.graphs import PathwayNode, ReactionGraph, SignedEdge, SignedPathwayGraph

from kgmlgen import make_kgml, random_signed_graph, shmt2_flux_kgml, ulcerative_colitis_kgml
from oracles import (
    betweenness_oracle,
    k_step_oracle,
    polarity_oracle,
    scc_oracle,
    terminal_oracle,
)


# -- KGML parsing -------------------------------------------------------------

def test_activation_maps_to_plus_one():
    doc = make_kgml(
        entries=[
            {"id": "1", "name": "hsa:1", "graphics": "AAA"},
            {"id": "2", "name": "hsa:2", "graphics": "BBB"},
        ],
        relations=[("1", "2", ["activation"])],
    )
    graph, _rg = parse_kgml(doc)
    assert len(graph.edges) == 1
    edge = graph.edges[0]
    assert (edge.source, edge.target, edge.weight) == ("AAA", "BBB", 1)


def test_inhibition_maps_to_minus_one():
    doc = make_kgml(
        entries=[
            {"id": "1", "name": "hsa:1", "graphics": "AAA"},
            {"id": "2", "name": "hsa:2", "graphics": "BBB"},
        ],
        relations=[("1", "2", ["inhibition"])],
    )
    graph, _rg = parse_kgml(doc)
    assert graph.edges[0].weight == -1


def test_expression_and_repression_signs():
    doc = make_kgml(
        entries=[
            {"id": "1", "name": "hsa:1", "graphics": "AAA"},
            {"id": "2", "name": "hsa:2", "graphics": "BBB"},
            {"id": "3", "name": "hsa:3", "graphics": "CCC"},
        ],
        relations=[("1", "2", ["expression"]), ("2", "3", ["repression"])],
    )
    graph, _rg = parse_kgml(doc)
    weights = {(e.source, e.target): e.weight for e in graph.edges}
    assert weights == {("AAA", "BBB"): 1, ("BBB", "CCC"): -1}


def test_unmapped_subtype_is_recorded_as_skipped():
    doc = make_kgml(
        entries=[
            {"id": "1", "name": "hsa:1", "graphics": "AAA"},
            {"id": "2", "name": "hsa:2", "graphics": "BBB"},
        ],
        relations=[("1", "2", ["binding/association"])],
    )
    graph, _rg = parse_kgml(doc)
    assert graph.edges == []
    assert graph.skipped_relations == [("1", "2", "binding/association")]


def test_reaction_becomes_substrate_product_edge():
    doc = make_kgml(
        entries=[
            {"id": "9", "name": "hsa:9", "graphics": "ENZ", "reaction": "rn:R00001"},
            {"id": "20", "name": "cpd:C00022", "type": "compound", "graphics": "Pyruvate"},
            {"id": "21", "name": "cpd:C00024", "type": "compound", "graphics": "AcCoA"},
        ],
        reactions=[
            {"name": "rn:R00001", "substrates": [("20", "cpd:C00022")],
             "products": [("21", "cpd:C00024")]},
        ],
    )
    _graph, rg = parse_kgml(doc)
    assert ("Pyruvate", "AcCoA", "R00001") in rg.edges
    assert rg.enzymes == {"ENZ": ("R00001",)}
    assert rg.gene_products("ENZ") == ["AcCoA"]


def test_group_relations_expand_to_members():
    doc = make_kgml(
        entries=[
            {"id": "1", "name": "hsa:1", "graphics": "AAA"},
            {"id": "2", "name": "hsa:2", "graphics": "BBB"},
            {"id": "3", "name": "hsa:3", "graphics": "CCC"},
            {"id": "4", "name": "undefined", "type": "group", "graphics": None,
             "components": ["1", "2"]},
        ],
        relations=[("4", "3", ["activation"])],
    )
    graph, _rg = parse_kgml(doc)
    pairs = {(e.source, e.target) for e in graph.edges}
    assert pairs == {("AAA", "CCC"), ("BBB", "CCC")}


def test_endpoint_lexicon_marks_map_nodes():
    graph, _rg = parse_kgml(ulcerative_colitis_kgml())
    assert graph.endpoints == {"Inflammation"}
    assert graph.title == "Inflammatory bowel disease"
    assert "TNF" in graph.gene_symbols()
    assert "Inflammation" not in graph.gene_symbols()


def test_malformed_kgml_raises_with_context():
    with pytest.raises(MalformedKgml):
        parse_kgml("<pathway><entry></pathway>")
    with pytest.raises(MalformedKgml, match="expected <pathway>"):
        parse_kgml("<notkgml/>")


def test_duplicate_symbol_entries_merge():
    doc = make_kgml(
        entries=[
            {"id": "1", "name": "hsa:7124", "graphics": "TNF, DIF"},
            {"id": "2", "name": "hsa:7124", "graphics": "TNF, TNFA"},
            {"id": "3", "name": "hsa:2", "graphics": "BBB"},
        ],
        relations=[("1", "3", ["activation"]), ("2", "3", ["activation"])],
    )
    graph, _rg = parse_kgml(doc)
    assert list(graph.nodes) == ["TNF", "BBB"]
    assert len(graph.edges) == 1  # deduplicated after symbol merge


# -- flat records --------------------------------------------------------------

NERANDOMILAST = """\
ENTRY       D12975                      Drug
NAME        Nerandomilast (JAN/USAN/INN);
            BI-1015550
FORMULA     C23H26N8O2
EFFICACY    Anti-inflammatory, Antifibrotic, Phosphodiesterase IV inhibitor
COMMENT     Treatment of idiopathic pulmonary fibrosis
TARGET      PDE4B [HSA:5142] [KO:K13293]
  PATHWAY   hsa04024(5142)  cAMP signaling pathway
CLASS       Anti-inflammatory
             DG03205  Phosphodiesterase IV inhibitor
DISEASE     Idiopathic pulmonary fibrosis [DS:H01299]
///
"""


def test_minimal_record_two_fields():
    record = parse_flat_record("ENTRY       D00001 Drug\nNAME        Examplestat\nEFFICACY    Antineoplastic\n")
    assert record.name == "Examplestat"
    assert record.efficacy == "Antineoplastic"


def test_nerandomilast_record():
    record = parse_flat_record(NERANDOMILAST)
    assert record.accession == "D12975"
    assert record.name == "Nerandomilast"
    assert any("Phosphodiesterase IV" in c for c in record.class_labels)
    assert any("pulmonary fibrosis" in d for d in record.diseases)
    assert record.target_symbols == ("PDE4B",)
    assert record.target_hsa_ids == ("5142",)
    assert record.pathways == ("hsa04024",)
    assert "FORMULA" in record.residual


def test_record_without_name_raises():
    with pytest.raises(MalformedRecord):
        parse_flat_record("ENTRY       D00001 Drug\nEFFICACY    Something\n")


def test_continuation_lines_fold():
    record = parse_flat_record(
        "ENTRY       D1 Drug\nNAME        Alpha;\n            Beta\nCOMMENT     line one\n            line two\n"
    )
    assert record.names == ("Alpha", "Beta")
    assert record.comment == "line one line two"


# -- functional types -----------------------------------------------------------

@pytest.mark.parametrize(
    "symbol,expected",
    [
        ("TNF", "cytokine"),
        ("IL10", "cytokine"),
        ("VEGFA", "growth factor"),
        ("MMP9", "enzyme"),
        ("PTPN2", "phosphatase"),
        ("SMAD7", "transcription regulator"),
        ("NOD2", "pattern recognition receptor"),
        ("IL6", "cytokine"),
        ("STAT3", "transcription factor"),
        ("CXCR2", "receptor"),
    ],
)
def test_supp_table_functional_types(symbol, expected):
    assert infer_functional_type(PathwayNode(symbol=symbol)) == expected


def test_ec_number_falls_back_to_enzyme():
    node = PathwayNode(symbol="UNKNOWN1", ec_numbers=("2.7.11.1",))
    assert infer_functional_type(node) == "enzyme"


def test_specific_class_beats_ec_rule():
    node = PathwayNode(symbol="MAPK1", ec_numbers=("2.7.11.24",))
    assert infer_functional_type(node) == "kinase"


def test_unknown_symbol_is_other():
    assert infer_functional_type(PathwayNode(symbol="ZZZUNKNOWN")) == "other"


# -- analytics: pinned examples --------------------------------------------------

def chain_graph(signs):
    graph = SignedPathwayGraph()
    names = [chr(ord("A") + i) for i in range(len(signs) + 1)]
    for name in names:
        graph.nodes[name] = PathwayNode(symbol=name)
    for i, sign in enumerate(signs):
        graph.edges.append(SignedEdge(names[i], names[i + 1], sign))
    return graph, names


def test_polarity_single_positive_chain():
    graph, names = chain_graph([1, 1])
    result = path_polarity(graph, "A", {names[-1]})
    assert result.value == 1.0 and result.path_count == 1 and not result.no_path


def test_polarity_single_negative_edge():
    graph, names = chain_graph([-1])
    result = path_polarity(graph, "A", {names[-1]})
    assert result.value == -1.0


def test_polarity_no_path_flag():
    graph, _names = chain_graph([1])
    graph.nodes["Z"] = PathwayNode(symbol="Z")
    result = path_polarity(graph, "Z", {"B"})
    assert result.value == 0.0 and result.no_path


def test_polarity_unknown_gene_raises():
    graph, _names = chain_graph([1])
    with pytest.raises(NodeNotFound):
        path_polarity(graph, "NOPE", {"B"})


def test_polarity_respects_length_cap():
    graph, names = chain_graph([1] * 10)  # 10 edges: beyond the 8-edge cap
    result = path_polarity(graph, "A", {names[-1]})
    assert result.no_path


def test_betweenness_chain_midpoint():
    graph, _names = chain_graph([1, 1])
    assert betweenness(graph)["B"] == pytest.approx(1.0)


def test_betweenness_star():
    graph = SignedPathwayGraph()
    for name in ["I1", "I2", "C", "O1", "O2", "O3"]:
        graph.nodes[name] = PathwayNode(symbol=name)
    for src in ["I1", "I2"]:
        graph.edges.append(SignedEdge(src, "C", 1))
    for dst in ["O1", "O2", "O3"]:
        graph.edges.append(SignedEdge("C", dst, 1))
    assert betweenness(graph)["C"] == pytest.approx(6.0)


def test_scc_dag_is_singletons():
    graph, names = chain_graph([1, 1, 1])
    components = strongly_connected_components(graph)
    assert all(len(c) == 1 for c in components)
    assert len(components) == len(names)


def test_scc_cycle_detected():
    graph = SignedPathwayGraph()
    for name in "ABC":
        graph.nodes[name] = PathwayNode(symbol=name)
    graph.edges += [SignedEdge("A", "B", 1), SignedEdge("B", "C", 1), SignedEdge("C", "A", 1)]
    components = strongly_connected_components(graph)
    assert components == [{"A", "B", "C"}]


def reaction_chain(names):
    rg = ReactionGraph()
    for name in names:
        rg.compounds[name] = name
    for i in range(len(names) - 1):
        rg.edges.append((names[i], names[i + 1], f"R{i}"))
    return rg


def test_k_step_zero_is_empty():
    rg = reaction_chain(["C1", "C2", "C3"])
    assert k_step_neighborhood(rg, "C1", 0) == set()


def test_k_step_two_downstream():
    rg = reaction_chain(["C1", "C2", "C3", "C4"])
    assert k_step_neighborhood(rg, "C1", 2, "downstream") == {"C2", "C3"}


def test_k_step_upstream():
    rg = reaction_chain(["C1", "C2", "C3", "C4"])
    assert k_step_neighborhood(rg, "C4", 2, "upstream") == {"C2", "C3"}


def test_k_step_missing_node():
    rg = reaction_chain(["C1", "C2"])
    with pytest.raises(NodeNotFound):
        k_step_neighborhood(rg, "C9", 1)


def test_terminal_chain_tail():
    rg = reaction_chain(["C1", "C2", "C3"])
    assert terminal_endpoints(rg) == {"C3"}


def test_terminal_cycle_is_empty():
    rg = ReactionGraph()
    for name in ["C1", "C2", "C3"]:
        rg.compounds[name] = name
    rg.edges += [("C1", "C2", "R1"), ("C2", "C3", "R2"), ("C3", "C1", "R3")]
    assert terminal_endpoints(rg) == set()


def test_shmt2_fixture_shapes():
    _graph, rg = parse_kgml(shmt2_flux_kgml())
    assert rg.reactions_for_gene("SHMT2") == ("R00945",)
    assert rg.gene_products("SHMT2") == ["Glycine"]
    assert rg.gene_substrates("SHMT2") == ["Serine"]
    assert "Purine" in terminal_endpoints(rg)


# -- analytics: randomized oracle equivalence ------------------------------------

def test_polarity_matches_enumeration_oracle():
    rng = random.Random(7)
    for _ in range(40):
        graph = random_signed_graph(rng, max_nodes=12)
        nodes = sorted(graph.nodes)
        gene = rng.choice(nodes)
        endpoints = set(rng.sample(nodes, k=min(3, len(nodes))))
        endpoints.discard(gene)
        if not endpoints:
            continue
        result = path_polarity(graph, gene, endpoints)
        expected, count = polarity_oracle(graph, gene, sorted(endpoints))
        assert not result.truncated
        assert result.path_count == count
        assert abs(result.value - expected) < 1e-12


def test_betweenness_matches_counting_oracle():
    rng = random.Random(11)
    for _ in range(25):
        graph = random_signed_graph(rng, max_nodes=30)
        ours = betweenness(graph)
        expected = betweenness_oracle(graph)
        for node in graph.nodes:
            assert abs(ours.get(node, 0.0) - expected[node]) < 1e-9


def test_scc_matches_reachability_oracle():
    rng = random.Random(13)
    for _ in range(30):
        graph = random_signed_graph(rng, max_nodes=25)
        assert strongly_connected_components(graph) == scc_oracle(graph)


def test_sign_flip_antisymmetry_on_odd_length_paths():
    # flipping every sign multiplies a k-edge path's product by (-1)^k, so
    # antisymmetry of the mean holds exactly when all paths have odd length
    rng = random.Random(17)
    for _ in range(20):
        length = rng.choice([1, 3, 5, 7])
        signs = [rng.choice([1, -1]) for _ in range(length)]
        graph, names = chain_graph(signs)
        flipped = SignedPathwayGraph(nodes=dict(graph.nodes))
        flipped.edges = [SignedEdge(e.source, e.target, -e.weight, e.subtype) for e in graph.edges]
        base = path_polarity(graph, "A", {names[-1]})
        neg = path_polarity(flipped, "A", {names[-1]})
        assert abs(base.value + neg.value) < 1e-12
        assert base.path_count == neg.path_count


def test_sign_flip_twice_is_identity():
    rng = random.Random(18)
    for _ in range(10):
        graph = random_signed_graph(rng, max_nodes=12)
        twice = SignedPathwayGraph(nodes=dict(graph.nodes))
        twice.edges = [SignedEdge(e.source, e.target, -(-e.weight), e.subtype) for e in graph.edges]
        nodes = sorted(graph.nodes)
        gene, endpoint = rng.sample(nodes, 2)
        assert path_polarity(graph, gene, {endpoint}) == path_polarity(twice, gene, {endpoint})


def test_k_step_monotone_and_matches_oracle():
    rng = random.Random(19)
    for _ in range(20):
        graph = random_signed_graph(rng, max_nodes=20)
        rg = ReactionGraph()
        for name in graph.nodes:
            rg.compounds[name] = name
        rg.edges = [(e.source, e.target, "R") for e in graph.edges]
        node = rng.choice(sorted(rg.compounds))
        previous = set()
        for k in range(0, 5):
            for direction in ("downstream", "upstream"):
                assert k_step_neighborhood(rg, node, k, direction) == k_step_oracle(
                    rg, node, k, direction
                )
            current = k_step_neighborhood(rg, node, k, "downstream")
            assert previous <= current
            previous = current
        assert terminal_endpoints(rg) == terminal_oracle(rg)


def test_upstream_equals_downstream_on_reversed_graph():
    rng = random.Random(23)
    graph = random_signed_graph(rng, max_nodes=15)
    rg = ReactionGraph()
    for name in graph.nodes:
        rg.compounds[name] = name
    rg.edges = [(e.source, e.target, "R") for e in graph.edges]
    reversed_rg = ReactionGraph(compounds=dict(rg.compounds))
    reversed_rg.edges = [(dst, src, r) for src, dst, r in rg.edges]
    for node in sorted(rg.compounds)[:5]:
        assert k_step_neighborhood(rg, node, 3, "upstream") == k_step_neighborhood(
            reversed_rg, node, 3, "downstream"
        )


def test_polarity_truncation_flag_on_dense_graphs():
    # layered graph with 3 parallel nodes per layer: 3^4 = 81 paths
    graph = SignedPathwayGraph()
    layers = [[f"L{d}N{i}" for i in range(3)] for d in range(4)]
    for layer in layers:
        for name in layer:
            graph.nodes[name] = PathwayNode(symbol=name)
    graph.nodes["SRC"] = PathwayNode(symbol="SRC")
    graph.nodes["DST"] = PathwayNode(symbol="DST")
    for name in layers[0]:
        graph.edges.append(SignedEdge("SRC", name, 1))
    for a, b in zip(layers, layers[1:]):
        for src in a:
            for dst in b:
                graph.edges.append(SignedEdge(src, dst, 1))
    for name in layers[-1]:
        graph.edges.append(SignedEdge(name, "DST", 1))

    full = path_polarity(graph, "SRC", {"DST"})
    assert full.path_count == 81 and not full.truncated
    capped = path_polarity(graph, "SRC", {"DST"}, max_paths=10)
    assert capped.truncated and capped.path_count == 10
    assert capped.value == 1.0  # all-activation graph stays +1
