import itertools
from dataclasses import replace

import networkx as nx
import pytest

from certificates.matching import (
    BipartiteGraph,
    MatchingCertificate,
    graph_from_relation,
    matching_number,
    max_matching,
    ore_defect_bruteforce,
    overlap_count,
    verify_matching_certificate,
)
from errors import BudgetExceeded, InvariantViolation


def make_graph(n_left, n_right, pairs):
    left = [f"l{i}" for i in range(n_left)]
    right = [f"r{j}" for j in range(n_right)]
    return BipartiteGraph.from_pairs(left, right, [(f"l{i}", f"r{j}") for i, j in pairs])


def networkx_size(graph):
    g = nx.Graph()
    g.add_nodes_from(graph.left, bipartite=0)
    g.add_nodes_from(graph.right, bipartite=1)
    g.add_edges_from(graph.edges)
    return len(nx.bipartite.maximum_matching(g, top_nodes=graph.left)) // 2


def injection_maximum(graph):
    """Largest set of edges with distinct endpoints, by exhaustive search."""
    edges = sorted(graph.edges)
    for size in range(min(len(graph.left), len(graph.right)), 0, -1):
        for chosen in itertools.combinations(edges, size):
            if len({u for u, _ in chosen}) == size and len({v for _, v in chosen}) == size:
                return size
    return 0


def check(graph):
    cert = max_matching(graph)
    assert verify_matching_certificate(graph, cert)
    assert cert.size == ore_defect_bruteforce(graph)
    return cert


def test_star():
    graph = make_graph(3, 1, [(0, 0), (1, 0), (2, 0)])
    cert = check(graph)
    assert cert.size == 1
    assert ore_defect_bruteforce(graph) == 1
    assert len(cert.deficiency_set) - len(graph.neighbourhood(cert.deficiency_set)) == 2


def test_empty_graph():
    graph = make_graph(2, 2, [])
    cert = check(graph)
    assert cert.size == 0
    assert set(cert.deficiency_set) == {"l0", "l1"}


def test_perfect_matching_needs_augmenting_path():
    # greedy l0 -> r0 must be undone
    graph = make_graph(2, 2, [(0, 0), (0, 1), (1, 0)])
    cert = check(graph)
    assert cert.size == 2
    assert cert.as_dict() == {"l0": "r1", "l1": "r0"}


def test_small_graphs_exhaustively():
    for n_left, n_right in [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3)]:
        all_pairs = [(i, j) for i in range(n_left) for j in range(n_right)]
        for mask in range(1 << len(all_pairs)):
            graph = make_graph(n_left, n_right, [e for k, e in enumerate(all_pairs) if mask >> k & 1])
            cert = check(graph)
            assert cert.size == injection_maximum(graph)


@pytest.mark.slow
def test_four_by_four_exhaustively():
    all_pairs = [(i, j) for i in range(4) for j in range(4)]
    for mask in range(1 << 16):
        graph = make_graph(4, 4, [e for k, e in enumerate(all_pairs) if mask >> k & 1])
        cert = check(graph)
        assert cert.size == networkx_size(graph)


def test_random_graphs_against_networkx(rng):
    for _ in range(200):
        n_left, n_right = rng.randint(1, 8), rng.randint(1, 8)
        density = rng.random()
        pairs = [(i, j) for i in range(n_left) for j in range(n_right) if rng.random() < density]
        graph = make_graph(n_left, n_right, pairs)
        cert = check(graph)
        assert cert.size == networkx_size(graph)


def test_deterministic():
    graph = make_graph(4, 4, [(0, 0), (0, 1), (1, 1), (2, 1), (2, 2), (3, 3), (3, 0)])
    assert max_matching(graph) == max_matching(graph)


def test_verifier_rejects_bad_certificates():
    graph = make_graph(2, 2, [(0, 0), (1, 1), (1, 0)])
    good = max_matching(graph)
    assert verify_matching_certificate(graph, good)

    cases = {
        "non-edge": MatchingCertificate(2, (("l0", "r1"), ("l1", "r0")), ()),
        "unknown vertex": MatchingCertificate(1, (("l9", "r0"),), ()),
        "matching not injective": MatchingCertificate(2, (("l0", "r0"), ("l1", "r0")), ()),
        "size mismatch": MatchingCertificate(2, (("l0", "r0"),), ()),
        "Ore identity fails": MatchingCertificate(1, (("l0", "r0"),), ()),
    }
    for reason, cert in cases.items():
        verdict = verify_matching_certificate(graph, cert)
        assert not verdict
        assert verdict.reason == reason


def test_bruteforce_guard():
    graph = make_graph(5, 1, [(i, 0) for i in range(5)])
    with pytest.raises(BudgetExceeded):
        ore_defect_bruteforce(graph, limit=4)


def test_graph_invariants():
    with pytest.raises(InvariantViolation):
        make_graph(2, 2, [(0, 0), (0, 0)])
    with pytest.raises(InvariantViolation):
        BipartiteGraph(("a", "a"), ("b",), frozenset())
    with pytest.raises(InvariantViolation):
        BipartiteGraph(("a",), ("b",), frozenset({("a", "c")}))


def test_overlap_is_the_equality_matching():
    first = [(0,), (1,), (1,), (2,)]
    second = [(1,), (1,), (1,), (5,)]
    assert overlap_count(first, second) == 2
    graph = graph_from_relation(first, second, lambda x, y: x == y)
    assert matching_number(graph) == 2


def lowered(cert):
    return replace(cert, matching=cert.matching[1:], size=cert.size - 1)


@pytest.mark.parametrize("mutate, reason", [
    (lambda c: replace(c, matching=c.matching[1:]), "size mismatch"),
    (lowered, "Ore identity fails"),
    (lambda c: replace(c, size=c.size + 1), "size mismatch"),
    (lambda c: replace(c, matching=c.matching + c.matching[:1], size=c.size + 1), "matching not injective"),
    (lambda c: replace(c, matching=(("l0", "r1"),) + c.matching[1:]), "non-edge"),
    (lambda c: replace(c, deficiency_set=c.deficiency_set + ("l2",)), "Ore identity fails"),
    (lambda c: replace(c, deficiency_set=c.deficiency_set[:1]), "Ore identity fails"),
    (lambda c: replace(c, deficiency_set=c.deficiency_set + c.deficiency_set[:1]),
     "deficiency set is not a subset of the left side"),
])
def test_solver_certificates_fail_once_tampered(mutate, reason):
    graph = make_graph(3, 3, [(0, 0), (1, 0), (2, 1), (2, 2)])
    cert = max_matching(graph)
    assert cert.matching == (("l0", "r0"), ("l2", "r1"))
    assert cert.deficiency_set == ("l0", "l1")
    assert verify_matching_certificate(graph, cert)
    verdict = verify_matching_certificate(graph, mutate(cert))
    assert not verdict
    assert verdict.reason == reason


def test_long_augmenting_path():
    # greedy takes l_i -> r_(i+1), so the path augmenting l_n runs through the whole graph
    n = 5000
    left = [f"l{i}" for i in range(n + 1)]
    right = [f"r{j}" for j in reversed(range(n + 1))]
    pairs = [(f"l{i}", f"r{i}") for i in range(n)] + [(f"l{i}", f"r{i + 1}") for i in range(n)]
    pairs.append((f"l{n}", f"r{n}"))
    graph = BipartiteGraph.from_pairs(left, right, pairs)
    cert = max_matching(graph)
    assert cert.size == n + 1
    assert verify_matching_certificate(graph, cert)
