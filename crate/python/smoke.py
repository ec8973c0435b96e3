"""Smoke test for the grafion extension module. Run after `pip install -e .`."""

import math
import os
import tempfile

import grafion


def main():
    g = grafion.Graph()
    alice = g.add_node(["Person"], {"name": "Alice", "age": 30})
    bob = g.add_node(["Person"], {"name": "Bob"})
    g.add_edge(alice, bob, "FRIEND", {"since": 2015})
    assert (g.node_count(), g.edge_count()) == (2, 1)
    assert g.node(alice) == {"id": 0, "labels": ["Person"], "properties": {"age": 30, "name": "Alice"}}

    rs = g.query("MATCH (n:Person) RETURN n.name AS name")
    assert rs["columns"] == ["name"]
    assert rs["rows"] == [["Alice"], ["Bob"]]

    rs = g.query("MATCH (n:Person {name: $who}) SET n.age = 25", {"who": "Bob"})
    assert rs["summary"]["properties_set"] == 1

    before = g.fingerprint()
    try:
        g.query("MATCH RETURN")
    except grafion.QueryError as e:
        message, offset = e.args
        assert offset == 6, e.args
    else:
        raise AssertionError("expected a QueryError")
    assert g.fingerprint() == before

    pr = grafion.Graph()
    for _ in range(4):
        pr.add_node(["Page"])
    for a, b in [(0, 1), (1, 2), (2, 0), (2, 3), (3, 1)]:
        pr.add_edge(a, b, "LINKS")
    scores = pr.pagerank()
    assert abs(sum(scores.values()) - 1.0) < 1e-9
    for node, want in {0: 0.17360, 1: 0.33262, 2: 0.32023, 3: 0.17360}.items():
        assert abs(scores[node] - want) < 1e-4

    roads = grafion.Graph(directed=False)
    for _ in range(4):
        roads.add_node(["Node"])
    for a, b, w in [(0, 1, 7), (0, 2, 9), (1, 3, 10), (2, 3, 2)]:
        roads.add_edge(a, b, "ROAD", {"weight": w})
    assert roads.dijkstra(0, 3, "weight") == ([0, 2, 3], 11.0)
    assert roads.connected_components() == [{0, 1, 2, 3}]

    ring = roads.circular_layout()
    assert math.isclose(ring[1][1], 1.0) and abs(ring[1][0]) < 1e-12
    assert roads.spring_layout(30, 7) == roads.spring_layout(30, 7)

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "g.csv")
        g.export_csv(path, ";", True)
        assert grafion.Graph.import_csv(path, ";", True) == g
    assert grafion.Graph.from_json(g.to_json()) == g

    other = grafion.Graph()
    other.add_node(["Person"], {"name": "Alice", "age": 30})
    assert g.union(other).node_count() >= 2
    print("smoke ok")


if __name__ == "__main__":
    main()
