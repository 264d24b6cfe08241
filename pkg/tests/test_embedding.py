from fractions import Fraction

import pytest

from surface_ising.embedding import (
    Edge,
    EmbeddedGraph,
    Vertex,
    crossing_vector,
    dump_json,
    is_normalized,
    load_json,
    normalize,
    omega_edge,
    parse_weight,
    validate,
)
from surface_ising.generators import klein_lattice, planar_grid, torus_lattice
from surface_ising.homology import SurfaceSignature
from surface_ising.partition import z_bruteforce, z_per_class


def multi_crossing_torus(weight="x"):
    """One vertex, one loop crossing pair a then pair b (needs normalization),
    plus nothing else.  Word ccw: right=a, top=b, left=a^-1, bottom=b^-1."""
    sig = SurfaceSignature("orientable", 1)
    edge = Edge(0, parse_weight(weight), ((0, 0), (2, 1), (1, 2), (3, 3)))
    v = Vertex(0, ((0, 0), (0, 1)))
    perimeter = ((0,), (2,), (1,), (3,))
    return EmbeddedGraph(sig, (v,), (edge,), perimeter)


def test_generator_instances_validate():
    assert validate(torus_lattice(1, 1)) == []
    assert validate(torus_lattice(3, 2)) == []
    assert validate(klein_lattice(2, 3)) == []
    assert validate(planar_grid(3, 3)) == []


def test_validate_missing_half_edge():
    g = torus_lattice(1, 1)
    v = g.vertices[0]
    broken = EmbeddedGraph(
        g.signature, (Vertex(v.id, v.rotation[:-1]),), g.edges, g.perimeter
    )
    assert any("MissingHalfEdge" in msg for msg in validate(broken))


def test_validate_slot_pairing_mismatch():
    g = torus_lattice(2, 1)
    # swap the two slots on the top occurrence: pairing with the bottom breaks
    per = [list(occ) for occ in g.perimeter]
    assert len(per[1]) == 2
    per[1] = per[1][::-1]
    broken = EmbeddedGraph(g.signature, g.vertices, g.edges, tuple(tuple(o) for o in per))
    assert any("SlotPairingMismatch" in m for m in validate(broken))


def test_validate_slot_count_mismatch():
    g = torus_lattice(2, 1)
    per = [list(occ) for occ in g.perimeter]
    per[1] = per[1] + [999]
    broken = EmbeddedGraph(g.signature, g.vertices, g.edges, tuple(tuple(o) for o in per))
    assert any("SlotPairingMismatch" in m for m in validate(broken))


def test_validate_nonpositive_weight():
    g = planar_grid(2, 1, 0, 1)
    assert any("NonPositiveWeight" in m for m in validate(g))


def test_crossing_vectors_and_omega():
    g = torus_lattice(1, 1)
    h, v = g.edges[0], g.edges[1]
    assert crossing_vector(g, h) == 0b01  # horizontal loop crosses pair a
    assert crossing_vector(g, v) == 0b10
    assert omega_edge(g, h) == 0
    gp = planar_grid(2, 2)
    assert all(crossing_vector(gp, e) == 0 and omega_edge(gp, e) == 0 for e in gp.edges)
    gk = klein_lattice(1, 1)
    horiz = gk.edges[0]
    assert omega_edge(gk, horiz) == 1  # crosses the reversing pair b
    assert omega_edge(gk, gk.edges[1]) == 0


def test_normalize_splits_multi_crossing():
    g = multi_crossing_torus()
    assert validate(g) == []
    assert not is_normalized(g)
    gn = normalize(g)
    assert validate(gn) == []
    assert is_normalized(gn)
    assert len(gn.edges) == 2
    weights = sorted(str(e.weight) for e in gn.edges)
    assert weights == ["1", "x"]
    classes = sorted(crossing_vector(gn, e) for e in gn.edges)
    assert classes == [0b01, 0b10]
    # idempotent
    assert normalize(gn) is gn


def test_normalize_preserves_partition_function():
    g = multi_crossing_torus("5/7")
    gn = normalize(g)
    assert z_bruteforce(g).value == z_bruteforce(gn).value


def test_normalize_three_edge_multi_crossing():
    # vertex with a double-crossing loop (a then b) plus two single-crossing
    # loops, laid out so the middle arc hugs the upper-left corner
    sig = SurfaceSignature("orientable", 1)
    e0 = Edge(0, parse_weight("x"), ((0, 1), (2, 4), (1, 3), (3, 6)))
    e1 = Edge(1, parse_weight("y"), ((0, 0), (2, 5)))
    e2 = Edge(2, parse_weight("z"), ((1, 2), (3, 7)))
    v = Vertex(0, ((2, 0), (0, 0), (1, 0), (2, 1), (0, 1), (1, 1)))
    perimeter = ((0, 1), (2, 3), (4, 5), (6, 7))
    g = EmbeddedGraph(sig, (v,), (e0, e1, e2), perimeter)
    assert validate(g) == []
    gn = normalize(g)
    assert validate(gn) == []
    assert len(gn.edges) == 4
    assert z_bruteforce(g).value == z_bruteforce(gn).value


def test_even_subgraph_classes_match_hand_labels():
    g = torus_lattice(1, 1)
    per = z_per_class(g)
    assert {c: str(p) for c, p in per.items()} == {0: "1", 1: "x", 2: "y", 3: "x*y"}


def test_json_roundtrip():
    g = klein_lattice(2, 2, "x", "3/4")
    text = dump_json(g)
    g2 = load_json(text)
    assert g2 == g
    assert dump_json(g2) == text


def test_json_endpoint_mismatch():
    import json

    data = json.loads(dump_json(torus_lattice(1, 1)))
    data["edges"][0]["u"] = 99
    with pytest.raises(ValueError):
        from surface_ising.embedding import from_json_dict

        from_json_dict(data)
