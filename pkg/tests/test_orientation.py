import random
from fractions import Fraction

import pytest

from surface_ising.embedding import Edge, EmbeddedGraph, Vertex, parse_weight, validate
from surface_ising.generators import (
    flower,
    klein_lattice,
    random_instance,
    rp2_wheel,
    torus_lattice,
)
from surface_ising.homology import (
    SurfaceSignature,
    dual_flip_vector,
    reference_enhancement,
)
from surface_ising.orientation import (
    alternating_lift,
    check_good,
    construct_good,
    cycle_sign_target,
    deserialize,
    fundamental_cycle_defects,
    n_disagree,
    serialize,
    variant,
    variant_for_enhancement,
)
from surface_ising.pfaffian import matching_sign
from surface_ising.terminal import LONG, SHORT, build_terminal


def test_construct_good_reference_instances():
    for g in [torus_lattice(1, 1), torus_lattice(2, 2), klein_lattice(1, 1),
              klein_lattice(2, 2), rp2_wheel(4, 2), rp2_wheel(6, 3)]:
        gt = build_terminal(g)
        K = construct_good(gt)
        assert check_good(gt, K) == []
        assert all((gt.tedges[t].kind != SHORT or K[t] == 1) for t in K)


def test_construct_good_matches_reference_matrix_orientation():
    # on the 1x1 torus the construction reproduces the documented terminal
    # orientation: both long edges run from their end-0 half, shorts big->small
    gt = build_terminal(torus_lattice(1, 1))
    K = construct_good(gt)
    for t in gt.tedges:
        assert K[t.id] == (0 if t.kind == LONG else 1)


def test_trivial_two_vertex_graph():
    sig = SurfaceSignature("orientable", 0)
    g = EmbeddedGraph(
        sig,
        (Vertex(0, ((0, 0),)), Vertex(1, ((0, 1),))),
        (Edge(0, Fraction(1)),),
        (),
    )
    gt = build_terminal(g)
    K = construct_good(gt)
    assert check_good(gt, K) == []


def test_check_good_reports_flipped_edge():
    gt = build_terminal(torus_lattice(2, 2))
    K = construct_good(gt)
    inside_longs = [
        t.id
        for t in gt.tedges
        if t.kind == LONG and not gt.graph.edge_by_id(t.gedge).crossings
    ]
    tid = inside_longs[0]
    K[tid] ^= 1
    bad = check_good(gt, K)
    assert 1 <= len(bad) <= 2
    K[tid] ^= 1
    assert check_good(gt, K) == []


def test_variant_flips_matching_edges():
    gt = build_terminal(torus_lattice(1, 1))
    K = construct_good(gt)
    a_edge = next(t for t in gt.tedges if t.kind == LONG and t.cls == 0b01)
    b_edge = next(t for t in gt.tedges if t.kind == LONG and t.cls == 0b10)
    K10 = variant(gt, K, 0b01)
    assert K10[a_edge.id] != K[a_edge.id]
    assert K10[b_edge.id] == K[b_edge.id]
    assert all(K10[t.id] == K[t.id] for t in gt.tedges if t.kind == SHORT)
    assert variant(gt, K, 0) == K


def test_enhancement_variant_equals_homology_variant():
    for g in [torus_lattice(1, 1), klein_lattice(1, 1), rp2_wheel(4, 1)]:
        gt = build_terminal(g)
        K = construct_good(gt)
        sig = g.signature
        q_ref = reference_enhancement(sig)
        for d in range(1 << sig.b1):
            cov = dual_flip_vector(sig, d)
            q = q_ref.plus_twice_covector(cov)
            # q(x) - q_ref(x) = 2 d.x, so the enhancement variant flips the
            # same edges as the flip vector M d
            assert variant_for_enhancement(gt, K, q, q_ref) == variant(gt, K, cov)


def sign_law_holds(gt, K):
    signs = set()
    for D in gt.perfect_matchings():
        signs.add(matching_sign(gt, K, D) * (1 if gt.t_parity(D) == 0 else -1))
    return len(signs) == 1


def test_sign_law_reference_instances():
    for g in [torus_lattice(1, 1), torus_lattice(2, 1), torus_lattice(1, 2),
              klein_lattice(1, 1), klein_lattice(2, 1), klein_lattice(1, 2),
              rp2_wheel(4, 2), flower(SurfaceSignature("rp2", 0), [0, 0, 0]),
              flower(SurfaceSignature("orientable", 2), [0, 1, 2, 3])]:
        gt = build_terminal(g)
        assert gt.size <= 12
        assert sign_law_holds(gt, construct_good(gt))


def test_sign_law_random_instances():
    rng = random.Random(31)
    sigs = [SurfaceSignature("orientable", 1), SurfaceSignature("klein", 0),
            SurfaceSignature("rp2", 0), SurfaceSignature("rp2", 1)]
    from surface_ising.partition import prepare

    checked = 0
    for trial in range(40):
        g = random_instance(sigs[trial % 4], rng, max_edges=5)
        _g, pieces = prepare(g)
        for _c, gt, K0 in pieces:
            if gt.size <= 10:
                assert sign_law_holds(gt, K0)
                checked += 1
    assert checked >= 20


def test_pair_relation_permutation_signs():
    # eps^K(D0) eps^K(D) = (-1)^(sum over cycles of D Delta D0 of n^K(C)+1)
    for g in [torus_lattice(1, 1), klein_lattice(1, 1), rp2_wheel(4, 2)]:
        gt = build_terminal(g)
        K = construct_good(gt)
        d0 = tuple(sorted(gt.standard_dimer))
        e0 = matching_sign(gt, K, d0)
        for D in gt.perfect_matchings():
            parity = 0
            for darts in _alternating_cycles(gt, D):
                n = sum(1 for tid, dd in darts if K[tid] != dd)
                parity ^= (n + 1) % 2
            assert e0 * matching_sign(gt, K, D) == (1 if parity == 0 else -1)


def _alternating_cycles(gt, D):
    """Cycles of D symmetric-difference D0, as dart lists."""
    sym = set(D) ^ set(gt.standard_dimer)
    incident = {}
    for tid in sym:
        t = gt.tedges[tid]
        incident.setdefault(t.h0, []).append(tid)
        incident.setdefault(t.h1, []).append(tid)
    seen = set()
    cycles = []
    for start in sorted(sym):
        if start in seen:
            continue
        darts = []
        tid = start
        t = gt.tedges[tid]
        here = t.h0
        while True:
            seen.add(tid)
            t = gt.tedges[tid]
            nxt = t.h1 if here == t.h0 else t.h0
            darts.append((tid, 0 if here == t.h0 else 1))
            here = nxt
            options = [x for x in incident[here] if x != tid]
            assert len(options) == 1
            tid = options[0]
            if tid == start and here in (gt.tedges[start].h0,):
                break
            if tid == start:
                break
        cycles.append(darts)
    return cycles


def test_cycle_identity_crossing_free_instances():
    # sum over cycles of (n^K(C)+1) = t(D) + t(D0) on instances whose discs
    # have no crossing chords (max degree <= 3)
    theta = _theta_graph("orientable", 1, 0)
    cubic = [rp2_wheel(4, 2), rp2_wheel(6, 3), theta,
             _theta_graph("klein", 0, 1), _theta_graph("rp2", 0, 0)]
    for g in cubic:
        assert validate(g) == []
        gt = build_terminal(g)
        assert max(gt.degree(v.id) for v in g.vertices) <= 3
        K = construct_good(gt)
        d0 = tuple(sorted(gt.standard_dimer))
        t0 = gt.t_parity(d0)
        for D in gt.perfect_matchings():
            total = 0
            for darts in _alternating_cycles(gt, D):
                n = sum(1 for tid, dd in darts if K[tid] != dd)
                total ^= (n + 1) % 2
            assert total == (gt.t_parity(D) ^ t0)


def _theta_graph(kind, genus, pair):
    """Two vertices, two parallel inside edges, one edge through a side pair."""
    sig = SurfaceSignature(kind, genus)
    o1, o2 = sig.pair_occurrences(pair)
    per = [[] for _ in sig.side_word()]
    per[o1], per[o2] = [0], [1]
    edges = (
        Edge(0, parse_weight("x")),
        Edge(1, parse_weight("y")),
        Edge(2, parse_weight("z"), ((o2, 1), (o1, 0))),
    )
    # u on the left: e0 upper, e1 lower, e2 exits left; v mirrored
    u = Vertex(0, ((0, 0), (1, 0), (2, 0)))
    v = Vertex(1, ((2, 1), (1, 1), (0, 1)))
    return EmbeddedGraph(sig, (u, v), edges, tuple(tuple(p) for p in per))


def test_restriction_remark_corner_faces():
    # the all-short disc faces created by dropping crossing chords always have
    # exactly one disagreement under the label orientation
    for g in [torus_lattice(1, 1), torus_lattice(2, 2), rp2_wheel(4, 2)]:
        gt = build_terminal(g)
        K = construct_good(gt)
        cmap = gt.face_map()
        found = 0
        for orbit in cmap.face_orbits():
            if any(d[0] != "t" for d in orbit):
                continue
            if any(gt.tedges[d[1]].kind == LONG for d in orbit):
                continue
            n = sum(1 for d in orbit if K[d[1]] != d[2])
            assert n == 1
            found += 1
        assert found >= 1


def test_fundamental_cycle_targets_on_reference_instances():
    # the face-built orientations already satisfy every fundamental-cycle
    # sign condition (the repair is a no-op on the paper's drawings)
    for g in [torus_lattice(1, 1), torus_lattice(2, 2), klein_lattice(2, 2),
              rp2_wheel(6, 3)]:
        gt = build_terminal(g)
        K = construct_good(gt)
        assert all(d == 0 for _e, d in fundamental_cycle_defects(gt, K))


def test_serialize_roundtrip():
    gt = build_terminal(torus_lattice(1, 1))
    K = construct_good(gt)
    assert deserialize(serialize(K)) == K
