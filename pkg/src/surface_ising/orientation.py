"""Good orientations of the terminal graph and their variants.

An orientation maps every terminal edge to a direction bit (0 = from the
edge's h0 terminal to its h1 terminal).  A *good* orientation points short
edges from the bigger to the smaller label, makes every lifted inside face
cycle oddly disagreeing (counterclockwise Kasteleyn condition) and does the
same for the pocket face of each outside edge.

Construction: orient short edges by labels, seed inside long edges from low
to high terminal index, then repair inside-face parities along a spanning
forest of the face-adjacency graph (flipping a long edge toggles exactly the
faces on its two sides; everything else drains into the absorbing outer
node).  Finally each outside edge's direction is forced uniquely by its own
pocket, which contains no other outside edge.
"""

from __future__ import annotations

from .homology import QuadraticEnhancement, QuadraticForm, vec_dot
from .terminal import LONG, SHORT, FaceCycle, TerminalGraph


def n_disagree(K: dict, cycle: FaceCycle) -> int:
    """Number of cycle darts whose traversal direction disagrees with K."""
    return sum(1 for tid, d in cycle.darts if K[tid] != d)


def check_good(gt: TerminalGraph, K: dict):
    """Empty list if K is good, else one message per violated condition."""
    bad = []
    for t in gt.tedges:
        if t.kind == SHORT:
            # labels (k, l) with k < l are stored as (h0, h1): big -> small
            # means direction 1.
            if K[t.id] != 1:
                bad.append(f"short edge {t.id} at vertex {t.vertex} not big->small")
    for i, cycle in enumerate(gt.inside_face_cycles()):
        if n_disagree(K, cycle) % 2 == 0:
            bad.append(f"inside face {i} has even disagreement")
    for gedge in gt.outside_gedges:
        cycle = gt.outside_face_cycle(gedge)
        if n_disagree(K, cycle) % 2 == 0:
            bad.append(f"outside face of edge {gedge} has even disagreement")
    return bad


def construct_good(gt: TerminalGraph, seed_flip: bool = False) -> dict:
    """Build a good orientation; ``seed_flip`` inverts the arbitrary initial
    directions of inside long edges (the repair step corrects any seed).

    After the face conditions are set, every fundamental alternating cycle is
    checked against the crossing-parity target; on drawings where removing
    the other outside edges strands part of the graph inside a pocket, the
    face conditions under-determine the orientation and the cycle repair
    flips the offending non-tree edges (the face checker may then report the
    degenerate pockets, but the matching-sign law is what the Pfaffian
    formulas need)."""
    K = {}
    outside = set(gt.outside_gedges)
    for t in gt.tedges:
        if t.kind == SHORT:
            K[t.id] = 1  # big label -> small label
        elif t.gedge in outside:
            K[t.id] = 0  # decided last
        else:
            i0, i1 = gt.endpoints_index(t.id)
            K[t.id] = (0 if i0 < i1 else 1) ^ (1 if seed_flip else 0)

    cycles = gt.inside_face_cycles()
    _fix_inside_parities(gt, K, cycles)

    for gedge in sorted(outside):
        cycle = gt.outside_face_cycle(gedge)
        tid = gt.long_of_gedge[gedge]
        arc = sum(1 for t, d in cycle.darts if t != tid and K[t] != d)
        # the edge is traversed with direction 0 in its own pocket
        K[tid] = 1 if arc % 2 == 0 else 0

    repaired = fundamental_sign_repair(gt, K)
    if not repaired:
        leftovers = check_good(gt, K)
        if leftovers:
            raise AssertionError(f"constructed orientation is not good: {leftovers}")
    if any(d for _c, d in fundamental_cycle_defects(gt, K)):
        raise AssertionError("cycle repair failed to reach the sign law")
    return K


# ---------------------------------------------------------------------------
# alternating-cycle conditions (the sign law, cycle by cycle)


def alternating_lift(gt: TerminalGraph, edge_sequence):
    """Lift a closed trail of source edges (as (edge, from_half) steps) to an
    alternating cycle: (darts, long tedge ids, short tedge ids)."""
    darts = []
    longs = []
    shorts = []
    n = len(edge_sequence)
    for idx, (eid, from_half) in enumerate(edge_sequence):
        tid = gt.long_of_gedge[eid]
        t = gt.tedges[tid]
        darts.append((tid, 0 if from_half == t.h0 else 1))
        longs.append(tid)
        to_half = t.h1 if from_half == t.h0 else t.h0
        next_eid, next_from = edge_sequence[(idx + 1) % n]
        shorts.append(_short_between(gt, to_half, next_from))
        nt = gt.tedges[shorts[-1]]
        darts.append((shorts[-1], 0 if to_half == nt.h0 else 1))
    return darts, longs, shorts


def _short_between(gt, h1, h2):
    v = gt.vertex_of[h1]
    if gt.vertex_of[h2] != v or h1 == h2:
        raise ValueError("not consecutive at a vertex")
    k, l = sorted((gt.label_of[h1], gt.label_of[h2]))
    for tid in gt.shorts_by_vertex[v]:
        if gt.tedges[tid].labels == (k, l):
            return tid
    raise AssertionError("short edge missing")


def cycle_sign_target(gt: TerminalGraph, longs, shorts) -> int:
    """Parity tau(C) that n^K(C) + 1 must equal for the sign law: chord
    crossings of the lift's shorts, self-crossing and twist terms of its long
    edges, and their pairings against the standard dimer and each other."""
    from .homology import pairing

    sig = gt.graph.signature
    tau = 0
    by_vertex = {}
    for s in shorts:
        by_vertex.setdefault(gt.tedges[s].vertex, []).append(s)
    for group in by_vertex.values():
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                tau ^= gt.chord_cross(group[i], group[j])
    d0_class = 0
    for t in gt.tedges:
        if t.kind == LONG:
            d0_class ^= t.cls
    total_class = 0
    for tid in longs:
        t = gt.tedges[tid]
        tau ^= gt.edge_self_parity(tid)
        tau ^= pairing(sig, t.cls, t.cls)
        total_class ^= t.cls
    tau ^= pairing(sig, total_class, d0_class)
    for i in range(len(longs)):
        ci = gt.tedges[longs[i]].cls
        for j in range(i + 1, len(longs)):
            tau ^= pairing(sig, ci, gt.tedges[longs[j]].cls)
    return tau


def fundamental_cycle_defects(gt: TerminalGraph, K: dict):
    """Per fundamental cycle of the source graph: (non-tree edge, defect)."""
    out = []
    for eid, seq in _fundamental_cycles(gt):
        darts, longs, shorts = alternating_lift(gt, seq)
        n = sum(1 for tid, d in darts if K[tid] != d)
        tau = cycle_sign_target(gt, longs, shorts)
        out.append((eid, (n + 1 + tau) % 2))
    return out


def fundamental_sign_repair(gt: TerminalGraph, K: dict) -> bool:
    repaired = False
    for eid, defect in fundamental_cycle_defects(gt, K):
        if defect:
            K[gt.long_of_gedge[eid]] ^= 1
            repaired = True
    return repaired


def _fundamental_cycles(gt: TerminalGraph):
    """Cycle basis of the source graph as closed edge trails.

    Inside edges are preferred as tree edges so the flippable non-tree edges
    are mostly the outside ones whose faces are the delicate part.
    """
    g = gt.graph
    vertex_of = g.vertex_of_half()
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    tree_adj = {}
    extras = []
    ordered = sorted(g.edges, key=lambda e: (bool(e.crossings), e.id))
    for e in ordered:
        u, v = vertex_of[(e.id, 0)], vertex_of[(e.id, 1)]
        parent.setdefault(u, u), parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru == rv:
            extras.append(e)
        else:
            parent[ru] = rv
            tree_adj.setdefault(u, []).append((v, e.id, 0))
            tree_adj.setdefault(v, []).append((u, e.id, 1))
    cycles = []
    for e in sorted(extras, key=lambda e: e.id):
        u, v = vertex_of[(e.id, 0)], vertex_of[(e.id, 1)]
        seq = [(e.id, (e.id, 0))]
        if u != v:
            for eid, end in _tree_walk(tree_adj, v, u):
                seq.append((eid, (eid, end)))
        cycles.append((e.id, seq))
    return cycles


def _tree_walk(tree_adj, start, goal):
    prev = {start: None}
    stack = [start]
    while stack:
        x = stack.pop()
        if x == goal:
            break
        for y, eid, end in tree_adj.get(x, ()):
            if y not in prev:
                prev[y] = (x, eid, end)
                stack.append(y)
    path = []
    x = goal
    while prev[x] is not None:
        px, eid, end = prev[x]
        path.append((eid, end))
        x = px
    path.reverse()
    return path


def _fix_inside_parities(gt, K, cycles):
    face_of_dart = {}
    for i, cycle in enumerate(cycles):
        for dart in cycle.darts:
            face_of_dart[dart] = i
    outer = -1
    adjacency = {outer: []}
    for i in range(len(cycles)):
        adjacency[i] = []
    outside = set(gt.outside_gedges)
    inside_longs = [
        t.id for t in gt.tedges if t.kind == LONG and t.gedge not in outside
    ]
    for tid in inside_longs:
        f0 = face_of_dart.get((tid, 0), outer)
        f1 = face_of_dart.get((tid, 1), outer)
        if f0 == f1:
            continue  # flipping toggles the same face twice: useless
        adjacency[f0].append((f1, tid))
        adjacency[f1].append((f0, tid))

    defect = [1 - n_disagree(K, c) % 2 for c in cycles]

    # spanning forest rooted at the absorber
    parent_edge = {}
    order = []
    visited = {outer}
    frontier = [outer]
    while frontier:
        node = frontier.pop()
        for nb, tid in sorted(adjacency[node]):
            if nb in visited:
                continue
            visited.add(nb)
            parent_edge[nb] = tid
            order.append(nb)
            frontier.append(nb)
    unreachable = [i for i in range(len(cycles)) if i not in visited]
    if unreachable:
        raise AssertionError(
            f"inside faces {unreachable} are not reachable through long edges"
        )
    for node in reversed(order):
        if defect[node]:
            tid = parent_edge[node]
            K[tid] ^= 1
            for side in (0, 1):
                f = face_of_dart.get((tid, side), outer)
                if f != outer:
                    defect[f] ^= 1


def variant(gt: TerminalGraph, K0: dict, flips: int) -> dict:
    """Invert K0 on each edge once per crossing with a flipped side pair,
    i.e. on edges whose crossing-parity vector hits ``flips``."""
    K = dict(K0)
    for t in gt.tedges:
        if t.kind == LONG and vec_dot(t.cls, flips):
            K[t.id] ^= 1
    return K


def variant_for_enhancement(
    gt: TerminalGraph, K0: dict, q: QuadraticEnhancement, q_ref: QuadraticEnhancement
) -> dict:
    """Invert K0 on every edge whose class separates q from the reference."""
    K = dict(K0)
    for t in gt.tedges:
        if t.kind == LONG and q.eval(t.cls) != q_ref.eval(t.cls):
            K[t.id] ^= 1
    return K


def variant_for_form(
    gt: TerminalGraph, K0: dict, q: QuadraticForm, q_ref: QuadraticForm
) -> dict:
    K = dict(K0)
    for t in gt.tedges:
        if t.kind == LONG and q.eval(t.cls) != q_ref.eval(t.cls):
            K[t.id] ^= 1
    return K


def serialize(K: dict) -> list:
    return [[tid, d] for tid, d in sorted(K.items())]


def deserialize(data) -> dict:
    return {int(tid): int(d) for tid, d in data}
