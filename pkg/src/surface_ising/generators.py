"""Instance generators: lattice families from the worked examples plus
randomized instances for the oracle-equivalence suites.

Drawing conventions (fixed once, tests pin them):

* torus m x n ("a b a^-1 b^-1", sides ccw right/top/left/bottom): horizontal
  edges wrap through pair a, vertical through pair b.  The 1 x 1 case is the
  single-vertex two-loop graph whose terminal K_4 reproduces the reference
  adjacency matrix.
* klein m x n ("a b a^-1 b", sides ccw bottom/right/top/left): vertical edges
  wrap straight through pair a, horizontal edges wrap through the reversing
  pair b and get the i-twist; row j re-enters at row n-1-j.
* rp2 wheel: m rim vertices on a circle, n <= m/2 diameters leaving rim
  vertex i radially, through the crosscap, into vertex i + m/2.
* planar grid: genus-0 sphere, no crossings at all.

All rotations are clockwise; a vertex's rotation follows descending drawing
angle (up, right, down, left for grid vertices).
"""

from __future__ import annotations

from fractions import Fraction

from .embedding import Edge, EmbeddedGraph, Vertex, parse_weight, validate
from .homology import RP2, SurfaceSignature


def _weight(w):
    if isinstance(w, str):
        return parse_weight(w)
    return Fraction(w)


def torus_lattice(m: int, n: int, wx="x", wy="y") -> EmbeddedGraph:
    if m < 1 or n < 1:
        raise ValueError("lattice dimensions must be >= 1")
    sig = SurfaceSignature("orientable", 1)
    return _grid(sig, m, n, _weight(wx), _weight(wy), klein=False)


def klein_lattice(m: int, n: int, wx="x", wy="y") -> EmbeddedGraph:
    if m < 1 or n < 1:
        raise ValueError("lattice dimensions must be >= 1")
    sig = SurfaceSignature("klein", 0)
    return _grid(sig, m, n, _weight(wx), _weight(wy), klein=True)


def planar_grid(m: int, n: int, wx="x", wy="y") -> EmbeddedGraph:
    if m < 1 or n < 1:
        raise ValueError("grid dimensions must be >= 1")
    sig = SurfaceSignature("orientable", 0)
    wx, wy = _weight(wx), _weight(wy)
    vid = lambda i, j: j * m + i
    edges = []
    h_id = {}
    v_id = {}
    eid = 0
    for j in range(n):
        for i in range(m - 1):
            h_id[(i, j)] = eid
            edges.append(Edge(eid, wx))
            eid += 1
    for j in range(n - 1):
        for i in range(m):
            v_id[(i, j)] = eid
            edges.append(Edge(eid, wy))
            eid += 1
    vertices = []
    for j in range(n):
        for i in range(m):
            rot = []
            if (i, j) in v_id:
                rot.append((v_id[(i, j)], 0))  # up
            if (i, j) in h_id:
                rot.append((h_id[(i, j)], 0))  # right
            if (i, j - 1) in v_id:
                rot.append((v_id[(i, j - 1)], 1))  # down
            if (i - 1, j) in h_id:
                rot.append((h_id[(i - 1, j)], 1))  # left
            vertices.append(Vertex(vid(i, j), tuple(rot)))
    return EmbeddedGraph(sig, tuple(vertices), tuple(edges), ())


def _grid(sig, m, n, wx, wy, klein: bool):
    """Shared torus/Klein square-lattice builder."""
    vid = lambda i, j: j * m + i
    h_edge = {}
    v_edge = {}
    edges = []
    eid = 0
    for j in range(n):
        for i in range(m):
            h_edge[(i, j)] = eid
            edges.append([eid, wx, []])
            eid += 1
    for j in range(n):
        for i in range(m):
            v_edge[(i, j)] = eid
            edges.append([eid, wy, []])
            eid += 1

    # slots: ids are assigned along the perimeter in ccw word order
    slot = 0
    if klein:
        # word a b a^-1 b: bottom, right, top, left
        occ_a1 = [v_edge[(i, n - 1)] for i in range(m)]  # bottom, x ascending
        occ_b1 = [h_edge[(m - 1, j)] for j in range(n)]  # right, j ascending
        occ_a2 = [v_edge[(i, n - 1)] for i in reversed(range(m))]  # top
        # left, ccw = heights descending; row j re-enters at height n-1-j,
        # so position k holds the edge leaving row k: order-preserving
        occ_b2 = [h_edge[(m - 1, k)] for k in range(n)]
        occ_edges = [occ_a1, occ_b1, occ_a2, occ_b2]
        exit_occ = {"v": 2, "h": 1}
        enter_occ = {"v": 0, "h": 3}
    else:
        # word a b a^-1 b^-1: right, top, left, bottom
        occ_a1 = [h_edge[(m - 1, j)] for j in range(n)]  # right, j ascending
        occ_b1 = [v_edge[(i, n - 1)] for i in reversed(range(m))]  # top, x descending
        occ_a2 = [h_edge[(m - 1, n - 1 - k)] for k in range(n)]  # left, j descending
        occ_b2 = [v_edge[(i, n - 1)] for i in range(m)]  # bottom, x ascending
        occ_edges = [occ_a1, occ_b1, occ_a2, occ_b2]
        exit_occ = {"h": 0, "v": 1}
        enter_occ = {"h": 2, "v": 3}
    perimeter = []
    slot_of = {}
    for occ_index, occ in enumerate(occ_edges):
        ids = []
        for e in occ:
            slot_of[(occ_index, e)] = slot
            ids.append(slot)
            slot += 1
        perimeter.append(tuple(ids))

    for j in range(n):
        e = h_edge[(m - 1, j)]
        kind_exit, kind_enter = exit_occ["h"], enter_occ["h"]
        edges[e][2] = [
            (kind_exit, slot_of[(kind_exit, e)]),
            (kind_enter, slot_of[(kind_enter, e)]),
        ]
    for i in range(m):
        e = v_edge[(i, n - 1)]
        kind_exit, kind_enter = exit_occ["v"], enter_occ["v"]
        edges[e][2] = [
            (kind_exit, slot_of[(kind_exit, e)]),
            (kind_enter, slot_of[(kind_enter, e)]),
        ]

    def up_half(i, j):
        return (v_edge[(i, j)], 0)

    def down_half(i, j):
        if j > 0:
            return (v_edge[(i, j - 1)], 1)
        return (v_edge[(i, n - 1)], 1)

    def right_half(i, j):
        return (h_edge[(i, j)], 0)

    def left_half(i, j):
        if i > 0:
            return (h_edge[(i - 1, j)], 1)
        if klein:
            return (h_edge[(m - 1, n - 1 - j)], 1)
        return (h_edge[(m - 1, j)], 1)

    vertices = []
    for j in range(n):
        for i in range(m):
            rot = (up_half(i, j), right_half(i, j), down_half(i, j), left_half(i, j))
            vertices.append(Vertex(vid(i, j), rot))
    return EmbeddedGraph(
        sig,
        tuple(vertices),
        tuple(Edge(e[0], e[1], tuple(tuple(c) for c in e[2])) for e in edges),
        tuple(perimeter),
    )


def rp2_wheel(m: int, n: int, w_rim="x", w_diam="y") -> EmbeddedGraph:
    """m rim vertices (even), n antipodal diameters through the crosscap."""
    if m < 2 or m % 2:
        raise ValueError("rim size must be even and >= 2")
    if not 1 <= n <= m // 2:
        raise ValueError("need 1 <= diameters <= m/2")
    sig = SurfaceSignature(RP2, 0)
    w_rim, w_diam = _weight(w_rim), _weight(w_diam)
    edges = []
    rim = {}
    for i in range(m):
        rim[i] = i
        edges.append(Edge(i, w_rim))
    diam = {}
    for i in range(n):
        eid = m + i
        diam[i] = eid
        edges.append(
            Edge(eid, w_diam, ((0, i), (1, n + i)))
        )
    perimeter = (tuple(range(n)), tuple(range(n, 2 * n)))
    vertices = []
    for j in range(m):
        rot = []
        if j in diam:
            rot.append((diam[j], 0))
        if j - m // 2 in diam:
            rot.append((diam[j - m // 2], 1))
        rot.append((rim[(j - 1) % m], 1))  # toward the clockwise neighbor
        rot.append((rim[j], 0))  # toward the counterclockwise neighbor
        vertices.append(Vertex(j, tuple(rot)))
    return EmbeddedGraph(sig, tuple(vertices), tuple(edges), perimeter)


def flower(sig: SurfaceSignature, passes, weights=None) -> EmbeddedGraph:
    """Single-vertex bouquet: one loop per entry of ``passes`` (a list of side
    pair indices, repeats allowed), each crossing its pair once.

    Parallel passes through one pair sit at nested slots; the vertex rotation
    runs clockwise, i.e. through the boundary positions in descending order.
    """
    sig = sig if isinstance(sig, SurfaceSignature) else SurfaceSignature(*sig)
    if weights is None:
        weights = [f"w{k}" for k in range(len(passes))]
    word = sig.side_word()
    occs_of_pair = {p: sig.pair_occurrences(p) for p in range(sig.b1)}
    per_pair = {}
    for k, p in enumerate(passes):
        if not 0 <= p < sig.b1:
            raise ValueError(f"pass {k} names unknown side pair {p}")
        per_pair.setdefault(p, []).append(k)
    slot = 0
    occ_slots = [[] for _ in word]
    records = {}
    for p in sorted(per_pair):
        o1, o2 = occs_of_pair[p]
        group = per_pair[p]
        first = list(group)
        second = list(reversed(group)) if sig.pair_order_reversing(p) else list(group)
        for k in first:
            records.setdefault(k, [None, None])
        for idx, k in enumerate(first):
            records[k][0] = (o1, None, idx)
        for idx, k in enumerate(second):
            records[k][1] = (o2, None, idx)
        occ_slots[o1] = [None] * len(group)
        occ_slots[o2] = [None] * len(group)
    # assign global slot ids in ccw perimeter order
    perimeter = []
    for occ_index in range(len(word)):
        ids = []
        for _ in occ_slots[occ_index]:
            ids.append(slot)
            slot += 1
        perimeter.append(tuple(ids))
    edges = []
    for k, p in enumerate(passes):
        (o1, _n1, i1), (o2, _n2, i2) = records[k]
        edges.append(
            Edge(
                k,
                _weight(weights[k]),
                ((o1, perimeter[o1][i1]), (o2, perimeter[o2][i2])),
            )
        )
    # rotation: halves sorted by descending boundary position of their slot
    position = {}
    for k, p in enumerate(passes):
        (o1, _n1, i1), (o2, _n2, i2) = records[k]
        position[(k, 0)] = (o1, i1)
        position[(k, 1)] = (o2, i2)
    halves = sorted(position, key=lambda h: position[h], reverse=True)
    vertices = (Vertex(0, tuple(halves)),)
    return EmbeddedGraph(sig, vertices, tuple(edges), tuple(perimeter))


# ---------------------------------------------------------------------------
# randomized instances


def subdivide_edge(g: EmbeddedGraph, eid: int) -> EmbeddedGraph:
    """Split an edge in two through a fresh inside vertex (weight rides on
    the first piece, partition function unchanged)."""
    from dataclasses import replace

    e = g.edge_by_id(eid)
    new_eid = max(x.id for x in g.edges) + 1
    new_vid = max((v.id for v in g.vertices), default=-1) + 1
    edges = []
    for x in g.edges:
        if x.id == eid:
            edges.append(Edge(eid, x.weight, x.crossings))
            edges.append(Edge(new_eid, Fraction(1)))
        else:
            edges.append(x)
    vertices = []
    for v in g.vertices:
        rot = tuple(
            (new_eid, 1) if tuple(h) == (eid, 1) else tuple(h) for h in v.rotation
        )
        vertices.append(Vertex(v.id, rot))
    vertices.append(Vertex(new_vid, ((eid, 1), (new_eid, 0))))
    return replace(g, vertices=tuple(vertices), edges=tuple(edges))


def attach_pendant(g: EmbeddedGraph, vid: int, pos: int, weight=Fraction(1)):
    from dataclasses import replace

    new_eid = max((x.id for x in g.edges), default=-1) + 1
    new_vid = max(v.id for v in g.vertices) + 1
    vertices = []
    for v in g.vertices:
        if v.id == vid:
            rot = list(v.rotation)
            pos = pos % (len(rot) + 1)
            rot.insert(pos, (new_eid, 0))
            vertices.append(Vertex(v.id, tuple(rot)))
        else:
            vertices.append(v)
    vertices.append(Vertex(new_vid, ((new_eid, 1),)))
    return replace(
        g, vertices=tuple(vertices), edges=g.edges + (Edge(new_eid, _weight(weight)),)
    )


def add_inner_loop(g: EmbeddedGraph, vid: int, pos: int, weight=Fraction(1)):
    from dataclasses import replace

    new_eid = max((x.id for x in g.edges), default=-1) + 1
    vertices = []
    for v in g.vertices:
        if v.id == vid:
            rot = list(v.rotation)
            pos = pos % (len(rot) + 1)
            rot[pos:pos] = [(new_eid, 0), (new_eid, 1)]
            vertices.append(Vertex(v.id, tuple(rot)))
        else:
            vertices.append(v)
    return replace(
        g, vertices=tuple(vertices), edges=g.edges + (Edge(new_eid, _weight(weight)),)
    )


def delete_edge(g: EmbeddedGraph, eid: int) -> EmbeddedGraph:
    from dataclasses import replace

    e = g.edge_by_id(eid)
    dropped = {slot for _occ, slot in e.crossings}
    vertices = tuple(
        Vertex(v.id, tuple(h for h in v.rotation if tuple(h)[0] != eid))
        for v in g.vertices
    )
    perimeter = tuple(
        tuple(s for s in occ if s not in dropped) for occ in g.perimeter
    )
    return replace(
        g,
        vertices=vertices,
        edges=tuple(x for x in g.edges if x.id != eid),
        perimeter=perimeter,
    )


def random_instance(
    sig: SurfaceSignature,
    rng,
    max_edges: int = 8,
    symbolic: bool = False,
    ops: int = 4,
) -> EmbeddedGraph:
    """A random valid instance: a random bouquet through random side pairs,
    shaped by a few subdivisions, pendants, inner loops and deletions."""
    for _attempt in range(50):
        n_pass = rng.randint(1, min(4, max_edges))
        passes = [rng.randrange(sig.b1)] if sig.b1 else []
        while len(passes) < n_pass and sig.b1:
            passes.append(rng.randrange(sig.b1))
        g = (
            flower(sig, passes, [_rand_weight(rng, symbolic, k) for k in range(len(passes))])
            if sig.b1
            else planar_grid(2, 2, _rand_weight(rng, symbolic, 0), _rand_weight(rng, symbolic, 1))
        )
        for _ in range(rng.randint(0, ops)):
            g = _random_op(g, rng, symbolic)
        if len(g.edges) > max_edges or not g.edges:
            continue
        dim = len(g.edges) - len(
            {v.id for v in g.vertices if v.rotation}
        ) + _component_count(g)
        if dim < 1 or dim > 14:
            continue
        if validate(g):
            continue
        return g
    raise RuntimeError("could not build a random instance")


def _component_count(g):
    from .embedding import connected_components

    return len(connected_components(g))


def _rand_weight(rng, symbolic, k):
    if symbolic and rng.random() < 0.5:
        return f"t{k}"
    return Fraction(rng.randint(1, 4), rng.randint(1, 4))


def _random_op(g, rng, symbolic):
    choice = rng.random()
    eids = [e.id for e in g.edges]
    vids = [v.id for v in g.vertices if v.rotation]
    if choice < 0.35 and eids:
        return subdivide_edge(g, rng.choice(eids))
    if choice < 0.6 and vids:
        v = rng.choice(vids)
        deg = len(next(x for x in g.vertices if x.id == v).rotation)
        return attach_pendant(g, v, rng.randint(0, deg), _rand_weight(rng, symbolic, 91))
    if choice < 0.85 and vids:
        v = rng.choice(vids)
        deg = len(next(x for x in g.vertices if x.id == v).rotation)
        return add_inner_loop(g, v, rng.randint(0, deg), _rand_weight(rng, symbolic, 92))
    if len(eids) > 1:
        return delete_edge(g, rng.choice(eids))
    return g
