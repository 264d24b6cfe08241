"""Surface-embedded weighted graphs with a fixed polygon drawing.

The input model follows the blueprint: the graph is drawn inside the surface
polygon, every edge crossing the polygon sides transversely.  Combinatorially
a drawing is a clockwise rotation system plus, per edge, the ordered list of
side-occurrence crossings, and, per side occurrence, the order of crossing
slots along it.  No coordinates are ever stored; all geometric notions used
downstream (self-intersection parities, face walks) are derived from this
data.

Half-edges are pairs ``(edge_id, end)`` with ``end`` in {0, 1}; end 0 is the
edge's ``u`` side.  Weights are exact ``Fraction`` values (strictly positive)
or symbol names.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from fractions import Fraction

from .homology import SurfaceSignature
from .maps import CombinatorialMap

Half = tuple  # (edge_id, end)

_SYMBOL_RE = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


@dataclass(frozen=True)
class Vertex:
    id: int
    rotation: tuple  # clockwise tuple of half-edges


@dataclass(frozen=True)
class Edge:
    id: int
    weight: object  # Fraction or symbol name
    crossings: tuple = ()  # ((occurrence, slot_id), ...) ordered from end 0


@dataclass(frozen=True)
class EmbeddedGraph:
    signature: SurfaceSignature
    vertices: tuple
    edges: tuple
    perimeter: tuple = ()  # per side occurrence, slot ids in ccw order

    def edge_by_id(self, eid: int) -> Edge:
        try:
            return self._edge_map()[eid]
        except KeyError:
            raise ValueError(f"unknown edge id {eid}") from None

    def _edge_map(self):
        return {e.id: e for e in self.edges}

    def vertex_of_half(self):
        """Map half-edge -> vertex id."""
        out = {}
        for v in self.vertices:
            for h in v.rotation:
                out[tuple(h)] = v.id
        return out

    def slot_sequence(self):
        """All slot ids in ccw perimeter order."""
        return tuple(s for occ in self.perimeter for s in occ)


def is_symbol(w) -> bool:
    return isinstance(w, str)


def parse_weight(text: str):
    text = text.strip()
    if _SYMBOL_RE.match(text):
        return text
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad weight {text!r}: {exc}") from None


def weight_str(w) -> str:
    if is_symbol(w):
        return w
    f = Fraction(w)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def crossing_counts(g: EmbeddedGraph, edge: Edge):
    """Number of crossings of the edge with each side pair."""
    word = g.signature.side_word()
    counts = [0] * g.signature.b1
    for occ, _slot in edge.crossings:
        counts[word[occ][0]] += 1
    for c in counts:
        if c % 2:
            raise ValueError(f"edge {edge.id} has an odd crossing record count")
    return [c // 2 for c in counts]


def crossing_vector(g: EmbeddedGraph, edge: Edge) -> int:
    """Relative homology class of the edge, as a slot bitmask."""
    vec = 0
    for i, c in enumerate(crossing_counts(g, edge)):
        if c % 2:
            vec |= 1 << i
    return vec


def omega_edge(g: EmbeddedGraph, edge: Edge) -> int:
    """Orientation character: crossing parity with side b (Klein) / c (RP^2)."""
    omega = g.signature.omega_bits()
    return 1 if crossing_vector(g, edge) & omega else 0


def self_crossing_parity(g: EmbeddedGraph, edge: Edge) -> int:
    """Parity of the edge's self-intersections outside the polygon.

    Strands through the two interleaved sides of a handle cross once, as do
    strands through the Klein a/b pair; pairs of strands through an
    orientation-reversing side (Klein b, RP^2 c) cross each other once.
    """
    cnt = crossing_counts(g, edge)
    sig = g.signature
    total = 0
    for i in range(sig.genus):
        total += cnt[2 * i] * cnt[2 * i + 1]
    g2 = 2 * sig.genus
    if sig.kind == "klein":
        total += cnt[g2] * cnt[g2 + 1]
        total += cnt[g2 + 1] * (cnt[g2 + 1] - 1) // 2
    elif sig.kind == "rp2":
        total += cnt[g2] * (cnt[g2] - 1) // 2
    return total % 2


def is_normalized(g: EmbeddedGraph) -> bool:
    return all(len(e.crossings) <= 2 for e in g.edges)


# ---------------------------------------------------------------------------
# validation


def validate(g: EmbeddedGraph):
    """Check all drawing invariants; returns a list of violation strings.

    Structural checks run always; the face/Euler checks of the plane drawing
    need a normalized graph (edges crossing at most one side pair), because
    a multi-crossing edge leaves floating arcs the combinatorial data cannot
    place.
    """
    issues = []
    issues += _validate_structure(g)
    if issues:
        return issues
    issues += _validate_crossings(g)
    if not issues and is_normalized(g):
        gmap = build_graph_map(g)
        issues += gmap.euler_violations()
        issues += _validate_outer_walk(g, gmap)
    return issues


def _validate_structure(g: EmbeddedGraph):
    issues = []
    vid_seen = set()
    for v in g.vertices:
        if v.id in vid_seen:
            issues.append(f"DuplicateVertexId: {v.id}")
        vid_seen.add(v.id)
    eid_seen = set()
    for e in g.edges:
        if e.id in eid_seen:
            issues.append(f"DuplicateEdgeId: {e.id}")
        eid_seen.add(e.id)
        if not is_symbol(e.weight):
            if Fraction(e.weight) <= 0:
                issues.append(f"NonPositiveWeight: edge {e.id}")
        elif not _SYMBOL_RE.match(e.weight):
            issues.append(f"BadSymbolWeight: edge {e.id} weight {e.weight!r}")
    expected = {(e.id, end) for e in g.edges for end in (0, 1)}
    seen = {}
    for v in g.vertices:
        for h in v.rotation:
            h = tuple(h)
            if h in seen:
                issues.append(f"DuplicateHalfEdge: {h} in vertices {seen[h]} and {v.id}")
            seen[h] = v.id
            if h not in expected:
                issues.append(f"UnknownHalfEdge: {h} in vertex {v.id}")
    for h in expected:
        if h not in seen:
            issues.append(f"MissingHalfEdge: {h}")
    return issues


def _validate_crossings(g: EmbeddedGraph):
    issues = []
    word = g.signature.side_word()
    if len(g.perimeter) != len(word):
        issues.append(
            f"PerimeterOccurrenceCount: got {len(g.perimeter)}, word has {len(word)}"
        )
        return issues
    slot_owner = {}
    for occ, slots in enumerate(g.perimeter):
        for s in slots:
            if s in slot_owner:
                issues.append(f"DuplicateSlot: {s}")
            slot_owner[s] = occ
    # equal slot counts on identified occurrences
    for pair in range(g.signature.b1):
        o1, o2 = g.signature.pair_occurrences(pair)
        if len(g.perimeter[o1]) != len(g.perimeter[o2]):
            issues.append(
                f"SlotPairingMismatch: pair {g.signature.pair_names()[pair]} has "
                f"{len(g.perimeter[o1])} vs {len(g.perimeter[o2])} slots"
            )
    used = set()
    for e in g.edges:
        if len(e.crossings) % 2:
            issues.append(f"OddCrossingRecords: edge {e.id}")
            continue
        for (occ, slot) in e.crossings:
            if occ >= len(g.perimeter) or slot not in g.perimeter[occ]:
                issues.append(f"UnknownSlot: edge {e.id} record ({occ}, {slot})")
                return issues
            if slot in used:
                issues.append(f"SlotReused: edge {e.id} slot {slot}")
            used.add(slot)
        for k in range(0, len(e.crossings), 2):
            issues += _check_pairing(g, e, e.crossings[k], e.crossings[k + 1])
    for occ, slots in enumerate(g.perimeter):
        for s in slots:
            if s not in used:
                issues.append(f"UnusedSlot: {s} on occurrence {occ}")
    return issues


def _check_pairing(g, edge, rec1, rec2):
    sig = g.signature
    word = sig.side_word()
    (occ1, s1), (occ2, s2) = rec1, rec2
    p1, p2 = word[occ1][0], word[occ2][0]
    if p1 != p2 or occ1 == occ2:
        return [
            f"SlotPairingMismatch: edge {edge.id} records ({occ1},{s1}) ({occ2},{s2})"
        ]
    i1 = g.perimeter[occ1].index(s1)
    i2 = g.perimeter[occ2].index(s2)
    n = len(g.perimeter[occ1])
    if sig.pair_order_reversing(p1):
        ok = i1 + i2 == n - 1
    else:
        ok = i1 == i2
    if not ok:
        return [
            f"SlotPairingMismatch: edge {edge.id} slots {s1}, {s2} are not identified"
        ]
    return []


# ---------------------------------------------------------------------------
# the plane map of the drawing (graph level)


def build_graph_map(g: EmbeddedGraph) -> CombinatorialMap:
    """Plane map of the inside drawing plus perimeter ring.

    Darts: ``('h', e, end)`` traverses edge e from its ``end`` half (inside
    edges only); ``('s', e, end)``/``('sr', e, end)`` are the stub of an
    outside edge from its ``end`` half to the matching slot vertex and back;
    ``('p', k)``/``('pr', k)`` run between cyclically consecutive slots.
    """
    alpha, cw_next, tail = {}, {}, {}
    vertex_of = g.vertex_of_half()
    outside = {e.id: e for e in g.edges if e.crossings}
    for e in g.edges:
        if e.id in outside:
            for end in (0, 1):
                alpha[("s", e.id, end)] = ("sr", e.id, end)
                alpha[("sr", e.id, end)] = ("s", e.id, end)
        else:
            alpha[("h", e.id, 0)] = ("h", e.id, 1)
            alpha[("h", e.id, 1)] = ("h", e.id, 0)
    for v in g.vertices:
        darts = []
        for h in v.rotation:
            eid, end = h
            darts.append(("s", eid, end) if eid in outside else ("h", eid, end))
        for i, d in enumerate(darts):
            cw_next[d] = darts[(i + 1) % len(darts)]
            tail[d] = ("v", v.id)
    _wire_perimeter(g, alpha, cw_next, tail, outside)
    return CombinatorialMap(alpha, cw_next, tail)


def _wire_perimeter(g, alpha, cw_next, tail, outside):
    slots = g.slot_sequence()
    if not slots:
        return
    stub_at_slot = {}
    for e in outside.values():
        # normalized edges: record 0 leaves end 0, record 1 returns to end 1
        for k, (_occ, slot) in enumerate(e.crossings):
            end = 0 if k == 0 else 1
            stub_at_slot[slot] = ("sr", e.id, end)
    n = len(slots)
    for k in range(n):
        alpha[("p", k)] = ("pr", k)
        alpha[("pr", k)] = ("p", k)
    for k, slot in enumerate(slots):
        sv = ("slot", slot)
        stub = stub_at_slot.get(slot)
        fwd = ("p", k)  # toward the ccw-next slot
        back = ("pr", (k - 1) % n)
        order = ([stub] if stub else []) + [fwd, back]
        for i, d in enumerate(order):
            cw_next[d] = order[(i + 1) % len(order)]
            tail[d] = sv


def _validate_outer_walk(g: EmbeddedGraph, gmap: CombinatorialMap):
    """The pocket walk leaving an outside edge's first stub must reach its
    second stub by following the perimeter counterclockwise (with all other
    stubs ignored); otherwise the slot data does not close up into a drawing.
    """
    issues = []
    outside = [e for e in g.edges if e.crossings]
    for e in outside:
        skip = {
            ("s", o.id, end)
            for o in outside
            if o.id != e.id
            for end in (0, 1)
        } | {
            ("sr", o.id, end)
            for o in outside
            if o.id != e.id
            for end in (0, 1)
        }
        orbit = gmap.trace_face(("s", e.id, 0), skip)
        if ("sr", e.id, 1) not in orbit:
            issues.append(f"OuterWalkBroken: edge {e.id}")
    return issues


# ---------------------------------------------------------------------------
# normalization


def normalize(g: EmbeddedGraph) -> EmbeddedGraph:
    """Subdivide every multi-crossing edge so each edge crosses at most one
    side pair once.  Degree-2 subdivision vertices force both of their edges
    into or out of an even subgraph together, so the partition function is
    unchanged when the original weight rides on the first piece and the rest
    get weight 1."""
    if is_normalized(g):
        return g
    next_vid = max((v.id for v in g.vertices), default=-1) + 1
    next_eid = max(e.id for e in g.edges) + 1
    vertices = {v.id: list(v.rotation) for v in g.vertices}
    new_edges = []
    for e in g.edges:
        k = len(e.crossings) // 2
        if k <= 1:
            new_edges.append(e)
            continue
        piece_ids = [e.id] + [next_eid + i for i in range(k - 1)]
        next_eid += k - 1
        # splice the path into the old endpoints' rotations first, then add
        # the fresh chain vertices (which legitimately carry inner halves)
        for vid, rot in vertices.items():
            vertices[vid] = [
                (piece_ids[-1], 1) if tuple(h) == (e.id, 1) else tuple(h)
                for h in rot
            ]
        for i in range(k - 1):
            vertices[next_vid + i] = [(piece_ids[i], 1), (piece_ids[i + 1], 0)]
        for i in range(k):
            new_edges.append(
                Edge(
                    id=piece_ids[i],
                    weight=e.weight if i == 0 else Fraction(1),
                    crossings=tuple(e.crossings[2 * i : 2 * i + 2]),
                )
            )
        next_vid += k - 1
    vs = tuple(
        Vertex(vid, tuple(rot)) for vid, rot in sorted(vertices.items())
    )
    return replace(g, vertices=vs, edges=tuple(sorted(new_edges, key=lambda e: e.id)))


def connected_components(g: EmbeddedGraph):
    """Split into edge-disjoint connected pieces (isolated vertices dropped)."""
    vertex_of = g.vertex_of_half()
    parent = {v.id: v.id for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        a, b = find(vertex_of[(e.id, 0)]), find(vertex_of[(e.id, 1)])
        if a != b:
            parent[a] = b
    groups = {}
    for e in g.edges:
        groups.setdefault(find(vertex_of[(e.id, 0)]), []).append(e)
    comps = []
    for root, edges in sorted(groups.items()):
        vids = {vertex_of[(e.id, end)] for e in edges for end in (0, 1)}
        vs = tuple(v for v in g.vertices if v.id in vids)
        comps.append(replace(g, vertices=vs, edges=tuple(edges)))
    return comps


# ---------------------------------------------------------------------------
# JSON interchange


def to_json_dict(g: EmbeddedGraph) -> dict:
    vertex_of = g.vertex_of_half()
    return {
        "schema": 1,
        "surface": {"kind": g.signature.kind, "genus": g.signature.genus},
        "vertices": [
            {"id": v.id, "rotation": [list(h) for h in v.rotation]}
            for v in g.vertices
        ],
        "edges": [
            {
                "id": e.id,
                "u": vertex_of[(e.id, 0)],
                "v": vertex_of[(e.id, 1)],
                "weight": weight_str(e.weight),
                "crossings": [list(c) for c in e.crossings],
            }
            for e in g.edges
        ],
        "perimeter": [list(occ) for occ in g.perimeter],
    }


def from_json_dict(data: dict) -> EmbeddedGraph:
    sig = SurfaceSignature(data["surface"]["kind"], data["surface"]["genus"])
    vertices = tuple(
        Vertex(v["id"], tuple(tuple(h) for h in v["rotation"]))
        for v in data["vertices"]
    )
    edges = tuple(
        Edge(
            e["id"],
            parse_weight(str(e["weight"])),
            tuple(tuple(c) for c in e.get("crossings", [])),
        )
        for e in data["edges"]
    )
    perimeter = tuple(tuple(occ) for occ in data.get("perimeter", []))
    g = EmbeddedGraph(sig, vertices, edges, perimeter)
    vertex_of = g.vertex_of_half()
    for e in data["edges"]:
        for key, end in (("u", 0), ("v", 1)):
            if key in e and vertex_of.get((e["id"], end)) != e[key]:
                raise ValueError(
                    f"edge {e['id']}: endpoint {key}={e[key]} disagrees with rotations"
                )
    return g


def dump_json(g: EmbeddedGraph) -> str:
    return json.dumps(to_json_dict(g), indent=2, sort_keys=True) + "\n"


def load_json(text: str) -> EmbeddedGraph:
    return from_json_dict(json.loads(text))
