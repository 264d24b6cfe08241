"""The terminal graph: complete graphs at vertices, dimers, drawing parities.

Each degree-d vertex of the source graph becomes a K_d whose vertices are the
half-edges at v, labelled 1..d along the stored clockwise rotation.  Edges of
K_d are *short*; original edges survive as *long* edges.  Long edges all
together form the standard dimer configuration D0.

Short edges between rotation-consecutive labels lie on the boundary of the
K_d disc; the remaining chords cross each other inside it, and those chord
crossings are exactly what the t_in parity counts.  Face walks never traverse
chords, so the plane map used for faces keeps only boundary shorts, long
edges (outside ones broken into stubs reaching their perimeter slots) and the
perimeter ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .embedding import (
    EmbeddedGraph,
    crossing_vector,
    is_normalized,
    omega_edge,
    self_crossing_parity,
)
from .homology import pairing
from .maps import CombinatorialMap

SHORT = "short"
LONG = "long"


@dataclass(frozen=True)
class TEdge:
    id: int
    kind: str
    h0: tuple  # tail half-edge (terminal vertex)
    h1: tuple
    gedge: int = -1  # source edge id for long edges
    cls: int = 0  # homology class (slot bitmask), long edges only
    omega: int = 0
    vertex: int = -1  # owning vertex for short edges
    labels: tuple = ()  # (k, l) 1-based labels for short edges


@dataclass(frozen=True)
class FaceCycle:
    kind: str  # 'inside' or 'outside'
    darts: tuple  # ((tedge_id, direction), ...); direction 0 = h0 -> h1
    gedge: int = -1  # the outside edge for kind='outside'


class TerminalGraph:
    def __init__(self, graph: EmbeddedGraph):
        if not is_normalized(graph):
            raise ValueError("build the terminal graph from a normalized drawing")
        self.graph = graph
        self._build_terminals()
        self._build_tedges()
        self._map = None
        self._faces = None

    # -- construction ------------------------------------------------------

    def _build_terminals(self):
        self.label_of = {}
        self.vertex_of = {}
        self.disc = {}
        for v in self.graph.vertices:
            if not v.rotation:
                raise ValueError(f"vertex {v.id} has degree 0; delete it first")
            halves = [tuple(h) for h in v.rotation]
            self.disc[v.id] = halves
            for k, h in enumerate(halves, start=1):
                self.label_of[h] = k
                self.vertex_of[h] = v.id
        self.terminals = sorted(
            self.label_of, key=lambda h: (self.vertex_of[h], self.label_of[h])
        )
        self.index = {h: i for i, h in enumerate(self.terminals)}
        if len(self.terminals) % 2:
            raise AssertionError("terminal vertex count is odd")

    def _build_tedges(self):
        tedges = []
        self.long_of_gedge = {}
        self.weights = {}
        for e in sorted(self.graph.edges, key=lambda e: e.id):
            tid = len(tedges)
            tedges.append(
                TEdge(
                    id=tid,
                    kind=LONG,
                    h0=(e.id, 0),
                    h1=(e.id, 1),
                    gedge=e.id,
                    cls=crossing_vector(self.graph, e),
                    omega=omega_edge(self.graph, e),
                )
            )
            self.long_of_gedge[e.id] = tid
            self.weights[e.id] = e.weight
        self.shorts_by_vertex = {}
        for v in self.graph.vertices:
            halves = self.disc[v.id]
            d = len(halves)
            mine = []
            for i in range(d):
                for j in range(i + 1, d):
                    tid = len(tedges)
                    tedges.append(
                        TEdge(
                            id=tid,
                            kind=SHORT,
                            h0=halves[i],
                            h1=halves[j],
                            vertex=v.id,
                            labels=(i + 1, j + 1),
                        )
                    )
                    mine.append(tid)
            self.shorts_by_vertex[v.id] = mine
        self.tedges = tuple(tedges)
        self.long_ids = frozenset(
            t.id for t in tedges if t.kind == LONG
        )
        self.standard_dimer = self.long_ids
        self.outside_gedges = tuple(
            sorted(e.id for e in self.graph.edges if e.crossings)
        )

    @property
    def size(self) -> int:
        return len(self.terminals)

    def endpoints_index(self, tid: int):
        t = self.tedges[tid]
        return self.index[t.h0], self.index[t.h1]

    def is_outside(self, tid: int) -> bool:
        t = self.tedges[tid]
        return t.kind == LONG and t.gedge in set(self.outside_gedges)

    def degree(self, vid: int) -> int:
        return len(self.disc[vid])

    def adjacency_lists(self):
        adj = {i: [] for i in range(self.size)}
        for t in self.tedges:
            a, b = self.index[t.h0], self.index[t.h1]
            adj[a].append((b, t.id))
            adj[b].append((a, t.id))
        return adj

    # -- the face map ------------------------------------------------------

    def face_map(self) -> CombinatorialMap:
        if self._map is None:
            self._map = self._build_map()
        return self._map

    def _build_map(self):
        alpha, cw_next, tail = {}, {}, {}
        outside = set(self.outside_gedges)
        boundary = set()
        for v in self.graph.vertices:
            d = len(self.disc[v.id])
            for tid in self.shorts_by_vertex[v.id]:
                k, l = self.tedges[tid].labels
                if l - k == 1 or (k, l) == (1, d):
                    boundary.add(tid)

        def long_dart(tid, half):
            t = self.tedges[tid]
            end = 0 if half == t.h0 else 1
            if t.gedge in outside:
                return ("s", tid, end)
            return ("t", tid, end)

        for t in self.tedges:
            if t.kind == SHORT and t.id not in boundary:
                continue  # crossing chords never border a face walk
            if t.kind == LONG and t.gedge in outside:
                for end in (0, 1):
                    alpha[("s", t.id, end)] = ("sr", t.id, end)
                    alpha[("sr", t.id, end)] = ("s", t.id, end)
            else:
                alpha[("t", t.id, 0)] = ("t", t.id, 1)
                alpha[("t", t.id, 1)] = ("t", t.id, 0)

        short_lookup = {}
        for v in self.graph.vertices:
            for tid in self.shorts_by_vertex[v.id]:
                k, l = self.tedges[tid].labels
                short_lookup[(v.id, k, l)] = tid

        for v in self.graph.vertices:
            halves = self.disc[v.id]
            d = len(halves)
            for k, h in enumerate(halves, start=1):
                tid_long = self.long_of_gedge[h[0]]
                rot = [long_dart(tid_long, h)]
                if d >= 2:
                    nxt = k % d + 1
                    prv = (k - 2) % d + 1
                    tid_next = short_lookup[(v.id, min(k, nxt), max(k, nxt))]
                    t = self.tedges[tid_next]
                    rot.append(("t", tid_next, 0 if h == t.h0 else 1))
                    if prv != nxt:
                        tid_prev = short_lookup[(v.id, min(k, prv), max(k, prv))]
                        t = self.tedges[tid_prev]
                        rot.append(("t", tid_prev, 0 if h == t.h0 else 1))
                for i, dd in enumerate(rot):
                    cw_next[dd] = rot[(i + 1) % len(rot)]
                    tail[dd] = ("t", self.index[h])
        self._wire_perimeter(alpha, cw_next, tail)
        return CombinatorialMap(alpha, cw_next, tail)

    def _wire_perimeter(self, alpha, cw_next, tail):
        slots = self.graph.slot_sequence()
        if not slots:
            return
        stub_at_slot = {}
        for eid in self.outside_gedges:
            e = self.graph.edge_by_id(eid)
            tid = self.long_of_gedge[eid]
            for rec_i, (_occ, slot) in enumerate(e.crossings):
                stub_at_slot[slot] = ("sr", tid, 0 if rec_i == 0 else 1)
        n = len(slots)
        for k in range(n):
            alpha[("p", k)] = ("pr", k)
            alpha[("pr", k)] = ("p", k)
        for k, slot in enumerate(slots):
            sv = ("slot", slot)
            order = []
            stub = stub_at_slot.get(slot)
            if stub is not None:
                order.append(stub)
            order += [("p", k), ("pr", (k - 1) % n)]
            for i, dd in enumerate(order):
                cw_next[dd] = order[(i + 1) % len(order)]
                tail[dd] = sv

    def stub_skip_set(self, keep_gedge=None):
        """Darts of all outside edges except ``keep_gedge``."""
        skip = set()
        for eid in self.outside_gedges:
            if eid == keep_gedge:
                continue
            tid = self.long_of_gedge[eid]
            skip.update(
                {("s", tid, 0), ("s", tid, 1), ("sr", tid, 0), ("sr", tid, 1)}
            )
        return skip

    # -- face cycles -------------------------------------------------------

    def _classify_faces(self):
        if self._faces is not None:
            return self._faces
        cmap = self.face_map()
        orbits = cmap.face_orbits()
        comp_of_vertex = {}
        for idx, comp in enumerate(cmap.vertex_components()):
            for v in comp:
                comp_of_vertex[v] = idx
        floating = set(comp_of_vertex.values())
        for v in comp_of_vertex:
            if v[0] in ("slot",):
                floating.discard(comp_of_vertex[v])
        # a component touching any stub is anchored to the perimeter
        for d in cmap.alpha:
            if d[0] in ("s", "sr", "p", "pr"):
                floating.discard(comp_of_vertex[cmap.tail[d]])

        inside, pockets, allshort = [], [], []
        by_comp = {}
        for orbit in orbits:
            comp = comp_of_vertex[cmap.tail[orbit[0]]]
            kinds = {d[0] for d in orbit}
            if kinds & {"s", "sr", "p", "pr"}:
                pockets.append(orbit)
                continue
            has_long = any(
                self.tedges[d[1]].kind == LONG for d in orbit if d[0] == "t"
            )
            if not has_long:
                allshort.append(orbit)
                continue
            by_comp.setdefault(comp, []).append(orbit)
        designated = {}
        for comp, comp_orbits in sorted(by_comp.items()):
            if comp in floating:
                # one face of a crossing-free component plays the outer face;
                # pick deterministically, Kasteleyn does not care which
                designated[comp] = min(range(len(comp_orbits)), key=lambda i: repr(comp_orbits[i][0]))
            for i, orbit in enumerate(comp_orbits):
                if designated.get(comp) == i:
                    continue
                inside.append(orbit)
        self._faces = (inside, pockets, allshort)
        return self._faces

    def inside_face_cycles(self):
        """Lifted inside faces of the source graph, traversed counterclockwise."""
        inside, _, _ = self._classify_faces()
        cycles = []
        for orbit in inside:
            darts = tuple((d[1], d[2]) for d in orbit if d[0] == "t")
            cycles.append(FaceCycle(kind="inside", darts=darts))
        return cycles

    def outside_face_cycle(self, gedge: int) -> FaceCycle:
        """The pocket face of an outside edge: the edge traversed from its
        end-0 terminal plus the boundary arc walked back with every other
        outside edge ignored."""
        e = self.graph.edge_by_id(gedge)
        if not e.crossings:
            raise ValueError(f"edge {gedge} is not an outside edge")
        tid = self.long_of_gedge[gedge]
        cmap = self.face_map()
        skip = self.stub_skip_set(keep_gedge=gedge)
        orbit = cmap.trace_face(("s", tid, 0), skip)
        darts = [(tid, 0)]
        darts += [(d[1], d[2]) for d in orbit if d[0] == "t"]
        return FaceCycle(kind="outside", darts=tuple(darts), gedge=gedge)

    def validate_map(self):
        return self.face_map().euler_violations()

    # -- drawing parities ---------------------------------------------------

    def chord_cross(self, s1: int, s2: int) -> int:
        """1 iff the two short edges' label pairs interleave on their disc."""
        t1, t2 = self.tedges[s1], self.tedges[s2]
        if t1.kind != SHORT or t2.kind != SHORT:
            raise ValueError("chord_cross takes short edges")
        if t1.vertex != t2.vertex:
            return 0
        (a, b), (c, d) = sorted(t1.labels), sorted(t2.labels)
        return 1 if (a < c < b) != (a < d < b) else 0

    def _check_matching(self, dimers):
        covered = set()
        for tid in dimers:
            t = self.tedges[tid]
            for h in (t.h0, t.h1):
                if h in covered:
                    raise ValueError("not a matching: terminal covered twice")
                covered.add(h)
        if len(covered) != self.size:
            raise ValueError("not a perfect matching")

    def t_in_parity(self, dimers) -> int:
        """Crossings among the matching's short edges inside the discs."""
        self._check_matching(dimers)
        shorts = [tid for tid in dimers if self.tedges[tid].kind == SHORT]
        by_vertex = {}
        for tid in shorts:
            by_vertex.setdefault(self.tedges[tid].vertex, []).append(tid)
        total = 0
        for group in by_vertex.values():
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    total ^= self.chord_cross(group[i], group[j])
        return total

    def t_out_parity(self, dimers) -> int:
        """Crossings among the matching's long edges outside the polygon:
        per-edge self-crossings plus homological pairwise intersections."""
        self._check_matching(dimers)
        longs = sorted(tid for tid in dimers if self.tedges[tid].kind == LONG)
        sig = self.graph.signature
        total = 0
        for tid in longs:
            total ^= self.edge_self_parity(tid)
        for i in range(len(longs)):
            ci = self.tedges[longs[i]].cls
            for j in range(i + 1, len(longs)):
                total ^= pairing(sig, ci, self.tedges[longs[j]].cls)
        return total

    def t_parity(self, dimers) -> int:
        return self.t_in_parity(dimers) ^ self.t_out_parity(dimers)

    def edge_self_parity(self, tid: int) -> int:
        t = self.tedges[tid]
        if t.kind != LONG:
            return 0
        return self_crossing_parity(self.graph, self.graph.edge_by_id(t.gedge))

    # -- matchings ----------------------------------------------------------

    def perfect_matchings(self, limit=None):
        """All perfect matchings as sorted tuples of terminal-edge ids."""
        adj = self.adjacency_lists()
        n = self.size
        out = []
        state = [None] * n

        def rec(free):
            if limit is not None and len(out) > limit:
                raise ValueError(f"more than {limit} matchings")
            if not free:
                out.append(tuple(sorted(tid for tid in state if tid is not None)))
                return
            i = min(free)
            for j, tid in adj[i]:
                if j != i and j in free:
                    state[i] = tid
                    rec(free - {i, j})
                    state[i] = None

        rec(frozenset(range(n)))
        return sorted(set(out))


def build_terminal(graph: EmbeddedGraph) -> TerminalGraph:
    return TerminalGraph(graph)


def short_weight_halves(gt: TerminalGraph, tid: int):
    """The two source-edge weights whose half-weight product weights a short edge."""
    t = gt.tedges[tid]
    if t.kind != SHORT:
        raise ValueError("short edges only")
    return gt.weights[t.h0[0]], gt.weights[t.h1[0]]
