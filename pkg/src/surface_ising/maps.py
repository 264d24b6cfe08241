"""Generic face tracing for combinatorial maps with clockwise rotations.

A map is given by an edge involution ``alpha`` (dart -> opposite dart), the
clockwise successor ``cw_next`` (dart -> next dart around the same tail
vertex) and ``tail`` (dart -> vertex key).  With clockwise rotations the face
permutation ``d -> cw_next[alpha[d]]`` traverses bounded faces of a plane
drawing counterclockwise; the orbit along the unbounded side walks the graph
boundary clockwise.

Darts are arbitrary hashable values.  ``skip`` marks darts that are removed
from the map (their edge ignored): tracing slides past them inside the
rotation, which is how the per-outside-edge pocket faces are obtained without
rebuilding the map.
"""

from __future__ import annotations


class CombinatorialMap:
    def __init__(self, alpha: dict, cw_next: dict, tail: dict):
        self.alpha = alpha
        self.cw_next = cw_next
        self.tail = tail

    def face_next(self, dart, skip=None):
        d = self.cw_next[self.alpha[dart]]
        if skip:
            while d in skip:
                d = self.cw_next[d]
        return d

    def trace_face(self, start, skip=None):
        """The face orbit through ``start`` (which must not be skipped)."""
        orbit = [start]
        d = self.face_next(start, skip)
        while d != start:
            orbit.append(d)
            d = self.face_next(d, skip)
        return orbit

    def face_orbits(self, skip=None):
        """All face orbits, each a list of darts, in deterministic order."""
        seen = set()
        orbits = []
        for start in sorted(self.alpha, key=repr):
            if start in seen or (skip and start in skip):
                continue
            orbit = self.trace_face(start, skip)
            seen.update(orbit)
            orbits.append(orbit)
        return orbits

    def vertex_components(self):
        """Connected components as sets of vertex keys."""
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for v in self.tail.values():
            parent.setdefault(v, v)
        for d, dd in self.alpha.items():
            a, b = find(self.tail[d]), find(self.tail[dd])
            if a != b:
                parent[a] = b
        groups = {}
        for v in parent:
            groups.setdefault(find(v), set()).add(v)
        return list(groups.values())

    def euler_violations(self):
        """V - E + F = 2 per connected component; returns failure messages."""
        comps = self.vertex_components()
        comp_of = {}
        for idx, comp in enumerate(comps):
            for v in comp:
                comp_of[v] = idx
        edges = [0] * len(comps)
        faces = [0] * len(comps)
        for d in self.alpha:
            edges[comp_of[self.tail[d]]] += 1
        for orbit in self.face_orbits():
            faces[comp_of[self.tail[orbit[0]]]] += 1
        out = []
        for idx, comp in enumerate(comps):
            v, e, f = len(comp), edges[idx] // 2, faces[idx]
            if v - e + f != 2:
                out.append(
                    f"EulerCheckFailed: component {idx} has V-E+F = "
                    f"{v}-{e}+{f} = {v - e + f} != 2"
                )
        return out
