"""Partition-function evaluators: Pfaffian formulas, oracles, conversions.

The exact pipeline computes, once per instance, the class-resolved signed
dimer sums S_c = sum over dimer configurations of homology class c of
epsilon^K0(D) i^omega(D) x(D).  Every orientation variant's Pfaffian is a
phase-weighted combination of the S_c: flipping along a side-pair vector f
multiplies class c by (-1)^(f.c), and the enhancement variant K_q carries
i^(q(c) - q_ref(c)) because the pairwise intersection corrections in q and
q_ref cancel.  One subset-sum DP therefore feeds both the flip-vector and the
invariant-weighted formulas.  Numeric mode evaluates each variant matrix with
the O(n^3) Parlett-Reid kernel instead.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import orientation as orient
from .embedding import (
    EmbeddedGraph,
    connected_components,
    crossing_vector,
    is_symbol,
    normalize,
    validate,
)
from .homology import (
    QuadraticEnhancement,
    QuadraticForm,
    arf,
    brown,
    dual_flip_vector,
    enumerate_enhancements,
    enumerate_forms,
    reference_enhancement,
    reference_form,
    vec_dot,
)
from .pfaffian import build_adjacency, matching_sign, pfaffian_numeric
from .ring import (
    GR_ONE,
    I_POW,
    GaussianRational,
    Poly,
    eighth_root_times_half_power,
)
from .terminal import LONG, TerminalGraph, build_terminal

BRUTE_FORCE_BOUND = 24
EXACT_PFAFFIAN_BOUND = 24


@dataclass
class PartitionResult:
    value: object  # Poly (exact) or float (numeric)
    method: str
    mode: str
    signature: object
    pfaffian_table: dict = field(default_factory=dict)
    epsilon0: int = 0
    residual: float = 0.0

    def numeric_value(self, assignment=None) -> float:
        if self.mode == "numeric":
            return self.value
        val = self.value.eval_complex(assignment or {})
        return val.real


class PhaseError(ArithmeticError):
    """The signed Pfaffian sum violated its expected global phase."""


# ---------------------------------------------------------------------------
# preparation


def prepare(g: EmbeddedGraph):
    """Validate, normalize, prune outside bridges, split into components.

    An outside edge that is a bridge lies in no even subgraph, so dropping it
    leaves the partition function unchanged; keeping it would leave another
    edge's pocket face degenerate (a whole component stranded inside it), and
    the drawing conditions no longer control the matching signs.
    """
    issues = validate(g)
    if issues:
        raise ValueError("invalid embedded graph: " + "; ".join(issues))
    g = normalize(g)
    g = _prune_outside_bridges(g)
    issues = validate(g)
    if issues:
        raise ValueError("normalization broke the drawing: " + "; ".join(issues))
    pieces = []
    for comp in connected_components(g):
        gt = build_terminal(comp)
        bad = gt.validate_map()
        if bad:
            raise ValueError("; ".join(bad))
        K0 = orient.construct_good(gt)
        pieces.append((comp, gt, K0))
    return g, pieces


def _prune_outside_bridges(g: EmbeddedGraph) -> EmbeddedGraph:
    from .generators import delete_edge

    while True:
        bridges = [e.id for e in g.edges if e.crossings and _is_bridge(g, e.id)]
        if not bridges:
            return g
        for eid in bridges:
            g = delete_edge(g, eid)


def _is_bridge(g: EmbeddedGraph, eid: int) -> bool:
    vertex_of = g.vertex_of_half()
    a, b = vertex_of[(eid, 0)], vertex_of[(eid, 1)]
    if a == b:
        return False
    adj = {}
    for e in g.edges:
        if e.id == eid:
            continue
        u, v = vertex_of[(e.id, 0)], vertex_of[(e.id, 1)]
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    seen = {a}
    stack = [a]
    while stack:
        x = stack.pop()
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return b not in seen


def epsilon_0(gt: TerminalGraph, K0: dict) -> int:
    """epsilon^K0(D0) (-1)^t(D0): the global matching-sign constant."""
    d0 = tuple(sorted(gt.standard_dimer))
    sign = matching_sign(gt, K0, d0)
    return sign * (1 if gt.t_parity(d0) == 0 else -1)


# ---------------------------------------------------------------------------
# class-resolved dimer sums (exact kernel)


def dimer_class_sums(gt: TerminalGraph, K0: dict, bound: int = EXACT_PFAFFIAN_BOUND):
    """S_c = sum over dimer configurations with [D] = c of the signed,
    omega-twisted weight, as polynomials in the symbolic edge weights.

    Computed on the half-weight-rescaled matrix (shorts +-1, long edge e
    +-i^omega / x_e) so all arithmetic is Gaussian-rational; the final
    multiplication by prod_e x_e restores the true weights.
    """
    n = gt.size
    if n > bound:
        raise ValueError(f"exact mode limited to {bound} terminals; got {n}")
    info = []
    for t in gt.tedges:
        i, j = gt.endpoints_index(t.id)
        if i > j:
            i, j = j, i
            oriented_lo_hi = K0[t.id] == 1
        else:
            oriented_lo_hi = K0[t.id] == 0
        if t.kind == LONG:
            w = gt.weights[t.gedge]
            if is_symbol(w):
                val = Poly.variable(w, -1).scale(I_POW[t.omega % 4])
            else:
                val = Poly.const(I_POW[t.omega % 4] * GaussianRational(Fraction(1, 1) / Fraction(w)))
            cls = t.cls
        else:
            val = Poly.const(GR_ONE)
            cls = 0
        if not oriented_lo_hi:
            val = -val
        info.append((i, j, val, cls))
    adj = {}
    for i, j, val, cls in info:
        adj.setdefault(i, []).append((j, val, cls))
    for lst in adj.values():
        lst.sort(key=lambda x: x[0])

    memo = {0: {0: Poly.const(1)}}

    def rec(mask: int):
        got = memo.get(mask)
        if got is not None:
            return got
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        out = {}
        for j, val, cls in adj.get(i, ()):
            if not rest >> j & 1:
                continue
            # sign (-1)^(position of j among the remaining indices)
            below = rest & ((1 << j) - 1)
            sign = 1 if bin(below).count("1") % 2 == 0 else -1
            sub = rec(rest & ~(1 << j))
            for c, p in sub.items():
                term = val * p
                if sign < 0:
                    term = -term
                key = c ^ cls
                acc = out.get(key)
                out[key] = term if acc is None else acc + term
        memo[mask] = out
        return out

    raw = rec((1 << n) - 1) if n else {0: Poly.const(1)}
    weight_product = Poly.const(1)
    for eid in sorted(gt.weights):
        w = gt.weights[eid]
        factor = Poly.variable(w) if is_symbol(w) else Poly.const(Fraction(w))
        weight_product = weight_product * factor
    return {c: p * weight_product for c, p in raw.items() if p}


def pfaffian_from_class_sums(sums: dict, sig, flips: int) -> Poly:
    """Pf(A^(K_flips, omega)) from the class sums."""
    total = Poly()
    for c, p in sums.items():
        total = total + (-p if vec_dot(flips, c) else p)
    return total


def _pfaffian_for_enhancement(sums, q: QuadraticEnhancement, q_ref) -> Poly:
    total = Poly()
    for c, p in sums.items():
        phase = I_POW[(q.eval(c) - q_ref.eval(c)) % 4]
        total = total + p.scale(phase)
    return total


def _pfaffian_for_form(sums, q: QuadraticForm, q_ref) -> Poly:
    total = Poly()
    for c, p in sums.items():
        if (q.eval(c) + q_ref.eval(c)) % 2:
            total = total - p
        else:
            total = total + p
    return total


# ---------------------------------------------------------------------------
# practical formula


def practical_coefficient(sig, flips: int) -> GaussianRational:
    """Sign/phase attached to one flip vector in the hands-on formulas."""
    names = sig.pair_names()
    exp2 = 0  # exponent of (-1)
    for i in range(sig.genus):
        exp2 += (flips >> (2 * i) & 1) * (flips >> (2 * i + 1) & 1)
    g2 = 2 * sig.genus
    phase = GaussianRational(1)
    if sig.kind == "klein":
        fa, fb = flips >> g2 & 1, flips >> (g2 + 1) & 1
        exp2 += fa * fb
        phase = I_POW[(-fa) % 4]  # (-i)^alpha
    elif sig.kind == "rp2":
        phase = I_POW[(flips >> g2 & 1) % 4]  # i^gamma
    if exp2 % 2:
        phase = -phase
    return phase


def _flip_bitstring(sig, flips: int) -> str:
    return "".join(str(flips >> i & 1) for i in range(sig.b1))


def z_practical(g: EmbeddedGraph, mode: str = "exact", weight_map=None, threads=None,
                index_permutation=None, seed_flip=False):
    """The flip-vector Pfaffian formula: 2^(-b1/2) |sum of signed Pfaffians|."""
    _, pieces = prepare(g)
    return _combine(
        g,
        [
            _z_practical_component(gt, K0, mode, weight_map, threads, index_permutation)
            for _, gt, K0 in _reseed(pieces, seed_flip)
        ],
        method="practical",
        mode=mode,
    )


def _reseed(pieces, seed_flip):
    if not seed_flip:
        return pieces
    return [
        (comp, gt, orient.construct_good(gt, seed_flip=True)) for comp, gt, _ in pieces
    ]


def _z_practical_component(gt, K0, mode, weight_map, threads, index_permutation):
    sig = gt.graph.signature
    b1 = sig.b1
    q_ref = reference_enhancement(sig)
    br0 = brown(q_ref) if b1 else 0
    table = {}
    if mode == "exact":
        sums = dimer_class_sums(gt, K0)
        total = Poly()
        for f in range(1 << b1):
            pf = pfaffian_from_class_sums(sums, sig, f)
            table[_flip_bitstring(sig, f)] = pf
            total = total + pf.scale(practical_coefficient(sig, f))
        value, residual = _exact_modulus(total, br0, b1)
        eps0 = epsilon_0(gt, K0)
        return value, table, eps0, residual
    pfs = _numeric_variant_pfaffians(
        gt, K0, weight_map, threads, index_permutation,
        orientations=[(f, orient.variant(gt, K0, f)) for f in range(1 << b1)],
    )
    total = 0j
    for f, pf in pfs:
        table[_flip_bitstring(sig, f)] = pf
        total += complex(practical_coefficient(sig, f)) * pf
    expected_phase = np.exp(1j * math.pi * br0 / 4)
    residual = abs((total * np.conj(expected_phase)).imag)
    if residual > 1e-8 * max(abs(total), 1e-300):
        raise PhaseError(
            f"practical sum has residual phase {residual} (|sum|={abs(total)})"
        )
    value = abs(total) / 2 ** (b1 / 2)
    eps0 = epsilon_0(gt, K0)
    return value, table, eps0, residual


def _numeric_variant_pfaffians(gt, K0, weight_map, threads, index_permutation, orientations):
    def one(item):
        key, K = item
        A = build_adjacency(
            gt, K, twisted=True, numeric=True, weight_map=weight_map,
            index_permutation=index_permutation,
        )
        return key, pfaffian_numeric(A)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, orientations))
    return [one(item) for item in orientations]


def _exact_modulus(total: Poly, br0: int, b1: int):
    """Exact |total| / 2^(b1/2) given that total's phase is +-exp(i pi br0/4)."""
    scale = eighth_root_times_half_power(-br0 % 8, b1)
    candidate = total.scale(scale)
    for mono, c in candidate.coeffs.items():
        if c.im != 0:
            raise PhaseError(f"phase violation: imaginary part {c} at {mono}")
    if not candidate.coeffs:
        return candidate, 0.0
    lead = min(candidate.coeffs)
    if candidate.coeffs[lead].re < 0:
        candidate = -candidate
    return candidate, 0.0


# ---------------------------------------------------------------------------
# invariant-weighted formula


def z_general(g: EmbeddedGraph, mode: str = "exact", weight_map=None, threads=None,
              seed_flip=False):
    """The Arf/Brown-weighted formula with the computed epsilon_0."""
    _, pieces = prepare(g)
    return _combine(
        g,
        [
            _z_general_component(gt, K0, mode, weight_map, threads)
            for _, gt, K0 in _reseed(pieces, seed_flip)
        ],
        method="general",
        mode=mode,
    )


def _z_general_component(gt, K0, mode, weight_map, threads):
    sig = gt.graph.signature
    b1 = sig.b1
    eps0 = epsilon_0(gt, K0)
    orientable = sig.kind == "orientable"
    if orientable:
        q_ref = reference_form(sig)
        qs = enumerate_forms(sig)
        phases = [eighth_root_times_half_power((-4 * arf(q)) % 8, b1) for q in qs]
    else:
        q_ref = reference_enhancement(sig)
        qs = enumerate_enhancements(sig)
        phases = [eighth_root_times_half_power(-brown(q) % 8, b1) for q in qs]
    if mode == "exact":
        sums = dimer_class_sums(gt, K0)
        total = Poly()
        table = {}
        for q, phase in zip(qs, phases):
            pf = (
                _pfaffian_for_form(sums, q, q_ref)
                if orientable
                else _pfaffian_for_enhancement(sums, q, q_ref)
            )
            table["".join(str(v) for v in q.values)] = pf
            total = total + pf.scale(phase)
        if eps0 < 0:
            total = -total
        for mono, c in total.coeffs.items():
            if c.im != 0:
                raise PhaseError(f"general sum has imaginary part at {mono}")
        _assert_nonnegative(total)
        return total, table, eps0, 0.0
    variants = []
    for q in qs:
        K = (
            orient.variant_for_form(gt, K0, q, q_ref)
            if orientable
            else orient.variant_for_enhancement(gt, K0, q, q_ref)
        )
        variants.append(("".join(str(v) for v in q.values), K))
    pfs = _numeric_variant_pfaffians(gt, K0, weight_map, threads, None, variants)
    table = dict(pfs)
    total = sum(
        complex(phase) * pf for (_k, pf), phase in zip(pfs, phases)
    )
    total *= eps0
    residual = abs(total.imag)
    if residual > 1e-8 * max(abs(total), 1e-300):
        raise PhaseError(f"general sum residual {residual}")
    if total.real < -1e-8:
        raise PhaseError(f"general sum negative: {total.real}")
    return max(total.real, 0.0), table, eps0, residual


def _assert_nonnegative(total: Poly):
    const = total.coeffs.get((), None)
    if const is not None and const.re < 0:
        raise PhaseError("general formula produced a negative constant term")


# ---------------------------------------------------------------------------
# oracles


def _cycle_space(g: EmbeddedGraph):
    """Fundamental cycles as edge bitmasks over the sorted edge list."""
    edges = sorted(g.edges, key=lambda e: e.id)
    pos = {e.id: k for k, e in enumerate(edges)}
    vertex_of = g.vertex_of_half()
    parent = {}
    tree_path = {}

    def find(x):
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        return root

    adj_tree = {}
    tree_edges = []
    extra = []
    for e in edges:
        a, b = vertex_of[(e.id, 0)], vertex_of[(e.id, 1)]
        parent.setdefault(a, a), parent.setdefault(b, b)
        ra, rb = find(a), find(b)
        if ra == rb:
            extra.append(e)
        else:
            parent[ra] = rb
            tree_edges.append(e)
            adj_tree.setdefault(a, []).append((b, pos[e.id]))
            adj_tree.setdefault(b, []).append((a, pos[e.id]))
    cycles = []
    for e in extra:
        a, b = vertex_of[(e.id, 0)], vertex_of[(e.id, 1)]
        mask = 1 << pos[e.id]
        if a != b:
            mask ^= _tree_path_mask(adj_tree, a, b)
        cycles.append(mask)
    return edges, cycles


def _tree_path_mask(adj_tree, a, b):
    prev = {a: (None, None)}
    stack = [a]
    while stack:
        x = stack.pop()
        if x == b:
            break
        for y, em in adj_tree.get(x, ()):
            if y not in prev:
                prev[y] = (x, em)
                stack.append(y)
    mask = 0
    x = b
    while prev[x][0] is not None:
        x, em = prev[x]
        mask ^= 1 << em
    return mask


def even_subgraphs(g: EmbeddedGraph, bound: int = BRUTE_FORCE_BOUND):
    """All even edge subsets, as bitmasks over the sorted edge list."""
    edges, cycles = _cycle_space(g)
    dim = len(cycles)
    if dim > bound:
        raise ValueError(f"cycle space dimension {dim} exceeds oracle bound {bound}")
    subs = []
    for sel in range(1 << dim):
        mask = 0
        s = sel
        while s:
            k = (s & -s).bit_length() - 1
            mask ^= cycles[k]
            s &= s - 1
        subs.append(mask)
    return edges, subs


def z_per_class(g: EmbeddedGraph, bound: int = BRUTE_FORCE_BOUND):
    """Even-subgraph generating polynomials grouped by homology class."""
    edges, subs = even_subgraphs(g, bound)
    cls_of = [crossing_vector(g, e) for e in edges]
    wpoly = [
        Poly.variable(e.weight) if is_symbol(e.weight) else Poly.const(Fraction(e.weight))
        for e in edges
    ]
    out = {}
    for mask in subs:
        cls = 0
        term = Poly.const(1)
        m = mask
        while m:
            k = (m & -m).bit_length() - 1
            cls ^= cls_of[k]
            term = term * wpoly[k]
            m &= m - 1
        acc = out.get(cls)
        out[cls] = term if acc is None else acc + term
    return out


def z_bruteforce(g: EmbeddedGraph, bound: int = BRUTE_FORCE_BOUND):
    """Exact even-subgraph sum (the defining high-temperature expansion)."""
    g = normalize(g)  # harmless; keeps ids aligned with the pipeline
    total = Poly()
    for _cls, p in sorted(z_per_class(g, bound).items()):
        total = total + p
    return PartitionResult(
        value=total, method="bruteforce", mode="exact", signature=g.signature
    )


def z_q(g: EmbeddedGraph, q, bound: int = BRUTE_FORCE_BOUND) -> Poly:
    """Phase-twisted expansion Z^q: quadratic forms weight classes by
    (-1)^q, enhancements by i^q."""
    per = z_per_class(g, bound)
    total = Poly()
    for cls, p in sorted(per.items()):
        if isinstance(q, QuadraticForm):
            total = total + (-p if q.eval(cls) else p)
        else:
            total = total + p.scale(I_POW[q.eval(cls) % 4])
    return total


def z_q_pfaffian(gt: TerminalGraph, K0: dict, q) -> Poly:
    """The Pfaffian route to Z^q: eps0 (-1)^q([D0]) Pf(A^(K_(q+[D0]*))) in the
    form case, eps0 i^q([D0]) Pf(A^(K_(q+2[D0]*), omega)) for enhancements."""
    sig = gt.graph.signature
    d0_class = 0
    for t in gt.tedges:
        if t.kind == LONG:
            d0_class ^= t.cls
    cov = dual_flip_vector(sig, d0_class)
    sums = dimer_class_sums(gt, K0)
    eps0 = epsilon_0(gt, K0)
    if isinstance(q, QuadraticForm):
        shifted = q.plus_covector(cov)
        pf = _pfaffian_for_form(sums, shifted, reference_form(sig))
        phase = GaussianRational(-1 if q.eval(d0_class) else 1)
    else:
        shifted = q.plus_twice_covector(cov)
        pf = _pfaffian_for_enhancement(sums, shifted, reference_enhancement(sig))
        phase = I_POW[q.eval(d0_class) % 4]
    if eps0 < 0:
        phase = -phase
    return pf.scale(phase)


# ---------------------------------------------------------------------------
# physical conversion


def boltzmann(g: EmbeddedGraph, beta: float, coupling=None, threads=None):
    """Z_beta = 2^|V| prod_e cosh(beta J_e) * Z_I(tanh(beta J))."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    couplings = {}
    for e in g.edges:
        if coupling is not None:
            couplings[e.id] = float(coupling)
        elif is_symbol(e.weight):
            raise ValueError(f"edge {e.id} has symbolic weight; pass a coupling")
        else:
            couplings[e.id] = float(e.weight)
        if couplings[e.id] <= 0:
            raise ValueError("couplings must be positive")
    xg = _with_weights(g, {eid: math.tanh(beta * j) for eid, j in couplings.items()})
    if beta == 0.0:
        z_high = 1.0
    else:
        z_high = z_practical(xg, mode="numeric", threads=threads).value
    factor = 2 ** len(g.vertices)
    for j in couplings.values():
        factor *= math.cosh(beta * j)
    return factor * z_high


def _with_weights(g: EmbeddedGraph, weights: dict) -> EmbeddedGraph:
    from dataclasses import replace

    edges = tuple(replace(e, weight=weights[e.id]) for e in g.edges)
    return replace(g, edges=edges)


# ---------------------------------------------------------------------------
# combination


def _combine(g, parts, method, mode):
    if not parts:
        value = Poly.const(1) if mode == "exact" else 1.0
        return PartitionResult(
            value=value, method=method, mode=mode, signature=g.signature,
            epsilon0=1,
        )
    if mode == "exact":
        value = Poly.const(1)
        for v, _t, _e, _r in parts:
            value = value * v
    else:
        value = 1.0
        for v, _t, _e, _r in parts:
            value *= v
    eps0 = 1
    for _v, _t, e, _r in parts:
        eps0 *= e
    table = parts[0][1] if len(parts) == 1 else {}
    residual = max(r for _v, _t, _e, r in parts)
    return PartitionResult(
        value=value,
        method=method,
        mode=mode,
        signature=g.signature,
        pfaffian_table=table,
        epsilon0=eps0,
        residual=residual,
    )
