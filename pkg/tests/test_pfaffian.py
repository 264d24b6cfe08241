import random
from fractions import Fraction

import numpy as np
import pytest

from surface_ising.generators import klein_lattice, random_instance, torus_lattice
from surface_ising.homology import SurfaceSignature
from surface_ising.orientation import construct_good, variant
from surface_ising.partition import prepare
from surface_ising.pfaffian import (
    SkewMatrix,
    build_adjacency,
    half_weight_name,
    half_weight_squares,
    matching_sign,
    permutation_sign,
    pfaffian_exact,
    pfaffian_numeric,
)
from surface_ising.ring import GR_I, GaussianRational, Poly
from surface_ising.terminal import LONG, build_terminal


def sq(name):
    return Poly.variable(name) * Poly.variable(name)


def test_torus_reference_matrix():
    g = torus_lattice(1, 1)
    gt = build_terminal(g)
    K = construct_good(gt)
    A = build_adjacency(gt, K, twisted=False)
    sx, sy = Poly.variable(half_weight_name(0)), Poly.variable(half_weight_name(1))
    root = sx * sy
    one = Poly.const(1)
    expected = [
        [Poly(), -root, one - sy * sy, -root],
        [root, Poly(), -root, one - sx * sx],
        [-one + sy * sy, root, Poly(), -root],
        [root, -one + sx * sx, root, Poly()],
    ]
    for i in range(4):
        for j in range(4):
            assert A[i, j] == expected[i][j], (i, j)


def test_klein_reference_matrix_and_twist():
    g = klein_lattice(1, 1)
    gt = build_terminal(g)
    K = construct_good(gt)
    A = build_adjacency(gt, K, twisted=True)
    sx = Poly.variable(half_weight_name(0))
    # the reversing-pair edge picks up the i twist: entry (2,4) is i - x
    assert A[1, 3] == Poly.const(GR_I) - sx * sx
    assert A[3, 1] == -Poly.const(GR_I) + sx * sx
    with pytest.raises(ValueError):
        build_adjacency(gt, K, twisted=False)


def test_single_edge_adjacency():
    from surface_ising.embedding import Edge, EmbeddedGraph, Vertex

    sig = SurfaceSignature("orientable", 0)
    g = EmbeddedGraph(
        sig,
        (Vertex(0, ((0, 0),)), Vertex(1, ((0, 1),))),
        (Edge(0, Fraction(1)),),
        (),
    )
    gt = build_terminal(g)
    K = {gt.long_of_gedge[0]: 0}
    A = build_adjacency(gt, K, twisted=False)
    assert A[0, 1] == Poly.const(1) and A[1, 0] == Poly.const(-1)
    assert pfaffian_exact(A) == Poly.const(1)


def test_pfaffian_exact_reference_polynomials():
    for gen, expected in [
        (torus_lattice(1, 1), "-1 + x + y + x*y"),
        (klein_lattice(1, 1), "-i + x + i*y + x*y"),
    ]:
        gt = build_terminal(gen)
        K = construct_good(gt)
        A = build_adjacency(gt, K, twisted=True)
        pf = pfaffian_exact(A, substitution=half_weight_squares(gt))
        assert str(pf) == expected


def test_pfaffian_exact_2x2_and_bound():
    a = Poly.variable("a")
    A = SkewMatrix([[Poly(), a], [-a, Poly()]], exact=True)
    assert pfaffian_exact(A) == a
    big = SkewMatrix([[Poly()] * 18 for _ in range(18)], exact=True)
    with pytest.raises(ValueError):
        pfaffian_exact(big)


def test_pfaffian_exact_general_4x4():
    names = {}
    ent = [[Poly() for _ in range(4)] for _ in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            v = Poly.variable(f"a{i}{j}")
            ent[i][j], ent[j][i] = v, -v
    pf = pfaffian_exact(SkewMatrix(ent, exact=True))
    a = {k: Poly.variable(k) for k in ("a01", "a23", "a02", "a13", "a03", "a12")}
    assert pf == a["a01"] * a["a23"] - a["a02"] * a["a13"] + a["a03"] * a["a12"]


def test_pfaffian_numeric_basics():
    assert pfaffian_numeric(np.array([[0, 1], [-1, 0]], dtype=complex)) == 1
    A = np.zeros((4, 4), dtype=complex)
    A[0, 1] = A[2, 3] = 1
    A[1, 0] = A[3, 2] = -1
    assert abs(pfaffian_numeric(A) - 1) < 1e-12
    with pytest.raises(ValueError):
        pfaffian_numeric(np.ones((2, 2), dtype=complex))


def test_pfaffian_numeric_matches_expansion_random():
    rng = np.random.default_rng(7)
    for n in (4, 6, 8):
        M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        A = M - M.T
        pf = pfaffian_numeric(A)
        det = np.linalg.det(A)
        assert abs(pf * pf - det) < 1e-9 * abs(det)
        if n == 4:
            ref = A[0, 1] * A[2, 3] - A[0, 2] * A[1, 3] + A[0, 3] * A[1, 2]
            assert abs(pf - ref) < 1e-10 * abs(ref)


def test_pfaffian_row_permutation_sign():
    rng = np.random.default_rng(3)
    M = rng.normal(size=(6, 6))
    A = M - M.T
    base = pfaffian_numeric(A)
    perm = [2, 0, 1, 5, 3, 4]  # two 3-cycles: even
    P = A[np.ix_(perm, perm)]
    assert abs(pfaffian_numeric(P) - base) < 1e-9 * abs(base)
    odd = [1, 0, 2, 3, 4, 5]
    assert abs(pfaffian_numeric(A[np.ix_(odd, odd)]) + base) < 1e-9 * abs(base)


def test_exact_equals_numeric_on_instances():
    rng = random.Random(11)
    for trial in range(6):
        sig = [SurfaceSignature("orientable", 1), SurfaceSignature("klein", 0),
               SurfaceSignature("rp2", 0)][trial % 3]
        g = random_instance(sig, rng, max_edges=6)
        _g, pieces = prepare(g)
        for _c, gt, K0 in pieces:
            if gt.size > 12:
                continue
            A = build_adjacency(gt, K0, twisted=True)
            pf = pfaffian_exact(A, substitution=half_weight_squares(gt))
            An = build_adjacency(gt, K0, twisted=True, numeric=True)
            pfn = pfaffian_numeric(An)
            ref = pf.eval_complex({})
            assert abs(pfn - ref) <= 1e-9 * max(1.0, abs(ref))


def test_pfaffian_equals_signed_dimer_sum():
    # term-by-term in the half-weight ring:
    # Pf(A^(K,omega)) = sum over matchings of eps^K(D) i^omega(D) x^T(D)
    for g in [torus_lattice(1, 1), klein_lattice(1, 1), torus_lattice(2, 1),
              klein_lattice(2, 1)]:
        gt = build_terminal(g)
        K = construct_good(gt)
        A = build_adjacency(gt, K, twisted=True)
        pf = pfaffian_exact(A)  # keep half-weight variables
        total = Poly()
        for D in gt.perfect_matchings():
            term = Poly.const(matching_sign(gt, K, D))
            for tid in D:
                t = gt.tedges[tid]
                if t.kind == LONG:
                    if t.omega:
                        term = term.scale(GR_I)
                else:
                    term = term * Poly.variable(half_weight_name(t.h0[0]))
                    term = term * Poly.variable(half_weight_name(t.h1[0]))
            total = total + term
        assert total == pf


def test_matching_sign_invariance():
    gt = build_terminal(torus_lattice(2, 1))
    K = construct_good(gt)
    rng = random.Random(2)
    for D in gt.perfect_matchings():
        base = matching_sign(gt, K, D)
        for _ in range(4):
            shuffled = list(D)
            rng.shuffle(shuffled)
            assert matching_sign(gt, K, tuple(shuffled)) == base
        flipped = dict(K)
        tid = D[0]
        flipped[tid] ^= 1
        assert matching_sign(gt, flipped, D) == -base


def test_permutation_sign():
    assert permutation_sign([0, 1, 2, 3]) == 1
    assert permutation_sign([1, 0, 2, 3]) == -1
    assert permutation_sign([1, 2, 0]) == 1
