"""Skew-symmetric adjacency matrices and Pfaffians, exact and numeric.

Exact entries are polynomials over the Gaussian rationals in formal
half-weight variables ``s_<edge>`` with ``s^2 = weight``; every Pfaffian term
has even degree in each half-weight, so results reduce to the weights
themselves.  The numeric kernel is a Parlett-Reid style skew factorization
with partial pivoting, O(n^3), cross-checked against the determinant.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .ring import GR_ONE, I_POW, GaussianRational, Poly
from .embedding import is_symbol
from .terminal import LONG, SHORT, TerminalGraph


class SkewMatrix:
    """Dense skew matrix with exact (Poly) or numeric (complex) entries."""

    def __init__(self, entries, exact: bool):
        self.entries = entries
        self.exact = exact
        self.n = len(entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def half_weight_name(gedge: int) -> str:
    return f"s_{gedge}"


def half_weight_squares(gt: TerminalGraph) -> dict:
    """Substitution map sending each half-weight squared to the edge weight."""
    out = {}
    for eid, w in gt.weights.items():
        out[half_weight_name(eid)] = (
            Poly.variable(w) if is_symbol(w) else Poly.const(Fraction(w))
        )
    return out


def build_adjacency(
    gt: TerminalGraph,
    K: dict,
    twisted: bool = False,
    numeric: bool = False,
    weight_map: dict | None = None,
    index_permutation=None,
) -> SkewMatrix:
    """Adjacency matrix of the terminal graph under orientation K.

    Long edges contribute +-i^omega (twisted) or +-1; the short edge joining
    the ends of source edges e, e' contributes +-s_e s_e'.  ``weight_map``
    (numeric mode) assigns values to symbolic weights.  ``index_permutation``
    relabels terminal indices (used for the indexing-independence checks).
    """
    n = gt.size
    if n % 2:
        raise ValueError("odd terminal count has no perfect matchings")
    if not twisted:
        for t in gt.tedges:
            if t.kind == LONG and t.omega:
                raise ValueError("untwisted adjacency needs omega == 0 everywhere")
    perm = index_permutation or list(range(n))
    if numeric:
        entries = np.zeros((n, n), dtype=complex)
    else:
        entries = [[Poly() for _ in range(n)] for _ in range(n)]
    for t in gt.tedges:
        a, b = gt.endpoints_index(t.id)
        a, b = perm[a], perm[b]
        if K[t.id] == 1:
            a, b = b, a
        val = _edge_value(gt, t, numeric, weight_map)
        if numeric:
            entries[a][b] += val
            entries[b][a] -= val
        else:
            entries[a][b] = entries[a][b] + val
            entries[b][a] = entries[b][a] - val
    return SkewMatrix(entries, exact=not numeric)


def _edge_value(gt, t, numeric, weight_map):
    if t.kind == LONG:
        if numeric:
            return 1j**t.omega
        return Poly.const(I_POW[t.omega % 4])
    w0, w1 = gt.weights[t.h0[0]], gt.weights[t.h1[0]]
    if numeric:
        return np.sqrt(_num(w0, weight_map) * _num(w1, weight_map))
    return Poly.variable(half_weight_name(t.h0[0])) * Poly.variable(
        half_weight_name(t.h1[0])
    )


def _num(w, weight_map):
    if is_symbol(w):
        if not weight_map or w not in weight_map:
            raise ValueError(f"numeric mode needs a value for symbol {w!r}")
        return float(weight_map[w])
    return float(w)


# ---------------------------------------------------------------------------
# exact Pfaffian


def pfaffian_exact(A: SkewMatrix, substitution: dict | None = None, bound: int = 16):
    """Pfaffian by first-row expansion with subset memoization, O(2^n * n).

    ``substitution`` maps half-weight variables to their squares' values and
    is applied at the end (every surviving monomial is even in each s).
    """
    if not A.exact:
        raise ValueError("pfaffian_exact needs exact entries")
    n = A.n
    if n % 2:
        raise ValueError("odd dimension")
    if n > bound:
        raise ValueError(f"exact Pfaffian limited to {bound} rows; use numeric mode")
    entries = A.entries
    memo = {0: Poly.const(1)}

    def rec(mask: int) -> Poly:
        got = memo.get(mask)
        if got is not None:
            return got
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        total = Poly()
        sign = 1
        m = rest
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            entry = entries[i][j]
            if entry:
                sub = rec(rest & ~(1 << j))
                term = entry * sub
                total = total + (term if sign > 0 else -term)
            sign = -sign
        memo[mask] = total
        return total

    pf = rec((1 << n) - 1) if n else Poly.const(1)
    if substitution is not None:
        pf = reduce_half_weights(pf, substitution)
    return pf


def reduce_half_weights(p: Poly, squares: dict) -> Poly:
    """Replace each even power s^(2k) by weight^k; odd powers are a bug."""
    out = Poly()
    for mono, c in p.coeffs.items():
        term = Poly.const(c)
        for var, exp in mono:
            if var in squares:
                if exp % 2:
                    raise ValueError(f"odd half-weight degree in {var}")
                for _ in range(exp // 2):
                    term = term * squares[var]
            else:
                term = term * Poly.variable(var, exp)
        out = out + term
    return out


# ---------------------------------------------------------------------------
# numeric Pfaffian

PIVOT_TOL = 1e-13
DET_REL_TOL = 1e-9


def pfaffian_numeric(A, check_det: bool = True) -> complex:
    """Parlett-Reid skew tridiagonalization with partial pivoting.

    Verifies Pf(A)^2 = det(A) (independent LU determinant) to relative
    1e-9 unless ``check_det`` is disabled.
    """
    M = np.array(A.entries if isinstance(A, SkewMatrix) else A, dtype=complex)
    n = M.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n % 2:
        raise ValueError("odd dimension")
    if not np.allclose(M, -M.T, atol=1e-10 * max(1.0, np.abs(M).max())):
        raise ValueError("matrix is not skew-symmetric")
    scale = np.abs(M).max()
    if scale == 0.0:
        return 0.0 + 0j
    det = np.linalg.det(M) if check_det else None
    work = M.copy()
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(work[k + 1 :, k])))
        if kp != k + 1:
            work[[k + 1, kp], k:] = work[[kp, k + 1], k:]
            work[k:, [k + 1, kp]] = work[k:, [kp, k + 1]]
            pf = -pf
        piv = work[k + 1, k]
        if abs(piv) <= PIVOT_TOL * scale:
            pf = 0.0 + 0j
            break
        pf *= work[k, k + 1]
        if k + 2 < n:
            tau = work[k, k + 2 :] / work[k, k + 1]
            col = work[k + 2 :, k + 1].copy()
            # rank-2 update outer(tau, col) - outer(col, tau) as one GEMM
            left = np.column_stack((tau, col))
            right = np.vstack((col[None, :], -tau[None, :]))
            work[k + 2 :, k + 2 :] += left @ right
    if check_det:
        ref = max(abs(det), abs(pf) ** 2, 1e-300)
        if abs(pf * pf - det) > DET_REL_TOL * ref:
            raise ArithmeticError(
                f"Pfaffian check failed: Pf^2={pf * pf}, det={det}"
            )
    return pf


# ---------------------------------------------------------------------------
# matching signs


def matching_sign(gt: TerminalGraph, K: dict, dimers) -> int:
    """epsilon^K(D): permutation sign of the matched index pairing times the
    orientation factors; independent of the order the pairs are listed."""
    pairs = []
    for tid in dimers:
        t = gt.tedges[tid]
        i, j = gt.endpoints_index(tid)
        eps = 1 if K[tid] == 0 else -1
        pairs.append((i, j, eps))
    seq = []
    total_eps = 1
    for i, j, eps in pairs:
        seq += [i, j]
        total_eps *= eps
    if sorted(seq) != list(range(gt.size)):
        raise ValueError("not a perfect matching")
    return permutation_sign(seq) * total_eps


def permutation_sign(seq) -> int:
    """Sign of the permutation sending 0..n-1 to seq."""
    n = len(seq)
    seen = [False] * n
    pos = {v: k for k, v in enumerate(seq)}
    sign = 1
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = pos[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
