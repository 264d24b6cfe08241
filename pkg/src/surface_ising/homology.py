"""Z2 homology bookkeeping for polygon-presented surfaces.

A surface is presented as a polygon whose boundary word identifies sides in
pairs: ``a1 b1 a1^-1 b1^-1 ...`` for the orientable genus-g surface, with an
extra ``a b a^-1 b`` block for a Klein-bottle summand or ``c c`` for a
projective-plane summand.

H_1(surface; Z2) is encoded in *crossing-slot coordinates*: basis vector i
is the class of an arc crossing the i-th identified side pair exactly once.
A class is stored as an int bitmask (bit i = coefficient of slot i).  This is
the convenient basis for graph drawings, where an edge's class is read off
directly from its side crossings.  The side loops themselves form the dual
basis; ``loop_class`` converts (on the Klein summand the two bases genuinely
differ, which is why the reference enhancement takes value 3 on the loop ``a``
but value 1 on the slot ``b``).

Slot order: a1, b1, a2, b2, ..., then (a, b) for Klein or (c,) for RP^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import product

ORIENTABLE = "orientable"
KLEIN = "klein"
RP2 = "rp2"

_KINDS = (ORIENTABLE, KLEIN, RP2)


@dataclass(frozen=True)
class SurfaceSignature:
    """Polygon presentation: an orientable genus plus an optional crosscap block."""

    kind: str
    genus: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown surface kind {self.kind!r}")
        if self.genus < 0:
            raise ValueError("genus must be non-negative")

    @property
    def b1(self) -> int:
        g2 = 2 * self.genus
        return {ORIENTABLE: g2, KLEIN: g2 + 2, RP2: g2 + 1}[self.kind]

    def pair_names(self):
        names = []
        for i in range(self.genus):
            names += [f"a{i + 1}", f"b{i + 1}"]
        if self.kind == KLEIN:
            names += ["a", "b"]
        elif self.kind == RP2:
            names += ["c"]
        return tuple(names)

    def side_word(self):
        """Boundary word as (pair_index, exponent) in counterclockwise order."""
        word = []
        for i in range(self.genus):
            a, b = 2 * i, 2 * i + 1
            word += [(a, 1), (b, 1), (a, -1), (b, -1)]
        g2 = 2 * self.genus
        if self.kind == KLEIN:
            word += [(g2, 1), (g2 + 1, 1), (g2, -1), (g2 + 1, 1)]
        elif self.kind == RP2:
            word += [(g2, 1), (g2, 1)]
        return tuple(word)

    def side_word_names(self):
        names = self.pair_names()
        return tuple(
            names[p] + ("" if e == 1 else "^-1") for p, e in self.side_word()
        )

    def pair_occurrences(self, pair: int):
        """The two boundary-word positions of a side pair."""
        occ = [k for k, (p, _) in enumerate(self.side_word()) if p == pair]
        assert len(occ) == 2
        return tuple(occ)

    def pair_order_reversing(self, pair: int) -> bool:
        """True for x...x^-1 identifications (slot lists pair up reversed),
        False for the x...x identifications of the Klein ``b`` and RP^2 ``c``."""
        exps = [e for p, e in self.side_word() if p == pair]
        return exps[0] != exps[1]

    def intersection_matrix(self):
        """Symmetric Z2 intersection form in slot coordinates, rows as bitmasks.

        Handle blocks pair a_i with b_i; the Klein block adds a.b = 1 and the
        self-pairing b.b = 1 (= omega(b)); the RP^2 slot has c.c = 1.  The
        self-pairings are pinned by x.x = omega(x), the only choice compatible
        with a Z4 enhancement living over omega.
        """
        n = self.b1
        rows = [0] * n
        for i in range(self.genus):
            a, b = 2 * i, 2 * i + 1
            rows[a] |= 1 << b
            rows[b] |= 1 << a
        g2 = 2 * self.genus
        if self.kind == KLEIN:
            rows[g2] |= 1 << (g2 + 1)
            rows[g2 + 1] |= 1 << g2
            rows[g2 + 1] |= 1 << (g2 + 1)
        elif self.kind == RP2:
            rows[g2] |= 1 << g2
        return tuple(rows)

    def omega_bits(self) -> int:
        """First Stiefel-Whitney covector: picks the orientation-reversing slot."""
        if self.kind == KLEIN:
            return 1 << (2 * self.genus + 1)
        if self.kind == RP2:
            return 1 << (2 * self.genus)
        return 0

    def slot_index(self, name: str) -> int:
        return self.pair_names().index(name)


def vec_dot(u: int, v: int) -> int:
    """Plain bit dot product over Z2."""
    return bin(u & v).count("1") & 1


def pairing(sig: SurfaceSignature, u: int, v: int) -> int:
    """Intersection pairing u.v in slot coordinates."""
    rows = sig.intersection_matrix()
    acc = 0
    w = u
    while w:
        i = (w & -w).bit_length() - 1
        acc ^= vec_dot(rows[i], v)
        w &= w - 1
    return acc


def dual_flip_vector(sig: SurfaceSignature, v: int) -> int:
    """The covector x -> x.v, represented as a bitmask via the form matrix."""
    rows = sig.intersection_matrix()
    out = 0
    w = v
    while w:
        i = (w & -w).bit_length() - 1
        out ^= rows[i]
        w &= w - 1
    return out


def solve_pairing(sig: SurfaceSignature, covector: int) -> int:
    """Find v with v.x = covector(x) for all x (the form is invertible)."""
    rows = list(sig.intersection_matrix())
    n = sig.b1
    # Gaussian elimination on [M | e_i] columns packed as (row, image) pairs.
    aug = [(rows[i], 1 << i) for i in range(n)]
    sol = 0
    b = covector
    for col in range(n):
        piv = next(
            (k for k in range(col, n) if aug[k][0] >> col & 1), None
        )
        if piv is None:
            raise ValueError("intersection form is degenerate")
        aug[col], aug[piv] = aug[piv], aug[col]
        for k in range(n):
            if k != col and aug[k][0] >> col & 1:
                aug[k] = (aug[k][0] ^ aug[col][0], aug[k][1] ^ aug[col][1])
    for col in range(n):
        if b >> col & 1:
            sol ^= aug[col][1]
    if dual_flip_vector(sig, sol) != covector:
        raise ValueError("no dual vector found")
    return sol


def loop_class(sig: SurfaceSignature, name: str) -> int:
    """Class of the glued side loop ``name`` ('a1', 'b1', ..., 'a', 'b', 'c').

    The loop of side x meets an arc through pair y once iff y == x, so the
    loop classes are the basis dual (under the form) to the crossing slots.
    """
    return solve_pairing(sig, 1 << sig.slot_index(name))


@dataclass(frozen=True)
class QuadraticForm:
    """Z2 quadratic refinement: q(x+y) = q(x) + q(y) + x.y."""

    sig: SurfaceSignature
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.sig.b1:
            raise ValueError("basis value count must equal b1")
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("basis values live in Z2")

    def eval(self, x: int) -> int:
        bits = [i for i in range(self.sig.b1) if x >> i & 1]
        rows = self.sig.intersection_matrix()
        q = 0
        for k, i in enumerate(bits):
            q ^= self.values[i]
            for j in bits[k + 1 :]:
                q ^= rows[i] >> j & 1
        return q

    def plus_covector(self, cov: int) -> "QuadraticForm":
        vals = tuple(
            (v + (cov >> i & 1)) & 1 for i, v in enumerate(self.values)
        )
        return QuadraticForm(self.sig, vals)


@dataclass(frozen=True)
class QuadraticEnhancement:
    """Z4 quadratic enhancement over omega: q(x+y) = q(x) + q(y) + 2(x.y)."""

    sig: SurfaceSignature
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.sig.b1:
            raise ValueError("basis value count must equal b1")
        omega = self.sig.omega_bits()
        for i, v in enumerate(self.values):
            if v not in (0, 1, 2, 3):
                raise ValueError("basis values live in Z4")
            if (v - (omega >> i & 1)) % 2:
                raise ValueError(f"value {v} on slot {i} violates the omega parity")

    def eval(self, x: int) -> int:
        bits = [i for i in range(self.sig.b1) if x >> i & 1]
        rows = self.sig.intersection_matrix()
        q = 0
        for k, i in enumerate(bits):
            q += self.values[i]
            for j in bits[k + 1 :]:
                q += 2 * (rows[i] >> j & 1)
        return q % 4

    def plus_twice_covector(self, cov: int) -> "QuadraticEnhancement":
        vals = tuple(
            (v + 2 * (cov >> i & 1)) % 4 for i, v in enumerate(self.values)
        )
        return QuadraticEnhancement(self.sig, vals)


def reference_form(sig: SurfaceSignature) -> QuadraticForm:
    """q0: the form vanishing on every slot."""
    return QuadraticForm(sig, (0,) * sig.b1)


def reference_enhancement(sig: SurfaceSignature) -> QuadraticEnhancement:
    """The standard enhancement: slot values equal omega.

    In slot coordinates this is (..0.., 0, 1) for Klein and (..0.., 1) for
    RP^2; on the Klein loop classes it takes the values 3 on loop a and 0 on
    loop b, matching the dual-basis convention.
    """
    omega = sig.omega_bits()
    return QuadraticEnhancement(
        sig, tuple(omega >> i & 1 for i in range(sig.b1))
    )


def enumerate_forms(sig: SurfaceSignature):
    """All 2^b1 quadratic forms, lexicographic in basis values."""
    return [
        QuadraticForm(sig, vals)
        for vals in product((0, 1), repeat=sig.b1)
    ]


def enumerate_enhancements(sig: SurfaceSignature):
    """All 2^b1 enhancements over omega, lexicographic in basis values."""
    omega = sig.omega_bits()
    choices = [
        ((0, 2) if not omega >> i & 1 else (1, 3)) for i in range(sig.b1)
    ]
    return [
        QuadraticEnhancement(sig, vals) for vals in product(*choices)
    ]


def arf(q: QuadraticForm) -> int:
    """Arf invariant via the Gauss sum (-1)^Arf = 2^(-b1/2) sum_x (-1)^q(x)."""
    b1 = q.sig.b1
    if b1 % 2:
        raise ValueError("Arf invariant needs even b1 (orientable signatures)")
    total = sum(-1 if q.eval(x) else 1 for x in range(1 << b1))
    root = 1 << (b1 // 2)
    if total == root:
        return 0
    if total == -root:
        return 1
    raise ValueError(f"Gauss sum {total} is not +-sqrt(|H|); corrupted form")


BROWN_TOL = 1e-12


def brown(q: QuadraticEnhancement) -> int:
    """Brown invariant: exp(i*pi/4)^Br = |H|^(-1/2) sum_x i^q(x), Br in Z8."""
    b1 = q.sig.b1
    total = 0j
    for x in range(1 << b1):
        total += 1j ** q.eval(x)
    modulus = math.sqrt(1 << b1)
    if abs(abs(total) - modulus) > BROWN_TOL * max(1.0, modulus):
        raise ValueError(f"Gauss sum modulus {abs(total)} != sqrt(|H|)={modulus}")
    eighths = cmath.phase(total) / (math.pi / 4)
    br = round(eighths) % 8
    if abs(eighths - round(eighths)) > 1e-9:
        raise ValueError("Gauss sum phase is not a multiple of pi/4")
    return br


def enhancement_difference_class(
    q1: QuadraticEnhancement, q2: QuadraticEnhancement
) -> int:
    """The Delta with q1(x) - q2(x) = 2(Delta.x) for all x."""
    cov = 0
    for i in range(q1.sig.b1):
        d = (q1.values[i] - q2.values[i]) % 4
        if d == 2:
            cov |= 1 << i
        elif d:
            raise ValueError("enhancements do not differ by twice a covector")
    return solve_pairing(q1.sig, cov)


def form_difference_class(q1: QuadraticForm, q2: QuadraticForm) -> int:
    """The Delta with q1(x) + q2(x) = Delta.x for all x."""
    cov = 0
    for i in range(q1.sig.b1):
        if q1.values[i] != q2.values[i]:
            cov |= 1 << i
    return solve_pairing(q1.sig, cov)
