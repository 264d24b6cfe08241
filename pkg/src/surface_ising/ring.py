"""Exact coefficient ring for the Pfaffian kernels.

Everything symbolic in this package lives in the ring Q(i)[x1^-1, x1, x2, ...]:
sparse multivariate Laurent polynomials whose coefficients are Gaussian
rationals (pairs of ``fractions.Fraction``).  Gaussian coefficients are needed
because twisted adjacency entries carry exact powers of i, and Laurent
exponents appear transiently when a skew matrix is rescaled by half-weights.

Monomials are sorted tuples of ``(variable_name, exponent)`` with nonzero
exponents; the empty tuple is the constant monomial.  Polynomials are
immutable once built.
"""

from __future__ import annotations

from fractions import Fraction


class GaussianRational:
    """A number a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __add__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if not self.im:
            return _frac_str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"({_frac_str(self.re)}{sign}{_imag_str(abs(self.im))})"


def _coerce(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to GaussianRational")


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

def _imag_str(q: Fraction) -> str:
    if q == 1:
        return "i"
    if q == -1:
        return "-i"
    return f"{_frac_str(q)}*i"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)

#: exact i**k for k mod 4
I_POW = (GR_ONE, GR_I, GaussianRational(-1), GaussianRational(0, -1))


class Poly:
    """Sparse Laurent polynomial over the Gaussian rationals.

    ``coeffs`` maps monomials (sorted tuples of (var, exp)) to nonzero
    GaussianRational coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = dict(coeffs) if coeffs else {}

    @classmethod
    def const(cls, value) -> "Poly":
        value = value if isinstance(value, GaussianRational) else _coerce(value)
        return cls({(): value}) if value else cls()

    @classmethod
    def variable(cls, name: str, exp: int = 1) -> "Poly":
        if exp == 0:
            return cls.const(1)
        return cls({((name, exp),): GR_ONE})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        other = self._coerce_poly(other)
        out = dict(self.coeffs)
        for mono, c in other.coeffs.items():
            acc = out.get(mono)
            s = c if acc is None else acc + c
            if s:
                out[mono] = s
            elif acc is not None:
                del out[mono]
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce_poly(other))

    def __rsub__(self, other):
        return self._coerce_poly(other) - self

    def __mul__(self, other):
        other = self._coerce_poly(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                acc = out.get(m)
                s = c if acc is None else acc + c
                if s:
                    out[m] = s
                elif acc is not None:
                    del out[m]
        return Poly(out)

    __rmul__ = __mul__

    def scale(self, c: GaussianRational) -> "Poly":
        if not c:
            return Poly()
        return Poly({m: v * c for m, v in self.coeffs.items()})

    @staticmethod
    def _coerce_poly(value) -> "Poly":
        if isinstance(value, Poly):
            return value
        return Poly.const(value)

    def __eq__(self, other):
        if not isinstance(other, (Poly, GaussianRational, int, Fraction)):
            return NotImplemented
        return self._coerce_poly(other).coeffs == self.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def constant_term(self) -> GaussianRational:
        return self.coeffs.get((), GR_ZERO)

    def as_scalar(self) -> GaussianRational:
        """The value of a constant polynomial; error if variables remain."""
        for mono in self.coeffs:
            if mono:
                raise ValueError(f"polynomial is not constant: {self}")
        return self.constant_term()

    def substitute(self, assignment) -> "Poly":
        """Map variables to Poly/scalar values (must cover all variables used)."""
        out = Poly()
        for mono, c in self.coeffs.items():
            term = Poly.const(c)
            for var, exp in mono:
                val = Poly._coerce_poly(assignment[var])
                if exp < 0:
                    val = Poly.const(_invert_scalar(val))
                    exp = -exp
                for _ in range(exp):
                    term = term * val
            out = out + term
        return out

    def eval_complex(self, assignment) -> complex:
        """Numeric evaluation with a var -> complex/float mapping."""
        total = 0j
        for mono, c in self.coeffs.items():
            val = complex(c)
            for var, exp in mono:
                val *= complex(assignment[var]) ** exp
            total += val
        return total

    def variables(self):
        seen = set()
        for mono in self.coeffs:
            for var, _ in mono:
                seen.add(var)
        return sorted(seen)

    def sorted_terms(self):
        def key(item):
            mono, _ = item
            return (sum(e for _, e in mono), mono)

        return sorted(self.coeffs.items(), key=key)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            factors = []
            for var, exp in mono:
                factors.append(var if exp == 1 else f"{var}^{exp}")
            body = "*".join(factors)
            cs = str(c)
            if body:
                if cs == "1":
                    term = body
                elif cs == "-1":
                    term = f"-{body}"
                else:
                    term = f"{cs}*{body}"
            else:
                term = cs
            parts.append(term)
        text = parts[0]
        for term in parts[1:]:
            text += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
        return text

    def __repr__(self):
        return f"Poly({self})"


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    merged = dict(m1)
    for var, exp in m2:
        e = merged.get(var, 0) + exp
        if e:
            merged[var] = e
        else:
            del merged[var]
    return tuple(sorted(merged.items()))


def _invert_scalar(p: Poly) -> GaussianRational:
    s = p.as_scalar()
    if not s:
        raise ZeroDivisionError("cannot invert zero")
    return GR_ONE / s


POLY_ZERO = Poly()
POLY_ONE = Poly.const(1)


def eighth_root_times_half_power(phase_eighths: int, half_power: int) -> GaussianRational:
    """Exact value of exp(i*pi/4)**phase_eighths / 2**(half_power/2).

    Only combinations that land in Q(i) are representable: phase_eighths and
    half_power must have the same parity.  These are exactly the prefactors
    appearing in the partition-function theorems.
    """
    phase_eighths %= 8
    if (phase_eighths - half_power) % 2 != 0:
        raise ValueError("phase/power combination is irrational")
    if phase_eighths % 2 == 0:
        quarter = I_POW[(phase_eighths // 2) % 4]
        num, extra = quarter, 0
    else:
        # exp(i*pi/4)**odd = (1+i)/sqrt(2) * i**((odd-1)/2)
        num = GaussianRational(1, 1) * I_POW[((phase_eighths - 1) // 2) % 4]
        extra = 1  # carries one factor sqrt(2) in the numerator
    # num / sqrt(2)**extra / sqrt(2)**half_power, with extra+half_power even
    k = (extra + half_power) // 2
    if extra + half_power < 0:
        return num * (2 ** (-k))
    return num / (2**k)
