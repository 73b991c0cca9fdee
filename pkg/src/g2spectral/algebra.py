"""Exact arithmetic over the number field K = Q(i, sqrt3).

Rationals are ``gmpy2.mpq``. A :class:`Scalar` is ``a + b*i + c*sqrt3 + d*i*sqrt3``
with rational coordinates. On top of that sit univariate polynomials,
rational functions, dense matrices and the symmetric root sums used by the
cubic form.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import gmpy2
import mpmath
from gmpy2 import mpq, mpz

from .errors import NotInFieldError, PreconditionError, ShapeError

Rational = type(mpq(0))
_Q0 = mpq(0)
_Q1 = mpq(1)


def rational(x: object) -> Rational:
    """Coerce ints, mpq, Fraction and ``"p/q"`` strings to ``mpq``."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, type(mpz(0)))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational string")
        return mpq(s)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_rational(q: Rational) -> str:
    return f"{q.numerator}/{q.denominator}"


class Scalar:
    """Element ``a + b*i + c*sqrt3 + d*i*sqrt3`` of Q(i, sqrt3). Immutable."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: object = 0, b: object = 0, c: object = 0, d: object = 0) -> None:
        object.__setattr__(self, "a", rational(a))
        object.__setattr__(self, "b", rational(b))
        object.__setattr__(self, "c", rational(c))
        object.__setattr__(self, "d", rational(d))

    @classmethod
    def _new(cls, a: Rational, b: Rational, c: Rational, d: Rational) -> Scalar:
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        object.__setattr__(obj, "c", c)
        object.__setattr__(obj, "d", d)
        return obj

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Scalar is immutable")

    @property
    def coords(self) -> tuple[Rational, Rational, Rational, Rational]:
        return (self.a, self.b, self.c, self.d)

    @property
    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def __bool__(self) -> bool:
        return bool(self.a or self.b or self.c or self.d)

    def __eq__(self, other: object) -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.c == o.c and self.d == o.d

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(self.a)
        return hash((self.a, self.b, self.c, self.d))

    def __neg__(self) -> Scalar:
        return Scalar._new(-self.a, -self.b, -self.c, -self.d)

    def __pos__(self) -> Scalar:
        return self

    def __add__(self, other: object) -> Scalar:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar._new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other: object) -> Scalar:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar._new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other: object) -> Scalar:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> Scalar:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = o.a, o.b, o.c, o.d
        if not (f or g or h):
            return Scalar._new(a * e, b * e, c * e, d * e)
        if not (b or c or d):
            return Scalar._new(a * e, a * f, a * g, a * h)
        # i^2 = -1, sqrt3^2 = 3, (i sqrt3)^2 = -3
        return Scalar._new(
            a * e - b * f + 3 * (c * g - d * h),
            a * f + b * e + 3 * (c * h + d * g),
            a * g + c * e - b * h - d * f,
            a * h + d * e + b * g + c * f,
        )

    __rmul__ = __mul__

    def conj_i(self) -> Scalar:
        """The automorphism i -> -i (complex conjugation)."""
        return Scalar._new(self.a, -self.b, self.c, -self.d)

    def conj_sqrt3(self) -> Scalar:
        """The automorphism sqrt3 -> -sqrt3."""
        return Scalar._new(self.a, self.b, -self.c, -self.d)

    def norm(self) -> Rational:
        """Field norm down to Q (product of the four conjugates)."""
        p = self * self.conj_i()
        n = p * p.conj_sqrt3()
        assert n.is_rational
        return n.a

    def inverse(self) -> Scalar:
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(i, sqrt3)")
        if self.is_rational:
            return Scalar._new(1 / self.a, _Q0, _Q0, _Q0)
        # x = u + i v with u, v in Q(sqrt3); 1/x = (u - i v) / (u^2 + v^2)
        a, b, c, d = self.a, self.b, self.c, self.d
        p = a * a + b * b + 3 * (c * c + d * d)
        r = 2 * (a * c + b * d)
        den = p * p - 3 * r * r
        n = Scalar._new(p / den, _Q0, -r / den, _Q0)
        return self.conj_i() * n

    def __truediv__(self, other: object) -> Scalar:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_rational:
            if not o.a:
                raise ZeroDivisionError("division by zero in Q(i, sqrt3)")
            e = o.a
            return Scalar._new(self.a / e, self.b / e, self.c / e, self.d / e)
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> Scalar:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> Scalar:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def to_complex(self, i_sign: int = 1, sqrt3_sign: int = 1) -> complex:
        s3 = sqrt3_sign * math.sqrt(3.0)
        re = float(self.a) + float(self.c) * s3
        im = i_sign * (float(self.b) + float(self.d) * s3)
        return complex(re, im)

    def to_mpc(self, sqrt3_sign: int = 1) -> mpmath.mpc:
        s3 = sqrt3_sign * mpmath.sqrt(3)

        def q(x: Rational) -> mpmath.mpf:
            return mpmath.mpf(int(x.numerator)) / int(x.denominator)

        return mpmath.mpc(q(self.a) + q(self.c) * s3, q(self.b) + q(self.d) * s3)

    def to_json(self) -> list[str]:
        return [format_rational(x) for x in self.coords]

    @classmethod
    def from_json(cls, data: object) -> Scalar:
        if isinstance(data, (list, tuple)):
            if len(data) != 4:
                raise ValueError("a Scalar needs exactly four coordinates [1, i, sqrt3, i*sqrt3]")
            return cls(*(rational(x) for x in data))
        if isinstance(data, (int, str)) and not isinstance(data, bool):
            return cls(rational(data))
        raise ValueError(f"cannot read a Scalar from {data!r}")

    def sort_key(self) -> tuple[Rational, ...]:
        return self.coords

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        parts = []
        for coef, unit in zip(self.coords, ("", "i", "√3", "i√3")):
            if not coef:
                continue
            if not unit:
                parts.append(str(coef))
            elif coef == 1:
                parts.append(unit)
            elif coef == -1:
                parts.append("-" + unit)
            else:
                parts.append(f"{coef}*{unit}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")


def _coerce(x: object) -> Scalar:
    if type(x) is Scalar:
        return x
    if isinstance(x, (int, Rational, Fraction, type(mpz(0)))) and not isinstance(x, bool):
        return Scalar._new(rational(x), _Q0, _Q0, _Q0)
    return NotImplemented


def as_scalar(x: object) -> Scalar:
    s = _coerce(x)
    if s is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as a Scalar")
    return s


ZERO = Scalar._new(_Q0, _Q0, _Q0, _Q0)
ONE = Scalar._new(_Q1, _Q0, _Q0, _Q0)
I = Scalar._new(_Q0, _Q1, _Q0, _Q0)
SQRT3 = Scalar._new(_Q0, _Q0, _Q1, _Q0)


def field_inverse(x: Scalar) -> Scalar:
    return as_scalar(x).inverse()


def _rational_root(q: Rational, n: int) -> Rational | None:
    """Real rational n-th root of q, if there is one (positive for even n)."""
    if q < 0 and n % 2 == 0:
        return None
    sign = -1 if q < 0 else 1
    num, exact_n = gmpy2.iroot(abs(q.numerator), n)
    den, exact_d = gmpy2.iroot(q.denominator, n)
    if exact_n and exact_d:
        return sign * mpq(num, den)
    return None


def nth_roots(x: Scalar, n: int) -> list[Scalar]:
    """All n-th roots of ``x`` lying in Q(i, sqrt3), sorted by coordinates.

    Candidates are found numerically and then checked exactly, so the result
    is exact. If ``D`` clears the denominators of ``x`` then ``2*D*w`` has
    integer coordinates for every root ``w`` (the ring of integers is
    Z[zeta_12]), which bounds the precision needed for rounding.
    """
    x = as_scalar(x)
    if n < 1:
        raise ValueError("root index must be positive")
    if not x:
        return [ZERO]
    den = 1
    for q in x.coords:
        den = gmpy2.lcm(den, q.denominator)
    scale = 2 * int(den)
    magnitude = max(abs(x.to_complex(1, 1)), abs(x.to_complex(1, -1)), 1e-300)
    digits = int(math.log10(scale + 1) + max(0.0, math.log10(magnitude) / n)) + 25
    found: dict[tuple, Scalar] = {}
    with mpmath.workdps(digits):
        s3 = mpmath.sqrt(3)
        z1, z2 = x.to_mpc(1), x.to_mpc(-1)
        roots1 = [mpmath.root(z1, n, k) for k in range(n)]
        roots2 = [mpmath.root(z2, n, k) for k in range(n)]
        for w1, w2 in itertools.product(roots1, roots2):
            approx = (
                (w1.real + w2.real) / 2,
                (w1.imag + w2.imag) / 2,
                (w1.real - w2.real) / (2 * s3),
                (w1.imag - w2.imag) / (2 * s3),
            )
            cand = Scalar(*(mpq(int(mpmath.nint(v * scale)), scale) for v in approx))
            if cand.coords not in found and cand ** n == x:
                found[cand.coords] = cand
    return [found[k] for k in sorted(found)]


def principal_root(x: Scalar, n: int) -> Scalar:
    """A deterministic n-th root of ``x`` in Q(i, sqrt3).

    Rational inputs with a real rational root get that root (positive for
    even ``n``). Otherwise the root matching the principal complex branch
    under the embedding i -> i, sqrt3 -> +sqrt3 is returned.
    Raises :class:`NotInFieldError` when no root lies in the field.
    """
    x = as_scalar(x)
    if x.is_rational:
        r = _rational_root(x.a, n)
        if r is not None:
            return Scalar(r)
    roots = nth_roots(x, n)
    if not roots:
        raise NotInFieldError(f"{x} has no {n}-th root in Q(i, sqrt3)", witness=x)
    target = complex(x.to_complex()) ** (1.0 / n)
    return min(roots, key=lambda w: abs(w.to_complex() - target))


def sqrt(x: Scalar) -> Scalar:
    return principal_root(x, 2)


# --------------------------------------------------------------------------
# univariate polynomials


class UniPoly:
    """Polynomial in one variable over K, coefficients in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[object] = ()) -> None:
        cs = [as_scalar(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("UniPoly is immutable")

    @classmethod
    def constant(cls, c: object) -> UniPoly:
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c: object = 1) -> UniPoly:
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Iterable[object]) -> UniPoly:
        p = cls([1])
        for r in roots:
            p = p * cls([-as_scalar(r), 1])
        return p

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def coeff(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniPoly):
            s = _coerce(other)
            if s is NotImplemented:
                return NotImplemented
            other = UniPoly([s])
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _lift(self, other: object) -> UniPoly:
        if isinstance(other, UniPoly):
            return other
        s = _coerce(other)
        if s is NotImplemented:
            return NotImplemented
        return UniPoly([s])

    def __add__(self, other: object) -> UniPoly:
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return UniPoly(self.coeff(k) + o.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> UniPoly:
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other: object) -> UniPoly:
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> UniPoly:
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> UniPoly:
        if not isinstance(other, UniPoly):
            s = _coerce(other)
            if s is NotImplemented:
                return NotImplemented
            return UniPoly(c * s for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            for j, y in enumerate(other.coeffs):
                out[i + j] = out[i + j] + x * y
        return UniPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> UniPoly:
        s = _coerce(other)
        if s is NotImplemented:
            return NotImplemented
        inv = s.inverse()
        return UniPoly(c * inv for c in self.coeffs)

    def __pow__(self, n: int) -> UniPoly:
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = UniPoly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: UniPoly) -> tuple[UniPoly, UniPoly]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        inv_lc = other.lc.inverse()
        quot = [ZERO] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] * inv_lc
            if not c:
                continue
            quot[k - dq] = c
            for j, oc in enumerate(other.coeffs):
                rem[k - dq + j] = rem[k - dq + j] - c * oc
        return UniPoly(quot), UniPoly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other: UniPoly) -> UniPoly:
        return divmod(self, other)[0]

    def __mod__(self, other: UniPoly) -> UniPoly:
        return divmod(self, other)[1]

    def monic(self) -> UniPoly:
        if not self:
            return self
        return self / self.lc

    def derivative(self) -> UniPoly:
        return UniPoly(k * c for k, c in enumerate(self.coeffs) if k)

    def __call__(self, x: object) -> Scalar:
        x = as_scalar(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_complex_coeffs(self) -> list[complex]:
        return [c.to_complex() for c in self.coeffs]

    def to_json(self) -> list[list[str]]:
        return [c.to_json() for c in self.coeffs]

    @classmethod
    def from_json(cls, data: object) -> UniPoly:
        if isinstance(data, (int, str)) and not isinstance(data, bool):
            return cls([Scalar.from_json(data)])
        if not isinstance(data, list):
            raise ValueError("a polynomial is an array of Scalars in ascending degree")
        return cls(Scalar.from_json(c) for c in data)

    def __repr__(self) -> str:
        return f"UniPoly({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = str(c)
            if not c.is_rational:
                cs = f"({cs})"
            if k == 0:
                terms.append(cs)
            else:
                mono = "z" if k == 1 else f"z^{k}"
                terms.append(mono if c == 1 else f"{cs}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")


Z = UniPoly([0, 1])


def poly_gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Monic gcd (the zero polynomial when both inputs are zero)."""
    while q:
        p, q = q, p % q
    return p.monic()


def poly_xgcd(p: UniPoly, q: UniPoly) -> tuple[UniPoly, UniPoly, UniPoly]:
    """Return (g, s, t) with s*p + t*q = g, g monic."""
    r0, r1 = p, q
    s0, s1 = UniPoly([1]), UniPoly()
    t0, t1 = UniPoly(), UniPoly([1])
    while r1:
        quo, rem = divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quo * s1
        t0, t1 = t1, t0 - quo * t1
    if not r0:
        return r0, s0, t0
    inv = r0.lc.inverse()
    return r0 * inv, s0 * inv, t0 * inv


def is_squarefree(p: UniPoly) -> bool:
    return poly_gcd(p, p.derivative()).degree == 0


def sylvester(p: UniPoly, q: UniPoly) -> Matrix:
    m, n = p.degree, q.degree
    if m < 0 or n < 0:
        raise ShapeError("Sylvester matrix of a zero polynomial")
    size = m + n
    rows = []
    for k in range(n):
        row = [ZERO] * size
        for j, c in enumerate(reversed(p.coeffs)):
            row[k + j] = c
        rows.append(row)
    for k in range(m):
        row = [ZERO] * size
        for j, c in enumerate(reversed(q.coeffs)):
            row[k + j] = c
        rows.append(row)
    return Matrix(rows)


def resultant(p: UniPoly, q: UniPoly) -> Scalar:
    """Resultant as the determinant of the Sylvester matrix."""
    if not p or not q:
        return ZERO
    if p.degree == 0 and q.degree == 0:
        return ONE
    if p.degree == 0:
        return p.lc ** q.degree
    if q.degree == 0:
        return q.lc ** p.degree
    return sylvester(p, q).det()


class RatFunc:
    """Reduced quotient num/den of polynomials, den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: UniPoly | object, den: UniPoly | object = 1) -> None:
        num = num if isinstance(num, UniPoly) else UniPoly([num])
        den = den if isinstance(den, UniPoly) else UniPoly([den])
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        g = poly_gcd(num, den) if num else den.monic()
        if g.degree > 0:
            num, den = num // g, den // g
        lc_inv = den.lc.inverse()
        object.__setattr__(self, "num", num * lc_inv)
        object.__setattr__(self, "den", den * lc_inv)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("RatFunc is immutable")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __add__(self, other: RatFunc) -> RatFunc:
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __mul__(self, other: RatFunc) -> RatFunc:
        return RatFunc(self.num * other.num, self.den * other.den)

    def __call__(self, x: object) -> Scalar:
        d = self.den(x)
        if not d:
            raise ZeroDivisionError(f"pole of {self} at {x}")
        return self.num(x) / d

    def __repr__(self) -> str:
        return f"RatFunc(({self.num}) / ({self.den}))"


# --------------------------------------------------------------------------
# matrices


def _to_grid(rows: Sequence[Sequence[Scalar]]) -> tuple[list[list], bool]:
    """Copy into a mutable grid, as mpq when every entry is rational."""
    rational_only = all(x.is_rational for row in rows for x in row)
    if rational_only:
        return [[x.a for x in row] for row in rows], True
    return [list(row) for row in rows], False


def _from_value(x: object) -> Scalar:
    return x if type(x) is Scalar else Scalar._new(x, _Q0, _Q0, _Q0)


def _rref(grid: list[list]) -> list[int]:
    """In-place reduced row echelon form; returns pivot columns."""
    nrows = len(grid)
    ncols = len(grid[0]) if grid else 0
    pivots = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        piv = next((k for k in range(r, nrows) if grid[k][col]), None)
        if piv is None:
            continue
        grid[r], grid[piv] = grid[piv], grid[r]
        prow = grid[r]
        inv = 1 / prow[col]
        for j in range(col, ncols):
            if prow[j]:
                prow[j] = prow[j] * inv
        for k in range(nrows):
            if k == r:
                continue
            row = grid[k]
            factor = row[col]
            if not factor:
                continue
            for j in range(col, ncols):
                if prow[j]:
                    row[j] = row[j] - factor * prow[j]
        pivots.append(col)
        r += 1
    return pivots


class Matrix:
    """Dense matrix over K. Vectors are plain tuples of Scalars."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[object]]) -> None:
        rs = tuple(tuple(as_scalar(x) for x in row) for row in rows)
        if not rs:
            raise ShapeError("a matrix needs at least one row")
        width = len(rs[0])
        if width == 0 or any(len(r) != width for r in rs):
            raise ShapeError("ragged or empty matrix rows")
        object.__setattr__(self, "rows", rs)
        object.__setattr__(self, "nrows", len(rs))
        object.__setattr__(self, "ncols", width)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Matrix is immutable")

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m: int, n: int | None = None) -> Matrix:
        return cls([[ZERO] * (m if n is None else n) for _ in range(m)])

    @classmethod
    def diag(cls, entries: Sequence[object]) -> Matrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[object]]) -> Matrix:
        return cls(zip(*cols))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    @property
    def is_rational(self) -> bool:
        return all(x.is_rational for row in self.rows for x in row)

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[tuple[Scalar, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ShapeError("matrix shapes differ")
        return Matrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ShapeError("matrix shapes differ")
        return Matrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> Matrix:
        return Matrix([[-x for x in r] for r in self.rows])

    def __mul__(self, s: object) -> Matrix:
        s = _coerce(s)
        if s is NotImplemented:
            return NotImplemented
        return Matrix([[x * s for x in r] for r in self.rows])

    __rmul__ = __mul__

    def __matmul__(self, other: Matrix | Sequence[Scalar]) -> Matrix | tuple[Scalar, ...]:
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.columns()
            return Matrix([[_dot(r, c) for c in cols] for r in self.rows])
        v = tuple(as_scalar(x) for x in other)
        if len(v) != self.ncols:
            raise ShapeError("vector length does not match matrix")
        return tuple(_dot(r, v) for r in self.rows)

    def __pow__(self, n: int) -> Matrix:
        if not self.is_square or n < 0:
            raise ShapeError("matrix power needs a square matrix and n >= 0")
        result = Matrix.identity(self.nrows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def transpose(self) -> Matrix:
        return Matrix(zip(*self.rows))

    T = property(transpose)

    def trace(self) -> Scalar:
        if not self.is_square:
            raise ShapeError("trace of a non-square matrix")
        acc = ZERO
        for k in range(self.nrows):
            acc = acc + self.rows[k][k]
        return acc

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix([[self.rows[i][j] for j in cols] for i in rows])

    def rref(self) -> tuple[Matrix, list[int]]:
        grid, _ = _to_grid(self.rows)
        pivots = _rref(grid)
        return Matrix([[_from_value(x) for x in row] for row in grid]), pivots

    def rank(self) -> int:
        grid, _ = _to_grid(self.rows)
        return len(_rref(grid))

    def nullspace(self) -> list[tuple[Scalar, ...]]:
        """Basis of {v : M v = 0}, one vector per free column of the RREF."""
        grid, _ = _to_grid(self.rows)
        pivots = _rref(grid)
        free = [j for j in range(self.ncols) if j not in set(pivots)]
        basis = []
        for fj in free:
            v = [ZERO] * self.ncols
            v[fj] = ONE
            for r, pj in enumerate(pivots):
                x = grid[r][fj]
                if x:
                    v[pj] = -_from_value(x)
            basis.append(tuple(v))
        return basis

    def det(self) -> Scalar:
        if not self.is_square:
            raise ShapeError("determinant of a non-square matrix")
        grid, rational_only = _to_grid(self.rows)
        n = self.nrows
        det = _Q1 if rational_only else ONE
        for col in range(n):
            piv = next((k for k in range(col, n) if grid[k][col]), None)
            if piv is None:
                return ZERO
            if piv != col:
                grid[col], grid[piv] = grid[piv], grid[col]
                det = -det
            p = grid[col][col]
            det = det * p
            inv = 1 / p
            for k in range(col + 1, n):
                factor = grid[k][col]
                if not factor:
                    continue
                factor = factor * inv
                row, prow = grid[k], grid[col]
                for j in range(col + 1, n):
                    if prow[j]:
                        row[j] = row[j] - factor * prow[j]
        return as_scalar(det) if not isinstance(det, Scalar) else det

    def inverse(self) -> Matrix:
        if not self.is_square:
            raise ShapeError("inverse of a non-square matrix")
        n = self.nrows
        aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.rows)]
        grid, _ = _to_grid(aug)
        pivots = _rref(grid)
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return Matrix([[_from_value(x) for x in row[n:]] for row in grid])

    def charpoly(self) -> UniPoly:
        """det(x - M) via Faddeev-LeVerrier (exact in characteristic 0)."""
        if not self.is_square:
            raise ShapeError("characteristic polynomial of a non-square matrix")
        n = self.nrows
        grid, rational_only = _to_grid(self.rows)
        zero = _Q0 if rational_only else ZERO
        coeffs = [None] * (n + 1)
        coeffs[n] = _Q1 if rational_only else ONE
        mk = [[zero] * n for _ in range(n)]
        for k in range(1, n + 1):
            c_prev = coeffs[n - k + 1]
            for i in range(n):
                mk[i][i] = mk[i][i] + c_prev
            amk = _grid_mul(grid, mk, zero)
            tr = zero
            for i in range(n):
                tr = tr + amk[i][i]
            coeffs[n - k] = -tr / k
            mk = amk
        return UniPoly(as_scalar(c) if not isinstance(c, Scalar) else c for c in coeffs)

    def is_zero(self) -> bool:
        return not any(x for row in self.rows for x in row)

    def to_json(self) -> list[list[list[str]]]:
        return [[x.to_json() for x in row] for row in self.rows]

    @classmethod
    def from_json(cls, data: object) -> Matrix:
        if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
            raise ValueError("a matrix is a non-empty array of rows of Scalars")
        return cls([[Scalar.from_json(x) for x in row] for row in data])

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix([{body}])"


def _dot(r: Sequence[Scalar], c: Sequence[Scalar]) -> Scalar:
    acc = ZERO
    for x, y in zip(r, c):
        if x and y:
            acc = acc + x * y
    return acc


def _grid_mul(a: list[list], b: list[list], zero: object) -> list[list]:
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        ai = a[i]
        row = []
        for j in range(p):
            acc = zero
            for k in range(m):
                x = ai[k]
                if x:
                    y = b[k][j]
                    if y:
                        acc = acc + x * y
            row.append(acc)
        out.append(row)
    return out


def vector(*entries: object) -> tuple[Scalar, ...]:
    return tuple(as_scalar(x) for x in entries)


def basis_vector(n: int, i: int) -> tuple[Scalar, ...]:
    return tuple(ONE if k == i else ZERO for k in range(n))


def dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    return _dot(u, v)


def vec_is_zero(v: Sequence[Scalar]) -> bool:
    return not any(v)


# --------------------------------------------------------------------------
# companion matrices and sums over roots


def companion(r: UniPoly) -> Matrix:
    """Companion matrix of r/lc(r): ones on the subdiagonal, last column -coeffs."""
    if r.degree < 1:
        raise ShapeError("companion matrix needs degree >= 1", witness=r.degree)
    m = r.monic()
    n = m.degree
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = ONE
    for i in range(n):
        rows[i][n - 1] = -m.coeffs[i]
    return Matrix(rows)


def _check_root_sum(r: UniPoly, h: RatFunc) -> None:
    if r.degree < 1:
        raise ShapeError("root sum over a polynomial of degree < 1", witness=r.degree)
    g = poly_gcd(r, r.derivative())
    if g.degree > 0:
        raise PreconditionError("polynomial is not squarefree", witness=g)
    g = poly_gcd(r, h.den)
    if g.degree > 0:
        raise PreconditionError("denominator shares a root with the polynomial", witness=g)


def reduce_mod(r: UniPoly, h: RatFunc) -> UniPoly:
    """The polynomial H of degree < deg r with H = h in K[z]/(r)."""
    _check_root_sum(r, h)
    g, s, _ = poly_xgcd(h.den, r)
    assert g.degree == 0
    return (h.num * s) % r


def eval_at_matrix(p: UniPoly, m: Matrix) -> Matrix:
    n = m.nrows
    acc = Matrix.zeros(n)
    ident = Matrix.identity(n)
    for c in reversed(p.coeffs):
        acc = acc @ m + ident * c
    return acc


def root_sum(r: UniPoly, h: RatFunc | UniPoly) -> Scalar:
    """Sum of h(a) over the roots a of the squarefree polynomial r.

    Computed as trace(H(C)) where C is the companion matrix of r and H the
    reduction of h modulo r (the denominator is inverted in K[z]/(r)).
    No root is ever extracted.
    """
    if isinstance(h, UniPoly):
        h = RatFunc(h)
    big_h = reduce_mod(r, h)
    return eval_at_matrix(big_h, companion(r)).trace()


def power_sums(r: UniPoly, count: int) -> list[Scalar]:
    """Power sums p_0..p_{count-1} of the roots of r via Newton's identities."""
    m = r.monic()
    n = m.degree
    # e-coefficients: m = z^n + c_{n-1} z^{n-1} + ... ; c_{n-k} = (-1)^k e_k
    c = [m.coeff(n - k) for k in range(n + 1)]
    p = [as_scalar(n)]
    for k in range(1, count):
        acc = ZERO
        for j in range(1, min(k - 1, n) + 1):
            acc = acc + c[j] * p[k - j]
        if k <= n:
            acc = acc + k * c[k]
        p.append(-acc)
    return p[:count]


def root_sum_newton(r: UniPoly, h: RatFunc | UniPoly) -> Scalar:
    """Same value as :func:`root_sum`, through Newton power sums instead of a trace."""
    if isinstance(h, UniPoly):
        h = RatFunc(h)
    big_h = reduce_mod(r, h)
    ps = power_sums(r, max(len(big_h.coeffs), 1))
    acc = ZERO
    for k, c in enumerate(big_h.coeffs):
        acc = acc + c * ps[k]
    return acc


# --------------------------------------------------------------------------
# polynomial identities certified on grids


def grid_nodes(degree: int) -> list[Scalar]:
    """degree+1 distinct nonzero rational nodes 1/3, 1, 5/3, ..."""
    return [Scalar(mpq(2 * k + 1, 3)) for k in range(degree + 1)]


def certify_on_grid(
    lhs: Callable[..., Scalar],
    rhs: Callable[..., Scalar],
    degrees: Sequence[int],
) -> tuple[bool, tuple | None]:
    """Exact certificate that two polynomial expressions agree identically.

    ``degrees[k]`` bounds the degree of lhs - rhs in the k-th variable (after
    clearing any denominators that are nonzero on the nodes). A polynomial of
    degree <= d_k in each variable vanishing on a product grid with d_k + 1
    nodes per axis is zero. Returns (ok, first failing point).
    """
    axes = [grid_nodes(d) for d in degrees]
    for point in itertools.product(*axes):
        if lhs(*point) != rhs(*point):
            return False, point
    return True, None
