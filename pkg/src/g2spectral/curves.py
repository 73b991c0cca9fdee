"""Spectral, intermediate and cameral curves of G2 on one affine chart.

Everything is chart-local: f and q are polynomials in the chart coordinate
z, and curve identities are checked by exact substitution.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from gmpy2 import mpq

from .algebra import (
    ONE,
    ZERO,
    Matrix,
    Scalar,
    UniPoly,
    as_scalar,
    certify_on_grid,
    poly_gcd,
)
from .errors import PreconditionError, ShapeError

Q54 = Scalar(mpq(1, 54))


def _poly(x: object) -> UniPoly:
    return x if isinstance(x, UniPoly) else UniPoly([as_scalar(x)])


@dataclass(frozen=True)
class CurveFamily:
    """(f, q) on a chart of a base curve of genus ``g_base``."""

    g_base: int
    f: UniPoly
    q: UniPoly

    def __post_init__(self) -> None:
        if not isinstance(self.g_base, int) or self.g_base < 2:
            raise PreconditionError("base genus must be an integer >= 2", witness=self.g_base)
        object.__setattr__(self, "f", _poly(self.f))
        object.__setattr__(self, "q", _poly(self.q))

    @property
    def q_dual(self) -> UniPoly:
        return self.f ** 3 * Q54 - self.q

    @property
    def degree_bounds(self) -> dict[str, int]:
        """Degrees of sections of K^2 and K^6, recorded but not enforced."""
        return {"f": 4 * (self.g_base - 1), "q": 12 * (self.g_base - 1)}

    def genericity_witness(self) -> tuple[str, UniPoly] | None:
        """First failing genericity condition, with its gcd; None if generic."""
        q, qd = self.q, self.q_dual
        if q.degree < 1:
            return ("q is constant", q)
        if qd.degree < 1:
            return ("q_dual is constant", qd)
        g = poly_gcd(q, q.derivative())
        if g.degree > 0:
            return ("q is not squarefree", g)
        g = poly_gcd(qd, qd.derivative())
        if g.degree > 0:
            return ("q_dual is not squarefree", g)
        g = poly_gcd(q, qd)
        if g.degree > 0:
            return ("q and q_dual share a root", g)
        return None

    def require_generic(self) -> None:
        bad = self.genericity_witness()
        if bad is not None:
            raise PreconditionError(bad[0], witness=bad[1])

    def to_json(self) -> dict:
        return {"g_base": self.g_base, "f": self.f.to_json(), "q": self.q.to_json()}

    @classmethod
    def from_json(cls, data: object) -> CurveFamily:
        if not isinstance(data, dict):
            raise ValueError("a curve family is an object {g_base, f, q}")
        for key in ("g_base", "f", "q"):
            if key not in data:
                raise ValueError(f"curve family is missing '{key}'")
        g = data["g_base"]
        if not isinstance(g, int) or isinstance(g, bool):
            raise ValueError("g_base must be an integer")
        return cls(g, UniPoly.from_json(data["f"]), UniPoly.from_json(data["q"]))


def dualize(c: CurveFamily) -> CurveFamily:
    """(f, q) -> (f, f^3/54 - q)."""
    return CurveFamily(c.g_base, c.f, c.q_dual)


# --------------------------------------------------------------------------
# the spectral curve and its discriminant


def spectral_value(x: object, f: object, q: object) -> Scalar:
    """x^6 - f x^4 + f^2/4 x^2 - q."""
    x, f, q = as_scalar(x), as_scalar(f), as_scalar(q)
    x2 = x * x
    return x2 * (x2 * (x2 - f) + f * f / 4) - q


@dataclass(frozen=True)
class SpectralPoly:
    """p(x, z) = x^6 - f(z) x^4 + f(z)^2/4 x^2 - q(z)."""

    family: CurveFamily

    def __call__(self, x: object, z: object) -> Scalar:
        return spectral_value(x, self.family.f(z), self.family.q(z))

    def in_x(self, z: object) -> UniPoly:
        f, q = self.family.f(z), self.family.q(z)
        return UniPoly([-q, 0, f * f / 4, 0, -f, 0, 1])


def spectral_poly(c: CurveFamily) -> SpectralPoly:
    return SpectralPoly(c)


def cubic_discriminant(a: object, b: object, c: object, d: object) -> Scalar | UniPoly:
    """18abcd - 4b^3 d + b^2 c^2 - 4 a c^3 - 27 a^2 d^2 (works on Scalars or polynomials)."""
    return 18 * a * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * a * c ** 3 - 27 * a * a * d * d


@dataclass(frozen=True)
class DiscriminantResult:
    delta: UniPoly
    matches_factored: bool
    matches_dual: bool


def discriminant(c: CurveFamily) -> DiscriminantResult:
    """Discriminant in z of w^3 - f w^2 + f^2/4 w - q, with both factored forms."""
    f, q = c.f, c.q
    one = UniPoly([1])
    delta = cubic_discriminant(one, -f, f * f * Scalar(mpq(1, 4)), -q)
    factored = q * (f ** 3 * Scalar(mpq(1, 2)) - q * 27)
    dual = q * c.q_dual * 27
    return DiscriminantResult(delta, delta == factored, delta == dual)


def certify_discriminant_identity() -> bool:
    """Delta(f, q) = q(f^3/2 - 27q) = 27 q q_dual for independent f, q.

    Degree 6 in f and 2 in q, so a 7 x 3 grid certifies it.
    """

    def delta(f: Scalar, q: Scalar) -> Scalar:
        return cubic_discriminant(ONE, -f, f * f / 4, -q)

    ok1, _ = certify_on_grid(delta, lambda f, q: q * (f ** 3 / 2 - 27 * q), [6, 2])
    ok2, _ = certify_on_grid(delta, lambda f, q: 27 * q * (f ** 3 * Q54 - q), [6, 2])
    return ok1 and ok2


# --------------------------------------------------------------------------
# the cameral curve and D6


@dataclass(frozen=True)
class CameralPoint:
    """A point (x, y) of W over a point where f, q take the given values."""

    x: Scalar
    y: Scalar
    f: Scalar
    q: Scalar

    def __post_init__(self) -> None:
        for name in ("x", "y", "f", "q"):
            object.__setattr__(self, name, as_scalar(getattr(self, name)))

    def residuals(self) -> tuple[Scalar, Scalar]:
        """(x^2 + y^2 - 2f/3, spectral value at x); both vanish on W."""
        return (
            self.x * self.x + self.y * self.y - self.f * Scalar(mpq(2, 3)),
            spectral_value(self.x, self.f, self.q),
        )

    def on_w(self) -> bool:
        return not any(self.residuals())

    def moved(self, g: DihedralElement) -> CameralPoint:
        x, y = g.matrix @ (self.x, self.y)
        return CameralPoint(x, y, self.f, self.q)


def cameral_point_from_xy(x: object, y: object) -> CameralPoint:
    """The W-point with f = 3(x^2 + y^2)/2 and q = x^2 (x^2 - f/2)^2."""
    x, y = as_scalar(x), as_scalar(y)
    f = (x * x + y * y) * Scalar(mpq(3, 2))
    t = x * x - f / 2
    return CameralPoint(x, y, f, x * x * t * t)


SQRT3 = Scalar(0, 0, 1)


def cameral_eigenvalues(p: CameralPoint) -> tuple[Scalar, Scalar, Scalar]:
    """(x, (-x + sqrt3 y)/2, (-x - sqrt3 y)/2)."""
    if not p.on_w():
        raise PreconditionError("point is not on the cameral curve", witness=p.residuals())
    s = SQRT3 * p.y
    return p.x, (s - p.x) / 2, (-p.x - s) / 2


def eigenvalue_identities(p: CameralPoint) -> dict[str, bool]:
    l1, l2, l3 = cameral_eigenvalues(p)
    prod = l1 * l2 * l3
    roots = all(not spectral_value(s * lam, p.f, p.q) for lam in (l1, l2, l3) for s in (1, -1))
    return {
        "sum_zero": not (l1 + l2 + l3),
        "sum_squares_f": l1 * l1 + l2 * l2 + l3 * l3 == p.f,
        "product_squared_q": prod * prod == p.q,
        "roots_of_spectral": roots,
    }


_R = Matrix([[Scalar(mpq(1, 2)), Scalar(0, 0, mpq(1, 2))], [Scalar(0, 0, mpq(-1, 2)), Scalar(mpq(1, 2))]])
_S = Matrix([[1, 0], [0, -1]])


@lru_cache(maxsize=None)
def _rotation_power(k: int) -> Matrix:
    return _R ** (k % 6)


@dataclass(frozen=True)
class DihedralElement:
    """r^k s^e with 0 <= k < 6, e in {0, 1}."""

    k: int
    e: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", self.k % 6)
        object.__setattr__(self, "e", self.e % 2)

    @property
    def matrix(self) -> Matrix:
        m = _rotation_power(self.k)
        return m @ _S if self.e else m

    def __mul__(self, other: DihedralElement) -> DihedralElement:
        # s r^c = r^-c s
        sign = -1 if self.e else 1
        return DihedralElement(self.k + sign * other.k, self.e + other.e)

    def inverse(self) -> DihedralElement:
        if self.e:
            return self
        return DihedralElement(-self.k, 0)

    @property
    def word(self) -> str:
        parts = []
        if self.k:
            parts.append("r" if self.k == 1 else f"r^{self.k}")
        if self.e:
            parts.append("s")
        return "".join(parts) or "1"


_TOKEN = re.compile(r"([rs])(?:\^?(-?\d+))?")


def d6_element(word: str) -> DihedralElement:
    """Parse a word such as ``"rs"``, ``"r^3s"``, ``"sr^-1"`` or ``"1"`` and reduce it."""
    w = word.replace(" ", "").replace("*", "")
    if w in ("", "1", "e"):
        return DihedralElement(0, 0)
    acc = DihedralElement(0, 0)
    pos = 0
    for m in _TOKEN.finditer(w):
        if m.start() != pos:
            raise ValueError(f"cannot parse dihedral word {word!r}")
        pos = m.end()
        power = int(m.group(2)) if m.group(2) is not None else 1
        gen = DihedralElement(1, 0) if m.group(1) == "r" else DihedralElement(0, 1)
        if power < 0:
            gen, power = gen.inverse(), -power
        for _ in range(power):
            acc = acc * gen
    if pos != len(w):
        raise ValueError(f"cannot parse dihedral word {word!r}")
    return acc


def d6_elements() -> list[DihedralElement]:
    return [DihedralElement(k, e) for e in (0, 1) for k in range(6)]


def d6_relations_hold() -> dict[str, bool]:
    r, s = _R, _S
    ident = Matrix.identity(2)
    mats = [g.matrix for g in d6_elements()]
    words_agree = all(
        (g * h).matrix == g.matrix @ h.matrix for g in d6_elements() for h in d6_elements()
    )
    return {
        "s^2=1": s @ s == ident,
        "r^6=1": r ** 6 == ident,
        "rs=sr^-1": r @ s == s @ r.inverse(),
        "r^3=-1": r ** 3 == -ident,
        "twelve_distinct": len(set(mats)) == 12,
        "word_product_matches_matrices": words_agree,
    }


# --------------------------------------------------------------------------
# quotients of W


def s_dual_value(y: object, f: object, q: object) -> Scalar:
    """y^6 - f y^4 + f^2/4 y^2 + q - f^3/54."""
    y, f, q = as_scalar(y), as_scalar(f), as_scalar(q)
    y2 = y * y
    return y2 * (y2 * (y2 - f) + f * f / 4) + q - f ** 3 * Q54


def quotient_equation(which: str) -> Callable[[Scalar, Scalar, Scalar], Scalar]:
    """Equation of W/<s> (in x) or W/<r^3 s> (in y), as a function (t, f, q)."""
    if which == "S":
        return spectral_value
    if which == "S_dual":
        return s_dual_value
    raise ValueError("which must be 'S' or 'S_dual'")


def invariant_coordinate(which: str, g: DihedralElement) -> bool:
    """Whether the quotient coordinate (x for s, y for r^3 s) is fixed by g."""
    idx = 0 if which == "S" else 1
    m = g.matrix
    return all(m[idx, j] == (ONE if j == idx else ZERO) for j in range(2))


def certify_quotient_equations() -> dict[str, bool]:
    """Exact polynomial certificates for the two quotient equations.

    With x^2 = 2f/3 - y^2 the S-equation becomes -S_dual(y); the variables
    are (y, f, q) with degrees (6, 3, 1).
    """

    def s_of_y(y: Scalar, f: Scalar, q: Scalar) -> Scalar:
        u = f * Scalar(mpq(2, 3)) - y * y
        return u * (u * (u - f) + f * f / 4) - q

    ok_dual, _ = certify_on_grid(s_of_y, lambda y, f, q: -s_dual_value(y, f, q), [6, 3, 1])
    s = DihedralElement(0, 1)
    r3s = d6_element("r^3s")
    return {
        "S_dual_from_substitution": ok_dual,
        "s_fixes_x": invariant_coordinate("S", s),
        "r3s_fixes_y": invariant_coordinate("S_dual", r3s),
        "r3s_is_x_to_minus_x": r3s.matrix == Matrix([[-1, 0], [0, 1]]),
    }


def project_to_c(x: object, f_val: object) -> Scalar:
    """z = x (x^2 - f/2)."""
    x, f = as_scalar(x), as_scalar(f_val)
    return x * (x * x - f / 2)


def certify_projection() -> bool:
    """z^2 - q equals the spectral polynomial identically in (x, f, q)."""
    ok, _ = certify_on_grid(
        lambda x, f, q: project_to_c(x, f) ** 2 - q,
        lambda x, f, q: spectral_value(x, f, q),
        [6, 2, 1],
    )
    return ok


# --------------------------------------------------------------------------
# integer bookkeeping


def numerology(g: int, m: int = 3) -> dict[str, int | bool]:
    """Genera, Prym dimensions and covering orders.

    ``prym_dim_sp`` is the closed form 2m(m+1)(g-1); the genus difference
    g(S) - g(S_bar) is reported separately as ``prym_dim_sp_from_genera``,
    which equals dim Sp(2m)(g-1) = m(2m+1)(g-1). The two differ, and
    ``prym_dim_sp_consistent`` records that.
    """
    if not isinstance(g, int) or g < 2:
        raise PreconditionError("base genus must be an integer >= 2", witness=g)
    if not isinstance(m, int) or m < 1:
        raise PreconditionError("m must be a positive integer", witness=m)
    h = g - 1
    n = 2 * m
    g_s_gl = n * n * h + 1
    g_s_g2 = 36 * h + 1
    g_c = 8 * h + 1
    g_w = 84 * h + 1
    g_sbar = (2 * m * m - m) * h + 1
    g_sbar_3 = 15 * h + 1
    prym_sp_closed = 2 * m * (m + 1) * h
    prym_sp_genera = g_s_gl - g_sbar
    prym_g2 = (g_s_g2 - g_sbar_3) - (g_c - g)
    cover = 4 * m * h
    return {
        "g": g,
        "m": m,
        "g_S_GL": g_s_gl,
        "g_S_G2": g_s_g2,
        "g_C": g_c,
        "g_W": g_w,
        "g_Sbar": g_sbar,
        "two_g_Sbar_riemann_hurwitz": g_s_gl + 1 - 2 * m * h,
        "prym_dim_sp": prym_sp_closed,
        "prym_dim_sp_from_genera": prym_sp_genera,
        "dim_sp2m_times_g_minus_1": m * (2 * m + 1) * h,
        "prym_dim_sp_consistent": prym_sp_closed == prym_sp_genera,
        "prym_dim_g2": prym_g2,
        "prym_dim_g2_expected": 14 * h,
        "prym_chain_holds": prym_g2 == 14 * h,
        "base_dim_g2": 3 * h + 11 * h,
        "covering_order_choices": 2 ** cover,
        "covering_order_P_prime": 2 ** (cover - 1),
        "covering_order_squaring": 2 ** (cover - 2),
        "squaring_exponent_from_genera": 2 * (g_s_gl - 2 * g_sbar),
        "squaring_exponent_consistent": 2 * (g_s_gl - 2 * g_sbar) == cover - 2,
        "order_P_Sbar_Sigma_2_closed": 2 ** (2 * prym_sp_closed),
        "order_P_S_Sbar_2torsion": 2 ** (2 * prym_sp_genera),
        "order_P_Sbar_Sigma_2torsion": 2 ** (2 * (g_sbar - g)),
        "order_H1_C_Z3_minus": 3 ** (2 * (g_c - g)),
        "g_C_riemann_hurwitz": (2 * (2 * g - 2) + 12 * h + 2) // 2,
    }


# --------------------------------------------------------------------------
# samplers


def random_poly(rng: random.Random, degree: int, bound: int = 5) -> UniPoly:
    return UniPoly([rng.randint(-bound, bound) for _ in range(degree + 1)])


def random_rational(rng: random.Random, bound: int = 6, den: int = 4) -> Scalar:
    return Scalar(mpq(rng.randint(-bound, bound), rng.randint(1, den)))


def random_generic_family(rng: random.Random, max_f: int = 4, max_q: int = 6, g_base: int = 2) -> CurveFamily:
    """Random (f, q) with q, q_dual squarefree and coprime, f coprime to both."""
    while True:
        f = random_poly(rng, rng.randint(0, max_f))
        q = random_poly(rng, rng.randint(1, max_q))
        if not f or q.degree < 1:
            continue
        c = CurveFamily(g_base, f, q)
        if c.genericity_witness() is not None:
            continue
        if poly_gcd(f, c.q).degree > 0 or poly_gcd(f, c.q_dual).degree > 0:
            continue
        return c


def random_cameral_point(rng: random.Random) -> CameralPoint:
    return cameral_point_from_xy(random_rational(rng), random_rational(rng))
