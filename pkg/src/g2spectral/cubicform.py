"""The cubic form on the G2 Hitchin base and its invariance under duality.

    cubic(t1, t2, t3) = 2 sum_{q(a)=0} qd1 qd2 qd3 / (f^2 q'^2) (a)
                      + 2 sum_{qv(a)=0} qdv1 qdv2 qdv3 / (f^2 qv'^2) (a)

with qv = f^3/54 - q and qdv = f^2 fd/18 - qd. Both sums are symmetric in
the roots, so they are evaluated as traces over K[z]/(q) without ever
extracting a root.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from .algebra import (
    ONE,
    RatFunc,
    Scalar,
    UniPoly,
    as_scalar,
    certify_on_grid,
    poly_gcd,
    root_sum,
)
from .curves import Q54, CurveFamily, dualize, random_generic_family, random_poly
from .errors import PreconditionError

Q18 = Scalar(mpq(1, 18))


@dataclass(frozen=True)
class TangentVec:
    f_dot: UniPoly
    q_dot: UniPoly

    def __post_init__(self) -> None:
        for name in ("f_dot", "q_dot"):
            v = getattr(self, name)
            if not isinstance(v, UniPoly):
                object.__setattr__(self, name, UniPoly([as_scalar(v)]))

    def __add__(self, other: TangentVec) -> TangentVec:
        return TangentVec(self.f_dot + other.f_dot, self.q_dot + other.q_dot)

    def __mul__(self, s: object) -> TangentVec:
        return TangentVec(self.f_dot * s, self.q_dot * s)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"f_dot": self.f_dot.to_json(), "q_dot": self.q_dot.to_json()}

    @classmethod
    def from_json(cls, data: object) -> TangentVec:
        if not isinstance(data, dict) or "f_dot" not in data or "q_dot" not in data:
            raise ValueError("a tangent vector is an object {f_dot, q_dot}")
        return cls(UniPoly.from_json(data["f_dot"]), UniPoly.from_json(data["q_dot"]))


@dataclass(frozen=True)
class CubicValue:
    value: Scalar


def dual_tangent(c: CurveFamily, t: TangentVec) -> TangentVec:
    """(fd, qd) -> (fd, f^2 fd / 18 - qd)."""
    return TangentVec(t.f_dot, c.f * c.f * t.f_dot * Q18 - t.q_dot)


def _check_admissible(c: CurveFamily) -> None:
    c.require_generic()
    for name, r in (("q", c.q), ("q_dual", c.q_dual)):
        g = poly_gcd(c.f, r)
        if g.degree > 0:
            raise PreconditionError(f"f shares a root with {name}", witness=g)


def _half_sum(r: UniPoly, f: UniPoly, qds: list[UniPoly]) -> Scalar:
    num = qds[0] * qds[1] * qds[2]
    rp = r.derivative()
    return root_sum(r, RatFunc(num, f * f * rp * rp))


def cubic_form(c: CurveFamily, t1: TangentVec, t2: TangentVec, t3: TangentVec, parallel: bool = False) -> CubicValue:
    _check_admissible(c)
    ts = (t1, t2, t3)
    duals = [dual_tangent(c, t).q_dot for t in ts]
    direct = [t.q_dot for t in ts]
    if parallel:
        with ThreadPoolExecutor(max_workers=2) as pool:
            a = pool.submit(_half_sum, c.q, c.f, direct)
            b = pool.submit(_half_sum, c.q_dual, c.f, duals)
            s1, s2 = a.result(), b.result()
    else:
        s1 = _half_sum(c.q, c.f, direct)
        s2 = _half_sum(c.q_dual, c.f, duals)
    return CubicValue(2 * (s1 + s2))


def verify_involution_invariance(c: CurveFamily, t1: TangentVec, t2: TangentVec, t3: TangentVec) -> bool:
    lhs = cubic_form(c, t1, t2, t3).value
    d = dualize(c)
    rhs = cubic_form(d, *(dual_tangent(c, t) for t in (t1, t2, t3))).value
    return lhs == rhs


# --------------------------------------------------------------------------
# floating-point oracle


def _cpoly(p: UniPoly) -> np.ndarray:
    return np.array(p.to_complex_coeffs(), dtype=complex)


def _polish(coeffs: np.ndarray, roots: np.ndarray, steps: int = 3) -> np.ndarray:
    """A few Newton steps on numpy's eigenvalue roots."""
    desc = coeffs[::-1]
    d = np.polyder(desc)
    for _ in range(steps):
        step = np.polyval(desc, roots) / np.polyval(d, roots)
        roots = roots - step
    return roots


def cubic_form_numeric(c: CurveFamily, t1: TangentVec, t2: TangentVec, t3: TangentVec) -> tuple[complex, float]:
    """(value, scale) from numerical roots; scale is the sum of |terms|."""
    total = 0j
    scale = 0.0
    f = _cpoly(c.f)
    for r, qds in (
        (c.q, [t.q_dot for t in (t1, t2, t3)]),
        (c.q_dual, [dual_tangent(c, t).q_dot for t in (t1, t2, t3)]),
    ):
        coeffs = _cpoly(r)
        roots = _polish(coeffs, np.roots(coeffs[::-1]))
        rp = np.polyder(coeffs[::-1])
        qs = [_cpoly(q)[::-1] if q else np.array([0j]) for q in qds]
        for a in roots:
            num = np.prod([np.polyval(q, a) for q in qs])
            den = np.polyval(f[::-1], a) ** 2 * np.polyval(rp, a) ** 2
            term = 2 * num / den
            total += term
            scale += abs(term)
    return total, scale


def oracle_relative_error(exact: Scalar, approx: complex, scale: float) -> float:
    """|exact - approx| / max(|exact|, sum of |terms|).

    Normalizing by the term magnitudes keeps the error meaningful when the
    two sums cancel (as they do in the f = 3, q = z example).
    """
    e = exact.to_complex()
    denom = max(abs(e), scale, 1e-300)
    return abs(e - approx) / denom


# --------------------------------------------------------------------------
# derivation identities


def chebyshev_t(n: int) -> UniPoly:
    prev, cur = UniPoly([1]), UniPoly([0, 1])
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, UniPoly([0, 2]) * cur - prev
    return cur


COS6_PRINTED = UniPoly([-1, 0, 18, 0, -48, 0, 32])


def verify_cos6_identity() -> bool:
    """cos 6t = 32 c^6 - 48 c^4 + 18 c^2 - 1 with c = cos t, via T_6."""
    return chebyshev_t(6) == COS6_PRINTED


def _bvw_sides(c: Scalar, f: Scalar, a: Scalar, b: Scalar, av: Scalar, bv: Scalar) -> tuple[Scalar, Scalar]:
    """f^2 times the trigonometric side and f^2 times the B(v, w) side."""
    x2 = f * Scalar(mpq(2, 3)) * c * c
    q = x2 * (x2 * (x2 - f) + f * f / 4)
    qv = f ** 3 * Q54 - q
    cos6 = COS6_PRINTED(c)
    trig = f ** 3 / 3 * ((ONE - cos6) * a * b + (ONE + cos6) * av * bv)
    bvw = 36 * (qv * a * b + q * av * bv)
    return trig, bvw


def verify_bvw_identity() -> bool:
    """(f/3)[(1 - cos6t) qd1 qd2 + (1 + cos6t) qdv1 qdv2] = 36/f^2 (qv qd1 qd2 + q qdv1 qdv2).

    Both sides times f^2 are polynomials of degree 6 in c = cos t, 3 in f and
    1 in each of the four tangent symbols; a 7 x 4 x 2^4 grid certifies it.
    """
    ok, _ = certify_on_grid(
        lambda *v: _bvw_sides(*v)[0],
        lambda *v: _bvw_sides(*v)[1],
        [6, 3, 1, 1, 1, 1],
    )
    return ok


def bvw_coefficient(c: object, f: object) -> tuple[Scalar, Scalar]:
    """36 qv / f^2 and (2f/3)(1 - 16c^6 + 24c^4 - 9c^2): the coefficient of qd1 qd2."""
    c, f = as_scalar(c), as_scalar(f)
    x2 = f * Scalar(mpq(2, 3)) * c * c
    q = x2 * (x2 * (x2 - f) + f * f / 4)
    qv = f ** 3 * Q54 - q
    c2 = c * c
    closed = f * Scalar(mpq(2, 3)) * (1 - 16 * c2 ** 3 + 24 * c2 * c2 - 9 * c2)
    return 36 * qv / (f * f), closed


# --------------------------------------------------------------------------
# samplers


def random_tangent(rng: random.Random, max_f: int = 4, max_q: int = 6) -> TangentVec:
    return TangentVec(random_poly(rng, rng.randint(0, max_f), 3), random_poly(rng, rng.randint(0, max_q), 3))


def random_instance(rng: random.Random) -> tuple[CurveFamily, TangentVec, TangentVec, TangentVec]:
    c = random_generic_family(rng, max_f=4, max_q=6)
    return c, random_tangent(rng), random_tangent(rng), random_tangent(rng)
