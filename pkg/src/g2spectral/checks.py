"""Randomized property suites behind the ``check`` subcommand."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable

from gmpy2 import mpq

from . import curves, cubicform, liealg, threeform
from .algebra import ZERO, Matrix, Scalar, UniPoly, basis_vector
from .errors import G2Error
from .exterior import pullback, volume, wedge
from .sampling import (
    random_g2_element,
    random_gl,
    random_nonzero_rationals,
    random_symmetric,
    random_symplectic,
    random_vector,
)


def to_witness(obj: object) -> object:
    if obj is None or isinstance(obj, (bool, int, str, float)):
        return obj
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): to_witness(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_witness(x) for x in obj]
    return repr(obj)


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    witness: object = None

    def to_json(self) -> dict:
        out = {"name": self.name, "status": "pass" if self.passed else "fail", "cases": self.cases}
        if self.cases == 0:
            out["note"] = "0 cases"
        if not self.passed:
            out["witness"] = to_witness(self.witness)
        return out


class _Failure(Exception):
    def __init__(self, witness: object) -> None:
        super().__init__("check failed")
        self.witness = witness


def _expect(cond: bool, witness: object) -> None:
    if not cond:
        raise _Failure(witness)


def _run(name: str, body: Callable[[], int]) -> CheckResult:
    try:
        cases = body()
    except _Failure as exc:
        return CheckResult(name, False, -1, exc.witness)
    except G2Error as exc:
        return CheckResult(name, False, -1, {"error": exc.code, "message": str(exc), "witness": to_witness(exc.witness)})
    return CheckResult(name, True, cases)


def _span_equal(a: list[tuple[Scalar, ...]], b: list[tuple[Scalar, ...]]) -> bool:
    ma = Matrix.from_columns(a)
    mb = Matrix.from_columns(b)
    both = Matrix.from_columns(list(a) + list(b))
    return ma.rank() == mb.rank() == both.rank()


# --------------------------------------------------------------------------
# threeform


def suite_threeform(rng: random.Random, count: int) -> list[CheckResult]:
    rho = threeform.rho0()
    g0 = threeform.metric_from_rho(threeform.SevenFormData(rho))

    def orbit() -> int:
        for _ in range(count):
            a = random_gl(rng, 7)
            d = threeform.SevenFormData(pullback(a, rho))
            det = a.det()
            k = threeform.kappa(d)
            _expect(k == det ** 3 * threeform.KAPPA_RHO0, {"A": a, "kappa": k})
            g = threeform.metric_from_rho(d)
            _expect(g == a.T @ g0 @ a and bool(g.det()), {"A": a, "metric": g})
            dim, _ = liealg.stabilizer_dim([d.rho])
            _expect(dim == 14, {"A": a, "stabilizer_dim": dim})
        return count

    def decomposition() -> int:
        for _ in range(count):
            a = random_gl(rng, 7)
            d = threeform.SevenFormData(pullback(a, rho))
            g = threeform.metric_from_rho(d)
            while True:
                v = random_vector(rng, 7)
                if any(v) and (Matrix([list(v)]) @ g @ v)[0]:
                    break
            dec = threeform.decompose_rho(d, v)
            _expect(dec.reconstruct() == d.rho, {"A": a, "v": v})
        return count

    def norm1_family() -> int:
        base = threeform.omega_norm1()
        for _ in range(count):
            a = random_gl(rng, 6)
            six = threeform.SixFormData(pullback(a, base))
            k = threeform.k_omega(six)
            lam = threeform.lambda_invariant(six)
            _expect(k @ k == Matrix.identity(6) * lam, {"A": a})
            _expect(lam == a.det() ** 2 and bool(lam), {"A": a, "lambda": lam})
            plus, minus = threeform.eigenspaces_w(six)
            _expect(len(plus) == len(minus) == 3, {"A": a})
        return count

    def norm2_family() -> int:
        base = threeform.omega_norm2()
        for _ in range(count):
            a = random_gl(rng, 6)
            six = threeform.SixFormData(pullback(a, base))
            k = threeform.k_omega(six)
            lam = threeform.lambda_invariant(six)
            _expect(not lam and (k @ k).is_zero(), {"A": a, "lambda": lam})
            _expect(len(k.nullspace()) == 3, {"A": a, "K": k})
            _expect(
                _span_equal(k.nullspace(), [tuple(a.inverse() @ basis_vector(6, j)) for j in range(3)]),
                {"A": a},
            )
        return count

    def symplectic_equivariance() -> int:
        omega = threeform.symplectic_omega()
        for _ in range(count):
            s = random_symplectic(rng)
            _expect(pullback(s, omega) == omega, {"S": s})
            for base in (threeform.omega_norm1(), threeform.omega_norm2()):
                moved = pullback(s, base)
                _expect(not wedge(moved, omega), {"S": s, "form": moved})
            six = threeform.SixFormData(pullback(s, threeform.omega_norm1()))
            plus, minus = threeform.eigenspaces_w(six)
            inv = s.inverse()
            xs = [tuple(inv @ basis_vector(6, j)) for j in range(3)]
            ys = [tuple(inv @ basis_vector(6, j)) for j in range(3, 6)]
            _expect(_span_equal(plus, xs) and _span_equal(minus, ys), {"S": s})
        return count

    return [
        _run("threeform.rho0_orbit_kappa_metric_stabilizer", orbit),
        _run("threeform.decompose_reconstructs", decomposition),
        _run("threeform.norm1_family_K_squared", norm1_family),
        _run("threeform.norm2_family_kernel", norm2_family),
        _run("threeform.symplectic_equivariance", symplectic_equivariance),
    ]


# --------------------------------------------------------------------------
# liealg


def _paired_symplectic(rng: random.Random, m: int) -> Matrix:
    """Random symplectic map for omega = sum e_{2k} ^ e_{2k+1}."""
    s = random_symplectic(rng, m)
    n = 2 * m
    rows = [[ZERO] * n for _ in range(n)]
    for k in range(m):
        rows[k][2 * k] = Scalar(1)
        rows[m + k][2 * k + 1] = Scalar(1)
    p = Matrix(rows)
    return p.inverse() @ s @ p


def suite_liealg(rng: random.Random, count: int) -> list[CheckResult]:
    rho = threeform.rho0()

    def charpoly_shape() -> int:
        for _ in range(count):
            a = random_g2_element(rng)
            inv = liealg.g2_invariants(a)
            p = liealg.char_poly(a)
            f, q = inv.f, inv.q
            expected = UniPoly([0, -q, 0, f * f / 4, 0, -f, 0, 1])
            _expect(p == expected, {"charpoly": p})
        return count

    def bracket_closed() -> int:
        for _ in range(count):
            a, b = random_g2_element(rng), random_g2_element(rng)
            c = liealg.bracket(a.mat, b.mat)
            _expect(not liealg.lie_action(c, rho), {"bracket": c})
        return count

    def v0_zero_eigenvector() -> int:
        for _ in range(count):
            m = rng.randint(1, 3)
            lams = random_nonzero_rationals(rng, m)
            a = liealg.skew_block_element(lams)
            v0 = liealg.canonical_v0(a)
            expected = Scalar(0, 1) ** m
            for lam in lams:
                expected = expected * lam
            _expect(v0 == tuple([expected] + [ZERO] * (2 * m)), {"lams": lams, "v0": v0})
            p = random_gl(rng, 2 * m + 1, 2)
            a2 = p.inverse() @ a @ p
            metric = p.T @ p
            v2 = liealg.canonical_v0(a2, pullback(p, volume(2 * m + 1)), metric)
            _expect(not any(a2 @ v2) and v2 == p.inverse() @ v0, {"P": p, "v0": v2})
        return count

    def v0_equals_2a() -> int:
        for _ in range(count):
            a = random_vector(rng, 3)
            mm = random_symmetric(rng, 3, traceless=True)
            _expect(liealg.verify_v0_equals_2a(a, mm), {"a": a, "M": mm})
        return count

    def quadratic_condition() -> int:
        for _ in range(count):
            m = rng.randint(2, 4)
            lams = random_nonzero_rationals(rng, m - 1)
            pt = liealg.point_of_d(lams, _paired_symplectic(rng, m))
            e = pt.distinguished
            for s in (1, -1):
                val = liealg.quadratic_condition_check(pt.phi0, [s * x for x in e], lams=lams)
                _expect(not val, {"lams": lams, "scale": s, "value": val})
            val = liealg.quadratic_condition_check(pt.phi0, [2 * x for x in e])
            _expect(bool(val), {"lams": lams, "scale": 2})
        return count

    return [
        _run("liealg.g2_charpoly_shape", charpoly_shape),
        _run("liealg.stabilizer_bracket_closed", bracket_closed),
        _run("liealg.canonical_v0", v0_zero_eigenvector),
        _run("liealg.v0_equals_2a", v0_equals_2a),
        _run("liealg.quadratic_condition", quadratic_condition),
    ]


# --------------------------------------------------------------------------
# curves


PAPER_TABLE_G2 = {"g_S_G2": 37, "g_C": 9, "g_W": 85, "prym_dim_g2": 14, "base_dim_g2": 14}


def suite_curves(rng: random.Random, count: int) -> list[CheckResult]:
    def involution() -> int:
        for _ in range(count):
            c = curves.CurveFamily(2, curves.random_poly(rng, 4), curves.random_poly(rng, 6))
            _expect(curves.dualize(curves.dualize(c)) == c, c)
        return count

    def discriminant() -> int:
        _expect(curves.certify_discriminant_identity(), "grid certificate")
        for _ in range(count):
            c = curves.CurveFamily(2, curves.random_poly(rng, 4), curves.random_poly(rng, 6))
            res = curves.discriminant(c)
            _expect(res.matches_factored and res.matches_dual, c)
        return count + 1

    def cameral() -> int:
        for _ in range(count):
            p = curves.random_cameral_point(rng)
            ids = curves.eigenvalue_identities(p)
            _expect(all(ids.values()), {"point": [p.x, p.y], "identities": ids})
            lams = curves.cameral_eigenvalues(p)
            signed = {x for lam in lams for x in (lam, -lam)}
            for g in curves.d6_elements():
                moved = curves.cameral_eigenvalues(p.moved(g))
                _expect(set(moved) <= signed, {"point": [p.x, p.y], "element": g.word})
        return count

    def dihedral() -> int:
        rel = curves.d6_relations_hold()
        _expect(all(rel.values()), rel)
        quo = curves.certify_quotient_equations()
        _expect(all(quo.values()), quo)
        return 1

    def projection() -> int:
        _expect(curves.certify_projection(), "grid certificate")
        for _ in range(count):
            p = curves.random_cameral_point(rng)
            z = curves.project_to_c(p.x, p.f)
            _expect(z * z == p.q, {"point": [p.x, p.y], "z": z})
        return count + 1

    def numerology() -> int:
        table = curves.numerology(2, 3)
        bad = {k: table[k] for k, v in PAPER_TABLE_G2.items() if table[k] != v}
        _expect(not bad and table["prym_chain_holds"], bad)
        for g in range(2, 2 + max(count, 1)):
            t = curves.numerology(g, 3)
            _expect(t["prym_dim_g2"] == 14 * (g - 1) and t["squaring_exponent_consistent"], t)
        return max(count, 1)

    return [
        _run("curves.dualize_involution", involution),
        _run("curves.discriminant_identity", discriminant),
        _run("curves.cameral_eigenvalues", cameral),
        _run("curves.d6_and_quotients", dihedral),
        _run("curves.projection_to_C", projection),
        _run("curves.numerology", numerology),
    ]


# --------------------------------------------------------------------------
# cubic


def suite_cubic(rng: random.Random, count: int) -> list[CheckResult]:
    def identities() -> int:
        _expect(cubicform.verify_cos6_identity(), "cos6")
        _expect(cubicform.verify_bvw_identity(), "bvw")
        return 2

    def symmetric_trilinear() -> int:
        for _ in range(count):
            c, t1, t2, t3 = cubicform.random_instance(rng)
            t4 = cubicform.random_tangent(rng)
            k = Scalar(mpq(rng.randint(-5, 5), rng.randint(1, 4)))
            base = cubicform.cubic_form(c, t1, t2, t3).value
            for perm in ((t2, t1, t3), (t3, t2, t1), (t2, t3, t1)):
                _expect(cubicform.cubic_form(c, *perm).value == base, {"curve": c})
            lhs = cubicform.cubic_form(c, t1 + t4 * k, t2, t3).value
            rhs = base + k * cubicform.cubic_form(c, t4, t2, t3).value
            _expect(lhs == rhs, {"curve": c})
        return count

    def invariance() -> int:
        for _ in range(count):
            inst = cubicform.random_instance(rng)
            _expect(cubicform.verify_involution_invariance(*inst), {"curve": inst[0]})
        return count

    def oracle() -> int:
        for _ in range(count):
            inst = cubicform.random_instance(rng)
            exact = cubicform.cubic_form(*inst).value
            approx, scale = cubicform.cubic_form_numeric(*inst)
            err = cubicform.oracle_relative_error(exact, approx, scale)
            _expect(err <= 1e-9, {"curve": inst[0], "relative_error": err})
        return count

    def dual_tangent() -> int:
        for _ in range(count):
            c, t, _, _ = cubicform.random_instance(rng)
            d = cubicform.dual_tangent(c, t)
            _expect(cubicform.dual_tangent(curves.dualize(c), d) == t, {"curve": c})
        return count

    return [
        _run("cubic.cos6_and_bvw", identities),
        _run("cubic.symmetric_trilinear", symmetric_trilinear),
        _run("cubic.involution_invariance", invariance),
        _run("cubic.float_oracle", oracle),
        _run("cubic.dual_tangent_involution", dual_tangent),
    ]


SUITES: dict[str, Callable[[random.Random, int], list[CheckResult]]] = {
    "threeform": suite_threeform,
    "liealg": suite_liealg,
    "curves": suite_curves,
    "cubic": suite_cubic,
}


def run_suites(names: Iterable[str], seed: int, count: int) -> list[CheckResult]:
    results: list[CheckResult] = []
    for name in names:
        # each suite gets its own stream so suites are reproducible in isolation
        rng = random.Random(f"{seed}:{name}")
        results.extend(SUITES[name](rng, count))
    return results
