"""Acceptance criteria 1-10, each at its stated sample size and tolerance.

Sampling is seeded so failures reproduce. The per-criterion PASS/FAIL lines
are printed in the terminal summary by conftest.py.
"""

from __future__ import annotations

import random
import time

import pytest
from gmpy2 import mpq

from g2spectral import cubicform, curves, liealg, threeform
from g2spectral.algebra import ONE, ZERO, Matrix, Scalar, UniPoly
from g2spectral.exterior import pullback
from g2spectral.sampling import (
    random_g2_element,
    random_gl,
    random_nonzero_rationals,
    random_symmetric,
    random_vector,
)

SEED = 20240601


def rng_for(tag: str) -> random.Random:
    return random.Random(f"{SEED}:{tag}")


# 1 -----------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_stabilizer_dimensions():
    rng = rng_for("stabilizer")
    start = time.perf_counter()
    for _ in range(200):
        a = random_gl(rng, 7)
        assert liealg.stabilizer_dim([pullback(a, threeform.rho0())])[0] == 14
    assert liealg.stabilizer_dim([threeform.symplectic_omega(), threeform.omega_norm2()])[0] == 8
    elapsed = time.perf_counter() - start
    assert elapsed <= 60, f"took {elapsed:.1f}s"


# 2 -----------------------------------------------------------------------


@pytest.mark.criterion(2)
@pytest.mark.parametrize("which", ["norm1", "norm2"])
def test_k_squared_is_lambda(which):
    rng = rng_for(f"k-squared-{which}")
    base = threeform.omega_norm1() if which == "norm1" else threeform.omega_norm2()
    ident = Matrix.identity(6)
    for _ in range(200):
        six = threeform.SixFormData(pullback(random_gl(rng, 6), base))
        k = threeform.k_omega(six)
        lam = threeform.lambda_invariant(six)
        assert k @ k == ident * lam
        if which == "norm2":
            assert lam == ZERO
            assert len(k.nullspace()) == 3
        else:
            assert lam != ZERO


@pytest.mark.criterion(2)
def test_norm2_kernel_is_x_span():
    k = threeform.k_omega(threeform.SixFormData(threeform.omega_norm2()))
    kernel = k.nullspace()
    assert len(kernel) == 3
    assert all(v[j] == ZERO for v in kernel for j in range(3, 6))


# 3 -----------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_charpoly_shape():
    rng = rng_for("charpoly")
    for _ in range(100):
        a = random_g2_element(rng)
        p = liealg.char_poly(a)
        c = p.coeffs
        assert p.degree == 7
        assert all(c[k] == ZERO for k in (0, 2, 4, 6))
        f = -c[5]
        q = -c[1]
        # the middle coefficient is forced to be f^2/4
        assert c[3] == f * f / 4
        assert p == UniPoly([0, -q, 0, f * f / 4, 0, -f, 0, 1])


# 4 -----------------------------------------------------------------------


@pytest.mark.criterion(4)
def test_discriminant_identity():
    assert curves.certify_discriminant_identity()


# 5 -----------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_cameral_eigenvalue_identities():
    rng = rng_for("cameral")
    for _ in range(100):
        p = curves.random_cameral_point(rng)
        assert p.on_w()
        checks = curves.eigenvalue_identities(p)
        assert checks and all(checks.values()), checks
        for lam in curves.cameral_eigenvalues(p):
            for v in (lam, -lam):
                assert curves.spectral_value(v, p.f, p.q) == ZERO


# 6 -----------------------------------------------------------------------


@pytest.mark.criterion(6)
def test_d6_relations():
    rel = curves.d6_relations_hold()
    assert rel and all(rel.values()), rel


@pytest.mark.criterion(6)
def test_quotient_equations_and_projection():
    assert all(curves.certify_quotient_equations().values())
    assert curves.certify_projection()
    rng = rng_for("projection")
    for _ in range(100):
        p = curves.random_cameral_point(rng)
        assert curves.quotient_equation("S")(p.x, p.f, p.q) == ZERO
        assert curves.quotient_equation("S_dual")(p.y, p.f, p.q) == ZERO
        assert curves.project_to_c(p.x, p.f) ** 2 == p.q


# 7 -----------------------------------------------------------------------


@pytest.mark.criterion(7)
def test_numerology():
    n = curves.numerology(2)
    assert n["g_S_G2"] == 37
    assert n["g_C"] == 9
    assert n["g_W"] == 85
    assert n["prym_dim_g2"] == 14
    assert n["prym_chain_holds"]
    assert n["g_Sbar"] == 16
    assert n["prym_dim_sp"] == 24
    assert n["covering_order_choices"] == 2 ** 12
    # the genus difference g(S) - g(S_bar) is 21, not 24; reported, not asserted away
    assert n["prym_dim_sp_from_genera"] == 21


# 8 -----------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_canonical_v0_on_blocks():
    rng = rng_for("v0-blocks")
    for _ in range(50):
        lams = random_nonzero_rationals(rng, rng.randint(1, 3))
        expected = ONE
        for lam in lams:
            expected = expected * Scalar(0, 1) * lam
        v0 = liealg.canonical_v0(liealg.skew_block_element(lams))
        assert v0 == tuple([expected] + [ZERO] * (2 * len(lams)))


@pytest.mark.criterion(8)
def test_v0_equals_2a():
    rng = rng_for("v0-2a")
    for _ in range(100):
        a = random_vector(rng, 3)
        m = random_symmetric(rng, 3, traceless=True)
        assert liealg.verify_v0_equals_2a(a, m)


@pytest.mark.criterion(8)
def test_quadratic_condition():
    rng = rng_for("quadratic")
    scales = [Scalar(mpq(n, d)) for n in range(-4, 5) for d in (1, 2, 3)]
    for _ in range(30):
        lams = random_nonzero_rationals(rng, rng.randint(1, 3))
        pt = liealg.point_of_d(lams)
        for s in (1, -1):
            e = [x * s for x in pt.distinguished]
            assert liealg.quadratic_condition_check(pt.phi0, e, lams=lams) == ZERO
        for t in scales:
            val = liealg.quadratic_condition_check(pt.phi0, [x * t for x in pt.distinguished])
            assert (val == ZERO) == (t * t == ONE)


# 9 -----------------------------------------------------------------------


@pytest.mark.criterion(9)
def test_cubic_form():
    start = time.perf_counter()
    rng = rng_for("cubic-trilinear")
    for _ in range(20):
        c, t1, t2, t3 = cubicform.random_instance(rng)
        t4 = cubicform.random_tangent(rng)
        a = Scalar(mpq(rng.randint(-4, 4), rng.randint(1, 3)))
        v = cubicform.cubic_form(c, t1, t2, t3).value
        for perm in ((t2, t1, t3), (t1, t3, t2), (t3, t2, t1)):
            assert cubicform.cubic_form(c, *perm).value == v
        assert cubicform.cubic_form(c, t1 * a + t4, t2, t3).value == a * v + cubicform.cubic_form(c, t4, t2, t3).value

    assert cubicform.verify_cos6_identity()
    assert cubicform.verify_bvw_identity()

    rng = rng_for("cubic-invariance")
    for _ in range(50):
        c, t1, t2, t3 = cubicform.random_instance(rng)
        assert c.f.degree <= 4 and c.q.degree <= 6
        assert cubicform.verify_involution_invariance(c, t1, t2, t3)

    rng = rng_for("cubic-oracle")
    worst = 0.0
    for _ in range(100):
        c, t1, t2, t3 = cubicform.random_instance(rng)
        exact = cubicform.cubic_form(c, t1, t2, t3).value
        approx, scale = cubicform.cubic_form_numeric(c, t1, t2, t3)
        worst = max(worst, cubicform.oracle_relative_error(exact, approx, scale))
    assert worst <= 1e-9, worst

    elapsed = time.perf_counter() - start
    assert elapsed <= 120, f"took {elapsed:.1f}s"


# 10 ----------------------------------------------------------------------


@pytest.mark.criterion(10)
def test_involutions():
    rng = rng_for("involutions")
    for _ in range(100):
        c = curves.CurveFamily(
            2,
            curves.random_poly(rng, rng.randint(0, 4)),
            UniPoly([curves.random_rational(rng) for _ in range(rng.randint(0, 7))]),
        )
        d = curves.dualize(c)
        assert curves.dualize(d) == c
        t = cubicform.random_tangent(rng)
        assert cubicform.dual_tangent(d, cubicform.dual_tangent(c, t)) == t
