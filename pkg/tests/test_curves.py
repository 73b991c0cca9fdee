from __future__ import annotations

import random

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from g2spectral import curves
from g2spectral.algebra import ZERO, Matrix, Scalar, UniPoly
from g2spectral.errors import PreconditionError
from strategies import nonconstant_polys, polys, scalars

seeds = st.integers(0, 2 ** 32)
X, Y, F, Q, W = sp.symbols("x y f q w")


def sym_spectral(x):
    return x ** 6 - F * x ** 4 + F ** 2 / 4 * x ** 2 - Q


# --------------------------------------------------------------------------
# symbolic oracles for the certified identities


def test_discriminant_matches_sympy():
    cubic = W ** 3 - F * W ** 2 + F ** 2 / 4 * W - Q
    disc = sp.discriminant(cubic, W)
    assert sp.expand(disc - Q * (F ** 3 / 2 - 27 * Q)) == 0
    assert sp.expand(disc - 27 * Q * (F ** 3 / 54 - Q)) == 0
    assert curves.certify_discriminant_identity()


def test_quotient_equation_matches_sympy():
    substituted = sym_spectral(X).subs(X ** 2, sp.Rational(2, 3) * F - Y ** 2)
    # x only appears through x^2, so the substitution is exact
    s_dual = Y ** 6 - F * Y ** 4 + F ** 2 / 4 * Y ** 2 + Q - F ** 3 / 54
    assert sp.expand(substituted + s_dual) == 0
    assert all(curves.certify_quotient_equations().values())


def test_projection_matches_sympy():
    z = X * (X ** 2 - F / 2)
    assert sp.expand(z ** 2 - Q - sym_spectral(X)) == 0
    assert curves.certify_projection()


def test_eigenvalues_symbolically():
    s3 = sp.sqrt(3)
    l1, l2, l3 = X, (-X + s3 * Y) / 2, (-X - s3 * Y) / 2
    f = sp.Rational(3, 2) * (X ** 2 + Y ** 2)
    q = sp.expand((l1 * l2 * l3) ** 2)
    assert sp.expand(l1 + l2 + l3) == 0
    assert sp.expand(l1 ** 2 + l2 ** 2 + l3 ** 2 - f) == 0
    for lam in (l1, l2, l3):
        assert sp.expand(sym_spectral(lam).subs({F: f, Q: q})) == 0


# --------------------------------------------------------------------------
# CurveFamily, dualize, discriminant


def test_dual_example():
    c = curves.CurveFamily(2, UniPoly([3]), UniPoly([0]))
    assert curves.dualize(c).q == UniPoly([mpq(1, 2)])


def test_discriminant_example():
    c = curves.CurveFamily(2, UniPoly([3]), UniPoly([0, 1]))
    d = curves.discriminant(c)
    assert d.delta == UniPoly([0, mpq(27, 2), -27])
    assert d.matches_factored and d.matches_dual


@given(polys(3, scalars), polys(5, scalars))
def test_dualize_is_involution(f, q):
    c = curves.CurveFamily(3, f, q)
    assert curves.dualize(curves.dualize(c)) == c
    assert c.q_dual + c.q == f ** 3 * Scalar(mpq(1, 54))


@settings(max_examples=40)
@given(polys(3), polys(5))
def test_discriminant_factorizations(f, q):
    d = curves.discriminant(curves.CurveFamily(2, f, q))
    assert d.matches_factored and d.matches_dual


def test_genericity_witnesses():
    z = UniPoly([0, 1])
    f = UniPoly([1, 1])
    # q = q_dual exactly when q = f^3/108
    collide = curves.CurveFamily(2, f, f ** 3 * Scalar(mpq(1, 108)))
    reason, g = collide.genericity_witness()
    assert g.degree > 0
    with pytest.raises(PreconditionError):
        collide.require_generic()
    sq = curves.CurveFamily(2, UniPoly([1]), z * z)
    assert sq.genericity_witness()[0] == "q is not squarefree"
    assert curves.CurveFamily(2, UniPoly([3]), z).genericity_witness() is None


def test_base_genus_validated():
    with pytest.raises(PreconditionError):
        curves.CurveFamily(1, UniPoly([1]), UniPoly([0, 1]))


@given(polys(3, scalars), polys(4, scalars), st.integers(2, 9))
def test_json_round_trip(f, q, g):
    c = curves.CurveFamily(g, f, q)
    assert curves.CurveFamily.from_json(c.to_json()) == c


def test_json_rejects():
    for bad in ({"g_base": 2, "f": ["1"]}, {"g_base": "2", "f": [], "q": []}, [], {"g_base": True, "f": [], "q": []}):
        with pytest.raises(ValueError):
            curves.CurveFamily.from_json(bad)


@settings(max_examples=30)
@given(nonconstant_polys(3), nonconstant_polys(4), scalars)
def test_spectral_poly_in_x(f, q, z):
    c = curves.CurveFamily(2, f, q)
    p = curves.spectral_poly(c)
    x = Scalar(mpq(3, 7), 1)
    assert p.in_x(z)(x) == p(x, z)


# --------------------------------------------------------------------------
# the cameral curve


class TestCameral:
    def test_unit_point(self):
        p = curves.cameral_point_from_xy(1, 1)
        assert p.f == Scalar(3) and p.q == Scalar(mpq(1, 4))
        assert p.on_w()

    @given(scalars, scalars)
    def test_identities_on_random_points(self, x, y):
        p = curves.cameral_point_from_xy(x, y)
        assert p.on_w()
        assert all(curves.eigenvalue_identities(p).values())

    @given(scalars, scalars)
    def test_d6_preserves_w_and_permutes_eigenvalues(self, x, y):
        p = curves.cameral_point_from_xy(x, y)
        key = Scalar.sort_key
        base = sorted((v for lam in curves.cameral_eigenvalues(p) for v in (lam, -lam)), key=key)
        for g in curves.d6_elements():
            moved = p.moved(g)
            assert moved.on_w()
            images = sorted((v for lam in curves.cameral_eigenvalues(moved) for v in (lam, -lam)), key=key)
            assert images == base

    def test_off_curve_rejected(self):
        p = curves.CameralPoint(1, 1, 1, 1)
        assert not p.on_w()
        with pytest.raises(PreconditionError):
            curves.cameral_eigenvalues(p)


# --------------------------------------------------------------------------
# D6


class TestDihedral:
    def test_relations(self):
        assert all(curves.d6_relations_hold().values())

    def test_parser(self):
        assert curves.d6_element("1") == curves.DihedralElement(0, 0)
        assert curves.d6_element("sr^-1") == curves.d6_element("rs")
        assert curves.d6_element("r^3s").matrix == Matrix([[-1, 0], [0, 1]])
        assert curves.d6_element("r^6") == curves.d6_element("1")
        with pytest.raises(ValueError):
            curves.d6_element("rx")

    @given(st.sampled_from(curves.d6_elements()), st.sampled_from(curves.d6_elements()),
           st.sampled_from(curves.d6_elements()))
    def test_group_axioms(self, a, b, c):
        one = curves.DihedralElement(0, 0)
        assert (a * b) * c == a * (b * c)
        assert a * a.inverse() == one
        assert (a * b).matrix == a.matrix @ b.matrix

    def test_words_round_trip(self):
        for g in curves.d6_elements():
            assert curves.d6_element(g.word) == g

    def test_quotient_coordinates(self):
        s = curves.d6_element("s")
        assert curves.invariant_coordinate("S", s)
        assert not curves.invariant_coordinate("S_dual", s)
        assert curves.invariant_coordinate("S_dual", curves.d6_element("r^3s"))


@settings(max_examples=30)
@given(scalars, scalars)
def test_quotient_equations_on_points(x, y):
    p = curves.cameral_point_from_xy(x, y)
    assert curves.quotient_equation("S")(p.x, p.f, p.q) == ZERO
    assert curves.quotient_equation("S_dual")(p.y, p.f, p.q) == ZERO
    assert curves.project_to_c(p.x, p.f) ** 2 == p.q


# --------------------------------------------------------------------------
# numerology


def test_numerology_at_genus_two():
    n = curves.numerology(2)
    assert (n["g_S_G2"], n["g_C"], n["g_W"], n["prym_dim_g2"]) == (37, 9, 85, 14)
    assert n["prym_chain_holds"]
    assert n["g_Sbar"] == 16
    assert n["prym_dim_sp"] == 24
    assert n["covering_order_choices"] == 2 ** 12
    assert n["g_C_riemann_hurwitz"] == n["g_C"]


@given(st.integers(2, 40), st.integers(1, 6))
def test_numerology_formulas(g, m):
    n = curves.numerology(g, m)
    h = g - 1
    assert n["g_S_GL"] == 4 * m * m * h + 1
    assert n["g_S_G2"] == 36 * h + 1 and n["g_W"] == 84 * h + 1
    assert n["prym_dim_g2"] == 14 * h
    # Riemann-Hurwitz for the double cover S -> S_bar with 4m(g-1) branch points
    assert 2 * n["g_S_GL"] - 2 == 2 * (2 * n["g_Sbar"] - 2) + 4 * m * h
    # the genus difference is dim Sp(2m) (g - 1)
    assert n["prym_dim_sp_from_genera"] == m * (2 * m + 1) * h
    assert n["prym_dim_sp"] == 2 * m * (m + 1) * h
    assert n["prym_dim_sp_consistent"] is False


def test_numerology_validation():
    with pytest.raises(PreconditionError):
        curves.numerology(1)
    with pytest.raises(PreconditionError):
        curves.numerology(2, 0)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_random_generic_family_is_generic(seed):
    c = curves.random_generic_family(random.Random(seed))
    assert c.genericity_witness() is None
