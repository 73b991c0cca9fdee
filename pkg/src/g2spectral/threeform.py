"""Invariants of three-forms in six and seven dimensions.

Basis conventions: in six dimensions x1, x2, x3, y1, y2, y3 are indices
0..5 with dual basis xi_k, eta_k; in seven dimensions e7 is index 6.

Seven dimensions
    c(u, v) is the coefficient of i_u rho ^ i_v rho ^ rho against a reference
    volume, kappa is the degree-7 polynomial with kappa^3 = det c and
    g = c / kappa^(1/3).

    The reference volume defaults to 48 * xi_1 ^ ... ^ xi_7. With the plain
    unit volume det c(rho0) = 2 * 3^7, which has no cube root in Q(i, sqrt3)
    and never does on the orbit; the factor 48 makes kappa(rho0) = 1/512 and
    g(rho0) a clean form with entries 1/2 and -1.

Six dimensions
    K(w) is i_w Omega ^ Omega turned into a vector with
    :func:`~g2spectral.exterior.form_to_vector` against the reference volume
    (default xi_1 ^ xi_2 ^ xi_3 ^ eta_1 ^ eta_2 ^ eta_3), so K^2 = lambda * 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from gmpy2 import mpq

from .algebra import (
    ONE,
    ZERO,
    Matrix,
    Scalar,
    _rational_root,
    as_scalar,
    basis_vector,
    principal_root,
)
from .errors import NotInFieldError, PreconditionError, ShapeError
from .exterior import (
    AltForm,
    e,
    embed,
    form_to_vector,
    interior,
    interior_basis,
    pullback,
    volume,
    wedge,
)

REFERENCE_VOLUME_FACTOR_7 = 48


def omega_norm1() -> AltForm:
    """xi_123 + eta_123: the generic six-dimensional normal form."""
    return e(6, 0, 1, 2) + e(6, 3, 4, 5)


def omega_norm2() -> AltForm:
    """xi_1 eta_23 + xi_2 eta_31 + xi_3 eta_12: the degenerate normal form."""
    return e(6, 0, 4, 5) + e(6, 1, 5, 3) + e(6, 2, 3, 4)


def symplectic_omega() -> AltForm:
    """omega = xi_1 eta_1 + xi_2 eta_2 + xi_3 eta_3."""
    return e(6, 0, 3) + e(6, 1, 4) + e(6, 2, 5)


def vol6() -> AltForm:
    return volume(6)


def vol7_ref() -> AltForm:
    return volume(7, REFERENCE_VOLUME_FACTOR_7)


def rho0() -> AltForm:
    """Omega_norm1 + omega ^ xi_7 in seven dimensions."""
    return embed(omega_norm1(), 7) + wedge(embed(symplectic_omega(), 7), e(7, 6))


# value of kappa(rho0) with the default reference volume
KAPPA_RHO0 = Scalar(mpq(1, 512))


@dataclass(frozen=True)
class SevenFormData:
    rho: AltForm
    vol_ref: AltForm = field(default_factory=vol7_ref)

    def __post_init__(self) -> None:
        if self.rho.dim != 7 or self.rho.degree != 3:
            raise ShapeError(f"expected a 3-form in 7 dimensions, got degree {self.rho.degree} in {self.rho.dim}")
        if self.vol_ref.dim != 7 or self.vol_ref.degree != 7 or not self.vol_ref:
            raise ShapeError("vol_ref must be a nonzero 7-form in 7 dimensions")


@dataclass(frozen=True)
class SixFormData:
    omega3: AltForm
    symp: AltForm = field(default_factory=symplectic_omega)
    vol_ref: AltForm = field(default_factory=vol6)

    def __post_init__(self) -> None:
        if self.omega3.dim != 6 or self.omega3.degree != 3:
            raise ShapeError("expected a 3-form in 6 dimensions")
        if self.symp.dim != 6 or self.symp.degree != 2:
            raise ShapeError("expected a 2-form in 6 dimensions")
        if self.vol_ref.dim != 6 or self.vol_ref.degree != 6:
            raise ShapeError("vol_ref must be a 6-form in 6 dimensions")

    def is_primitive(self) -> bool:
        return not wedge(self.omega3, self.symp)


# --------------------------------------------------------------------------
# seven dimensions


def quadratic_c(d: SevenFormData, v: tuple[Scalar, ...]) -> Scalar:
    """c(v, v) read straight off i_v rho ^ i_v rho ^ rho."""
    iv = interior(v, d.rho)
    return wedge(wedge(iv, iv), d.rho).top() / d.vol_ref.top()


def bilinear_c(d: SevenFormData) -> Matrix:
    """Symmetric 7x7 matrix of c(e_i, e_j)."""
    rho = d.rho
    inv = d.vol_ref.top().inverse()
    contractions = [interior_basis(i, rho) for i in range(7)]
    sigmas = [wedge(ci, rho) for ci in contractions]
    rows = [[ZERO] * 7 for _ in range(7)]
    for i in range(7):
        for j in range(i, 7):
            val = wedge(contractions[j], sigmas[i]).top() * inv
            rows[i][j] = val
            rows[j][i] = val
    return Matrix(rows)


def polarized_c(d: SevenFormData, u: tuple[Scalar, ...], v: tuple[Scalar, ...]) -> Scalar:
    """c(u, v) = (c(u+v, u+v) - c(u, u) - c(v, v)) / 2."""
    s = tuple(a + b for a, b in zip(u, v))
    return (quadratic_c(d, s) - quadratic_c(d, u) - quadratic_c(d, v)) / 2


def _split_rational(rho: AltForm) -> list[AltForm]:
    """rho = r0 + i r1 + sqrt3 r2 + i sqrt3 r3 with rational r_k."""
    parts = []
    for k in range(4):
        parts.append(AltForm._raw(rho.dim, rho.degree, {idx: Scalar(c.coords[k]) for idx, c in rho.terms.items()}))
    return parts


@lru_cache(maxsize=None)
def _lagrange_weights(n: int, point: Scalar) -> tuple[Scalar, ...]:
    nodes = [Scalar(k) for k in range(n)]
    weights = []
    for j, xj in enumerate(nodes):
        w = ONE
        for k, xk in enumerate(nodes):
            if k != j:
                w = w * (point - xk) / (xj - xk)
        weights.append(w)
    return tuple(weights)


def kappa(d: SevenFormData) -> Scalar:
    """The degree-7 invariant with kappa^3 = det c.

    kappa is a polynomial in the coefficients of rho with rational
    coefficients, normalized by kappa(rho0) = 1/512. For rational rho it is
    the real cube root of det c. Otherwise write
    rho = r0 + i r1 + sqrt3 r2 + i sqrt3 r3, interpolate
    F(u, v) = kappa(r0 + u r1 + v r2 + u v r3) on an 8 x 8 rational grid and
    evaluate at u = i, v = sqrt3.
    """
    det = bilinear_c(d).det()
    if not det:
        return ZERO
    if all(c.is_rational for c in d.rho.terms.values()) and d.vol_ref.top().is_rational:
        root = _rational_root(det.a, 3)
        if root is None:
            raise NotInFieldError("det c has no rational cube root", witness=det)
        return Scalar(root)
    vol = d.vol_ref
    if not vol.top().is_rational:
        # kappa scales by the cube root of (V_ref / V)^7
        base = kappa(SevenFormData(d.rho))
        ratio = (vol7_ref().top() / vol.top()) ** 7
        try:
            value = base * principal_root(ratio, 3)
        except NotInFieldError:
            raise NotInFieldError("kappa is not defined in the field for this volume", witness=det) from None
        if value ** 3 != det:
            raise NotInFieldError("kappa is not defined in the field for this volume", witness=det)
        return value
    r0, r1, r2, r3 = _split_rational(d.rho)
    n = 8
    wu = _lagrange_weights(n, Scalar(0, 1))
    wv = _lagrange_weights(n, Scalar(0, 0, 1))
    acc = ZERO
    for a, b in itertools.product(range(n), range(n)):
        form = r0 + r1 * a + r2 * b + r3 * (a * b)
        val = kappa(SevenFormData(form, vol))
        if val:
            acc = acc + wu[a] * wv[b] * val
    if acc ** 3 != det:
        raise NotInFieldError("interpolated kappa does not cube to det c", witness=det)
    return acc


def kappa_cube_root(k: Scalar) -> Scalar:
    """kappa^(1/3): the real root for rational kappa, else the principal branch."""
    k = as_scalar(k)
    if k.is_rational:
        root = _rational_root(k.a, 3)
        if root is not None:
            return Scalar(root)
    return principal_root(k, 3)


def metric_from_rho(d: SevenFormData) -> Matrix:
    k = kappa(d)
    if not k:
        raise PreconditionError("kappa vanishes: rho is not in the open orbit", witness=k)
    return bilinear_c(d) * kappa_cube_root(k).inverse()


# --------------------------------------------------------------------------
# six dimensions


def k_omega(d: SixFormData) -> Matrix:
    """K_Omega as a 6x6 matrix (columns are the images of the basis)."""
    omega = d.omega3
    cols = [form_to_vector(wedge(interior_basis(j, omega), omega), d.vol_ref) for j in range(6)]
    return Matrix.from_columns(cols)


def lambda_invariant(d: SixFormData) -> Scalar:
    k = k_omega(d)
    sq = k @ k
    lam = sq[0, 0]
    if sq != Matrix.identity(6) * lam:
        raise AssertionError(f"K^2 is not scalar: {sq!r}")
    return lam


def eigenspaces_w(d: SixFormData) -> tuple[list[tuple[Scalar, ...]], list[tuple[Scalar, ...]]]:
    """Bases of the +sqrt(lambda) and -sqrt(lambda) eigenspaces of K.

    sqrt(lambda) is the principal square root in the field.
    """
    lam = lambda_invariant(d)
    if not lam:
        raise PreconditionError("lambda(Omega) = 0: K is nilpotent", witness=lam)
    s = principal_root(lam, 2)
    k = k_omega(d)
    ident = Matrix.identity(6)
    plus = (k - ident * s).nullspace()
    minus = (k + ident * s).nullspace()
    if len(plus) != 3 or len(minus) != 3:
        raise AssertionError("eigenspaces of K are not three-dimensional")
    return plus, minus


def restrict(form: AltForm, basis: list[tuple[Scalar, ...]]) -> AltForm:
    """Pull a form back to the span of ``basis`` (in the coordinates of that basis)."""
    return pullback(Matrix.from_columns(basis), form)


# --------------------------------------------------------------------------
# rho = Omega + phi ^ theta


@dataclass(frozen=True)
class RhoDecomposition:
    """rho = L^*Omega + L^*phi ^ theta on K^7 = span(frame) + span(v).

    ``frame`` is a 7x6 matrix whose columns span the g-orthogonal complement
    of v, ``lift`` the 6x7 projection onto frame coordinates along v and
    ``theta`` the covector g(v, .)/g(v, v). ``six.omega3`` is Omega,
    ``six.symp`` is phi and ``six.vol_ref`` is the restriction of i_v vol_ref.
    """

    v: tuple[Scalar, ...]
    frame: Matrix
    lift: Matrix
    theta: AltForm
    six: SixFormData

    def reconstruct(self) -> AltForm:
        omega = pullback(self.lift, self.six.omega3)
        phi = pullback(self.lift, self.six.symp)
        return omega + wedge(phi, self.theta)


def decompose_rho(d: SevenFormData, v: tuple[Scalar, ...]) -> RhoDecomposition:
    v = tuple(as_scalar(x) for x in v)
    if len(v) != 7:
        raise ShapeError("v must have 7 entries")
    g = metric_from_rho(d)
    gv = g @ v
    norm = sum((a * b for a, b in zip(v, gv)), ZERO)
    if not norm:
        raise PreconditionError("v is null for the metric of rho", witness=norm)
    frame_cols = Matrix([list(gv)]).nullspace()
    frame = Matrix.from_columns(frame_cols)
    full = Matrix.from_columns(frame_cols + [v])
    inv = full.inverse()
    lift = Matrix(inv.rows[:6])
    theta = AltForm(7, 1, {(j,): inv[6, j] for j in range(7)})
    omega = pullback(frame, d.rho)
    phi = pullback(frame, interior(v, d.rho))
    vol = pullback(frame, interior(v, d.vol_ref))
    return RhoDecomposition(v, frame, lift, theta, SixFormData(omega, phi, vol))


def e7() -> tuple[Scalar, ...]:
    return basis_vector(7, 6)
