"""Stabilizer algebras, characteristic polynomials and the zero eigenvector v0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .algebra import ONE, ZERO, Matrix, Scalar, UniPoly, as_scalar, basis_vector
from .errors import PreconditionError, ShapeError
from .exterior import (
    AltForm,
    evaluate,
    form_to_vector,
    pullback,
    two_form_from_matrix,
    volume,
    wedge,
)
from .threeform import SixFormData, k_omega, omega_norm2, symplectic_omega


def lie_action(a: Matrix, form: AltForm) -> AltForm:
    """Infinitesimal action (a.form)(u, ...) = -form(a u, ...) - ... .

    On the dual basis a.xi_i = -sum_j a_ij xi_j, extended as a derivation.
    """
    n = form.dim
    if a.shape != (n, n):
        raise ShapeError(f"{a.shape} matrix acting on a form in dimension {n}")
    rows = a.rows
    out: dict[tuple[int, ...], Scalar] = {}
    for key, c in form.terms.items():
        for pos, i in enumerate(key):
            row = rows[i]
            for j in range(n):
                x = row[j]
                if not x or (j != i and j in key):
                    continue
                new = key[:pos] + (j,) + key[pos + 1:]
                # sort the single displaced index back into place
                sign = 1
                lst = list(new)
                p = pos
                while p > 0 and lst[p - 1] > lst[p]:
                    lst[p - 1], lst[p] = lst[p], lst[p - 1]
                    p -= 1
                    sign = -sign
                while p < len(lst) - 1 and lst[p] > lst[p + 1]:
                    lst[p + 1], lst[p] = lst[p], lst[p + 1]
                    p += 1
                    sign = -sign
                k = tuple(lst)
                term = c * x
                term = -term if sign > 0 else term
                cur = out.get(k)
                out[k] = term if cur is None else cur + term
    return AltForm._raw(n, form.degree, out)


@dataclass(frozen=True)
class AlgElement:
    """An endomorphism together with the structures it is asserted to preserve.

    ``forms`` are annihilated by :func:`lie_action`; ``metric`` (if given) is
    a symmetric Gram matrix for which the element is skew.
    """

    mat: Matrix
    forms: tuple[AltForm, ...] = ()
    metric: Matrix | None = None
    kind: str = "gl"

    def __post_init__(self) -> None:
        if not self.mat.is_square:
            raise ShapeError("a Lie algebra element must be square")
        for f in self.forms:
            if lie_action(self.mat, f):
                raise PreconditionError("element does not stabilize a tagged form", witness=f)
        if self.metric is not None:
            skew = self.mat.T @ self.metric + self.metric @ self.mat
            if not skew.is_zero():
                raise PreconditionError("element is not skew for the tagged metric", witness=skew)

    @property
    def dim(self) -> int:
        return self.mat.nrows


def _elementary(n: int, i: int, j: int) -> Matrix:
    return Matrix([[ONE if (r, c) == (i, j) else ZERO for c in range(n)] for r in range(n)])


def stabilizer_dim(forms: Sequence[AltForm]) -> tuple[int, list[AlgElement]]:
    """Dimension and a basis of {a in gl(n) : a.form = 0 for every form}."""
    forms = list(forms)
    if not forms:
        raise ShapeError("stabilizer of an empty list of forms")
    n = forms[0].dim
    if any(f.dim != n for f in forms):
        raise ShapeError("forms live in different dimensions")
    # column (i, j) holds the coefficients of E_ij . form, for every form
    keys: dict[tuple[int, tuple[int, ...]], int] = {}
    columns: list[dict[int, Scalar]] = []
    for i in range(n):
        for j in range(n):
            col: dict[int, Scalar] = {}
            eij = _elementary(n, i, j)
            for k, f in enumerate(forms):
                for idx, c in lie_action(eij, f).terms.items():
                    row = keys.setdefault((k, idx), len(keys))
                    col[row] = c
            columns.append(col)
    if not keys:
        basis_vecs = [basis_vector(n * n, k) for k in range(n * n)]
    else:
        rows = [[col.get(r, ZERO) for col in columns] for r in range(len(keys))]
        basis_vecs = Matrix(rows).nullspace()
    basis = []
    for vec in basis_vecs:
        mat = Matrix([list(vec[r * n:(r + 1) * n]) for r in range(n)])
        basis.append(AlgElement(mat, tuple(forms), kind="stabilizer"))
    return len(basis), basis


def bracket(a: Matrix, b: Matrix) -> Matrix:
    return a @ b - b @ a


def char_poly(a: AlgElement | Matrix) -> UniPoly:
    mat = a.mat if isinstance(a, AlgElement) else a
    return mat.charpoly()


@dataclass(frozen=True)
class G2Invariants:
    f: Scalar
    q: Scalar

    def to_json(self) -> dict:
        return {"f": self.f.to_json(), "q": self.q.to_json()}


def g2_invariants(a: AlgElement | Matrix) -> G2Invariants:
    """Read (f, q) from det(x - a) = x(x^6 - f x^4 + f^2/4 x^2 - q)."""
    p = char_poly(a)
    if p.degree != 7:
        raise ShapeError("a g2 element acts on seven dimensions", witness=p.degree)
    for k in (0, 2, 4, 6):
        if p.coeff(k):
            raise ShapeError(f"coefficient of x^{k} is nonzero", witness=p.coeff(k))
    f = -p.coeff(5)
    q = -p.coeff(1)
    if p.coeff(3) != f * f / 4:
        raise ShapeError("middle coefficient differs from f^2/4", witness=p.coeff(3) - f * f / 4)
    return G2Invariants(f, q)


def g2_diagonal(l1: object, l2: object, l3: object | None = None) -> Matrix:
    """diag(l1, l2, l3, -l1, -l2, -l3, 0); stabilizes rho0 when l1 + l2 + l3 = 0."""
    l1, l2 = as_scalar(l1), as_scalar(l2)
    l3 = -(l1 + l2) if l3 is None else as_scalar(l3)
    return Matrix.diag([l1, l2, l3, -l1, -l2, -l3, ZERO])


# --------------------------------------------------------------------------
# the canonical zero eigenvector


def skew_block_element(lams: Sequence[object]) -> Matrix:
    """so(2m+1) element with eigenvalues 0, +-lams in the basis e0, e1, ..., e2m.

    The block on (e_{2k-1}, e_{2k}) is [[0, -i l], [i l, 0]], so that
    alpha = g(a., .) = i l e_{2k-1} ^ e_{2k} for the identity metric.
    """
    m = len(lams)
    n = 2 * m + 1
    rows = [[ZERO] * n for _ in range(n)]
    il = Scalar(0, 1)
    for k, lam in enumerate(lams):
        p, q = 2 * k + 1, 2 * k + 2
        rows[p][q] = -il * as_scalar(lam)
        rows[q][p] = il * as_scalar(lam)
    return Matrix(rows)


def alpha_form(a: Matrix, metric: Matrix | None = None) -> AltForm:
    """alpha(u, w) = g(a u, w), with Gram matrix a^T G."""
    g = Matrix.identity(a.nrows) if metric is None else metric
    gram = a.T @ g
    if not (gram + gram.T).is_zero():
        raise PreconditionError("a is not skew for the metric")
    return two_form_from_matrix(gram)


def canonical_v0(a: AlgElement | Matrix, vol: AltForm | None = None, metric: Matrix | None = None) -> tuple[Scalar, ...]:
    """The vector v0 with alpha^m = m! i_{v0} vol, alpha(u, w) = g(a u, w)."""
    mat = a.mat if isinstance(a, AlgElement) else a
    if metric is None and isinstance(a, AlgElement):
        metric = a.metric
    n = mat.nrows
    if n % 2 == 0 or n < 3:
        raise ShapeError("canonical_v0 needs odd dimension 2m+1 with m >= 1")
    m = (n - 1) // 2
    vol = volume(n) if vol is None else vol
    alpha = alpha_form(mat, metric)
    power = alpha
    for _ in range(m - 1):
        power = wedge(power, alpha)
    return form_to_vector(power * Scalar(mpq(1, math.factorial(m))), vol)


# --------------------------------------------------------------------------
# the pointwise condition at a zero of a_{2m}


@dataclass(frozen=True)
class PointOfD:
    """A symplectic element at a point where a_{2m} vanishes, with its data.

    Basis f1, f2, p2, q2, ..., pm, qm: phi0 f2 = f1, phi0 f1 = 0,
    phi0 p_k = l_k p_k, phi0 q_k = -l_k q_k and omega(f1, f2) = omega(p_k, q_k) = 1.
    ``distinguished`` is t f2 with t^2 = (-1)^m prod l_k^2.
    """

    phi0: AlgElement
    omega: AltForm
    lams: tuple[Scalar, ...]
    distinguished: tuple[Scalar, ...]


def point_of_d(lams: Sequence[object], change: Matrix | None = None) -> PointOfD:
    """Build phi0 from the nonzero eigenvalues l_2..l_m; optionally conjugate.

    ``change`` must be symplectic for the standard form; the returned data is
    then expressed in the new basis (phi0 -> S^-1 phi0 S, omega -> S^* omega).
    """
    lams = tuple(as_scalar(x) for x in lams)
    m = len(lams) + 1
    n = 2 * m
    rows = [[ZERO] * n for _ in range(n)]
    rows[0][1] = ONE
    for k, lam in enumerate(lams):
        p, q = 2 + 2 * k, 3 + 2 * k
        rows[p][p] = lam
        rows[q][q] = -lam
    phi = Matrix(rows)
    omega = AltForm(n, 2, {(2 * k, 2 * k + 1): 1 for k in range(m)})
    prod = ONE
    for lam in lams:
        prod = prod * lam
    # t^2 = (-1)^m prod^2
    t = prod if m % 2 == 0 else Scalar(0, 1) * prod
    e = [ZERO] * n
    e[1] = t
    e = tuple(e)
    if change is not None:
        inv = change.inverse()
        phi = inv @ phi @ change
        omega_new = pullback(change, omega)
        if omega_new != omega:
            raise PreconditionError("change of basis is not symplectic")
        e = inv @ e
    return PointOfD(AlgElement(phi, (omega,), kind="sp"), omega, lams, e)


def quadratic_condition_check(
    phi0: AlgElement | Matrix,
    e: Sequence[object],
    omega: AltForm | None = None,
    lams: Sequence[object] | None = None,
) -> Scalar:
    """omega(phi0 e, e) + a_{2m-2}; zero exactly when e meets the condition.

    The characteristic polynomial must be x^2 times an even polynomial (one
    nilpotent 2-block plus +-pairs). If ``lams`` is given, also checks that
    det(x - phi0) = x^2 prod(x^2 - l^2) and l_2^2...l_m^2 = (-1)^(m-1) a_{2m-2}.
    """
    mat = phi0.mat if isinstance(phi0, AlgElement) else phi0
    if omega is None:
        if isinstance(phi0, AlgElement) and phi0.forms:
            omega = phi0.forms[0]
        else:
            raise ShapeError("no symplectic form supplied")
    n = mat.nrows
    if n % 2 or n < 2:
        raise ShapeError("symplectic elements act on even dimensions")
    m = n // 2
    if lie_action(mat, omega):
        raise ShapeError("phi0 does not preserve omega")
    p = mat.charpoly()
    odd = [k for k in range(1, n, 2) if p.coeff(k)]
    if odd or p.coeff(0):
        raise ShapeError("characteristic polynomial is not x^2 times an even polynomial", witness=p)
    a_prev = p.coeff(2)
    if lams is not None:
        lams = [as_scalar(x) for x in lams]
        if len(lams) != m - 1:
            raise ShapeError("expected m - 1 nonzero eigenvalues")
        expected = UniPoly([0, 0, 1])
        prod = ONE
        for lam in lams:
            expected = expected * UniPoly([-(lam * lam), 0, 1])
            prod = prod * lam * lam
        if expected != p:
            raise ShapeError("eigenvalues do not match the characteristic polynomial", witness=p)
        sign = 1 if (m - 1) % 2 == 0 else -1
        if prod != a_prev * sign:
            raise AssertionError("sign identity for a_{2m-2} failed")
    e = tuple(as_scalar(x) for x in e)
    return evaluate(omega, [mat @ e, e]) + a_prev


# --------------------------------------------------------------------------
# v0 = 2a at a point of D for G2


def cross_matrix(a: Sequence[object]) -> Matrix:
    """Matrix of x -> a cross x."""
    a1, a2, a3 = (as_scalar(x) for x in a)
    return Matrix([[0, -a3, a2], [a3, 0, -a1], [-a2, a1, 0]])


def phi0_fiform(a_param: Sequence[object], M: Matrix) -> Matrix:
    """(x, y) -> (a x x + M y, a x y) in the basis x1, x2, x3, y1, y2, y3."""
    if M.shape != (3, 3):
        raise ShapeError("M must be 3x3")
    if M != M.T or M.trace():
        raise PreconditionError("M must be symmetric and traceless", witness=M)
    c = cross_matrix(a_param)
    rows = []
    for i in range(3):
        rows.append(list(c.rows[i]) + list(M.rows[i]))
    for i in range(3):
        rows.append([ZERO] * 3 + list(c.rows[i]))
    return Matrix(rows)


def symplectic_volume() -> AltForm:
    """omega^3 / 3! = xi1 eta1 xi2 eta2 xi3 eta3 = -xi123 eta123."""
    w = symplectic_omega()
    return wedge(wedge(w, w), w) * Scalar(mpq(1, 6))


def _k0(vol: str) -> Matrix:
    if vol == "symplectic":
        ref = symplectic_volume()
    elif vol == "standard":
        ref = volume(6)
    else:
        raise ValueError("volume must be 'symplectic' or 'standard'")
    return k_omega(SixFormData(omega_norm2(), vol_ref=ref))


def solve_v0(a_param: Sequence[object], M: Matrix, vol: str = "symplectic") -> tuple[Scalar, ...]:
    """The unique v with i_v Omega(u1, u2) = omega(phi0 k0 u1, u2) for all u1, u2."""
    phi = phi0_fiform(a_param, M)
    k0 = _k0(vol)
    omega, big = symplectic_omega(), omega_norm2()
    pairs = [(i, j) for i in range(6) for j in range(i + 1, 6)]
    basis = [basis_vector(6, k) for k in range(6)]
    rows, rhs = [], []
    for i, j in pairs:
        rows.append([evaluate(big, [basis[k], basis[i], basis[j]]) for k in range(6)])
        rhs.append(evaluate(omega, [phi @ (k0 @ basis[i]), basis[j]]))
    aug = Matrix([r + [b] for r, b in zip(rows, rhs)])
    red, piv = aug.rref()
    if 6 in piv:
        raise PreconditionError("no v solves the equation for this (a, M)")
    v = [ZERO] * 6
    for r, c in enumerate(piv):
        v[c] = red[r, 6]
    return tuple(v)


def verify_v0_equals_2a(a_param: Sequence[object], M: Matrix, vol: str = "symplectic") -> bool:
    """i_{2a} Omega_norm2(u1, u2) == omega(phi0 k0 u1, u2) on all basis pairs.

    k0 is K_Omega for Omega_norm2 computed against ``vol``. With the
    symplectic volume omega^3/3! this gives k0(x, y) = (2y, 0) and v0 = 2a;
    with xi123 eta123 it gives k0(x, y) = (-2y, 0) and the solution is -2a.
    """
    phi = phi0_fiform(a_param, M)
    k0 = _k0(vol)
    omega, big = symplectic_omega(), omega_norm2()
    v0 = tuple([2 * as_scalar(x) for x in a_param] + [ZERO] * 3)
    basis = [basis_vector(6, k) for k in range(6)]
    for i in range(6):
        for j in range(6):
            lhs = evaluate(big, [v0, basis[i], basis[j]])
            rhs = evaluate(omega, [phi @ (k0 @ basis[i]), basis[j]])
            if lhs != rhs:
                return False
    return True
