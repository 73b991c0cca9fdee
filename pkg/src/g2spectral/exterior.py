"""Alternating forms on K^n (n <= 8): wedge, interior product, pullback.

Indices are 0-based internally. A form is a sparse map from strictly
increasing index tuples to nonzero Scalars; ``e(…)`` builds basis forms.
The JSON representation uses 1-based indices.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .algebra import ONE, ZERO, Matrix, Scalar, as_scalar
from .errors import PreconditionError, ShapeError

MAX_DIM = 8


class AltForm:
    __slots__ = ("dim", "degree", "terms")

    def __init__(self, dim: int, degree: int, terms: Mapping[Sequence[int], object] | None = None) -> None:
        if not 0 <= dim <= MAX_DIM:
            raise ShapeError(f"ambient dimension {dim} outside 0..{MAX_DIM}")
        if not 0 <= degree <= dim:
            raise ShapeError(f"degree {degree} outside 0..{dim}")
        clean: dict[tuple[int, ...], Scalar] = {}
        for idx, c in (terms or {}).items():
            key = tuple(idx)
            if len(key) != degree:
                raise ShapeError(f"index {key} has length {len(key)}, expected {degree}")
            if any(b <= a for a, b in zip(key, key[1:])):
                raise ShapeError(f"index {key} is not strictly increasing")
            if key and not (0 <= key[0] and key[-1] < dim):
                raise ShapeError(f"index {key} out of range for dimension {dim}")
            c = as_scalar(c)
            if c:
                clean[key] = clean.get(key, ZERO) + c
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v})

    @classmethod
    def _raw(cls, dim: int, degree: int, terms: dict[tuple[int, ...], Scalar]) -> AltForm:
        obj = object.__new__(cls)
        object.__setattr__(obj, "dim", dim)
        object.__setattr__(obj, "degree", degree)
        object.__setattr__(obj, "terms", {k: v for k, v in terms.items() if v})
        return obj

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("AltForm is immutable")

    @classmethod
    def zero(cls, dim: int, degree: int) -> AltForm:
        return cls(dim, degree)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coeff(self, idx: Sequence[int]) -> Scalar:
        """Coefficient at an arbitrary (not necessarily sorted) index tuple."""
        idx = tuple(idx)
        if len(set(idx)) != len(idx):
            return ZERO
        order = sorted(range(len(idx)), key=idx.__getitem__)
        sign = _perm_sign(order)
        c = self.terms.get(tuple(sorted(idx)), ZERO)
        return c if sign > 0 else -c

    def top(self) -> Scalar:
        """Coefficient of e_0 ^ ... ^ e_{n-1} (meaningful for top-degree forms)."""
        return self.terms.get(tuple(range(self.dim)), ZERO)

    def _check(self, other: AltForm) -> None:
        if self.dim != other.dim or self.degree != other.degree:
            raise ShapeError(
                f"forms differ: dim {self.dim} deg {self.degree} vs dim {other.dim} deg {other.degree}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AltForm):
            return NotImplemented
        return self.dim == other.dim and self.degree == other.degree and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.dim, self.degree, frozenset(self.terms.items())))

    def __add__(self, other: AltForm) -> AltForm:
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return AltForm._raw(self.dim, self.degree, out)

    def __neg__(self) -> AltForm:
        return AltForm._raw(self.dim, self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: AltForm) -> AltForm:
        return self + (-other)

    def __mul__(self, s: object) -> AltForm:
        s = as_scalar(s)
        return AltForm._raw(self.dim, self.degree, {k: v * s for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other: AltForm) -> AltForm:
        return wedge(self, other)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "degree": self.degree,
            "terms": [
                {"idx": [i + 1 for i in k], "c": v.to_json()} for k, v in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data: object) -> AltForm:
        if not isinstance(data, dict):
            raise ValueError("an AltForm is an object with dim, degree and terms")
        for field in ("dim", "degree", "terms"):
            if field not in data:
                raise ValueError(f"AltForm is missing field '{field}'")
        dim, degree, terms = data["dim"], data["degree"], data["terms"]
        if not isinstance(dim, int) or not isinstance(degree, int) or isinstance(dim, bool):
            raise ValueError("AltForm dim and degree must be integers")
        if not isinstance(terms, list):
            raise ValueError("AltForm terms must be an array")
        out: dict[tuple[int, ...], Scalar] = {}
        for n, t in enumerate(terms):
            if not isinstance(t, dict) or "idx" not in t or "c" not in t:
                raise ValueError(f"term {n} needs 'idx' and 'c'")
            idx = t["idx"]
            if not isinstance(idx, list) or not all(isinstance(i, int) for i in idx):
                raise ValueError(f"term {n}: idx must be an array of integers")
            key = tuple(i - 1 for i in idx)
            if key in out:
                raise ValueError(f"term {n}: duplicate index {idx}")
            out[key] = Scalar.from_json(t["c"])
        return cls(dim, degree, out)

    def __repr__(self) -> str:
        if not self.terms:
            return f"AltForm(dim={self.dim}, degree={self.degree}, 0)"
        body = " + ".join(
            f"({v})e{''.join(str(i) for i in k)}" for k, v in sorted(self.terms.items())
        )
        return f"AltForm(dim={self.dim}, {body})"


def e(dim: int, *idx: int) -> AltForm:
    """Basis form e_{i1} ^ ... ^ e_{ik} (0-based; any order, sign applied)."""
    if len(set(idx)) != len(idx):
        return AltForm(dim, len(idx))
    order = sorted(range(len(idx)), key=idx.__getitem__)
    return AltForm(dim, len(idx), {tuple(sorted(idx)): _perm_sign(order)})


def constant(dim: int, c: object = 1) -> AltForm:
    return AltForm(dim, 0, {(): c})


def volume(dim: int, c: object = 1) -> AltForm:
    return AltForm(dim, dim, {tuple(range(dim)): c})


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=1 << 16)
def _merge(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign and sorted union for e_a ^ e_b; sign 0 when they overlap."""
    if set(a) & set(b):
        return 0, ()
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1 if inversions & 1 else 1), tuple(sorted(a + b))


def wedge(a: AltForm, b: AltForm) -> AltForm:
    if a.dim != b.dim:
        raise ShapeError(f"wedge of forms in dimensions {a.dim} and {b.dim}")
    deg = a.degree + b.degree
    if deg > a.dim:
        raise ShapeError(f"wedge degree {deg} exceeds dimension {a.dim}")
    out: dict[tuple[int, ...], Scalar] = {}
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            sign, key = _merge(ka, kb)
            if not sign:
                continue
            prod = va * vb
            cur = out.get(key)
            if sign > 0:
                out[key] = prod if cur is None else cur + prod
            else:
                out[key] = -prod if cur is None else cur - prod
    return AltForm._raw(a.dim, deg, out)


def wedge_all(forms: Iterable[AltForm]) -> AltForm:
    forms = list(forms)
    if not forms:
        raise ShapeError("wedge of an empty list")
    acc = forms[0]
    for f in forms[1:]:
        acc = wedge(acc, f)
    return acc


def interior(v: Sequence[Scalar], a: AltForm) -> AltForm:
    """Contraction i_v a, inserting v into the first slot."""
    if len(v) != a.dim:
        raise ShapeError(f"vector of length {len(v)} against a form in dimension {a.dim}")
    if a.degree < 1:
        raise ShapeError("interior product of a 0-form")
    out: dict[tuple[int, ...], Scalar] = {}
    for key, c in a.terms.items():
        for pos, idx in enumerate(key):
            x = v[idx]
            if not x:
                continue
            rest = key[:pos] + key[pos + 1:]
            term = c * x
            if pos & 1:
                term = -term
            cur = out.get(rest)
            out[rest] = term if cur is None else cur + term
    return AltForm._raw(a.dim, a.degree - 1, out)


def interior_basis(i: int, a: AltForm) -> AltForm:
    return interior(tuple(ONE if k == i else ZERO for k in range(a.dim)), a)


def evaluate(a: AltForm, vectors: Sequence[Sequence[Scalar]]) -> Scalar:
    """a(v_1, ..., v_k)."""
    if len(vectors) != a.degree:
        raise ShapeError(f"{a.degree}-form evaluated on {len(vectors)} vectors")
    acc = a
    for v in vectors:
        acc = interior(v, acc)
    return acc.terms.get((), ZERO)


def pullback(A: Matrix, a: AltForm) -> AltForm:
    """A^* a, where A maps K^m -> K^n (n x m matrix) and a lives on K^n.

    (A^* a)_J = sum_I a_I det(A[I, J]). Rectangular A is allowed, which
    restricts forms to the span of A's columns.
    """
    if A.nrows != a.dim:
        raise ShapeError(f"map with {A.nrows} rows cannot pull back a form in dimension {a.dim}")
    k = a.degree
    m = A.ncols
    if k == 0:
        return AltForm._raw(m, 0, dict(a.terms))
    if k > m:
        return AltForm._raw(m, k, {})
    rows = A.rows
    out: dict[tuple[int, ...], Scalar] = {}
    for J in itertools.combinations(range(m), k):
        acc = ZERO
        for I, c in a.terms.items():
            d = _minor(rows, I, J)
            if d:
                acc = acc + c * d
        if acc:
            out[J] = acc
    return AltForm._raw(m, k, out)


def _minor(rows: Sequence[Sequence[Scalar]], I: Sequence[int], J: Sequence[int]) -> Scalar:
    k = len(I)
    if k == 1:
        return rows[I[0]][J[0]]
    if k == 2:
        r0, r1 = rows[I[0]], rows[I[1]]
        return r0[J[0]] * r1[J[1]] - r0[J[1]] * r1[J[0]]
    if k == 3:
        r0, r1, r2 = rows[I[0]], rows[I[1]], rows[I[2]]
        a, b, c = r0[J[0]], r0[J[1]], r0[J[2]]
        d, e_, f = r1[J[0]], r1[J[1]], r1[J[2]]
        g, h, i = r2[J[0]], r2[J[1]], r2[J[2]]
        return a * (e_ * i - f * h) - b * (d * i - f * g) + c * (d * h - e_ * g)
    return Matrix([[rows[i][j] for j in J] for i in I]).det()


def form_to_vector(a: AltForm, vol: AltForm) -> tuple[Scalar, ...]:
    """The vector v with i_v vol = a, for a of degree n-1 and vol a top form.

    Sign convention: exactly i_v vol = a (no extra sign), so
    ``form_to_vector(interior(v, vol), vol) == v``.
    """
    n = vol.dim
    if vol.degree != n or a.dim != n or a.degree != n - 1:
        raise ShapeError("form_to_vector needs an (n-1)-form and a top form in the same dimension")
    top = vol.top()
    if not top:
        raise PreconditionError("zero volume form")
    inv = top.inverse()
    out = []
    for j in range(n):
        c = a.terms.get(tuple(k for k in range(n) if k != j), ZERO)
        c = c * inv
        out.append(-c if j & 1 else c)
    return tuple(out)


def symplectic_matrix(w: AltForm) -> Matrix:
    """Gram matrix W_ij = w(e_i, e_j) of a 2-form."""
    if w.degree != 2:
        raise ShapeError("Gram matrix of a non-2-form")
    n = w.dim
    rows = [[ZERO] * n for _ in range(n)]
    for (i, j), c in w.terms.items():
        rows[i][j] = c
        rows[j][i] = -c
    return Matrix(rows)


def two_form_from_matrix(m: Matrix) -> AltForm:
    """Inverse of :func:`symplectic_matrix` for antisymmetric m."""
    n = m.nrows
    return AltForm(n, 2, {(i, j): m[i, j] for i in range(n) for j in range(i + 1, n)})


def embed(a: AltForm, dim: int) -> AltForm:
    """The same coefficients viewed in a larger ambient dimension."""
    if dim < a.dim:
        raise ShapeError(f"cannot embed dimension {a.dim} into {dim}")
    return AltForm._raw(dim, a.degree, dict(a.terms))
