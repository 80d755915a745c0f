"""Hermitian projector model of the Grassmannians G(n, m; F) for F = R, C, H.

A point is a rank-n Hermitian projector P in H(m; F).  The ambient metric is
g(A, B) = Re tr(AB) / 2 and the cone is taken over the centered image
P - (n/m) I, which lies on a sphere of radius sqrt(n(m-n)/(2m)) inside the
trace-zero hyperplane.

Matrices over F are stored as real arrays of shape (rows, cols, d).
Index conventions at the origin P0 = diag(I_n, 0): a, b, c run over the top
block 1..n, alpha, beta, lambda, mu over the bottom block n+1..m.  All
public indices are 1-based to match the usual E_ij notation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from numbers import Real
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .algebra import (
    AlgebraElement,
    AlgebraField,
    FieldMismatch,
    cd_conjugate,
    left_matrix,
    structure_constants,
)
from .lawlor import CaseFlag, ConeCase

IDEMPOTENT_TOL = 1e-10


class InvalidFamily(ValueError):
    pass


def _field(f) -> AlgebraField:
    f = AlgebraField.from_tag(f)
    if f.d > 4:
        raise FieldMismatch("projector model needs an associative field (R, C or H)")
    return f


class FMatrix:
    """Dense matrix with entries in R, C or H."""

    __slots__ = ("field", "data")

    def __init__(self, field, data):
        self.field = _field(field)
        data = np.array(data, dtype=float)
        if data.ndim == 2 and self.field.d == 1:
            data = data[..., None]
        if data.ndim != 3 or data.shape[2] != self.field.d:
            raise ValueError(f"expected array of shape (r, c, {self.field.d}), got {data.shape}")
        data.setflags(write=False)
        self.data = data

    @classmethod
    def zeros(cls, field, rows, cols=None):
        field = _field(field)
        return cls(field, np.zeros((rows, rows if cols is None else cols, field.d)))

    @classmethod
    def identity(cls, field, m):
        field = _field(field)
        a = np.zeros((m, m, field.d))
        a[np.arange(m), np.arange(m), 0] = 1.0
        return cls(field, a)

    @classmethod
    def unit(cls, field, m, i, j, u=0, cols=None):
        """u_u * E_ij with 1-based (i, j)."""
        field = _field(field)
        a = np.zeros((m, m if cols is None else cols, field.d))
        a[i - 1, j - 1, u] = 1.0
        return cls(field, a)

    @classmethod
    def from_real(cls, field, array):
        field = _field(field)
        array = np.asarray(array, dtype=float)
        a = np.zeros(array.shape + (field.d,))
        a[..., 0] = array
        return cls(field, a)

    @property
    def shape(self):
        return self.data.shape[:2]

    def entry(self, i: int, j: int) -> AlgebraElement:
        """0-based entry access."""
        return AlgebraElement.from_array(self.field, self.data[i, j])

    def _same(self, other):
        if not isinstance(other, FMatrix):
            raise TypeError(f"expected FMatrix, got {type(other).__name__}")
        if other.field is not self.field:
            raise FieldMismatch(f"{self.field.name} vs {other.field.name}")

    def __matmul__(self, other):
        self._same(other)
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        t = structure_constants(self.field)
        return FMatrix(self.field, np.einsum("ikp,kjq,pqr->ijr", self.data, other.data, t))

    def __add__(self, other):
        self._same(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return FMatrix(self.field, self.data + other.data)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return FMatrix(self.field, -self.data)

    def __mul__(self, s):
        if isinstance(s, Real):
            return FMatrix(self.field, self.data * float(s))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / s)

    def adjoint(self) -> "FMatrix":
        return FMatrix(self.field, cd_conjugate(self.data.transpose(1, 0, 2)))

    def real_trace(self) -> float:
        r, c = self.shape
        if r != c:
            raise ValueError("trace of a non-square matrix")
        return float(np.trace(self.data[..., 0]))

    def realify(self) -> np.ndarray:
        """Real representation chi: entry a becomes its left-multiplication block."""
        r, c = self.shape
        d = self.field.d
        blocks = left_matrix(self.data)  # (r, c, d, d)
        return blocks.transpose(0, 2, 1, 3).reshape(r * d, c * d)

    @classmethod
    def from_realified(cls, field, big: np.ndarray) -> "FMatrix":
        field = _field(field)
        d = field.d
        R, Cc = big.shape
        blocks = big.reshape(R // d, d, Cc // d, d).transpose(0, 2, 1, 3)
        return cls(field, blocks[..., :, 0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def allclose(self, other, atol=1e-12) -> bool:
        self._same(other)
        return self.shape == other.shape and bool(np.allclose(self.data, other.data, rtol=0, atol=atol))

    def is_hermitian(self, atol=1e-12) -> bool:
        return self.shape[0] == self.shape[1] and self.allclose(self.adjoint(), atol)

    def __repr__(self):
        return f"FMatrix({self.field.symbol}, shape={self.shape})"


class HermitianMatrix(FMatrix):
    """Square FMatrix with A* = A (checked at construction)."""

    __slots__ = ()

    def __init__(self, field, data, atol=1e-12):
        super().__init__(field, data)
        r, c = self.shape
        if r != c:
            raise ValueError(f"Hermitian matrix must be square, got {self.shape}")
        if not np.allclose(self.data, cd_conjugate(self.data.transpose(1, 0, 2)), rtol=0, atol=atol):
            raise ValueError("matrix is not Hermitian")

    @classmethod
    def of(cls, A: FMatrix, atol=1e-10) -> "HermitianMatrix":
        return cls(A.field, A.data, atol=atol)

    @property
    def m(self) -> int:
        return self.shape[0]


def ambient_inner(A: FMatrix, B: FMatrix) -> float:
    """g(A, B) = Re tr(AB) / 2."""
    A._same(B)
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    # Re(a_ij b_ji) = <a_ij, conj(b_ji)>
    return 0.5 * float(np.sum(A.data * cd_conjugate(B.data.transpose(1, 0, 2))))


def ambient_dim(m: int, field) -> int:
    d = _field(field).d
    return m + d * m * (m - 1) // 2


def to_vector(A: FMatrix) -> np.ndarray:
    """Isometric coordinates (H(m;F), g) -> R^N: diagonal / sqrt 2, then upper entries."""
    m = A.shape[0]
    iu, ju = np.triu_indices(m, 1)
    return np.concatenate([A.data[np.arange(m), np.arange(m), 0] / math.sqrt(2.0), A.data[iu, ju].ravel()])


def to_vector_batch(data: np.ndarray) -> np.ndarray:
    """to_vector on a stack of raw (..., m, m, d) arrays."""
    m = data.shape[-3]
    iu, ju = np.triu_indices(m, 1)
    diag = data[..., np.arange(m), np.arange(m), 0] / math.sqrt(2.0)
    off = data[..., iu, ju, :].reshape(data.shape[:-3] + (-1,))
    return np.concatenate([diag, off], axis=-1)


def from_vector(v: np.ndarray, m: int, field) -> HermitianMatrix:
    field = _field(field)
    d = field.d
    v = np.asarray(v, dtype=float)
    a = np.zeros((m, m, d))
    a[np.arange(m), np.arange(m), 0] = v[:m] * math.sqrt(2.0)
    iu, ju = np.triu_indices(m, 1)
    off = v[m:].reshape(len(iu), d)
    a[iu, ju] = off
    a[ju, iu] = cd_conjugate(off)
    return HermitianMatrix(field, a)


@dataclass(frozen=True)
class GrassmannianPoint:
    matrix: HermitianMatrix
    n: int

    def __post_init__(self):
        P = self.matrix
        if not isinstance(P, HermitianMatrix):
            object.__setattr__(self, "matrix", HermitianMatrix.of(P))
            P = self.matrix
        res = (P @ P - P).norm()
        if res > IDEMPOTENT_TOL:
            raise ValueError(f"not idempotent (residual {res:.3e})")
        if abs(P.real_trace() - self.n) > IDEMPOTENT_TOL:
            raise ValueError(f"trace {P.real_trace():.12g} != rank {self.n}")

    @property
    def field(self):
        return self.matrix.field

    @property
    def m(self) -> int:
        return self.matrix.m

    def centered(self) -> FMatrix:
        return self.matrix - FMatrix.identity(self.field, self.m) * (self.n / self.m)

    def complement(self) -> "GrassmannianPoint":
        return GrassmannianPoint(HermitianMatrix.of(FMatrix.identity(self.field, self.m) - self.matrix), self.m - self.n)


def origin(n: int, m: int, field) -> GrassmannianPoint:
    field = _field(field)
    a = np.zeros((m, m, field.d))
    a[np.arange(n), np.arange(n), 0] = 1.0
    return GrassmannianPoint(HermitianMatrix(field, a), n)


def projector_from_basis(f: FMatrix, atol=1e-10) -> GrassmannianPoint:
    m, n = f.shape
    gram = f.adjoint() @ f
    if not gram.allclose(FMatrix.identity(f.field, n), atol=atol):
        raise ValueError("columns are not orthonormal")
    return GrassmannianPoint(HermitianMatrix.of(f @ f.adjoint()), n)


def is_unitary(Q: FMatrix, atol=1e-10) -> bool:
    m = Q.shape[0]
    return Q.shape[0] == Q.shape[1] and (Q @ Q.adjoint()).allclose(FMatrix.identity(Q.field, m), atol)


def adjoint_act(Q: FMatrix, P: FMatrix) -> HermitianMatrix:
    """Q P Q*."""
    if not is_unitary(Q):
        raise ValueError("Q is not unitary")
    return HermitianMatrix.of(Q @ P @ Q.adjoint())


def cartan_embed(P: GrassmannianPoint) -> HermitianMatrix:
    return HermitianMatrix.of(P.matrix * 2.0 - FMatrix.identity(P.field, P.m))


def unitary_exp(K: FMatrix) -> FMatrix:
    """exp of a skew-Hermitian matrix, computed in the real representation."""
    return FMatrix.from_realified(K.field, expm(K.realify()))


def random_unitary(m: int, field, rng: np.random.Generator, scale: float = 1.0) -> FMatrix:
    field = _field(field)
    a = rng.normal(size=(m, m, field.d)) * scale
    K = FMatrix(field, a) - FMatrix(field, a).adjoint()
    return unitary_exp(K)


def link_radius(n: int, m: int) -> float:
    return math.sqrt(n * (m - n) / (2.0 * m))


# ---------------------------------------------------------------------------
# Frames at the origin


class FrameKind(enum.Enum):
    TANGENT = "tangent"
    NORMAL = "normal"


@dataclass(frozen=True)
class FrameVector:
    kind: FrameKind
    index: tuple
    matrix: FMatrix = dc_field(compare=False)

    @property
    def label(self) -> str:
        tag, *rest = self.index
        if tag == "F":
            u, al, a = rest
            return f"F^{u}_({al},{a})"
        if tag in ("H_cd", "H_lm"):
            w, c, d = rest
            return f"{tag}^{w}({c},{d})"
        if rest:
            return f"{tag}({rest[0]})"
        return tag


def _check_nm(n, m):
    if not (isinstance(n, (int, np.integer)) and isinstance(m, (int, np.integer))):
        raise InvalidFamily("n and m must be integers")
    if not 1 <= n < m:
        raise InvalidFamily(f"need 1 <= n < m, got n={n}, m={m}")


def _sym_unit(field, m, i, j, u):
    """u E_ij + conj(u) E_ji."""
    A = FMatrix.unit(field, m, i, j, u)
    return HermitianMatrix.of(A + A.adjoint())


def tangent_basis(n: int, m: int, field) -> list[FrameVector]:
    """F^u_(alpha a) = u E_(alpha a) + conj(u) E_(a alpha)."""
    _check_nm(n, m)
    field = _field(field)
    out = []
    for a in range(1, n + 1):
        for al in range(n + 1, m + 1):
            for u in range(field.d):
                out.append(FrameVector(FrameKind.TANGENT, ("F", u, al, a), _sym_unit(field, m, al, a, u)))
    return out


def _diag(field, m, entries: dict) -> HermitianMatrix:
    a = np.zeros((m, m, field.d))
    for i, v in entries.items():
        a[i - 1, i - 1, 0] = v
    return HermitianMatrix(field, a)


def normal_basis(n: int, m: int, field) -> list[FrameVector]:
    """Cone normal frame at P0: xi0, H_l, H_gamma, H^w_cd, H^z_(lambda mu).

    Not orthonormal: members of the H_l family (and of the H_gamma family)
    pair to 1/2.  For n = 1 the H_gamma family is the one usually written
    H_l = E_22 - E_ll for projective spaces, and is labelled that way.
    """
    _check_nm(n, m)
    field = _field(field)
    out = [FrameVector(FrameKind.NORMAL, ("xi0",), HermitianMatrix.of(FMatrix.identity(field, m) * math.sqrt(2.0 / m)))]
    for l in range(2, n + 1):
        out.append(FrameVector(FrameKind.NORMAL, ("H_l", l), _diag(field, m, {1: 1.0, l: -1.0})))
    gamma_tag = "H_l" if n == 1 else "H_gamma"
    for g in range(n + 2, m + 1):
        out.append(FrameVector(FrameKind.NORMAL, (gamma_tag, g), _diag(field, m, {n + 1: 1.0, g: -1.0})))
    for c in range(1, n + 1):
        for d_ in range(c + 1, n + 1):
            for w in range(field.d):
                out.append(FrameVector(FrameKind.NORMAL, ("H_cd", w, c, d_), _sym_unit(field, m, c, d_, w)))
    for lam in range(n + 1, m + 1):
        for mu in range(lam + 1, m + 1):
            for z in range(field.d):
                out.append(FrameVector(FrameKind.NORMAL, ("H_lm", z, lam, mu), _sym_unit(field, m, lam, mu, z)))
    return out


def gram_matrix(vectors: Sequence) -> np.ndarray:
    mats = [v.matrix if isinstance(v, FrameVector) else v for v in vectors]
    V = np.array([to_vector(A) for A in mats])
    return V @ V.T


def orthonormal_normal_frame(n: int, m: int, field, include_xi0: bool = False) -> np.ndarray:
    """Orthonormal frame (rows, ambient R^N coordinates) of the cone normal space.

    Gram-Schmidt (via QR) over the analytic normal basis.  xi0 is dropped by
    default: it is normal to the trace-zero hyperplane, so every cone second
    form vanishes in that direction.
    """
    basis = normal_basis(n, m, field)
    if not include_xi0:
        basis = basis[1:]
    if not basis:
        return np.zeros((0, ambient_dim(m, field)))
    V = np.array([to_vector(b.matrix) for b in basis]).T
    q, r = np.linalg.qr(V)
    return q.T


def is_tangent_at(X: FMatrix, P: FMatrix, atol=1e-10) -> bool:
    return (X @ P + P @ X).allclose(X, atol) and (P @ X @ P).norm() < atol


def is_normal_at(xi: FMatrix, P: FMatrix, atol=1e-10) -> bool:
    return (xi @ P).allclose(P @ xi, atol)


def gauss_second_form(X, Y, P) -> HermitianMatrix:
    """h(X, Y) = (XY + YX)(I - 2P) for X, Y tangent at P."""
    X = X.matrix if isinstance(X, FrameVector) else X
    Y = Y.matrix if isinstance(Y, FrameVector) else Y
    Pm = P.matrix if isinstance(P, GrassmannianPoint) else P
    if not (is_tangent_at(X, Pm) and is_tangent_at(Y, Pm)):
        raise ValueError("gauss_second_form needs tangent vectors at P")
    S = X @ Y + Y @ X
    R = FMatrix.identity(Pm.field, Pm.shape[0]) - Pm * 2.0
    return HermitianMatrix.of(S @ R)


def second_form_tables(n: int, m: int, field, normals: np.ndarray | None = None) -> np.ndarray:
    """h^xi_ij = g(h(F_i, F_j), xi) over the tangent basis; shape (num_normals, K, K).

    Raw (un-rescaled) values in the sphere of radius sqrt(n(m-n)/(2m)).
    """
    field = _field(field)
    P0 = origin(n, m, field)
    tb = tangent_basis(n, m, field)
    if normals is None:
        normals = orthonormal_normal_frame(n, m, field)
    K = len(tb)
    H = np.zeros((K, K, ambient_dim(m, field)))
    for i in range(K):
        for j in range(i, K):
            H[i, j] = H[j, i] = to_vector(gauss_second_form(tb[i], tb[j], P0))
    return np.einsum("ijN,aN->aij", H, normals)


def mean_curvature(n: int, m: int, field) -> HermitianMatrix:
    """Average of h(F_i, F_i) over the orthonormal tangent basis at P0."""
    tb = tangent_basis(n, m, field)
    P0 = origin(n, m, field)
    total = FMatrix.zeros(field, m)
    for X in tb:
        total = total + gauss_second_form(X, X, P0)
    return HermitianMatrix.of(total / len(tb))


def sup_h_squared(n: int, m: int, field) -> float:
    """Cone curvature bound alpha^2 at unit-sphere scale.

    Uses n' = min(n, m - n) (the complementary embedding is the negative, so
    the bound is symmetric); n' = 1 is the projective case.
    """
    _check_nm(n, m)
    d = _field(field).d
    p = min(n, m - n)
    if m == 2:
        return 0.0  # FP^1 fills its whole sphere
    if p == 1:
        return d * (m - 1) / m
    return d * p * (m - p) ** 2 / m


def normal_radius(n: int, m: int) -> float:
    """arccos(1 - m / (n(m - n))); does not depend on the field."""
    _check_nm(n, m)
    arg = 1.0 - m / (n * (m - n))
    if not -1.0 - 1e-15 <= arg < 1.0:
        raise InvalidFamily(f"normal radius argument {arg} outside [-1, 1)")
    return math.acos(max(arg, -1.0))


def cone_family(n: int, m: int, field) -> ConeCase:
    _check_nm(n, m)
    field = _field(field)
    d = field.d
    p = min(n, m - n)
    k = d * n * (m - n) + 1
    flag = CaseFlag.NONE
    note = ""
    if m == 2:
        flag = CaseFlag.TOTALLY_GEODESIC
        note = "equator of the sphere; the cone is a plane"
    elif p == 1 and field is AlgebraField.REAL and m == 3:
        flag = CaseFlag.EXCLUDED
        note = "Veronese RP^2: open problem, not decided by the criterion"
    if p == 1:
        label = f"{field.symbol}P^{m - 1}"
        kind = "projective"
    else:
        label = f"G({n},{m};{field.symbol})"
        kind = "grassmann"
    return ConeCase(
        k=k,
        alpha_sq=sup_h_squared(n, m, field),
        normal_radius=normal_radius(n, m),
        family=label,
        flag=flag,
        metadata={"kind": kind, "n": n, "m": m, "field": field.symbol,
                  "ambient_dim": ambient_dim(m, field), "note": note},
    )
