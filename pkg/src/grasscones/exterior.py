"""Exterior powers of R^m and the Pluecker embedding of oriented Grassmannians.

Multi-vectors are stored sparsely as {sorted index tuple: coefficient}, with
0-based indices and the lexicographic order of itertools.combinations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from numbers import Real
from typing import Iterable

import numpy as np

from .lawlor import CaseFlag, ConeCase

GRAM_TOL = 1e-10


def _perm_sign(seq) -> int:
    """Sign of the permutation sorting seq (0 if it has a repeat)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    inv = sum(1 for a, b in itertools.combinations(range(len(seq)), 2) if seq[a] > seq[b])
    return -1 if inv % 2 else 1


@lru_cache(maxsize=None)
def basis_indices(n: int, m: int) -> tuple:
    return tuple(itertools.combinations(range(m), n))


@lru_cache(maxsize=None)
def _position(n: int, m: int) -> dict:
    return {lam: i for i, lam in enumerate(basis_indices(n, m))}


class MultiVector:
    __slots__ = ("n", "m", "coeffs")

    def __init__(self, n: int, m: int, coeffs: dict | None = None, tol: float = 0.0):
        if not 0 <= n <= m:
            raise ValueError(f"degree {n} out of range for R^{m}")
        self.n, self.m = n, m
        clean = {}
        for lam, c in (coeffs or {}).items():
            lam = tuple(int(i) for i in lam)
            if len(lam) != n or any(b <= a for a, b in zip(lam, lam[1:])) or (lam and not 0 <= lam[0] <= lam[-1] < m):
                raise ValueError(f"index {lam} is not strictly increasing in range({m}) with length {n}")
            c = float(c)
            if abs(c) > tol:
                clean[lam] = c
        self.coeffs = clean

    @classmethod
    def basis(cls, m: int, *indices: int) -> "MultiVector":
        """e_{i1} ^ ... ^ e_{iq} (0-based, any order; sign of the sort applied)."""
        s = _perm_sign(indices)
        if s == 0:
            return cls(len(indices), m)
        return cls(len(indices), m, {tuple(sorted(indices)): s})

    @classmethod
    def vector(cls, v) -> "MultiVector":
        v = np.asarray(v, dtype=float)
        return cls(1, len(v), {(i,): x for i, x in enumerate(v) if x != 0.0})

    @classmethod
    def from_array(cls, n: int, m: int, arr) -> "MultiVector":
        arr = np.asarray(arr, dtype=float)
        idx = basis_indices(n, m)
        if arr.shape != (len(idx),):
            raise ValueError(f"expected {len(idx)} coefficients, got {arr.shape}")
        return cls(n, m, {lam: c for lam, c in zip(idx, arr) if c != 0.0})

    def to_array(self) -> np.ndarray:
        pos = _position(self.n, self.m)
        out = np.zeros(len(pos))
        for lam, c in self.coeffs.items():
            out[pos[lam]] = c
        return out

    def _same(self, other):
        if not isinstance(other, MultiVector):
            raise TypeError(f"expected MultiVector, got {type(other).__name__}")
        if (self.n, self.m) != (other.n, other.m):
            raise ValueError(f"degree/dimension mismatch ({self.n},{self.m}) vs ({other.n},{other.m})")

    def __add__(self, other):
        self._same(other)
        out = dict(self.coeffs)
        for lam, c in other.coeffs.items():
            out[lam] = out.get(lam, 0.0) + c
        return MultiVector(self.n, self.m, out)

    def __neg__(self):
        return MultiVector(self.n, self.m, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if isinstance(s, Real):
            return MultiVector(self.n, self.m, {k: v * float(s) for k, v in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / s)

    def __xor__(self, other):
        return wedge(self, other)

    def inner(self, other) -> float:
        """Induced inner product; the increasing basis is orthonormal."""
        self._same(other)
        return float(sum(c * other.coeffs.get(lam, 0.0) for lam, c in self.coeffs.items()))

    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.coeffs.values()))

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.coeffs.values())

    def allclose(self, other, atol=1e-12) -> bool:
        self._same(other)
        return (self - other).is_zero(atol)

    def __eq__(self, other):
        if not isinstance(other, MultiVector):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and self.coeffs == other.coeffs

    def __repr__(self):
        terms = " + ".join(f"{c:g}*e{''.join(str(i + 1) for i in lam)}" for lam, c in sorted(self.coeffs.items()))
        return f"MultiVector(n={self.n}, m={self.m}: {terms or '0'})"


def wedge(u: MultiVector, v: MultiVector) -> MultiVector:
    if u.m != v.m:
        raise ValueError(f"ambient mismatch {u.m} vs {v.m}")
    if u.n + v.n > u.m:
        raise ValueError(f"degree {u.n} + {v.n} exceeds dimension {u.m}")
    out: dict = {}
    for a, x in u.coeffs.items():
        for b, y in v.coeffs.items():
            s = _perm_sign(a + b)
            if s:
                key = tuple(sorted(a + b))
                out[key] = out.get(key, 0.0) + s * x * y
    return MultiVector(u.n + v.n, u.m, out)


def wedge_all(vectors: Iterable) -> MultiVector:
    vectors = [MultiVector.vector(v) if not isinstance(v, MultiVector) else v for v in vectors]
    out = vectors[0]
    for v in vectors[1:]:
        out = wedge(out, v)
    return out


@dataclass(frozen=True)
class OrientedPlane:
    columns: np.ndarray  # (m, n), orthonormal

    def __post_init__(self):
        U = np.array(self.columns, dtype=float)
        if U.ndim != 2 or U.shape[1] > U.shape[0] or U.shape[1] == 0:
            raise ValueError(f"columns must be an m x n array with 1 <= n <= m, got {U.shape}")
        if not np.allclose(U.T @ U, np.eye(U.shape[1]), rtol=0, atol=GRAM_TOL):
            raise ValueError("basis is not orthonormal")
        U.setflags(write=False)
        object.__setattr__(self, "columns", U)

    @property
    def n(self) -> int:
        return self.columns.shape[1]

    @property
    def m(self) -> int:
        return self.columns.shape[0]


def pluecker_embed(L: OrientedPlane) -> MultiVector:
    """u_1 ^ ... ^ u_n."""
    return wedge_all(L.columns.T)


def origin(n: int, m: int) -> MultiVector:
    return MultiVector.basis(m, *range(n))


@lru_cache(maxsize=None)
def left_wedge_tensor(n: int, m: int) -> np.ndarray:
    """T[a, j, l] with e_j ^ e_lambda_l = sum_a T[a, j, l] e_mu_a (mu of degree n + 1)."""
    pos = _position(n + 1, m)
    T = np.zeros((len(pos), m, len(basis_indices(n, m))))
    for l, lam in enumerate(basis_indices(n, m)):
        for j in range(m):
            s = _perm_sign((j,) + lam)
            if s:
                T[pos[tuple(sorted((j,) + lam))], j, l] = s
    T.setflags(write=False)
    return T


def left_wedge_matrix(w: MultiVector) -> np.ndarray:
    """Matrix of v -> v ^ w from R^m to the degree n + 1 part."""
    if w.n >= w.m:
        return np.zeros((0, w.m))
    return left_wedge_tensor(w.n, w.m) @ w.to_array()


@dataclass(frozen=True)
class Decomposition:
    decomposable: bool
    witness: OrientedPlane | None
    kernel_dim: int
    singular_values: tuple = ()

    def __bool__(self):
        return self.decomposable


def is_decomposable(w: MultiVector, rank_tol: float | None = None) -> Decomposition:
    """w is simple iff the kernel of v -> v ^ w has dimension n.

    The witness is an orthonormal kernel basis, oriented so its wedge is w / |w|.
    """
    if w.norm() == 0.0:
        raise ValueError("zero multi-vector")
    n, m = w.n, w.m
    if n == 0 or n == m:
        wit = OrientedPlane(np.eye(m)[:, :n]) if n else None
        return Decomposition(True, wit, n)
    A = left_wedge_matrix(w)
    _, sv, vt = np.linalg.svd(A)
    full = np.zeros(m)
    full[: len(sv)] = sv
    tol = rank_tol if rank_tol is not None else max(A.shape) * np.finfo(float).eps * (sv.max() if sv.size else 0.0)
    kernel_dim = int(np.sum(full <= tol))
    if kernel_dim != n:
        return Decomposition(False, None, kernel_dim, tuple(full))
    U = vt[-n:].T.copy()
    b = pluecker_embed(OrientedPlane(U))
    if b.inner(w) < 0:
        U[:, 0] *= -1
    return Decomposition(True, OrientedPlane(U), kernel_dim, tuple(full))


def replaced(n: int, m: int, rows, cols) -> MultiVector:
    """E_(i1..iq alpha1..alphaq): e_1 ^ ... ^ e_n with e_(i_s) replaced in place by e_(alpha_s).

    rows are from range(n), cols from range(n, m); 0-based.
    """
    rows, cols = tuple(rows), tuple(cols)
    if len(rows) != len(cols) or len(set(rows)) != len(rows):
        raise ValueError("rows must be distinct and match cols in length")
    slots = list(range(n))
    for i, a in zip(rows, cols):
        if not (0 <= i < n <= a < m):
            raise ValueError(f"need row < {n} <= col < {m}, got ({i}, {a})")
        slots[i] = a
    return MultiVector.basis(m, *slots)


def tangent_frame(n: int, m: int) -> list[tuple[tuple[int, int], MultiVector]]:
    """Orthonormal tangent frame E_(i alpha) at the origin."""
    return [((i, a), replaced(n, m, (i,), (a,))) for i in range(n) for a in range(n, m)]


def normal_frame_q2(n: int, m: int) -> list[tuple[tuple, MultiVector]]:
    """E_(jk beta gamma), j < k, beta < gamma: the normals carrying nonzero second form."""
    out = []
    for j, k in itertools.combinations(range(n), 2):
        for b, g in itertools.combinations(range(n, m), 2):
            out.append(((j, k, b, g), replaced(n, m, (j, k), (b, g))))
    return out


def _kron2(j, k, i, l) -> int:
    """Generalized Kronecker delta delta^(jk)_(il)."""
    return (j == i) * (k == l) - (j == l) * (k == i)


def pluecker_second_form(n: int, m: int) -> dict:
    """{(j,k,beta,gamma): K x K table over tangent pairs ((i,alpha),(l,tau))}.

    Empty when min(n, m - n) < 2 (sphere-like cases).
    """
    if not 1 <= n < m:
        raise ValueError(f"need 1 <= n < m, got ({n}, {m})")
    if min(n, m - n) < 2:
        return {}
    tan = [idx for idx, _ in tangent_frame(n, m)]
    out = {}
    for key, _ in normal_frame_q2(n, m):
        j, k, b, g = key
        H = np.array([[_kron2(j, k, i, l) * _kron2(b, g, a, t) for (l, t) in tan] for (i, a) in tan], dtype=float)
        out[key] = H
    return out


def pluecker_h(n: int, m: int) -> float:
    """sup over unit normals of |h^xi|^2."""
    tables = pluecker_second_form(n, m)
    if not tables:
        return 0.0
    Q = np.array([[np.sum(A * B) for B in tables.values()] for A in tables.values()])
    return float(np.linalg.eigvalsh(Q).max())


def oriented_cone_family(n: int, m: int) -> ConeCase:
    if not 2 <= n <= m - 2:
        raise ValueError(f"oriented family needs 2 <= n <= m - 2, got ({n}, {m})")
    flag = CaseFlag.KNOWN_UNSTABLE if (n, m) in ((2, 4),) else CaseFlag.NONE
    note = "unstable per Lawlor Cor. 4.4.6" if flag is CaseFlag.KNOWN_UNSTABLE else ""
    return ConeCase(
        k=n * (m - n) + 1,
        alpha_sq=4.0,
        normal_radius=math.pi / 2,
        family=f"G~({n},{m};R)",
        flag=flag,
        metadata={"kind": "oriented", "n": n, "m": m, "ambient_dim": math.comb(m, n), "note": note},
    )
