"""The exceptional Jordan algebra H(3, O) and the Cayley plane OP^2.

Element layout {r, x}:

    [[ r1,      conj(x3), conj(x2)],
     [ x3,      r2,       x1      ],
     [ x2,      conj(x1), r3      ]]

Octonion matrix products are only used inside the symmetrized product
A o B = (AB + BA) / 2, which is well defined for Hermitian A, B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import cd_conjugate, cd_multiply
from .lawlor import ConeCase

IDEMPOTENT_TOL = 1e-10
DIM = 27  # 3 diagonal reals + 3 octonions


@dataclass(frozen=True)
class JordanElement:
    r: np.ndarray  # (3,)
    x: np.ndarray  # (3, 8)

    def __post_init__(self):
        r = np.array(self.r, dtype=float).reshape(3)
        x = np.array(self.x, dtype=float).reshape(3, 8)
        r.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "x", x)

    @classmethod
    def zero(cls):
        return cls(np.zeros(3), np.zeros((3, 8)))

    @classmethod
    def identity(cls):
        return cls(np.ones(3), np.zeros((3, 8)))

    @classmethod
    def diag(cls, r1, r2, r3):
        return cls(np.array([r1, r2, r3]), np.zeros((3, 8)))

    @classmethod
    def E(cls, i: int):
        """Diagonal unit E_ii, 1-based."""
        r = np.zeros(3)
        r[i - 1] = 1.0
        return cls(r, np.zeros((3, 8)))

    @classmethod
    def off(cls, slot: int, octonion) -> "JordanElement":
        """Element with only x_slot (1-based) set."""
        x = np.zeros((3, 8))
        x[slot - 1] = octonion
        return cls(np.zeros(3), x)

    def to_matrix(self) -> np.ndarray:
        """3 x 3 x 8 octonion array in the layout above."""
        M = np.zeros((3, 3, 8))
        M[[0, 1, 2], [0, 1, 2], 0] = self.r
        x1, x2, x3 = self.x
        M[1, 0], M[0, 1] = x3, cd_conjugate(x3)
        M[2, 0], M[0, 2] = x2, cd_conjugate(x2)
        M[1, 2], M[2, 1] = x1, cd_conjugate(x1)
        return M

    @classmethod
    def from_matrix(cls, M: np.ndarray, atol: float = 1e-10) -> "JordanElement":
        M = np.asarray(M, dtype=float)
        if not np.allclose(M, cd_conjugate(M.transpose(1, 0, 2)), rtol=0, atol=atol):
            raise ValueError("octonion matrix is not Hermitian")
        return cls(M[[0, 1, 2], [0, 1, 2], 0], np.array([M[1, 2], M[2, 0], M[1, 0]]))

    def to_vector(self) -> np.ndarray:
        """Isometric coordinates in R^27 for the trace inner product."""
        return np.concatenate([self.r / math.sqrt(2.0), self.x.ravel()])

    @classmethod
    def from_vector(cls, v) -> "JordanElement":
        v = np.asarray(v, dtype=float)
        return cls(v[:3] * math.sqrt(2.0), v[3:].reshape(3, 8))

    def trace(self) -> float:
        return float(self.r.sum())

    def __add__(self, other):
        return JordanElement(self.r + other.r, self.x + other.x)

    def __sub__(self, other):
        return JordanElement(self.r - other.r, self.x - other.x)

    def __neg__(self):
        return JordanElement(-self.r, -self.x)

    def __mul__(self, s):
        s = float(s)
        return JordanElement(self.r * s, self.x * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / s)

    def norm(self) -> float:
        return math.sqrt(jordan_inner(self, self))

    def allclose(self, other, atol=1e-12) -> bool:
        return bool(np.allclose(self.r, other.r, rtol=0, atol=atol) and np.allclose(self.x, other.x, rtol=0, atol=atol))


def _omatmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # raw octonion matrix product; only combined symmetrically below
    return cd_multiply(A[:, :, None, :], B[None, :, :, :]).sum(axis=1)


def jordan_mul(A: JordanElement, B: JordanElement) -> JordanElement:
    """A o B = (AB + BA) / 2."""
    a, b = A.to_matrix(), B.to_matrix()
    return JordanElement.from_matrix(0.5 * (_omatmul(a, b) + _omatmul(b, a)))


def jordan_mul_batch(Av: np.ndarray) -> np.ndarray:
    """A o A for a stack of vector-coordinate elements (..., 27); returns vectors."""
    Av = np.asarray(Av, dtype=float)
    lead = Av.shape[:-1]
    r = Av[..., :3] * math.sqrt(2.0)
    x = Av[..., 3:].reshape(lead + (3, 8))
    M = np.zeros(lead + (3, 3, 8))
    M[..., [0, 1, 2], [0, 1, 2], 0] = r
    x1, x2, x3 = x[..., 0, :], x[..., 1, :], x[..., 2, :]
    M[..., 1, 0, :], M[..., 0, 1, :] = x3, cd_conjugate(x3)
    M[..., 2, 0, :], M[..., 0, 2, :] = x2, cd_conjugate(x2)
    M[..., 1, 2, :], M[..., 2, 1, :] = x1, cd_conjugate(x1)
    S = cd_multiply(M[..., :, :, None, :], M[..., None, :, :, :]).sum(axis=-3)
    rr = S[..., [0, 1, 2], [0, 1, 2], 0]
    xx = np.stack([S[..., 1, 2, :], S[..., 2, 0, :], S[..., 1, 0, :]], axis=-2)
    return np.concatenate([rr / math.sqrt(2.0), xx.reshape(lead + (24,))], axis=-1)


def jordan_inner(A: JordanElement, B: JordanElement) -> float:
    """tr(A o B) / 2."""
    return 0.5 * jordan_mul(A, B).trace()


def jordan_inner_coords(A: JordanElement, B: JordanElement) -> float:
    """<r, s>/2 + sum <x_i, y_i>."""
    return 0.5 * float(A.r @ B.r) + float(np.sum(A.x * B.x))


@dataclass(frozen=True)
class CayleyPoint:
    value: JordanElement

    def __post_init__(self):
        P = self.value
        res = (jordan_mul(P, P) - P).norm()
        if res > IDEMPOTENT_TOL:
            raise ValueError(f"not a Jordan idempotent (residual {res:.3e})")
        if abs(P.trace() - 1.0) > IDEMPOTENT_TOL:
            raise ValueError(f"trace {P.trace()} != 1")


def _unit(i):
    u = np.zeros(8)
    u[i] = 1.0
    return u


def cayley_chart(x, y) -> JordanElement:
    """phi(x, y) = a conj(a)^t / |a|^2 - I/3 with a = (1, x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n2 = 1.0 + x @ x + y @ y
    r = np.array([1.0, x @ x, y @ y]) / n2 - 1.0 / 3.0
    off = np.array([cd_multiply(x, cd_conjugate(y)), y, x]) / n2
    return JordanElement(r, off)


def cayley_chart_vector(p: np.ndarray) -> np.ndarray:
    """Chart on a parameter stack (..., 16) -> vector coordinates (..., 27)."""
    p = np.asarray(p, dtype=float)
    x, y = p[..., :8], p[..., 8:]
    xx = np.sum(x * x, axis=-1)
    yy = np.sum(y * y, axis=-1)
    n2 = 1.0 + xx + yy
    r = np.stack([np.ones_like(xx), xx, yy], axis=-1) / n2[..., None] - 1.0 / 3.0
    x1 = cd_multiply(x, cd_conjugate(y))
    off = np.concatenate([x1, y, x], axis=-1) / n2[..., None]
    return np.concatenate([r / math.sqrt(2.0), off], axis=-1)


def cayley_origin() -> JordanElement:
    return JordanElement.E(1) - JordanElement.identity() / 3.0


def cayley_frames():
    """(tangent: 16 elements, normal: 10 elements) at E1, with labels.

    Tangents e_i (x3 = u_i) and e_ibar (x2 = u_j); normals L, M, N_k (x1 = u_k).
    """
    tangent = [(("e", i + 1), JordanElement.off(3, _unit(i))) for i in range(8)]
    tangent += [(("ebar", j + 1), JordanElement.off(2, _unit(j))) for j in range(8)]
    normal = [(("L",), JordanElement.identity() * math.sqrt(2.0 / 3.0)),
              (("M",), JordanElement.diag(0.0, 1.0, -1.0))]
    normal += [(("N", k + 1), JordanElement.off(1, _unit(k))) for k in range(8)]
    return tangent, normal


def chart_second_derivatives_closed() -> np.ndarray:
    """phi_AB(0, 0) in vector coordinates, shape (16, 16, 27).

    phi_ij = 2 delta_ij (E22 - E11), phi_ibar jbar = 2 delta_ij (E33 - E11),
    phi_i jbar = u_i conj(u_j) E23 + conj(...) E32.  The mixed block is
    nonzero also for i != j.
    """
    out = np.zeros((16, 16, DIM))
    for i in range(8):
        out[i, i] = JordanElement.diag(-2.0, 2.0, 0.0).to_vector()
        out[8 + i, 8 + i] = JordanElement.diag(-2.0, 0.0, 2.0).to_vector()
        for j in range(8):
            v = JordanElement.off(1, cd_multiply(_unit(i), cd_conjugate(_unit(j)))).to_vector()
            out[i, 8 + j] = out[8 + j, i] = v
    return out


def chart_second_derivatives(step: float = 1e-3, richardson: bool = True) -> np.ndarray:
    """Central-difference second derivatives of the chart at the origin, (16, 16, 27)."""
    f = cayley_chart_vector

    def hess(h):
        out = np.zeros((16, 16, DIM))
        eye = np.eye(16) * h
        f0 = f(np.zeros(16))
        for a in range(16):
            for b in range(a, 16):
                if a == b:
                    val = (f(eye[a]) - 2 * f0 + f(-eye[a])) / (h * h)
                else:
                    val = (f(eye[a] + eye[b]) - f(eye[a] - eye[b]) - f(-eye[a] + eye[b]) + f(-eye[a] - eye[b])) / (4 * h * h)
                out[a, b] = out[b, a] = val
        return out

    H1 = hess(step)
    if not richardson:
        return H1
    H2 = hess(step / 2)
    return (4 * H2 - H1) / 3


def cayley_h_coefficients(a: float, b: float, c) -> np.ndarray:
    """16 x 16 matrix H^xi_AB = <phi_AB, xi> for xi = aL + bM + sum c_k N_k (raw scale)."""
    c = np.asarray(c, dtype=float)
    xi = (JordanElement.identity() * (a * math.sqrt(2.0 / 3.0)) + JordanElement.diag(0.0, b, -b)
          + JordanElement.off(1, c)).to_vector()
    return chart_second_derivatives_closed() @ xi


def position_scale() -> float:
    """Squared radius of the sphere containing the image of the chart."""
    return 1.0 / 3.0


def cayley_sup_h() -> float:
    """Unit-sphere curvature bound: 16 (raw maximum, attained at a = 0) times 1/3."""
    return 16.0 * position_scale()


def cayley_normal_radius() -> float:
    return 2.0 * math.pi / 3.0


def geodesic_point(theta: float, s: float, z) -> JordanElement:
    """cos(theta)(E1 - I/3) + sin(theta) xi + I/3 for xi = diag(0, s, -s) + z-slot, s^2 + |z|^2 = 1/3."""
    z = np.asarray(z, dtype=float)
    xi = JordanElement.diag(0.0, s, -s) + JordanElement.off(1, z)
    return cayley_origin() * math.cos(theta) + xi * math.sin(theta) + JordanElement.identity() / 3.0


def idempotent_residual(A: JordanElement) -> float:
    return (jordan_mul(A, A) - A).norm()


def cayley_cone_case() -> ConeCase:
    return ConeCase(k=17, alpha_sq=cayley_sup_h(), normal_radius=cayley_normal_radius(), family="OP^2",
                    metadata={"kind": "cayley", "ambient_dim": DIM})
