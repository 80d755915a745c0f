"""Real normed division algebras R, C, H, O.

All products are generated by recursive Cayley-Dickson doubling

    (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c)),   conj((a, b)) = (conj(a), -b)

so the octonion multiplication table is derived rather than typed in.  The
basis order is (1, i, j, k, e, ie, je, ke), truncated to the real dimension.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from numbers import Real

import numpy as np

__all__ = [
    "AlgebraField",
    "AlgebraElement",
    "FieldMismatch",
    "BASIS_LABELS",
    "mul",
    "conj",
    "inner",
    "cd_multiply",
    "cd_conjugate",
    "structure_constants",
    "left_matrix",
]

BASIS_LABELS = ("1", "i", "j", "k", "e", "ie", "je", "ke")


class FieldMismatch(ValueError):
    pass


class AlgebraField(enum.Enum):
    REAL = 1
    COMPLEX = 2
    QUATERNION = 4
    OCTONION = 8

    @property
    def d(self) -> int:
        return self.value

    @property
    def associative(self) -> bool:
        return self.value <= 4

    @property
    def symbol(self) -> str:
        return {1: "R", 2: "C", 4: "H", 8: "O"}[self.value]

    @classmethod
    def from_tag(cls, tag: str | "AlgebraField") -> "AlgebraField":
        if isinstance(tag, AlgebraField):
            return tag
        key = str(tag).strip().upper()
        aliases = {
            "R": cls.REAL, "REAL": cls.REAL,
            "C": cls.COMPLEX, "COMPLEX": cls.COMPLEX,
            "H": cls.QUATERNION, "QUATERNION": cls.QUATERNION,
            "O": cls.OCTONION, "OCTONION": cls.OCTONION,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown field tag {tag!r}") from None

    def __str__(self) -> str:
        return self.symbol


def cd_conjugate(x: np.ndarray) -> np.ndarray:
    """Conjugate along the last axis; negates every imaginary coordinate."""
    x = np.asarray(x, dtype=float)
    out = -x
    out[..., 0] = x[..., 0]
    return out


def cd_multiply(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Cayley-Dickson product of coordinate arrays (last axis of length 1, 2, 4 or 8).

    Broadcasts over leading axes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x.shape[-1]
    if y.shape[-1] != d:
        raise FieldMismatch(f"dimension mismatch {d} vs {y.shape[-1]}")
    if d == 1:
        return x * y
    if d not in (2, 4, 8):
        raise ValueError(f"unsupported algebra dimension {d}")
    h = d // 2
    a, b = x[..., :h], x[..., h:]
    c, e = y[..., :h], y[..., h:]
    first = cd_multiply(a, c) - cd_multiply(cd_conjugate(e), b)
    second = cd_multiply(e, a) + cd_multiply(b, cd_conjugate(c))
    return np.concatenate([first, second], axis=-1)


@lru_cache(maxsize=None)
def _structure_constants(d: int) -> np.ndarray:
    eye = np.eye(d)
    table = cd_multiply(eye[:, None, :], eye[None, :, :])
    table.setflags(write=False)
    return table


def structure_constants(field: AlgebraField) -> np.ndarray:
    """Array T with T[p, q, :] = coordinates of u_p * u_q (read-only)."""
    return _structure_constants(field.d)


def left_matrix(x: np.ndarray) -> np.ndarray:
    """Real matrix L with L @ y == x * y for coordinate vectors."""
    x = np.asarray(x, dtype=float)
    t = _structure_constants(x.shape[-1])
    # (x*y)_r = sum_pq x_p y_q T[p,q,r]
    return np.einsum("...p,pqr->...rq", x, t)


@dataclass(frozen=True)
class AlgebraElement:
    field: AlgebraField
    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if len(coords) != self.field.d:
            raise ValueError(
                f"{self.field.name} element needs {self.field.d} coordinates, got {len(coords)}"
            )
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, field: AlgebraField | str, *coords: float) -> "AlgebraElement":
        field = AlgebraField.from_tag(field)
        full = list(coords) + [0.0] * (field.d - len(coords))
        return cls(field, tuple(full))

    @classmethod
    def unit(cls, field: AlgebraField | str, index: int) -> "AlgebraElement":
        field = AlgebraField.from_tag(field)
        c = [0.0] * field.d
        c[index] = 1.0
        return cls(field, tuple(c))

    @classmethod
    def from_array(cls, field: AlgebraField, array) -> "AlgebraElement":
        return cls(field, tuple(np.asarray(array, dtype=float).ravel()))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    @property
    def real(self) -> float:
        return self.coords[0]

    @property
    def imag(self) -> np.ndarray:
        return np.array(self.coords[1:])

    def norm(self) -> float:
        return float(np.sqrt(inner(self, self)))

    def conj(self) -> "AlgebraElement":
        return conj(self)

    def _check(self, other: "AlgebraElement"):
        if other.field is not self.field:
            raise FieldMismatch(f"{self.field.name} vs {other.field.name}")

    def __add__(self, other):
        if isinstance(other, Real):
            other = AlgebraElement.of(self.field, other)
        self._check(other)
        return AlgebraElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Real):
            return AlgebraElement(self.field, tuple(a * other for a in self.coords))
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, Real):
            return self * other
        return NotImplemented

    def inverse(self) -> "AlgebraElement":
        n2 = self.norm() ** 2
        if n2 == 0.0:
            raise ZeroDivisionError("zero has no inverse")
        return self.conj() * (1.0 / n2)

    def __truediv__(self, other):
        if isinstance(other, Real):
            return self * (1.0 / other)
        if isinstance(other, AlgebraElement):
            return self * other.inverse()
        return NotImplemented

    def isclose(self, other: "AlgebraElement", atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.coords, other.coords, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        terms = []
        for c, label in zip(self.coords, BASIS_LABELS):
            if c != 0.0:
                terms.append(f"{c:g}" if label == "1" else f"{c:g}{label}")
        return f"{self.field.symbol}({' + '.join(terms) or '0'})"


def mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    if a.field is not b.field:
        raise FieldMismatch(f"cannot multiply {a.field.name} by {b.field.name}")
    return AlgebraElement.from_array(a.field, cd_multiply(a.array, b.array))


def conj(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement.from_array(a.field, cd_conjugate(a.array))


def inner(a: AlgebraElement, b: AlgebraElement) -> float:
    """Re(a * conj(b))."""
    if a.field is not b.field:
        raise FieldMismatch(f"cannot pair {a.field.name} with {b.field.name}")
    return float(cd_multiply(a.array, cd_conjugate(b.array))[0])
