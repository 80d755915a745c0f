"""Independent numerical checks of the closed forms.

Second fundamental forms come from finite differences of explicit parametrized
patches (orbit maps and charts).  Tangent frames come from the SVD of the
numerical Jacobian; normal frames are the orthogonal complement of the
tangent space, the position vector and any fixed excluded directions.
No analytic frame is trusted here except as a seed for searches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh, expm, null_space
from scipy.optimize import least_squares
from scipy.stats import norm as normal_dist, qmc

from . import exterior, jordan, projector
from .algebra import AlgebraField, structure_constants

MEMBERSHIP_TOL = 1e-8
DEFAULT_BUDGET = 64


class ConvergenceError(RuntimeError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class EmbeddedPatch:
    """Smooth map from R^p (near center) to R^N."""

    evaluate: Callable[[np.ndarray], np.ndarray]
    center: np.ndarray
    description: str
    exclude: np.ndarray | None = None  # fixed ambient directions removed from the normal space
    on_sphere: bool = True  # the position vector is normal to the image

    @property
    def p(self) -> int:
        return len(self.center)


def _first_derivatives(f, c, h):
    p = len(c)
    eye = np.eye(p)
    return np.array([(f(c + h * eye[a]) - f(c - h * eye[a])) / (2 * h) for a in range(p)]).T


def _second_derivatives(f, c, h):
    p = len(c)
    eye = np.eye(p) * h
    f0 = f(c)
    out = np.zeros((p, p, len(f0)))
    for a in range(p):
        out[a, a] = (f(c + eye[a]) - 2 * f0 + f(c - eye[a])) / (h * h)
        for b in range(a + 1, p):
            out[a, b] = out[b, a] = (
                f(c + eye[a] + eye[b]) - f(c + eye[a] - eye[b]) - f(c - eye[a] + eye[b]) + f(c - eye[a] - eye[b])
            ) / (4 * h * h)
    return out


@dataclass
class SecondForm:
    tables: np.ndarray  # (q, p, p) in an orthonormal tangent frame
    normals: np.ndarray  # (q, N) orthonormal rows
    tangent: np.ndarray  # (N, p) orthonormal columns
    frame_map: np.ndarray  # M with tangent = J @ M
    jacobian: np.ndarray  # (N, p)
    hessian: np.ndarray  # (p, p, N) parameter-basis second derivatives
    position: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def projected_hessian(self) -> np.ndarray:
        """Normal part of the parameter-basis Hessian, (p, p, N)."""
        return np.einsum("abN,qN,qM->abM", self.hessian, self.normals, self.normals)


def normal_complement(J: np.ndarray, position: np.ndarray | None, exclude: np.ndarray | None) -> np.ndarray:
    cols = [J]
    if position is not None:
        cols.append(position[:, None])
    if exclude is not None and len(exclude):
        cols.append(np.atleast_2d(exclude).T)
    A = np.hstack(cols)
    return null_space(A.T, rcond=1e-9).T


def fd_second_form(patch: EmbeddedPatch, step: float = 1e-3, richardson: bool = True,
                   check_order: bool = True) -> SecondForm:
    """Second fundamental form of the patch image at its center, by central differences.

    Richardson extrapolation combines steps h and h/2.  The order test
    compares successive refinements and raises ConvergenceError when the
    differences fail to shrink.
    """
    if not 1e-7 <= step <= 1e-3:
        raise ValueError(f"step {step} outside [1e-7, 1e-3]")
    f, c = patch.evaluate, np.asarray(patch.center, dtype=float)
    x0 = f(c)
    H1 = _second_derivatives(f, c, step)
    H2 = _second_derivatives(f, c, step / 2)
    J1 = _first_derivatives(f, c, step)
    J2 = _first_derivatives(f, c, step / 2)
    if richardson:
        H = (4 * H2 - H1) / 3
        J = (4 * J2 - J1) / 3
    else:
        H, J = H2, J2
    diag = {"step": step, "delta_h": float(np.abs(H2 - H1).max())}
    if check_order:
        H3 = _second_derivatives(f, c, step / 4)
        e_coarse = np.abs(H2 - H1).max()
        e_fine = np.abs(H3 - H2).max()
        floor = 1e-7 * (1.0 + np.abs(H).max())
        diag.update(e_coarse=float(e_coarse), e_fine=float(e_fine))
        if e_fine > floor and e_fine > e_coarse / 3:
            raise ConvergenceError(
                f"second differences not converging: |dH| {e_coarse:.3e} -> {e_fine:.3e} at step {step}"
            )
        if richardson:
            H = (4 * H3 - H2) / 3
    U, S, Vt = np.linalg.svd(J, full_matrices=False)
    if S.min() < 1e-8 * S.max():
        raise ConvergenceError("Jacobian is rank deficient at the center")
    M = Vt.T / S
    tangent = J @ M
    nu = normal_complement(tangent, x0 if patch.on_sphere else None, patch.exclude)
    tables = np.einsum("ai,bj,abN,qN->qij", M, M, H, nu)
    tables = 0.5 * (tables + tables.transpose(0, 2, 1))
    return SecondForm(tables, nu, tangent, M, J, H, x0, diag)


@dataclass(frozen=True)
class MaxResult:
    value: float
    maximizer: np.ndarray

    def __float__(self):
        return self.value


def max_h_squared(h_tables: np.ndarray, normal_gram: np.ndarray | None = None) -> MaxResult:
    """max over unit xi of sum_ij (h^xi_ij)^2, with xi = sum c_a nu_a and c^T G c = 1."""
    h = np.asarray(h_tables, dtype=float)
    q = h.shape[0]
    if q == 0:
        return MaxResult(0.0, np.zeros(0))
    Q = np.einsum("aij,bij->ab", h, h)
    G = np.eye(q) if normal_gram is None else np.asarray(normal_gram, dtype=float)
    if G.shape != (q, q):
        raise ValueError(f"gram shape {G.shape} does not match {q} normals")
    w, V = eigh(Q, G)
    scale = max(1.0, abs(w).max())
    if w.min() < -1e-9 * scale:
        raise ValueError(f"assembled form is not PSD (min eigenvalue {w.min():.3e})")
    return MaxResult(float(w[-1]), V[:, -1])


# ---------------------------------------------------------------------------
# families


class ProjectorFamily:
    """G(n, m; F) through the orbit map x -> Q(x) P0 Q(x)*, Q = exp([[0, -B*], [B, 0]])."""

    def __init__(self, n: int, m: int, field):
        self.n, self.m = n, m
        self.field = AlgebraField.from_tag(field)
        self.N = projector.ambient_dim(m, self.field)
        self.radius = projector.link_radius(n, m)
        d = self.field.d
        self.p = d * n * (m - n)
        self._t = structure_constants(self.field)
        self._eye = np.zeros((m, m, d))
        self._eye[np.arange(m), np.arange(m), 0] = 1.0
        self.label = f"G({n},{m};{self.field.symbol})"

    def _generator(self, x):
        n, m, d = self.n, self.m, self.field.d
        B = np.asarray(x, dtype=float).reshape(n, m - n, d)  # [a, alpha, u]
        K = np.zeros((m, m, d))
        K[n:, :n] = B.transpose(1, 0, 2)
        conjB = B.copy()
        conjB[..., 1:] *= -1
        K[:n, n:] = -conjB
        return projector.FMatrix(self.field, K)

    def point_matrix(self, x) -> np.ndarray:
        Q = projector.unitary_exp(self._generator(x))
        P0 = projector.origin(self.n, self.m, self.field).matrix
        return (Q @ P0 @ Q.adjoint()).data

    def evaluate(self, x, unit=True) -> np.ndarray:
        P = self.point_matrix(x) - self._eye * (self.n / self.m)
        v = projector.to_vector_batch(P)
        return v / self.radius if unit else v

    def identity_direction(self) -> np.ndarray:
        v = projector.to_vector_batch(self._eye)
        return v / np.linalg.norm(v)

    def patch(self, unit=True) -> EmbeddedPatch:
        return EmbeddedPatch(lambda x: self.evaluate(x, unit), np.zeros(self.p), self.label,
                             exclude=self.identity_direction()[None, :])

    def residual(self, Y: np.ndarray) -> np.ndarray:
        """P^2 - P for P = r Y + (n/m) I; Y of shape (..., N); returns (..., m*m*d)."""
        m, d = self.m, self.field.d
        Y = np.asarray(Y, dtype=float)
        lead = Y.shape[:-1]
        s2 = math.sqrt(2.0)
        A = np.zeros(lead + (m, m, d))
        A[..., np.arange(m), np.arange(m), 0] = Y[..., :m] * s2 * self.radius
        iu, ju = np.triu_indices(m, 1)
        off = Y[..., m:].reshape(lead + (len(iu), d)) * self.radius
        A[..., iu, ju, :] = off
        conj = off.copy()
        conj[..., 1:] *= -1
        A[..., ju, iu, :] = conj
        A = A + self._eye * (self.n / self.m)
        A2 = np.einsum("...ikp,...kjq,pqr->...ijr", A, A, self._t)
        return (A2 - A).reshape(lead + (-1,))

    def seed_axes(self) -> np.ndarray:
        basis = projector.normal_basis(self.n, self.m, self.field)[1:]
        return np.array([projector.to_vector(b.matrix) for b in basis])

    def closed_radius(self) -> float:
        return projector.normal_radius(self.n, self.m)


class CayleyFamily:
    """OP^2 through the chart (x, y) -> sqrt(3) phi(x, y) on the unit sphere."""

    N = jordan.DIM
    p = 16
    label = "OP^2"
    radius = 1.0 / math.sqrt(3.0)

    def evaluate(self, x, unit=True):
        v = jordan.cayley_chart_vector(x)
        return v / self.radius if unit else v

    def identity_direction(self):
        return jordan.JordanElement.identity().to_vector() / math.sqrt(1.5)

    def patch(self, unit=True) -> EmbeddedPatch:
        return EmbeddedPatch(lambda x: self.evaluate(x, unit), np.zeros(16), self.label,
                             exclude=self.identity_direction()[None, :])

    def residual(self, Y):
        A = np.asarray(Y, dtype=float) * self.radius + jordan.JordanElement.identity().to_vector() / 3.0
        return jordan.jordan_mul_batch(A) - A

    def seed_axes(self):
        _, normal = jordan.cayley_frames()
        return np.array([v.to_vector() for _, v in normal[1:]])

    def closed_radius(self):
        return jordan.cayley_normal_radius()


class PlueckerFamily:
    """Oriented G~(n, m; R): Pluecker coordinates (n x n minors) of the first n columns of exp(K)."""

    def __init__(self, n: int, m: int):
        self.n, self.m = n, m
        self.N = math.comb(m, n)
        self.p = n * (m - n)
        self.label = f"G~({n},{m};R)"
        self._idx = [list(lam) for lam in exterior.basis_indices(n, m)]
        self._rel = None

    def _frame(self, x):
        n, m = self.n, self.m
        X = np.asarray(x, dtype=float).reshape(n, m - n)
        K = np.zeros((m, m))
        K[n:, :n] = X.T
        K[:n, n:] = -X
        return expm(K)[:, :n]

    def evaluate(self, x, unit=True):
        U = self._frame(x)
        return np.array([np.linalg.det(U[lam, :]) for lam in self._idx])

    def patch(self, unit=True) -> EmbeddedPatch:
        return EmbeddedPatch(self.evaluate, np.zeros(self.p), self.label)

    def _build_relations(self):
        # (iota_I w) ^ w = 0 for every (n-1)-subset I, as bilinear tensors
        n, m = self.n, self.m
        pos = {tuple(l): i for i, l in enumerate(self._idx)}
        Wt = exterior.left_wedge_tensor(n, m)  # (C(m,n+1), m, C(m,n))
        mats = []
        for I in exterior.basis_indices(n - 1, m):
            V = np.zeros((m, self.N))
            for j in range(m):
                if j in I:
                    continue
                lam = tuple(sorted(I + (j,)))
                V[j, pos[lam]] = exterior._perm_sign(I + (j,))
            mats.append(np.einsum("ajl,jk->akl", Wt, V))
        self._rel = np.concatenate(mats, axis=0)  # (R, N, N): res_a = w^T A_a w

    def residual(self, Y):
        if self._rel is None:
            self._build_relations()
        Y = np.asarray(Y, dtype=float)
        return np.einsum("...k,akl,...l->...a", Y, self._rel, Y)

    def seed_axes(self):
        n, m = self.n, self.m
        out = []
        for lam in exterior.basis_indices(n, m):
            if sum(1 for i in lam if i >= n) >= 2:
                out.append(np.eye(self.N)[self._idx.index(list(lam))])
        return np.array(out)

    def closed_radius(self):
        return math.pi / 2


def family_for(kind: str, n: int | None = None, m: int | None = None, field=None):
    kind = kind.lower()
    if kind in ("grassmann", "projective"):
        return ProjectorFamily(n, m, field)
    if kind == "cayley":
        return CayleyFamily()
    if kind == "oriented":
        return PlueckerFamily(n, m)
    raise ValueError(f"unknown family kind {kind!r}")


def check_budget(family, budget: int = DEFAULT_BUDGET):
    if family.N > budget:
        raise BudgetExceeded(f"{family.label}: ambient dimension {family.N} exceeds oracle budget {budget}")


def oracle_second_form(family, step: float = 1e-3, unit=True, budget: int = DEFAULT_BUDGET) -> SecondForm:
    check_budget(family, budget)
    return fd_second_form(family.patch(unit), step)


# ---------------------------------------------------------------------------
# normal radius search


@dataclass(frozen=True)
class RadiusResult:
    radius: float
    hits: tuple  # (theta, residual) pairs of accepted intersections
    directions: int
    closed_form: float | None = None


def _seed_directions(nu: np.ndarray, axes: np.ndarray, n_samples: int) -> np.ndarray:
    q = nu.shape[0]
    seeds = []
    if axes is not None and len(axes):
        c = axes @ nu.T
        keep = np.linalg.norm(c, axis=1) > 1e-8
        c = c[keep] / np.linalg.norm(c[keep], axis=1, keepdims=True)
        seeds += [c, -c]
    if n_samples:
        pts = qmc.Halton(d=q, scramble=False).random(n_samples + 1)[1:]
        g = normal_dist.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
        g = g[np.linalg.norm(g, axis=1) > 1e-8]
        seeds.append(g / np.linalg.norm(g, axis=1, keepdims=True))
    return np.vstack(seeds)


def numeric_normal_radius(family, resolution: float = 1e-3, n_samples: int = 48, theta_lo: float = 0.05,
                          budget: int = DEFAULT_BUDGET, step: float = 1e-3, chunk: int = 400_000,
                          max_starts: int = 3) -> RadiusResult:
    """Smallest theta at which a normal geodesic cos(t) y0 + sin(t) T meets the image again.

    Directions T are sampled on the unit normal sphere (analytic axes plus a
    low-discrepancy set), each geodesic is scanned at the given resolution,
    and the first few local minima per direction are polished in (direction, theta).
    Only points with membership residual below 1e-8 are accepted.
    """
    check_budget(family, budget)
    if not hasattr(family, "residual"):
        raise ValueError("family has no membership test")
    sf = fd_second_form(family.patch(True), step, check_order=False)
    y0 = sf.position / np.linalg.norm(sf.position)
    nu = sf.normals
    q = nu.shape[0]
    if q == 0:
        return RadiusResult(math.pi, (), 0, family.closed_radius())
    C = _seed_directions(nu, family.seed_axes(), n_samples)
    thetas = np.arange(theta_lo, math.pi + 0.5 * resolution, resolution)
    thetas = thetas[thetas <= math.pi]
    T = C @ nu  # (D, N)
    starts = []
    per = max(1, chunk // max(1, len(thetas)))
    for s in range(0, len(C), per):
        Y = np.cos(thetas)[None, :, None] * y0 + np.sin(thetas)[None, :, None] * T[s:s + per, None, :]
        r = np.linalg.norm(family.residual(Y), axis=-1)
        for row, c in zip(r, C[s:s + per]):
            inner = np.flatnonzero((row[1:-1] <= row[:-2]) & (row[1:-1] <= row[2:])) + 1
            cand = list(inner[:max_starts])
            if row[-1] < row[-2]:
                cand.append(len(row) - 1)
            starts += [(c, thetas[i]) for i in cand]

    def fun(z):
        c, th = z[:q], z[q]
        cn = c / np.linalg.norm(c)
        Y = math.cos(th) * y0 + math.sin(th) * (cn @ nu)
        return np.concatenate([family.residual(Y), [c @ c - 1.0]])

    hits = []
    for c, th0 in starts:
        sol = least_squares(fun, np.concatenate([c, [th0]]), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=300)
        res = float(np.linalg.norm(sol.fun[:-1]))
        th = float(sol.x[q]) % (2 * math.pi)
        if th > math.pi:  # same geodesic traversed with -T
            th = 2 * math.pi - th
        if res < MEMBERSHIP_TOL and th >= theta_lo:
            hits.append((th, res))
    hits.sort()
    radius = hits[0][0] if hits else math.pi
    return RadiusResult(radius, tuple(hits), len(C), family.closed_radius())


# ---------------------------------------------------------------------------
# cone scaling


@dataclass(frozen=True)
class ScalingReport:
    ok: bool
    t: float
    table_error: float
    eigen_error: float
    trace_link: float
    trace_cone: float


def cone_scaling_check(patch: EmbeddedPatch, t: float, step: float = 1e-3, tol: float = 1e-8) -> ScalingReport:
    """Compare the cone Y(s, v) = s X(v) at s = t with the bordered, 1/t scaled link form.

    The cone frame is (d/ds, t X_v M / t), i.e. frame map blockdiag(1, M/t).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    link = fd_second_form(patch, step)
    p = patch.p
    f = patch.evaluate

    def cone(z):
        return z[0] * f(z[1:])

    center = np.concatenate([[t], patch.center])
    Hc = _second_derivatives(cone, center, step)
    Hc2 = _second_derivatives(cone, center, step / 2)
    Hc = (4 * Hc2 - Hc) / 3
    Mc = np.zeros((p + 1, p + 1))
    Mc[0, 0] = 1.0
    Mc[1:, 1:] = link.frame_map / t
    cone_tab = np.einsum("ai,bj,abN,qN->qij", Mc, Mc, Hc, link.normals)
    expect = np.zeros_like(cone_tab)
    expect[:, 1:, 1:] = link.tables / t
    table_err = float(np.abs(cone_tab - expect).max()) if cone_tab.size else 0.0
    eig_err = 0.0
    for A, B in zip(cone_tab, link.tables):
        ev = np.sort(np.linalg.eigvalsh(0.5 * (A + A.T)))
        ref = np.sort(np.concatenate([[0.0], np.linalg.eigvalsh(B) / t]))
        eig_err = max(eig_err, float(np.abs(ev - ref).max()))
    tr_link = float(np.abs(np.trace(link.tables, axis1=1, axis2=2)).max()) if link.tables.size else 0.0
    tr_cone = float(np.abs(np.trace(cone_tab, axis1=1, axis2=2)).max()) if cone_tab.size else 0.0
    ok = table_err < tol and eig_err < tol and abs(tr_cone - tr_link / t) < tol
    return ScalingReport(ok, t, table_err, eig_err, tr_link, tr_cone)
