"""Dense symmetric linear algebra kernel.

Eigendecomposition by cyclic Jacobi sweeps, PSD tests with witnesses,
quadratic-form evaluation, and the numerical rank of a set of matrices
viewed as vectors. Everything here is pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBasisError, InputError, NotInSpanError, NumericalFailureError

DEFAULT_TOL = 1e-9

_JACOBI_SWEEP_CAP = 100
_JACOBI_OFF_TOL = 1e-12
_SQRT2 = math.sqrt(2.0)


def norm_max(a: np.ndarray) -> float:
    """Largest absolute entry; 0 for empty arrays."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _as_square(values, name: str = "matrix") -> np.ndarray:
    a = np.array(values, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InputError(f"{name} must be square of order >= 1, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise InputError(f"{name} has non-finite entries")
    return a


class SymMatrix:
    """Real symmetric matrix of order >= 1.

    The upper triangle is authoritative: the lower triangle is an exact
    mirror of it, so entries(i, j) == entries(j, i) holds by construction.
    """

    __slots__ = ("entries",)

    def __init__(self, values) -> None:
        a = _as_square(values)
        skew = norm_max(a - a.T)
        if skew > 1e-12 * (1.0 + norm_max(a)):
            raise InputError(f"matrix is not symmetric (asymmetry {skew:.3e})")
        sym = np.triu(a) + np.triu(a, 1).T
        sym.setflags(write=False)
        object.__setattr__(self, "entries", sym)

    def __setattr__(self, name, value):
        raise AttributeError("SymMatrix is immutable")

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def norm_max(self) -> float:
        return norm_max(self.entries)

    def __repr__(self) -> str:
        return f"SymMatrix({self.entries.tolist()!r})"


def as_sym(values) -> SymMatrix:
    """Coerce an array-like (or pass through a SymMatrix)."""
    return values if isinstance(values, SymMatrix) else SymMatrix(values)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues in ascending order with an orthonormal eigenvector basis."""

    eigenvalues: np.ndarray
    basis: np.ndarray


def sym_eigen(m: SymMatrix) -> Spectrum:
    """Eigendecomposition by cyclic Jacobi rotation sweeps.

    Sweeps run over (p, q) with p < q in a fixed order, so the result is
    deterministic for a fixed input. Convergence requires every
    off-diagonal magnitude to drop below 1e-12 times the largest input
    entry; at most 100 sweeps are attempted.
    """
    m = as_sym(m)
    n = m.order
    a = np.array(m.entries)
    v = np.eye(n)
    scale = norm_max(a)
    if n == 1 or scale == 0.0:
        vals = np.diag(a).copy()
        order = np.argsort(vals, kind="stable")
        return _spectrum(vals[order], v[:, order])
    thresh = _JACOBI_OFF_TOL * scale
    skip = 0.01 * thresh
    rows = np.arange(n)
    iu = np.triu_indices(n, 1)
    sweeps = 0
    while True:
        if norm_max(a[iu]) <= thresh:
            break
        if sweeps >= _JACOBI_SWEEP_CAP:
            raise NumericalFailureError("jacobi sweeps did not converge")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                h = a[q, q] - a[p, p]
                if abs(h) > 1e14 * abs(apq):
                    t = apq / h
                else:
                    theta = h / (2.0 * apq)
                    t = 1.0 / (abs(theta) + math.sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                a[p, p] -= t * apq
                a[q, q] += t * apq
                a[p, q] = a[q, p] = 0.0
                mask = (rows != p) & (rows != q)
                aip = a[mask, p].copy()
                aiq = a[mask, q].copy()
                a[mask, p] = a[p, mask] = c * aip - s * aiq
                a[mask, q] = a[q, mask] = s * aip + c * aiq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    vals = np.diag(a).copy()
    order = np.argsort(vals, kind="stable")
    return _spectrum(vals[order], v[:, order])


def _spectrum(vals: np.ndarray, basis: np.ndarray) -> Spectrum:
    vals = np.ascontiguousarray(vals)
    basis = np.ascontiguousarray(basis)
    vals.setflags(write=False)
    basis.setflags(write=False)
    return Spectrum(vals, basis)


def min_eigenvalue(m: SymMatrix) -> float:
    """Smallest eigenvalue, equal to sym_eigen(m).eigenvalues[0]."""
    return float(sym_eigen(m).eigenvalues[0])


@dataclass(frozen=True, eq=False)
class PsdVerdict:
    """PSD or not; a failing check carries a unit witness direction."""

    psd: bool
    witness: np.ndarray | None = None
    value: float | None = None

    def __bool__(self) -> bool:
        return self.psd


def is_psd(m: SymMatrix, tol: float = DEFAULT_TOL) -> PsdVerdict:
    """PSD check at relative tolerance tol * (1 + largest entry magnitude)."""
    if tol < 0.0:
        raise InputError("tol must be nonnegative")
    m = as_sym(m)
    spec = sym_eigen(m)
    lam = float(spec.eigenvalues[0])
    if lam >= -tol * (1.0 + m.norm_max()):
        return PsdVerdict(True)
    return PsdVerdict(False, witness=spec.basis[:, 0].copy(), value=lam)


def quad_form(m: SymMatrix, x) -> float:
    """The scalar x^T M x."""
    m = as_sym(m)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != m.order:
        raise InputError(f"vector of length {m.order} expected, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise InputError("vector has non-finite entries")
    return float(x @ m.entries @ x)


class MatrixFamily:
    """Ordered family of square matrices sharing one order.

    Certificate pipelines require symmetric members; general square
    members are accepted so that the set rank of a non-symmetric family
    can still be measured.
    """

    __slots__ = ("members",)

    def __init__(self, members) -> None:
        mats = []
        for k, raw in enumerate(members):
            a = raw.entries if isinstance(raw, SymMatrix) else raw
            a = _as_square(a, name=f"member {k}").copy()
            a.setflags(write=False)
            mats.append(a)
        if not mats:
            raise InputError("family must contain at least one matrix")
        order = mats[0].shape[0]
        if any(mat.shape[0] != order for mat in mats):
            raise InputError("family members have mixed orders")
        object.__setattr__(self, "members", tuple(mats))

    def __setattr__(self, name, value):
        raise AttributeError("MatrixFamily is immutable")

    def __len__(self) -> int:
        return len(self.members)

    @property
    def order(self) -> int:
        return self.members[0].shape[0]

    def is_symmetric(self) -> bool:
        return all(
            norm_max(mat - mat.T) <= 1e-12 * (1.0 + norm_max(mat)) for mat in self.members
        )

    def sym_members(self) -> list[SymMatrix]:
        return [SymMatrix(mat) for mat in self.members]


def as_family(members) -> MatrixFamily:
    return members if isinstance(members, MatrixFamily) else MatrixFamily(members)


def flatten_sym(a: np.ndarray) -> np.ndarray:
    """Upper-triangle flattening with sqrt(2)-scaled off-diagonal entries.

    Chosen so the Euclidean inner product of two flattened symmetric
    matrices equals their trace inner product sum_ij A_ij B_ij.
    """
    n = a.shape[0]
    ii, jj = np.triu_indices(n)
    w = np.where(ii == jj, 1.0, _SQRT2)
    return a[ii, jj] * w


def _flatten_family(family: MatrixFamily) -> np.ndarray:
    if family.is_symmetric():
        return np.stack([flatten_sym(mat) for mat in family.members])
    return np.stack([mat.reshape(-1) for mat in family.members])


def _pivoted_rank(rows: np.ndarray, tol: float) -> tuple[int, list[int]]:
    """Rank of a stack of row vectors by max-norm-pivoted elimination.

    The dependence threshold is tol times the largest pivot norm.
    """
    work = np.array(rows, dtype=float)
    m = work.shape[0]
    used = np.zeros(m, dtype=bool)
    pivots: list[int] = []
    limit = 0.0
    for step in range(m):
        norms = np.linalg.norm(work, axis=1)
        norms[used] = -1.0
        j = int(np.argmax(norms))
        if step == 0:
            limit = tol * norms[j]
        if norms[j] <= limit or norms[j] <= 0.0:
            break
        used[j] = True
        pivots.append(j)
        q = work[j] / norms[j]
        work -= np.outer(work @ q, q)
        work[j] = 0.0
    return len(pivots), pivots


def _greedy_basis(rows: np.ndarray, tol: float, size: int) -> list[int]:
    """First `size` members independent in index order (rows pre-normalized)."""
    basis: list[int] = []
    qs: list[np.ndarray] = []
    for idx in range(rows.shape[0]):
        if len(basis) == size:
            break
        v = rows[idx].copy()
        for _ in range(2):
            for q in qs:
                v -= (v @ q) * q
        nv = float(np.linalg.norm(v))
        if nv > tol:
            basis.append(idx)
            qs.append(v / nv)
    return basis


@dataclass(frozen=True, eq=False)
class MatrixSetRank:
    """Rank of a matrix set with, at rank 2, per-member basis coordinates."""

    rank: int
    basis: tuple[int, ...]
    coefficients: np.ndarray | None


def matrix_set_rank(family: MatrixFamily, tol: float = DEFAULT_TOL) -> MatrixSetRank:
    """Numerical rank of the family members flattened to vectors.

    Members are normalized before the column-pivoted elimination, so the
    rank is invariant under rescaling any member by a nonzero factor and
    under permuting the family. When the rank is 2 the result carries the
    coordinates of every member in the first two independent members.
    """
    family = as_family(family)
    flat = _flatten_family(family)
    norms = np.linalg.norm(flat, axis=1)
    unit = np.where(norms[:, None] > 0.0, flat / np.where(norms == 0.0, 1.0, norms)[:, None], 0.0)
    rank, pivots = _pivoted_rank(unit, tol)
    basis = _greedy_basis(unit, tol, rank)
    if len(basis) < rank:  # threshold disagreement; fall back to pivot choice
        basis = sorted(pivots)[:rank]
    coefficients = None
    if rank == 2 and len(family) >= 2:
        b1, b2 = flat[basis[0]], flat[basis[1]]
        coefficients = np.stack([_pair_lstsq(f, b1, b2) for f in flat])
    return MatrixSetRank(rank, tuple(basis), coefficients)


def _pair_lstsq(target: np.ndarray, b1: np.ndarray, b2: np.ndarray) -> np.ndarray:
    """Least-squares coefficients of target against two basis vectors."""
    g11 = float(b1 @ b1)
    g22 = float(b2 @ b2)
    g12 = float(b1 @ b2)
    det = g11 * g22 - g12 * g12
    r1 = float(target @ b1)
    r2 = float(target @ b2)
    alpha = (g22 * r1 - g12 * r2) / det
    beta = (g11 * r2 - g12 * r1) / det
    return np.array([alpha, beta])


def express_in_basis(
    a: SymMatrix, b1: SymMatrix, b2: SymMatrix, tol: float = DEFAULT_TOL
) -> tuple[float, float]:
    """Coefficients (alpha, beta) with A = alpha*B1 + beta*B2.

    Raises DegenerateBasisError when the pair is dependent and
    NotInSpanError when the least-squares residual exceeds
    tol * (1 + largest entry of A).
    """
    a, b1, b2 = as_sym(a), as_sym(b1), as_sym(b2)
    if not (a.order == b1.order == b2.order):
        raise InputError("matrices must share one order")
    if matrix_set_rank(MatrixFamily([b1, b2]), tol).rank < 2:
        raise DegenerateBasisError("basis pair is linearly dependent")
    alpha, beta = _pair_lstsq(flatten_sym(a.entries), flatten_sym(b1.entries), flatten_sym(b2.entries))
    residual = norm_max(a.entries - alpha * b1.entries - beta * b2.entries)
    if residual > tol * (1.0 + a.norm_max()):
        raise NotInSpanError(residual)
    return float(alpha), float(beta)


def numerical_rank(a: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank of a general dense matrix (columns normalized first)."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise InputError("rank expects a 2-d array")
    cols = a.T
    norms = np.linalg.norm(cols, axis=1)
    unit = np.where(norms[:, None] > 0.0, cols / np.where(norms == 0.0, 1.0, norms)[:, None], 0.0)
    rank, _ = _pivoted_rank(unit, tol)
    return rank
