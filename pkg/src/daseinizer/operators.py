"""Finite-dimensional operators, states and the projection lattice P(H).

Matrices are stored as read-only complex numpy arrays. All invariants are
checked against the global max-norm tolerance from :mod:`daseinizer.tolerance`,
and two projectors are the same value when they agree to within it.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .borel import BorelSet
from .errors import DimensionMismatch, EigenSolverError, InvariantError, NotHermitianError
from .tolerance import cluster_tol, get_eps


def _as_matrix(data) -> np.ndarray:
    m = np.array(data, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvariantError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvariantError("matrix has non-finite entries")
    m.flags.writeable = False
    return m


def max_norm(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


class SelfAdjointOperator:
    """A Hermitian operator on C^dim."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, check: bool = True):
        m = _as_matrix(matrix)
        if check:
            err = max_norm(m - m.conj().T)
            if err > get_eps():
                raise NotHermitianError(f"operator is not Hermitian (|M - M^dagger|_max = {err:.3e})")
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def diag(cls, values) -> "SelfAdjointOperator":
        return cls(np.diag(np.asarray(values, dtype=complex)))

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def commutes_with(self, other: "SelfAdjointOperator") -> bool:
        return commutator_norm(self, other) <= get_eps()

    def __eq__(self, other):
        if not isinstance(other, SelfAdjointOperator):
            return NotImplemented
        return self.dim == other.dim and max_norm(self.matrix - other.matrix) <= get_eps()

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class Projector(SelfAdjointOperator):
    """An orthogonal projection operator, i.e. an element of P(H)."""

    __slots__ = ()

    def __init__(self, matrix, *, check: bool = True):
        super().__init__(matrix, check=check)
        if check:
            m = self.matrix
            eps = get_eps()
            err = max_norm(m @ m - m)
            if err > eps:
                raise InvariantError(f"matrix is not idempotent (|M^2 - M|_max = {err:.3e})")
            ev = np.linalg.eigvalsh(m)
            if np.any(np.minimum(np.abs(ev), np.abs(ev - 1)) > eps):
                raise InvariantError("projector eigenvalues are not in {0, 1}")

    @classmethod
    def zero(cls, dim: int) -> "Projector":
        return cls(np.zeros((dim, dim)), check=False)

    @classmethod
    def identity(cls, dim: int) -> "Projector":
        return cls(np.eye(dim), check=False)

    @classmethod
    def onto(cls, vectors, dim: int | None = None) -> "Projector":
        """Projector onto the span of the given vectors (rows or a single vector)."""
        vs = np.atleast_2d(np.array(vectors, dtype=complex))
        if vs.size == 0:
            if dim is None:
                raise InvariantError("dimension required for an empty span")
            return cls.zero(dim)
        basis = orthonormal_basis(vs.T)
        return cls.from_basis(basis, vs.shape[1])

    @classmethod
    def from_basis(cls, basis: np.ndarray, dim: int) -> "Projector":
        """Projector ``B B^dagger`` for a matrix ``B`` with orthonormal columns."""
        if basis.size == 0:
            return cls.zero(dim)
        m = basis @ basis.conj().T
        m = (m + m.conj().T) / 2
        return cls(m, check=False)

    @classmethod
    def basis_vector(cls, dim: int, i: int) -> "Projector":
        m = np.zeros((dim, dim))
        m[i, i] = 1.0
        return cls(m, check=False)

    @classmethod
    def diag(cls, values) -> "Projector":
        return cls(np.diag(np.asarray(values, dtype=complex)))

    @property
    def rank(self) -> int:
        return int(round(float(np.real(np.trace(self.matrix)))))

    def complement(self) -> "Projector":
        return Projector(np.eye(self.dim) - self.matrix, check=False)

    def is_zero(self) -> bool:
        return max_norm(self.matrix) <= get_eps()

    def is_identity(self) -> bool:
        return max_norm(self.matrix - np.eye(self.dim)) <= get_eps()

    def __add__(self, other: "Projector") -> "Projector":
        """Sum of two orthogonal projectors."""
        _same_dim(self, other)
        return Projector(self.matrix + other.matrix)

    def __repr__(self):
        return f"Projector(dim={self.dim}, rank={self.rank})"


class StateVector:
    """A normalised vector state."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes, *, normalise: bool = False):
        v = np.array(amplitudes, dtype=complex).reshape(-1)
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise InvariantError("state vector must be non-empty and finite")
        n = float(np.linalg.norm(v))
        if normalise:
            if n == 0:
                raise InvariantError("cannot normalise the zero vector")
            v = v / n
        elif abs(n - 1) > get_eps():
            raise InvariantError(f"state vector is not normalised (norm {n!r})")
        v.flags.writeable = False
        self.amplitudes = v

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> Projector:
        """The rank-one projector onto the ray of this state."""
        return Projector.from_basis(self.amplitudes.reshape(-1, 1), self.dim)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self):
        return f"StateVector(dim={self.dim})"


class DensityMatrix:
    """A positive semidefinite, unit-trace Hermitian matrix."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = _as_matrix(matrix)
        eps = get_eps()
        if max_norm(m - m.conj().T) > eps:
            raise NotHermitianError("density matrix is not Hermitian")
        if np.min(np.linalg.eigvalsh(m)) < -eps:
            raise InvariantError("density matrix is not positive semidefinite")
        tr = complex(np.trace(m))
        if abs(tr - 1) > eps:
            raise InvariantError(f"density matrix trace is {tr.real!r}, expected 1")
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def mixture(cls, weights: Sequence[float], projectors: Sequence[Projector]) -> "DensityMatrix":
        """Convex combination of normalised projectors ``P / rank(P)``."""
        m = sum(w * p.matrix / p.rank for w, p in zip(weights, projectors))
        return cls(m)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


State = Union[StateVector, DensityMatrix]


def _same_dim(a, b) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension mismatch: {a.dim} vs {b.dim}")


def commutator_norm(a: SelfAdjointOperator, b: SelfAdjointOperator) -> float:
    _same_dim(a, b)
    return max_norm(a.matrix @ b.matrix - b.matrix @ a.matrix)


def orthonormal_basis(columns: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the column space of ``columns``."""
    if columns.size == 0:
        return columns.reshape(columns.shape[0], 0)
    u, s, _ = np.linalg.svd(columns, full_matrices=False)
    tol = get_eps() if tol is None else tol
    return u[:, s > tol * max(1.0, float(s[0]) if s.size else 1.0)]


def null_space(m: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the kernel of ``m``, rank-revealing via SVD."""
    tol = get_eps() if tol is None else tol
    _, s, vh = np.linalg.svd(m)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


# -- spectral theory ---------------------------------------------------------


def spectral_decompose(a: SelfAdjointOperator) -> list[tuple[float, Projector]]:
    """Eigenvalues (strictly increasing) with their eigenprojectors.

    Eigenvalues closer than the clustering tolerance are merged into one
    eigenspace, so the result is a partition of the identity.
    """
    if not isinstance(a, SelfAdjointOperator):
        a = SelfAdjointOperator(a)
    m = a.matrix
    if max_norm(m - m.conj().T) > get_eps():
        raise NotHermitianError("spectral decomposition needs a Hermitian operator")
    try:
        w, v = np.linalg.eigh((m + m.conj().T) / 2)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenSolverError(f"eigensolver did not converge: {exc}") from exc
    tol = cluster_tol(float(np.max(np.abs(w))) if w.size else 0.0)
    groups: list[list[int]] = []
    for i in range(len(w)):
        if groups and w[i] - w[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    out = []
    for g in groups:
        value = float(np.mean(w[g]))
        out.append((value, Projector.from_basis(v[:, g], a.dim)))
    return out


def spectral_projector(a: SelfAdjointOperator, delta: BorelSet) -> Projector:
    """The spectral projector E[A in delta]."""
    parts = spectral_decompose(a)
    snap = cluster_tol(max((abs(lam) for lam, _ in parts), default=0.0))
    m = np.zeros((a.dim, a.dim), dtype=complex)
    for lam, p in parts:
        if delta.contains(lam, snap=snap):
            m = m + p.matrix
    return Projector(m, check=False)


def spectrum(a: SelfAdjointOperator) -> list[float]:
    return [lam for lam, _ in spectral_decompose(a)]


# -- the projection lattice --------------------------------------------------


def proj_eq(p: Projector, q: Projector) -> bool:
    _same_dim(p, q)
    return max_norm(p.matrix - q.matrix) <= get_eps()


def proj_leq(p: Projector, q: Projector) -> bool:
    """Range inclusion ``P <= Q``, decided as ``|QP - P|_max <= eps``."""
    _same_dim(p, q)
    return max_norm(q.matrix @ p.matrix - p.matrix) <= get_eps()


def proj_meet(p: Projector, q: Projector) -> Projector:
    """Projector onto ``range(P) & range(Q)``.

    The intersection is the joint kernel of ``1-P`` and ``1-Q``; it is found
    with a rank-revealing SVD of the stacked complements.
    """
    _same_dim(p, q)
    n = p.dim
    eye = np.eye(n)
    stacked = np.vstack([eye - p.matrix, eye - q.matrix])
    return Projector.from_basis(null_space(stacked), n)


def proj_join(p: Projector, q: Projector) -> Projector:
    return proj_meet(p.complement(), q.complement()).complement()


def expectation(p: Projector, state: State) -> float:
    """``<psi|P|psi>`` for a vector state or ``tr(rho P)`` for a density matrix."""
    _same_dim(p, state)
    if isinstance(state, StateVector):
        psi = state.amplitudes
        return float(np.real(np.vdot(psi, p.matrix @ psi)))
    return float(np.real(np.trace(state.matrix @ p.matrix)))


def is_certain(p: Projector, state: State) -> bool:
    """Whether ``P`` has probability one in ``state``.

    For vectors this is ``|P psi - psi| <= eps``, which is better conditioned
    near one than comparing the expectation value.
    """
    _same_dim(p, state)
    if isinstance(state, StateVector):
        psi = state.amplitudes
        return float(np.linalg.norm(p.matrix @ psi - psi)) <= get_eps()
    return expectation(p, state) >= 1 - get_eps()
