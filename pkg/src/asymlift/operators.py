"""Dense complex operators, normal functionals, and the trace pairing.

Conventions fixed project-wide:

* vec is column-stacking: ``vec([[a, b], [c, d]]) = (a, c, b, d)``, so that
  ``vec(A X B) = (B.T kron A) vec(X)``.
* Tensor products are Kronecker products with row-major blocks:
  ``(x kron y)[i*dy + k, j*dy + l] = x[i, j] * y[k, l]``.

Every function here is pure; arrays handed to constructors are copied and
frozen, so values are safe to share across threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError


def _as_square(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


def vec(x) -> np.ndarray:
    """Column-stack a matrix into a 1-d vector."""
    return np.asarray(x).T.reshape(-1)


def unvec(v, dim: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec` for square matrices."""
    v = np.asarray(v).reshape(-1)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise DimensionError(f"cannot unvec length {v.size} into {dim}x{dim}")
    return v.reshape(dim, dim).T


def transpose_permutation(dim: int) -> np.ndarray:
    """Permutation G on vec-space with G @ vec(X) = vec(X.T)."""
    idx = np.arange(dim * dim)
    r, c = idx % dim, idx // dim
    g = np.zeros((dim * dim, dim * dim))
    g[idx, c + r * dim] = 1.0
    return g


class SystemKind(Enum):
    FULL_MATRIX = "full_matrix"
    COMMUTATIVE = "commutative"


@dataclass(frozen=True)
class SystemDescriptor:
    """Which algebra the operators live on, and at which hierarchy level.

    Level n means the system M_n (x) M; level 1 is the system itself.
    """

    kind: SystemKind
    dim: int
    hierarchy_level: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dimension must be positive")
        if self.hierarchy_level < 1:
            raise ValueError("hierarchy_level must be >= 1")

    @property
    def total_dim(self) -> int:
        return self.dim * self.hierarchy_level


@dataclass(frozen=True)
class Operator:
    """A d x d complex matrix viewed as an element of the algebra."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(_as_square(self.entries, "operator")))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def adjoint(self) -> "Operator":
        return Operator(self.entries.conj().T)

    def is_selfadjoint(self, tol: float = 1e-10) -> bool:
        return float(np.abs(self.entries - self.entries.conj().T).max()) <= tol

    @classmethod
    def identity(cls, dim: int) -> "Operator":
        return cls(np.eye(dim))


@dataclass(frozen=True)
class Functional:
    """A normal functional rho represented by its pairing matrix F.

    rho(x) = trace(F @ x); on the full matrix algebra the functional norm is
    the trace norm of F.
    """

    pairing_matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "pairing_matrix", _frozen(_as_square(self.pairing_matrix, "pairing matrix"))
        )

    @property
    def dim(self) -> int:
        return self.pairing_matrix.shape[0]


def _matrix_of(x) -> np.ndarray:
    if isinstance(x, Operator):
        return x.entries
    if isinstance(x, Functional):
        return x.pairing_matrix
    return _as_square(x)


def operator_norm(x) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(_matrix_of(x), 2))


def trace_norm(f) -> float:
    """Sum of singular values of the pairing matrix."""
    return float(np.linalg.svd(_matrix_of(f), compute_uv=False).sum())


def pair(f, x) -> complex:
    """The duality rho(x) = trace(F x)."""
    fm, xm = _matrix_of(f), _matrix_of(x)
    if fm.shape != xm.shape:
        raise DimensionError(f"functional dim {fm.shape[0]} != operator dim {xm.shape[0]}")
    return complex(np.trace(fm @ xm))


def tensor(x, y):
    """Kronecker product with the fixed row-major block convention."""
    xm, ym = _matrix_of(x), _matrix_of(y)
    out = np.kron(xm, ym)
    if isinstance(x, Operator) or isinstance(y, Operator):
        return Operator(out)
    return out


def trace_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product <a, b> = trace(a* b)."""
    return complex(np.sum(np.conj(_matrix_of(a)) * _matrix_of(b)))


# -- real embedding of Hermitian matrices ---------------------------------
#
# A Hermitian d x d matrix is encoded as a real vector of length d*d whose
# Euclidean inner product equals the trace inner product. Used to run real
# orthonormalization when building adjoint-closed operator bases.

def _herm_encode(h: np.ndarray) -> np.ndarray:
    d = h.shape[0]
    iu = np.triu_indices(d, k=1)
    return np.concatenate([
        np.real(np.diagonal(h)),
        np.sqrt(2.0) * np.real(h[iu]),
        np.sqrt(2.0) * np.imag(h[iu]),
    ])


def _herm_decode(v: np.ndarray, dim: int) -> np.ndarray:
    iu = np.triu_indices(dim, k=1)
    n_off = iu[0].size
    h = np.zeros((dim, dim), dtype=complex)
    h[np.diag_indices(dim)] = v[:dim]
    upper = (v[dim:dim + n_off] + 1j * v[dim + n_off:]) / np.sqrt(2.0)
    h[iu] = upper
    h[(iu[1], iu[0])] = upper.conj()
    return h


def hermitian_basis(span_ops, dim: int, tol: float, seed_identity: bool = True):
    """Orthonormal self-adjoint basis of the span of a *-closed operator family.

    Returns a list of Hermitian matrices, orthonormal in the trace inner
    product, whose complex span equals the complex span of ``span_ops``. When
    ``seed_identity`` is set the normalized identity is forced to be the first
    element (callers must know the identity lies in the span).

    The incoming family need not be Hermitian; each operator contributes its
    real and imaginary self-adjoint parts.
    """
    rows = []
    if seed_identity:
        rows.append(_herm_encode(np.eye(dim, dtype=complex) / np.sqrt(dim)))
    for op in span_ops:
        m = np.asarray(op, dtype=complex)
        rows.append(_herm_encode((m + m.conj().T) / 2.0))
        rows.append(_herm_encode((m - m.conj().T) / 2.0j))
    a = np.array(rows)
    # Row-by-row Gram-Schmidt keeps the identity pinned in front and is
    # deterministic in the input order.
    basis_rows: list[np.ndarray] = []
    for row in a:
        r = row.copy()
        for b in basis_rows:
            r -= (b @ r) * b
        nrm = np.linalg.norm(r)
        if nrm > tol:
            basis_rows.append(r / nrm)
    return [_herm_decode(r, dim) for r in basis_rows]


def coords_in_basis(x, basis) -> np.ndarray:
    """Coordinates of x in a trace-orthonormal operator basis."""
    xm = _matrix_of(x)
    return np.array([trace_inner(b, xm) for b in basis])


def assemble(coords, basis) -> np.ndarray:
    """Inverse of :func:`coords_in_basis`."""
    out = np.zeros_like(np.asarray(basis[0], dtype=complex))
    for c, b in zip(np.asarray(coords).reshape(-1), basis):
        out = out + c * b
    return out


def span_residual(x, basis) -> float:
    """Distance (Frobenius) from x to the span of a trace-orthonormal basis."""
    xm = _matrix_of(x)
    proj = assemble(coords_in_basis(xm, basis), basis)
    return float(np.linalg.norm(xm - proj))
