"""Unital completely positive maps in their standard representations.

A map L on M_d is stored as its d^2 x d^2 superoperator matrix S acting on
column-stacked vectors, S @ vec(x) = vec(L(x)). Conversions to and from Kraus
sets and Choi matrices follow from the column-stacking identities

    kraus -> super:  S = sum_i conj(K_i) kron K_i
    choi:            C = sum_ij E_ij kron L(E_ij) = sum_i vec(K_i) vec(K_i)^dag

so complete positivity is exactly positive semidefiniteness of C.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Config, DEFAULT_CONFIG
from .errors import DimensionError, ResourceLimitError, ValidationError
from .operators import (
    Operator,
    SystemDescriptor,
    SystemKind,
    _as_square,
    _frozen,
    _matrix_of,
    transpose_permutation,
    unvec,
    vec,
)


@dataclass(frozen=True)
class Superoperator:
    """Matrix form of a linear map on d x d operators."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square(self.matrix, "superoperator")
        if m.shape[0] != self.dim * self.dim:
            raise DimensionError(
                f"superoperator side {m.shape[0]} != dim^2 = {self.dim ** 2}"
            )
        object.__setattr__(self, "matrix", _frozen(m))

    def apply(self, x) -> np.ndarray:
        xm = _as_square(_matrix_of(x), "operator")
        if xm.shape[0] != self.dim:
            raise DimensionError(f"operator dim {xm.shape[0]} != map dim {self.dim}")
        return unvec(self.matrix @ vec(xm), self.dim)

    def hermiticity_residual(self) -> float:
        """Max deviation of the Choi matrix from Hermitian symmetry.

        Zero iff L(x*) = L(x)* for all x.
        """
        c = choi_of_superoperator(self)
        return float(np.abs(c - c.conj().T).max())


@dataclass(frozen=True)
class KrausSet:
    """Operators {K_i} realizing L(x) = sum_i K_i x K_i^dag."""

    dim: int
    operators: tuple

    def __post_init__(self):
        if len(self.operators) == 0:
            raise DimensionError("empty Kraus set")
        ops = []
        for k in self.operators:
            m = _as_square(k, "Kraus operator")
            if m.shape[0] != self.dim:
                raise DimensionError("Kraus operator dimension mismatch")
            ops.append(_frozen(m))
        object.__setattr__(self, "operators", tuple(ops))

    def superoperator(self) -> Superoperator:
        s = sum(np.kron(k.conj(), k) for k in self.operators)
        return Superoperator(self.dim, s)


@dataclass(frozen=True)
class ChoiMatrix:
    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square(self.matrix, "Choi matrix")
        if m.shape[0] != self.dim * self.dim:
            raise DimensionError("Choi matrix side != dim^2")
        object.__setattr__(self, "matrix", _frozen(m))

    def min_eigenvalue(self) -> float:
        h = (self.matrix + self.matrix.conj().T) / 2.0
        return float(np.linalg.eigvalsh(h).min())

    def kraus_operators(self, cutoff: float = 1e-10) -> tuple:
        """Kraus set from the eigendecomposition, descending by eigenvalue.

        Eigenvalues below ``cutoff`` are dropped; negative ones beyond the
        cutoff mean the map was not completely positive.
        """
        h = (self.matrix + self.matrix.conj().T) / 2.0
        w, v = np.linalg.eigh(h)
        order = np.argsort(w)[::-1]
        ops = []
        for i in order:
            if w[i] > cutoff:
                ops.append(np.sqrt(w[i]) * unvec(v[:, i], self.dim))
        return tuple(ops)


def choi_of_superoperator(s: Superoperator) -> np.ndarray:
    d = s.dim
    c = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            block = unvec(s.matrix[:, i + j * d], d)  # = L(E_ij)
            c[i * d:(i + 1) * d, j * d:(j + 1) * d] = block
    return c


@dataclass(frozen=True)
class ValidationReport:
    dim: int
    choi_min_eigenvalue: float
    unital_residual: float
    hermiticity_residual: float
    tol_psd: float
    tol_herm: float

    @property
    def cp(self) -> bool:
        return self.choi_min_eigenvalue >= -self.tol_psd

    @property
    def unital(self) -> bool:
        return self.unital_residual <= self.tol_herm

    @property
    def ok(self) -> bool:
        return self.cp and self.unital

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
            "unital_residual": self.unital_residual,
            "hermiticity_residual": self.hermiticity_residual,
            "cp": self.cp,
            "unital": self.unital,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class Channel:
    """A linear map on M_d together with its validation status.

    ``cp``/``unital`` reflect the last validation (or construction-time
    knowledge for Kraus-built maps); ``validate`` recomputes both.
    """

    system: SystemDescriptor
    super: Superoperator
    kraus: KrausSet | None = None
    cp: bool = False
    unital: bool = False

    @property
    def dim(self) -> int:
        return self.super.dim

    def apply(self, x) -> np.ndarray:
        """L(x) via the superoperator."""
        return self.super.apply(x)

    def choi(self) -> ChoiMatrix:
        return ChoiMatrix(self.dim, choi_of_superoperator(self.super))


def _identity_superop(dim: int) -> Superoperator:
    return Superoperator(dim, np.eye(dim * dim))


def identity_channel(dim: int) -> Channel:
    return Channel(
        system=SystemDescriptor(SystemKind.FULL_MATRIX, dim),
        super=_identity_superop(dim),
        kraus=KrausSet(dim, (np.eye(dim),)),
        cp=True,
        unital=True,
    )


def from_kraus(ks: KrausSet, config: Config = DEFAULT_CONFIG) -> Channel:
    """Channel from a Kraus set; cp holds by construction, unital is tested."""
    s = ks.superoperator()
    one = np.eye(ks.dim)
    unital_res = float(np.abs(s.apply(one) - one).max())
    return Channel(
        system=SystemDescriptor(SystemKind.FULL_MATRIX, ks.dim),
        super=s,
        kraus=ks,
        cp=True,
        unital=unital_res <= config.tol_herm,
    )


def from_superoperator(s: Superoperator, config: Config = DEFAULT_CONFIG,
                       kind: SystemKind = SystemKind.FULL_MATRIX) -> Channel:
    ch = Channel(system=SystemDescriptor(kind, s.dim), super=s)
    report = validate(ch, config.tol_psd, config.tol_herm)
    kraus = None
    if report.cp:
        kraus = KrausSet(s.dim, ChoiMatrix(s.dim, choi_of_superoperator(s)).kraus_operators())
    return Channel(system=ch.system, super=s, kraus=kraus,
                   cp=report.cp, unital=report.unital)


def from_choi(c: ChoiMatrix, config: Config = DEFAULT_CONFIG) -> Channel:
    d = c.dim
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[:, i + j * d] = vec(c.matrix[i * d:(i + 1) * d, j * d:(j + 1) * d])
    return from_superoperator(Superoperator(d, s), config)


def validate(ch: Channel, tol_psd: float | None = None,
             tol_herm: float | None = None) -> ValidationReport:
    """Complete positivity, unitality, and hermiticity-preservation report."""
    tol_psd = DEFAULT_CONFIG.tol_psd if tol_psd is None else tol_psd
    tol_herm = DEFAULT_CONFIG.tol_herm if tol_herm is None else tol_herm
    c = choi_of_superoperator(ch.super)
    herm_res = float(np.abs(c - c.conj().T).max())
    min_eig = float(np.linalg.eigvalsh((c + c.conj().T) / 2.0).min())
    one = np.eye(ch.dim)
    unital_res = float(np.abs(ch.apply(one) - one).max())
    return ValidationReport(
        dim=ch.dim,
        choi_min_eigenvalue=min_eig,
        unital_residual=unital_res,
        hermiticity_residual=herm_res,
        tol_psd=tol_psd,
        tol_herm=tol_herm,
    )


def validated(ch: Channel, config: Config = DEFAULT_CONFIG) -> Channel:
    """Re-validate and return a channel with refreshed flags; raise if not UCP."""
    report = validate(ch, config.tol_psd, config.tol_herm)
    if not report.ok:
        raise ValidationError(
            f"not a UCP map: choi min eig {report.choi_min_eigenvalue:.3e}, "
            f"unital residual {report.unital_residual:.3e}"
        )
    return Channel(system=ch.system, super=ch.super, kraus=ch.kraus,
                   cp=True, unital=True)


def apply(ch: Channel, x):
    out = ch.apply(_matrix_of(x))
    return Operator(out) if isinstance(x, Operator) else out


def compose(a: Channel, b: Channel) -> Channel:
    """The map x -> a(b(x))."""
    if a.dim != b.dim:
        raise DimensionError("cannot compose channels of different dimension")
    return Channel(
        system=a.system,
        super=Superoperator(a.dim, a.super.matrix @ b.super.matrix),
        cp=a.cp and b.cp,
        unital=a.unital and b.unital,
    )


def power(ch: Channel, k: int) -> Channel:
    """The k-th iterate; k = 0 is the identity channel."""
    if k < 0:
        raise ValueError("power requires k >= 0")
    if k == 0:
        return Channel(system=ch.system, super=_identity_superop(ch.dim),
                       kraus=KrausSet(ch.dim, (np.eye(ch.dim),)),
                       cp=True, unital=True)
    m = np.linalg.matrix_power(ch.super.matrix, k)
    return Channel(system=ch.system, super=Superoperator(ch.dim, m),
                   kraus=ch.kraus if k == 1 else None, cp=ch.cp, unital=ch.unital)


def predual(ch: Channel) -> Superoperator:
    """Matrix of F -> F' with trace(F' x) = trace(F L(x)) for all x.

    For UCP channels the predual is trace-preserving and contractive in the
    trace norm. On vec coordinates it is G S^T G with G the transpose
    permutation.
    """
    g = transpose_permutation(ch.dim)
    return Superoperator(ch.dim, g @ ch.super.matrix.T @ g)


def predual_matrix(s: Superoperator) -> np.ndarray:
    g = transpose_permutation(s.dim)
    return g @ s.matrix.T @ g


def amplify(ch: Channel, n: int, config: Config = DEFAULT_CONFIG) -> Channel:
    """The induced map id_n (x) L on M_n (x) M_d under the fixed Kronecker order.

    Built column-by-column: the amplified map sends the matrix unit
    E_(i,b),(j,e) to E_ij (x) L(E_be).
    """
    if n < 1:
        raise ValueError("amplification level must be >= 1")
    if n == 1:
        return ch
    d = ch.dim
    nd = n * d
    if nd * nd > config.dim_ceiling:
        raise ResourceLimitError(
            f"amplified superoperator side {nd * nd} exceeds ceiling {config.dim_ceiling}"
        )
    s_amp = np.zeros((nd * nd, nd * nd), dtype=complex)
    for b in range(d):
        for e in range(d):
            y = unvec(ch.super.matrix[:, b + e * d], d)  # L(E_be)
            for i in range(n):
                rows = i * d + np.arange(d)
                for j in range(n):
                    col = (i * d + b) + (j * d + e) * nd
                    cols = j * d + np.arange(d)
                    # vec(E_ij kron Y) scattered into the column
                    block = np.zeros((nd, nd), dtype=complex)
                    block[np.ix_(rows, cols)] = y
                    s_amp[:, col] = vec(block)
    kraus = None
    if ch.kraus is not None:
        kraus = KrausSet(nd, tuple(np.kron(np.eye(n), k) for k in ch.kraus.operators))
    return Channel(
        system=SystemDescriptor(ch.system.kind, d, hierarchy_level=n),
        super=Superoperator(nd, s_amp),
        kraus=kraus,
        cp=ch.cp,
        unital=ch.unital,
    )


def from_stochastic(p, config: Config = DEFAULT_CONFIG, tol: float = 1e-12) -> Channel:
    """Pinch-then-act channel of a row-stochastic matrix.

    L(x) = diag(P @ diagvec(x)): restricted to diagonal operators this is
    exactly the Markov action, and the Kraus set {sqrt(p_ij) E_ij} makes it
    UCP on all of M_n.
    """
    pm = np.asarray(p, dtype=float)
    if pm.ndim != 2 or pm.shape[0] != pm.shape[1]:
        raise DimensionError(f"stochastic matrix must be square, got {pm.shape}")
    n = pm.shape[0]
    if pm.min() < -tol:
        raise ValidationError(f"negative entry {pm.min():.3e} in stochastic matrix")
    row_err = float(np.abs(pm.sum(axis=1) - 1.0).max())
    if row_err > tol:
        raise ValidationError(f"rows do not sum to 1 (max residual {row_err:.3e})")
    pm = np.clip(pm, 0.0, None)
    ops = []
    for i in range(n):
        for j in range(n):
            if pm[i, j] > 0.0:
                k = np.zeros((n, n))
                k[i, j] = np.sqrt(pm[i, j])
                ops.append(k)
    ch = from_kraus(KrausSet(n, tuple(ops)), config)
    return Channel(
        system=SystemDescriptor(SystemKind.COMMUTATIVE, n),
        super=ch.super,
        kraus=ch.kraus,
        cp=True,
        unital=ch.unital,
    )
