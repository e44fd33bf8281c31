"""Eigenstructure of superoperators and the peripheral spectral idempotent.

Two routes to the peripheral data live here:

* a plain dense eigendecomposition with biorthogonally normalized left/right
  vectors (adequate whenever the map is diagonalizable), and
* a Schur/Sylvester construction of the spectral idempotent Q that only needs
  the peripheral cluster to be separated from the rest of the spectrum, so a
  defective sub-peripheral part is tolerated.

Peripheral clusters themselves must be semisimple; for unital completely
positive maps power-boundedness forces this, so a defect there is reported as
a hard :class:`PeripheralDefectError` rather than regularized away.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import Config, DEFAULT_CONFIG
from .errors import PeripheralDefectError
from .channels import Channel, Superoperator

_DEFECT_KERNEL_TOL = 1e-11     # singular values below this count as kernel
_EIGVEC_COND_CAP = 1e8         # peripheral restriction beyond this is defective


def _cluster_indices(values: np.ndarray, radius: float) -> list[list[int]]:
    """Single-linkage clustering of complex values with the given radius."""
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _sort_order(w: np.ndarray) -> np.ndarray:
    """Descending modulus, then ascending phase in [0, 2pi)."""
    phases = np.mod(np.angle(w), 2.0 * np.pi)
    return np.lexsort((phases, -np.abs(w)))


@dataclass(frozen=True)
class ClusterInfo:
    representative: complex
    indices: tuple
    multiplicity: int
    geometric: int
    defect: int
    peripheral: bool

    def to_dict(self) -> dict:
        return {
            "representative": [self.representative.real, self.representative.imag],
            "multiplicity": self.multiplicity,
            "geometric": self.geometric,
            "defect": self.defect,
            "peripheral": self.peripheral,
        }


@dataclass(frozen=True)
class SpectralData:
    """Full eigendecomposition with defect diagnostics.

    Columns of ``right_vectors`` and ``left_vectors`` are aligned with
    ``eigenvalues`` and biorthonormalized, <l_i, r_j> = delta_ij, whenever the
    matrix is numerically diagonalizable (``ill_conditioned`` is False).
    """

    dim: int
    source_matrix: np.ndarray
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    clusters: tuple            # of ClusterInfo
    cond_right: float
    ill_conditioned: bool

    def reconstruction_residual(self) -> float:
        s = (self.right_vectors * self.eigenvalues) @ self.left_vectors.conj().T
        return float(np.abs(s - self.source_matrix).max())

    def biorthogonality_residual(self) -> float:
        g = self.left_vectors.conj().T @ self.right_vectors
        return float(np.abs(g - np.eye(g.shape[0])).max())

    @property
    def defect_report(self) -> tuple:
        return self.clusters


def _geometric_multiplicity(matrix: np.ndarray, rep: complex, alg: int) -> int:
    if alg == 1:
        return 1
    shifted = matrix - rep * np.eye(matrix.shape[0])
    sv = np.linalg.svd(shifted, compute_uv=False)
    scale = max(1.0, float(sv[0]))
    return int(np.sum(sv < _DEFECT_KERNEL_TOL * scale))


def eigendecompose(s: Superoperator | np.ndarray, config: Config = DEFAULT_CONFIG) -> SpectralData:
    """Eigenvalues, biorthogonal vectors, clusters, and the defect report.

    Raises :class:`PeripheralDefectError` when a peripheral cluster has
    geometric multiplicity below its algebraic multiplicity at tolerance.
    """
    matrix = s.matrix if isinstance(s, Superoperator) else np.asarray(s, dtype=complex)
    dim = matrix.shape[0]
    w, v = np.linalg.eig(matrix)
    order = _sort_order(w)
    w, v = w[order], v[:, order]

    cond_v = float(np.linalg.cond(v))
    ill = not np.isfinite(cond_v) or cond_v > 1e10
    if ill:
        left = np.linalg.pinv(v).conj().T
    else:
        left = np.linalg.inv(v).conj().T

    infos = []
    for idx in _cluster_indices(w, config.tol_cluster):
        rep = complex(np.mean(w[idx]))
        peripheral = abs(rep) > 1.0 - config.tol_per
        if peripheral:
            rep = rep / abs(rep)
        geo = _geometric_multiplicity(matrix, rep, len(idx))
        info = ClusterInfo(
            representative=rep,
            indices=tuple(int(i) for i in idx),
            multiplicity=len(idx),
            geometric=geo,
            defect=len(idx) - geo,
            peripheral=peripheral,
        )
        if peripheral and info.defect > 0:
            raise PeripheralDefectError(
                f"peripheral cluster at {rep:.6f} has algebraic multiplicity "
                f"{info.multiplicity} but geometric {geo}"
            )
        infos.append(info)

    return SpectralData(
        dim=dim,
        source_matrix=np.array(matrix),
        eigenvalues=w,
        right_vectors=v,
        left_vectors=left,
        clusters=tuple(infos),
        cond_right=cond_v,
        ill_conditioned=ill,
    )


@dataclass(frozen=True)
class PeripheralDecomposition:
    """Unimodular eigenvalue clusters, their projectors, and the idempotent Q."""

    dim: int
    peripheral_eigenvalues: tuple      # snapped cluster representatives
    multiplicities: tuple
    cluster_projectors: tuple          # aligned with peripheral_eigenvalues
    q: Superoperator
    sub_radius: float
    semisimple: bool
    idempotent_residual: float
    commutation_residual: float

    @property
    def peripheral_count(self) -> int:
        return int(sum(self.multiplicities))

    def adjusted_peripheral_power(self, n: int) -> np.ndarray:
        """sum_c lambda_c^n P_c, the peripheral part of the n-th power."""
        out = np.zeros_like(self.q.matrix)
        for lam, p in zip(self.peripheral_eigenvalues, self.cluster_projectors):
            phase = (n * np.angle(lam)) % (2.0 * np.pi)
            out = out + np.exp(1j * phase) * p
        return out


def _peripheral_invariant_projector(matrix: np.ndarray, tol_per: float):
    """Spectral projector onto the peripheral invariant subspace via Schur.

    Returns (projector, orthonormal range basis). Only requires the
    peripheral spectrum to be separated from the rest.
    """
    t, z, sdim = scipy.linalg.schur(
        matrix.astype(complex), output="complex",
        sort=lambda lam: abs(lam) > 1.0 - tol_per,
    )
    dim = matrix.shape[0]
    if sdim == 0:
        return np.zeros_like(matrix, dtype=complex), np.zeros((dim, 0), dtype=complex)
    if sdim == dim:
        return np.eye(dim, dtype=complex), z
    t11, t12, t22 = t[:sdim, :sdim], t[:sdim, sdim:], t[sdim:, sdim:]
    r = scipy.linalg.solve_sylvester(t11, -t22, t12)
    x = np.zeros((dim, dim), dtype=complex)
    x[:sdim, :sdim] = np.eye(sdim)
    x[:sdim, sdim:] = r
    return z @ x @ z.conj().T, z[:, :sdim]


def peripheral_projection(matrix: np.ndarray, tol_per: float, tol_cluster: float):
    """Peripheral clusters and their biorthogonal spectral projectors.

    Works on any square matrix with spectrum in the closed unit disk; returns
    (representatives, multiplicities, projectors, sub_radius). Representatives
    are snapped to the unit circle, projectors sum to the idempotent onto the
    whole peripheral invariant subspace. Raises when a peripheral cluster is
    numerically defective.
    """
    matrix = np.asarray(matrix, dtype=complex)
    eigvals = np.linalg.eigvals(matrix)
    proj, basis = _peripheral_invariant_projector(matrix, tol_per)
    m = basis.shape[1]
    n_peripheral = int(np.sum(np.abs(eigvals) > 1.0 - tol_per))
    if m != n_peripheral:
        raise PeripheralDefectError(
            f"peripheral subspace dimension {m} does not match "
            f"{n_peripheral} peripheral eigenvalues"
        )
    if m == 0:
        raise PeripheralDefectError("map has empty peripheral spectrum")
    others = eigvals[np.abs(eigvals) <= 1.0 - tol_per]
    sub_radius = float(np.abs(others).max()) if others.size else 0.0

    # Diagonalize the restriction to the peripheral invariant subspace; its
    # eigenvector conditioning is the semisimplicity certificate.
    restriction = basis.conj().T @ matrix @ basis
    mu, wvec = np.linalg.eig(restriction)
    cond_w = float(np.linalg.cond(wvec))
    if not np.isfinite(cond_w) or cond_w > _EIGVEC_COND_CAP:
        raise PeripheralDefectError(
            f"peripheral restriction is numerically defective (eigenvector "
            f"condition {cond_w:.2e})"
        )
    winv = np.linalg.inv(wvec)
    coeff = basis.conj().T @ proj   # proj = basis @ coeff

    reps, mults, projectors = [], [], []
    for idx in _cluster_indices(mu, tol_cluster):
        rep = complex(np.mean(mu[idx]))
        rep = rep / abs(rep)
        reps.append(rep)
        mults.append(len(idx))
        projectors.append(basis @ (wvec[:, idx] @ winv[idx, :]) @ coeff)

    order = _sort_order(np.array(reps))
    return (
        [reps[i] for i in order],
        [int(mults[i]) for i in order],
        [projectors[i] for i in order],
        sub_radius,
    )


def peripheral(spec: SpectralData, tol_per: float | None = None,
               config: Config = DEFAULT_CONFIG) -> PeripheralDecomposition:
    """Extract the peripheral part: cluster projectors, Q, and sub-radius.

    Q is the sum over peripheral clusters of the biorthogonal projections
    r_i l_i^*; the vectors are recomputed on the peripheral invariant subspace
    so that a defective sub-peripheral part cannot contaminate them.
    """
    tol_per = config.tol_per if tol_per is None else tol_per
    matrix = spec.source_matrix
    side = matrix.shape[0]
    opdim = int(round(np.sqrt(side)))
    if opdim * opdim != side:
        raise ValueError("source matrix side is not a perfect square")

    reps, mults, projectors, sub_radius = peripheral_projection(
        matrix, tol_per, config.tol_cluster
    )
    q = sum(projectors)
    idem = float(np.abs(q @ q - q).max())
    comm = float(np.abs(q @ matrix - matrix @ q).max())

    return PeripheralDecomposition(
        dim=opdim,
        peripheral_eigenvalues=tuple(reps),
        multiplicities=tuple(mults),
        cluster_projectors=tuple(projectors),
        q=Superoperator(opdim, q),
        sub_radius=sub_radius,
        semisimple=True,
        idempotent_residual=idem,
        commutation_residual=comm,
    )


def kuperberg_sequence(peripheral_eigenvalues, epsilon: float, k_max: int,
                       max_count: int = 1024) -> list[int]:
    """Increasing n <= k_max with |lam^n - 1| < epsilon for all inputs at once.

    Exhaustive chunked scan; an empty result is a valid answer and the caller
    raises k_max. The returned list is capped at ``max_count`` entries.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    lams = np.asarray(peripheral_eigenvalues, dtype=complex).reshape(-1)
    if np.abs(np.abs(lams) - 1.0).max(initial=0.0) > 1e-9:
        raise ValueError("peripheral eigenvalues must be unimodular")
    phases = np.angle(lams[np.abs(lams - 1.0) > 1e-15])
    if phases.size == 0:
        return list(range(1, min(k_max, max_count) + 1))
    fracs = np.unique(np.mod(phases / (2.0 * np.pi), 1.0))
    # |e^{2 pi i t} - 1| = 2 sin(pi * dist(t, Z)) < eps  <=>  dist < dmax
    dmax = math.asin(min(epsilon, 2.0) / 2.0) / math.pi if epsilon < 2.0 else 0.5

    hits: list[int] = []
    chunk = 1_000_000
    start = 1
    while start <= k_max and len(hits) < max_count:
        stop = min(k_max, start + chunk - 1)
        n = np.arange(start, stop + 1, dtype=np.float64)
        ok = np.ones(n.size, dtype=bool)
        for f in fracs:
            y = np.mod(n * f, 1.0)
            ok &= np.minimum(y, 1.0 - y) < dmax
        found = np.nonzero(ok)[0]
        for i in found:
            hits.append(int(start + i))
            if len(hits) >= max_count:
                break
        start = stop + 1
    return hits


@dataclass(frozen=True)
class PowerLimitReport:
    """Deviation of S^n from its peripheral part along a subsequence.

    ``adjusted`` deviations compare against sum_c lambda_c^n P_c (residual
    peripheral phases accounted for); ``plain`` deviations compare against Q
    itself and are bounded by eps * (peripheral count) + c * sub_radius^n for
    a Kuperberg subsequence. Frobenius norms throughout.
    """

    curve: tuple               # of (n, plain, adjusted) triples
    largest_n: int
    plain_at_largest: float
    adjusted_at_largest: float
    best_plain: float
    best_adjusted: float
    sub_radius: float

    def to_dict(self) -> dict:
        return {
            "curve": [
                {"n": n, "plain": p, "adjusted": a} for (n, p, a) in self.curve
            ],
            "largest_n": self.largest_n,
            "plain_at_largest": self.plain_at_largest,
            "adjusted_at_largest": self.adjusted_at_largest,
            "best_plain": self.best_plain,
            "best_adjusted": self.best_adjusted,
            "sub_radius": self.sub_radius,
        }


def _evaluation_points(seq: list[int], limit: int = 12) -> list[int]:
    if len(seq) <= limit:
        return list(seq)
    pos = np.unique(np.geomspace(1, len(seq), num=limit).astype(int) - 1)
    return [seq[i] for i in pos]


def power_limit_check(ch: Channel, pd: PeripheralDecomposition,
                      seq: list[int], tol: float = 1e-8) -> PowerLimitReport:
    """Confirm S^{n_k} approaches the (phase-adjusted) peripheral part.

    Powers are computed by binary exponentiation of the superoperator,
    independently of the eigenvector route that produced Q.
    """
    if len(seq) == 0:
        raise ValueError("empty subsequence")
    s = ch.super.matrix
    q = pd.q.matrix
    points = sorted(set(_evaluation_points(seq)) | {seq[-1]})
    curve = []
    for n in points:
        sn = np.linalg.matrix_power(s, n)
        plain = float(np.linalg.norm(sn - q))
        adjusted = float(np.linalg.norm(sn - pd.adjusted_peripheral_power(n)))
        curve.append((int(n), plain, adjusted))
    largest = curve[-1]
    return PowerLimitReport(
        curve=tuple(curve),
        largest_n=largest[0],
        plain_at_largest=largest[1],
        adjusted_at_largest=largest[2],
        best_plain=min(c[1] for c in curve),
        best_adjusted=min(c[2] for c in curve),
        sub_radius=pd.sub_radius,
    )


def spectral_radius_complement(ch: Channel, pd: PeripheralDecomposition,
                               iterations: int = 200) -> float:
    """Power-iteration estimate of the spectral radius of S (1 - Q)."""
    rng = np.random.default_rng(0)
    m = ch.super.matrix @ (np.eye(pd.q.matrix.shape[0]) - pd.q.matrix)
    v = rng.standard_normal(m.shape[0]) + 1j * rng.standard_normal(m.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iterations):
        w = m @ v
        nrm = np.linalg.norm(w)
        if nrm < 1e-300:
            return 0.0
        lam = nrm
        v = w / nrm
    return float(lam)
