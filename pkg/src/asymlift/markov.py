"""Exact cyclic structure and spectral asymptotics of stochastic matrices.

The combinatorics (irreducibility, period, cyclic classes, block-cyclic
normal form) are integer BFS/gcd computations on the support digraph and do
not depend on eigenvalue tolerances. Spectral objects (the unimodular
spectrum, the limit idempotent Q, decay rates) come on top and are always
cross-checked against an independent route.

Class labelling: ``classes[j]`` follows the trajectory of the chain (mass in
class j moves to class j+1), which makes the relabelled matrix block-cyclic
with superdiagonal blocks. The projections with P(e_j) = e_{j+1} under the
action on column vectors are the same classes in reversed cyclic order; the
lift stores them in that order.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from .errors import DimensionError, InternalInconsistencyError, ValidationError
from .lift import DecayCertificate, _decay_certificate_from_curve, _roundoff_floor
from .spectral import peripheral_projection

TOL_ROW = 1e-12
_CLAMP_FLOOR = -1e-14


@dataclass(frozen=True)
class StochasticMatrix:
    """Row-stochastic matrix; tiny negative entries are clamped with a warning."""

    p: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.p, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"stochastic matrix must be square, got {m.shape}")
        if m.min() < _CLAMP_FLOOR:
            raise ValidationError(f"negative entry {m.min():.3e}")
        if m.min() < 0:
            warnings.warn("clamping tiny negative entries to 0", stacklevel=2)
            m = np.clip(m, 0.0, None)
        row_err = float(np.abs(m.sum(axis=1) - 1.0).max())
        if row_err > TOL_ROW:
            raise ValidationError(f"rows sum to 1 only within {row_err:.3e}")
        m = np.array(m)
        m.setflags(write=False)
        object.__setattr__(self, "p", m)

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def support(self) -> np.ndarray:
        return self.p > 0.0


@dataclass(frozen=True)
class CyclicStructure:
    """Irreducibility, period, ordered cyclic classes, and the normal form.

    For reducible input, ``terminal_components`` carries one substructure per
    closed communicating class (on the submatrix) and the top-level period /
    classes / blocks are absent.
    """

    irreducible: bool
    n: int
    period: int | None = None
    classes: tuple | None = None          # tuple of tuples of state indices
    permutation: tuple | None = None      # sigma listing states class by class
    blocks: tuple | None = None           # C_0 ... C_{k-1}
    components: tuple = ()                # all strongly connected components
    terminal_components: tuple = ()       # of (states, CyclicStructure)
    transient_states: tuple = ()

    def to_dict(self) -> dict:
        out = {"irreducible": self.irreducible, "n": self.n}
        if self.irreducible:
            out.update({
                "period": self.period,
                "classes": [list(c) for c in self.classes],
                "permutation": list(self.permutation),
                "blocks": [np.asarray(b).tolist() for b in self.blocks],
            })
        else:
            out["components"] = [list(c) for c in self.components]
            out["transient_states"] = list(self.transient_states)
            out["terminal_components"] = [
                {"states": list(states), "structure": cs.to_dict()}
                for states, cs in self.terminal_components
            ]
        return out


def _bfs_levels(support: np.ndarray, root: int) -> np.ndarray:
    n = support.shape[0]
    level = np.full(n, -1, dtype=int)
    level[root] = 0
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.nonzero(support[u])[0]:
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(int(v))
        frontier = nxt
    return level


def _analyze_irreducible(p: np.ndarray) -> CyclicStructure:
    n = p.shape[0]
    support = p > 0.0
    level = _bfs_levels(support, 0)
    # gcd over all support edges of level(u) + 1 - level(v); exact integers.
    k = 0
    us, vs = np.nonzero(support)
    for u, v in zip(us, vs):
        k = math.gcd(k, int(level[u]) + 1 - int(level[v]))
    k = abs(k) if k != 0 else 1
    classes = tuple(
        tuple(int(s) for s in np.nonzero(level % k == j)[0]) for j in range(k)
    )
    perm = tuple(s for cls in classes for s in cls)
    pp = p[np.ix_(perm, perm)]
    sizes = [len(c) for c in classes]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    blocks = []
    for j in range(k):
        rows = slice(offsets[j], offsets[j + 1])
        jn = (j + 1) % k
        cols = slice(offsets[jn], offsets[jn + 1])
        blocks.append(pp[rows, cols])
    # Off-pattern entries vanish identically: the gcd construction makes the
    # level arithmetic exact. Verified all the same.
    mask = np.ones_like(pp, dtype=bool)
    for j in range(k):
        jn = (j + 1) % k
        mask[offsets[j]:offsets[j + 1], offsets[jn]:offsets[jn + 1]] = False
    residual = float(np.abs(pp[mask]).max()) if mask.any() else 0.0
    if residual > 1e-12:
        raise InternalInconsistencyError(
            f"block-cyclic sparsity violated by {residual:.3e}"
        )
    return CyclicStructure(
        irreducible=True, n=n, period=k, classes=classes,
        permutation=perm, blocks=tuple(blocks),
    )


def analyze_structure(sm: StochasticMatrix) -> CyclicStructure:
    """Irreducibility, period, cyclic classes, and the block-cyclic form.

    Reducible matrices are analyzed per terminal strongly connected component
    (relative to the component submatrix, which is again stochastic); the
    remaining states are reported as transient.
    """
    p = sm.p
    n = sm.n
    graph = scipy.sparse.csr_matrix(sm.support().astype(np.int8))
    n_comp, labels = connected_components(graph, directed=True, connection="strong")
    if n_comp == 1:
        return _analyze_irreducible(p)

    support = sm.support()
    components = []
    terminal = []
    transient: list[int] = []
    for c in range(n_comp):
        states = np.nonzero(labels == c)[0]
        components.append(tuple(int(s) for s in states))
        outside = support[np.ix_(states, np.setdiff1d(np.arange(n), states))]
        if outside.any():
            transient.extend(int(s) for s in states)
        else:
            sub = p[np.ix_(states, states)]
            terminal.append((tuple(int(s) for s in states),
                             _analyze_irreducible(sub)))
    components.sort(key=lambda t: t[0])
    terminal.sort(key=lambda t: t[0][0])
    return CyclicStructure(
        irreducible=False, n=n,
        components=tuple(components),
        terminal_components=tuple(terminal),
        transient_states=tuple(sorted(transient)),
    )


@dataclass(frozen=True)
class PeripheralSpectrumReport:
    period: int
    unimodular: tuple            # computed unimodular eigenvalues, sorted
    max_root_distance: float     # Hausdorff-style match against k-th roots
    all_simple: bool
    sub_radius: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "unimodular": [[z.real, z.imag] for z in self.unimodular],
            "max_root_distance": self.max_root_distance,
            "all_simple": self.all_simple,
            "sub_radius": self.sub_radius,
            "passed": self.passed,
        }


def peripheral_spectrum_check(sm: StochasticMatrix, cs: CyclicStructure,
                              tol: float = 1e-8) -> PeripheralSpectrumReport:
    """Assert the unimodular spectrum is exactly the k-th roots of unity.

    Hard failure on violation: for an irreducible stochastic matrix this is a
    theorem, so a mismatch means a numerical fault or missed reducibility.
    """
    if not cs.irreducible:
        raise ValueError("peripheral spectrum check requires an irreducible matrix")
    k = cs.period
    eigs = np.linalg.eigvals(sm.p)
    peripheral_mask = np.abs(eigs) > 1.0 - 1e-9
    unimod = eigs[peripheral_mask]
    others = eigs[~peripheral_mask]
    sub_radius = float(np.abs(others).max()) if others.size else 0.0
    roots = np.exp(2j * np.pi * np.arange(k) / k)
    if unimod.size != k:
        raise InternalInconsistencyError(
            f"{unimod.size} unimodular eigenvalues for period {k}"
        )
    dist = float(max(np.abs(unimod[:, None] - roots[None, :]).min(axis=1).max(),
                     np.abs(roots[:, None] - unimod[None, :]).min(axis=1).max()))
    all_simple = True
    for r in roots:
        if np.sum(np.abs(unimod - r) <= tol) != 1:
            all_simple = False
    passed = dist <= tol and all_simple
    if not passed:
        raise InternalInconsistencyError(
            f"unimodular spectrum does not match the {k}-th roots of unity "
            f"(distance {dist:.3e}, simple={all_simple})"
        )
    order = np.lexsort((np.mod(np.angle(unimod), 2 * np.pi), -np.abs(unimod)))
    return PeripheralSpectrumReport(
        period=k,
        unimodular=tuple(complex(z) for z in unimod[order]),
        max_root_distance=dist,
        all_simple=all_simple,
        sub_radius=sub_radius,
        passed=True,
    )


@dataclass(frozen=True)
class MarkovLift:
    """Cyclic projections, shift, and the limit idempotent of an irreducible chain."""

    n: int
    period: int
    e_projections: tuple          # 0/1 vectors with P e_j = e_{j+1 mod k}
    alpha: np.ndarray             # k x k cyclic shift on span{e_j}
    q: np.ndarray                 # n x n limit idempotent
    sub_radius: float
    route_disagreement: float     # spectral vs iterative Q

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "period": self.period,
            "e_projections": [np.asarray(e).tolist() for e in self.e_projections],
            "alpha": np.asarray(self.alpha).tolist(),
            "q": np.asarray(self.q).tolist(),
            "sub_radius": self.sub_radius,
            "route_disagreement": self.route_disagreement,
        }


def _iterative_idempotent(p: np.ndarray, k: int, tol: float = 1e-12,
                          max_doublings: int = 60) -> np.ndarray:
    """Limit of P^k, P^2k, P^4k, ... by repeated squaring."""
    b = np.linalg.matrix_power(p, k)
    for _ in range(max_doublings):
        b2 = b @ b
        if float(np.abs(b2 - b).max()) < tol:
            return b2
        b = b2
    return b


def build_markov_lift(sm: StochasticMatrix, cs: CyclicStructure) -> MarkovLift:
    """Cyclic projections e_j, the shift alpha, and the doubly-computed Q."""
    if not cs.irreducible:
        raise ValueError("the Markov lift requires an irreducible matrix")
    p = sm.p
    n, k = sm.n, cs.period

    # P e_j = e_{j+1}: the action on indicators runs through the classes in
    # reversed cyclic order, so e_j is the indicator of classes[-j mod k].
    e = []
    for j in range(k):
        cls = cs.classes[(-j) % k]
        v = np.zeros(n)
        v[list(cls)] = 1.0
        e.append(v)
    worst = max(
        float(np.abs(p @ e[j] - e[(j + 1) % k]).max()) for j in range(k)
    )
    if worst > 10 * TOL_ROW:
        raise InternalInconsistencyError(
            f"P does not permute the class indicators (residual {worst:.3e})"
        )

    alpha = np.zeros((k, k))
    for j in range(k):
        alpha[(j + 1) % k, j] = 1.0

    reps, mults, projectors, sub_radius = peripheral_projection(
        p, tol_per=1e-9, tol_cluster=1e-8
    )
    q_spectral = np.real_if_close(sum(projectors), tol=1e6)
    q_iter = _iterative_idempotent(p, k)
    disagreement = float(np.abs(q_spectral - q_iter).max())
    if disagreement > 1e-8:
        raise InternalInconsistencyError(
            f"spectral and iterative limit idempotents differ by {disagreement:.3e}"
        )
    q = np.real(q_spectral)
    idem = float(np.abs(q @ q - q).max())
    comm = float(np.abs(q @ p - p @ q).max())
    if idem > 1e-10 or comm > 1e-10:
        raise InternalInconsistencyError(
            f"limit idempotent residuals too large (Q^2-Q {idem:.2e}, [Q,P] {comm:.2e})"
        )

    # range(Q) must be the span of the class indicators.
    e_mat = np.stack(e, axis=1)
    coeff, *_ = np.linalg.lstsq(e_mat, q, rcond=None)
    range_res = float(np.abs(e_mat @ coeff - q).max())
    if np.linalg.matrix_rank(q, tol=1e-8) != k or range_res > 1e-8:
        raise InternalInconsistencyError("range of Q is not the span of the e_j")

    return MarkovLift(
        n=n, period=k, e_projections=tuple(e), alpha=alpha, q=q,
        sub_radius=sub_radius, route_disagreement=disagreement,
    )


def markov_decay_certificate(sm: StochasticMatrix, ml: MarkovLift,
                             n_max: int = 200, margin: float = 1e-6) -> DecayCertificate:
    """Pointwise certificate ||P^n - A^n Q|| <= c r^n in the max-row-sum norm.

    A is P restricted to range(Q) extended by zero, i.e. A = P Q, so
    A^n Q = P^n Q and the curve measures the transient part P^n (1 - Q).
    """
    p, q = sm.p, ml.q
    a = p @ q
    curve = np.empty(n_max)
    pk = np.array(p)
    ak = np.array(q)
    for n in range(1, n_max + 1):
        ak = a @ ak if n > 1 else a
        pk = p @ pk if n > 1 else p
        curve[n - 1] = float(np.abs(pk - ak).sum(axis=1).max())
    return _decay_certificate_from_curve(
        curve, ml.sub_radius, margin, "max-row-sum",
        noise_floor=_roundoff_floor(n_max, sm.n),
    )


def random_cyclic_stochastic(rng: np.random.Generator, n: int, k: int,
                             scramble: bool = True) -> np.ndarray:
    """Random irreducible stochastic matrix with period exactly k.

    Built from strictly positive blocks on a block-cyclic pattern (positive
    blocks force irreducibility and pin the period), then optionally hidden
    behind a random relabelling.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    sizes = np.full(k, 1)
    for _ in range(n - k):
        sizes[rng.integers(k)] += 1
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    p = np.zeros((n, n))
    for j in range(k):
        jn = (j + 1) % k
        block = rng.uniform(0.1, 1.0, size=(sizes[j], sizes[jn]))
        block /= block.sum(axis=1, keepdims=True)
        p[offsets[j]:offsets[j + 1], offsets[jn]:offsets[jn + 1]] = block
    if scramble:
        perm = rng.permutation(n)
        p = p[np.ix_(perm, perm)]
    return p
