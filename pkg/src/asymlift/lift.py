"""The asymptotic lift (N, alpha, E) of a finite-dimensional UCP map.

N is the span of the peripheral eigen-operators, carried as an adjoint-closed
trace-orthonormal basis with the normalized identity in front. The product on
N is the Choi-Effros multiplication x o y = Q(xy) through the peripheral
idempotent Q, alpha is the matrix of the map restricted to N, and E assembles
coordinates back into ambient operators (the inclusion).

Functional norms over the unit ball of N are evaluated as trace norms of the
predual of Q applied to the pairing matrix: Q is a UCP idempotent onto N, so
Q(ball M) = ball N and the inner optimization over ball N collapses. The same
shortcut powers the hierarchy-level checks with Q replaced by id_n (x) Q.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import (
    Channel,
    Superoperator,
    amplify,
    predual_matrix,
    validate,
)
from .config import Config, DEFAULT_CONFIG
from .errors import (
    AlgebraAxiomError,
    InternalInconsistencyError,
    QRangeMismatchError,
    ValidationError,
)
from .operators import (
    assemble,
    coords_in_basis,
    hermitian_basis,
    operator_norm,
    span_residual,
    trace_norm,
    unvec,
    vec,
)
from .sampling import pairing_matrices
from .spectral import PeripheralDecomposition, SpectralData, eigendecompose, peripheral

_FULL_AXIOM_DIM_CAP = 32   # full basis-triple checks up to this algebra dimension
_AXIOM_SAMPLES = 64


@dataclass(frozen=True)
class OperatorSubsystem:
    """An adjoint-closed unital subspace of M_d with a trace-orthonormal basis.

    Basis elements are Hermitian, so closure under adjoints is manifest; the
    identity is basis[0] * sqrt(d).
    """

    ambient_dim: int
    basis: tuple                      # Hermitian d x d matrices
    identity_coords: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, x) -> np.ndarray:
        return coords_in_basis(x, self.basis)

    def assemble(self, coords) -> np.ndarray:
        return assemble(coords, self.basis)

    def adjoint_coords(self, coords) -> np.ndarray:
        # x = sum a_i h_i with Hermitian h_i, so x* has coordinates conj(a).
        return np.conj(np.asarray(coords))

    def basis_matrix(self) -> np.ndarray:
        """d^2 x m matrix whose columns are vec(h_i); the matrix of E."""
        return np.stack([vec(h) for h in self.basis], axis=1)


def build_subsystem(pd: PeripheralDecomposition,
                    config: Config = DEFAULT_CONFIG) -> OperatorSubsystem:
    """Orthonormal Hermitian basis of the span of the peripheral eigenspaces."""
    d = pd.dim
    span_ops = []
    for proj in pd.cluster_projectors:
        u, sv, _ = np.linalg.svd(proj)
        rank = int(np.sum(sv > 0.5))   # idempotent: singular values near 1 or 0
        for i in range(rank):
            span_ops.append(unvec(u[:, i], d))
    basis = hermitian_basis(span_ops, d, tol=config.tol_span, seed_identity=True)
    if len(basis) != pd.peripheral_count:
        raise InternalInconsistencyError(
            f"peripheral span has dimension {len(basis)} but "
            f"{pd.peripheral_count} peripheral eigenvalues; the span is not "
            "adjoint-closed/unital, so the input channel is not a valid UCP map"
        )
    for op in span_ops:
        if span_residual(op, basis) > config.tol_span * max(1.0, float(np.linalg.norm(op))):
            raise InternalInconsistencyError(
                "peripheral eigenvector escapes the Hermitian basis span"
            )
    identity_coords = coords_in_basis(np.eye(d), basis)
    return OperatorSubsystem(ambient_dim=d, basis=tuple(basis),
                             identity_coords=identity_coords)


@dataclass(frozen=True)
class ChoiEffrosAlgebra:
    """N with the multiplication x o y = Q(xy) in structure-constant form."""

    system: OperatorSubsystem
    structure_constants: np.ndarray     # c[i, j, k]: h_i o h_j = sum_k c_ijk h_k
    unit_coords: np.ndarray
    residuals: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.system.dim

    def product(self, a, b) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(a), np.asarray(b),
                         self.structure_constants)

    def left_multiplication(self, a) -> np.ndarray:
        """Matrix of y -> a o y on coordinates; a faithful unital representation."""
        return np.einsum("i,ijk->kj", np.asarray(a), self.structure_constants)

    def right_multiplication(self, a) -> np.ndarray:
        return np.einsum("j,ijk->ki", np.asarray(a), self.structure_constants)

    def abstract_norm(self, a) -> float:
        """C*-norm from the left regular representation: sqrt(rho(a* o a))."""
        sq = self.product(self.system.adjoint_coords(a), a)
        eigs = np.linalg.eigvals(self.left_multiplication(sq))
        return float(np.sqrt(max(0.0, np.abs(eigs).max())))


def choi_effros(ns: OperatorSubsystem, q: Superoperator,
                config: Config = DEFAULT_CONFIG,
                rng: np.random.Generator | None = None) -> ChoiEffrosAlgebra:
    """Structure constants of x o y = Q(xy) on the given basis, fully verified.

    Raises :class:`QRangeMismatchError` when Q maps a product outside span(N)
    and :class:`AlgebraAxiomError` when associativity, involution, unit, or
    the sampled C*-identity fail at tolerance.
    """
    basis = ns.basis
    m = len(basis)
    d = ns.ambient_dim
    c = np.zeros((m, m, m), dtype=complex)
    worst_span = 0.0
    for i in range(m):
        for j in range(m):
            prod = q.apply(basis[i] @ basis[j])
            cij = coords_in_basis(prod, basis)
            resid = float(np.linalg.norm(prod - assemble(cij, basis)))
            worst_span = max(worst_span, resid)
            c[i, j] = cij
    if worst_span > config.tol_span:
        raise QRangeMismatchError(
            f"Q(x y) leaves span(N) by {worst_span:.3e} > tol_span"
        )

    residuals = {"span": worst_span}

    if m <= _FULL_AXIOM_DIM_CAP:
        t1 = np.einsum("ijp,pkl->ijkl", c, c)
        t2 = np.einsum("jkp,ipl->ijkl", c, c)
        assoc = float(np.abs(t1 - t2).max())
    else:
        rng_local = rng or config.rng()
        assoc = 0.0
        alg = ChoiEffrosAlgebra(ns, c, ns.identity_coords)
        for _ in range(_AXIOM_SAMPLES):
            x, y, z = (rng_local.standard_normal(m) + 1j * rng_local.standard_normal(m)
                       for _ in range(3))
            lhs = alg.product(alg.product(x, y), z)
            rhs = alg.product(x, alg.product(y, z))
            scale = max(1.0, np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z))
            assoc = max(assoc, float(np.abs(lhs - rhs).max()) / scale)
    residuals["associativity"] = assoc
    if assoc > config.tol_alg:
        raise AlgebraAxiomError(f"associativity residual {assoc:.3e} > tol_alg")

    # (x o y)* = y* o x*; with a Hermitian basis this reads conj(c_ijk) = c_jik.
    invol = float(np.abs(np.conj(c) - np.transpose(c, (1, 0, 2))).max())
    residuals["involution"] = invol
    if invol > config.tol_alg:
        raise AlgebraAxiomError(f"involution residual {invol:.3e} > tol_alg")

    u = ns.identity_coords
    unit_res = max(
        float(np.abs(np.einsum("i,ijk->jk", u, c) - np.eye(m)).max()),
        float(np.abs(np.einsum("j,ijk->ik", u, c) - np.eye(m)).max()),
    )
    residuals["unit"] = unit_res
    if unit_res > config.tol_alg:
        raise AlgebraAxiomError(f"unit residual {unit_res:.3e} > tol_alg")

    alg = ChoiEffrosAlgebra(ns, c, u, residuals)

    rng_local = rng or config.rng()
    cstar = 0.0
    for _ in range(min(_AXIOM_SAMPLES, 16 + 2 * m)):
        a = rng_local.standard_normal(m) + 1j * rng_local.standard_normal(m)
        x = ns.assemble(a)
        nrm = operator_norm(x)
        if nrm < 1e-12:
            continue
        a = a / nrm
        sq = alg.product(ns.adjoint_coords(a), a)
        cstar = max(cstar, abs(operator_norm(ns.assemble(sq)) - 1.0))
    residuals["cstar_identity"] = cstar
    if cstar > config.tol_alg:
        raise AlgebraAxiomError(f"C*-identity residual {cstar:.3e} > tol_alg")

    return ChoiEffrosAlgebra(ns, c, u, residuals)


@dataclass(frozen=True)
class AsymptoticLift:
    """(N, alpha, E) with N in Choi-Effros form and E the inclusion."""

    algebra: ChoiEffrosAlgebra
    alpha: np.ndarray                 # m x m, action of the map on coordinates
    q: Superoperator
    peripheral: PeripheralDecomposition
    residuals: dict = field(default_factory=dict)

    @property
    def subsystem(self) -> OperatorSubsystem:
        return self.algebra.system

    @property
    def dim_n(self) -> int:
        return self.algebra.dim

    def embed(self, coords) -> np.ndarray:
        """E: coordinates of N -> ambient operator."""
        return self.subsystem.assemble(coords)

    def e_matrix(self) -> np.ndarray:
        return self.subsystem.basis_matrix()

    def alpha_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.alpha)

    def fixed_coords_basis(self, tol: float = 1e-8) -> np.ndarray:
        """Orthonormal basis (columns) of ker(alpha - 1) in coordinates."""
        m = self.alpha.shape[0]
        _, sv, vh = np.linalg.svd(self.alpha - np.eye(m))
        null_mask = sv <= tol
        return vh[null_mask].conj().T


def _alpha_matrix(ch: Channel, ns: OperatorSubsystem, config: Config) -> np.ndarray:
    m = ns.dim
    a = np.zeros((m, m), dtype=complex)
    worst = 0.0
    for i, h in enumerate(ns.basis):
        lh = ch.apply(h)
        a[:, i] = coords_in_basis(lh, ns.basis)
        worst = max(worst, float(np.linalg.norm(lh - assemble(a[:, i], ns.basis))))
    if worst > config.tol_span:
        raise InternalInconsistencyError(
            f"N is not invariant under the map (residual {worst:.3e})"
        )
    return a


def build_lift(ch: Channel, config: Config = DEFAULT_CONFIG,
               spectral_data: SpectralData | None = None,
               basis_permutation=None) -> AsymptoticLift:
    """Construct and verify the asymptotic lift of a validated UCP channel.

    ``basis_permutation`` reorders the peripheral span generators before
    orthonormalization; lifts built with different orderings must agree up to
    the canonical isomorphism (same span, conjugate structure).
    """
    report = validate(ch, config.tol_psd, config.tol_herm)
    if not report.ok:
        raise ValidationError("build_lift requires a validated UCP channel")
    sd = spectral_data if spectral_data is not None else eigendecompose(ch.super, config)
    pd = peripheral(sd, config=config)

    # For UCP input the limit idempotent is itself a UCP map.
    from .channels import choi_of_superoperator

    q_choi = choi_of_superoperator(pd.q)
    q_min_eig = float(np.linalg.eigvalsh((q_choi + q_choi.conj().T) / 2.0).min())
    q_unital = float(np.abs(pd.q.apply(np.eye(pd.dim)) - np.eye(pd.dim)).max())
    if q_min_eig < -config.tol_psd * 10 or q_unital > config.tol_herm * 100:
        raise InternalInconsistencyError(
            f"peripheral idempotent is not UCP (choi min eig {q_min_eig:.2e}, "
            f"unitality residual {q_unital:.2e})"
        )

    ns = build_subsystem(pd, config)
    if basis_permutation is not None:
        perm = list(basis_permutation)
        if sorted(perm) != list(range(ns.dim)):
            raise ValueError("basis_permutation must permute range(dim N)")
        reordered = [ns.basis[i] for i in perm]
        basis = hermitian_basis(reordered, ns.ambient_dim, tol=config.tol_span,
                                seed_identity=True)
        if len(basis) != ns.dim:
            raise InternalInconsistencyError("permuted basis changed the span")
        ns = OperatorSubsystem(ns.ambient_dim, tuple(basis),
                               coords_in_basis(np.eye(ns.ambient_dim), basis))

    algebra = choi_effros(ns, pd.q, config)
    alpha = _alpha_matrix(ch, ns, config)

    residuals = _verify_lift_invariants(ch, ns, algebra, alpha, config)
    residuals.update(algebra.residuals)
    return AsymptoticLift(algebra=algebra, alpha=alpha, q=pd.q,
                          peripheral=pd, residuals=residuals)


def _verify_lift_invariants(ch: Channel, ns: OperatorSubsystem,
                            algebra: ChoiEffrosAlgebra, alpha: np.ndarray,
                            config: Config) -> dict:
    m = ns.dim
    res: dict = {}

    # Equivariance E o alpha = L o E on the basis.
    equiv = max(
        float(np.linalg.norm(ns.assemble(alpha[:, i]) - ch.apply(ns.basis[i])))
        for i in range(m)
    )
    res["equivariance"] = equiv
    if equiv > config.tol_alg:
        raise InternalInconsistencyError(f"equivariance residual {equiv:.3e}")

    # alpha invertible with well-behaved inverse.
    sv = np.linalg.svd(alpha, compute_uv=False)
    res["alpha_min_singular_value"] = float(sv.min())
    if sv.min() < 1e-8:
        raise InternalInconsistencyError("alpha is numerically singular on N")
    alpha_inv = np.linalg.inv(alpha)

    # alpha is a *-automorphism for the Choi-Effros product.
    c = algebra.structure_constants
    lhs = np.einsum("ijp,kp->ijk", c, alpha)                  # alpha(h_i o h_j)
    rhs = np.einsum("pi,qj,pqk->ijk", alpha, alpha, c)        # alpha(h_i) o alpha(h_j)
    mult = float(np.abs(lhs - rhs).max())
    res["alpha_multiplicative"] = mult
    if mult > config.tol_alg * 10:
        raise InternalInconsistencyError(f"alpha fails multiplicativity by {mult:.3e}")
    star = float(np.abs(np.conj(alpha) - alpha).max())  # alpha(x*) = alpha(x)* on Hermitian basis
    res["alpha_star"] = star

    # alpha isometric on N in the inherited operator norm (sampled).
    rng = config.rng()
    iso = 0.0
    for _ in range(16):
        a = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        na = operator_norm(ns.assemble(a))
        if na < 1e-12:
            continue
        iso = max(iso, abs(operator_norm(ns.assemble(alpha @ a)) - na) / na)
        iso = max(iso, abs(operator_norm(ns.assemble(alpha_inv @ a)) - na) / na)
    res["alpha_isometry"] = iso
    if iso > 100 * config.tol_alg:
        raise InternalInconsistencyError(f"alpha is not isometric on N ({iso:.3e})")

    # Nondegeneracy: joint kernel of {E o alpha^{-n}: 0 <= n <= m} is zero.
    e_mat = ns.basis_matrix()
    blocks = []
    power = np.eye(m, dtype=complex)
    for _ in range(m + 1):
        blocks.append(e_mat @ power)
        power = power @ alpha_inv
    stacked = np.vstack(blocks)
    smin = float(np.linalg.svd(stacked, compute_uv=False).min())
    res["nondegeneracy_min_singular_value"] = smin
    if smin < 1e-10:
        raise InternalInconsistencyError("joint kernel of E o alpha^{-n} is nonzero")

    return res


# -- hierarchy-level verification ------------------------------------------


def _q_channel(lift: AsymptoticLift, ch: Channel) -> Channel:
    return Channel(system=ch.system, super=lift.q, cp=True, unital=True)


@dataclass(frozen=True)
class LevelReport:
    level: int
    samples: int
    k_max: int
    max_gap: float
    tolerance: float
    monotonicity_violation: float
    empirical_rate: float | None
    passed: bool

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "samples": self.samples,
            "k_max": self.k_max,
            "max_gap": self.max_gap,
            "tolerance": self.tolerance,
            "monotonicity_violation": self.monotonicity_violation,
            "empirical_rate": self.empirical_rate,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class AsymptoticEqualityReport:
    levels: tuple
    passed: bool

    def to_dict(self) -> dict:
        return {"levels": [l.to_dict() for l in self.levels], "passed": self.passed}


def verify_asymptotic_equalities(ch: Channel, lift: AsymptoticLift,
                                 levels=(1, 2), k_max: int = 100,
                                 samples: int | None = None,
                                 tol: float = 1e-8,
                                 rate_constant: float = 10.0,
                                 config: Config = DEFAULT_CONFIG) -> AsymptoticEqualityReport:
    """Check the norm equalities behind the lift at the given hierarchy levels.

    For random functionals rho on M_n (x) M the non-increasing trace norms of
    the predual iterates must converge to the trace norm of the amplified
    predual of Q applied to rho, within tol + rate_constant * sub_radius^k.
    """
    samples = config.samples if samples is None else samples
    rng = config.rng()
    sub = lift.peripheral.sub_radius
    tol_total = tol + rate_constant * sub ** k_max
    out = []
    for n in levels:
        amp_l = amplify(ch, n, config)
        amp_q = amplify(_q_channel(lift, ch), n, config)
        tl = predual_matrix(amp_l.super)
        tq = predual_matrix(amp_q.super)
        nd = ch.dim * n
        max_gap = 0.0
        mono = 0.0
        rates: list[float] = []
        for f in pairing_matrices(rng, nd, samples):
            v = vec(f)
            target = trace_norm(unvec(tq @ v, nd))
            prev = trace_norm(f)
            gaps = []
            for _ in range(k_max):
                v = tl @ v
                cur = trace_norm(unvec(v, nd))
                mono = max(mono, cur - prev)
                gaps.append(abs(cur - target))
                prev = cur
            max_gap = max(max_gap, gaps[-1])
            tail = np.array(gaps)
            good = tail > 1e-14
            if good.sum() >= 5:
                ks = np.nonzero(good)[0]
                slope = np.polyfit(ks, np.log(tail[ks]), 1)[0]
                rates.append(float(np.exp(slope)))
        out.append(LevelReport(
            level=n,
            samples=samples,
            k_max=k_max,
            max_gap=max_gap,
            tolerance=tol_total,
            monotonicity_violation=mono,
            empirical_rate=float(np.median(rates)) if rates else None,
            passed=max_gap <= tol_total and mono <= 1e-10,
        ))
    return AsymptoticEqualityReport(levels=tuple(out),
                                    passed=all(l.passed for l in out))


# -- Poisson boundary --------------------------------------------------------


@dataclass(frozen=True)
class PoissonBoundaryReport:
    dim_fixed_space: int
    dim_fixed_algebra: int
    span_residual: float
    multiplicativity_residual: float
    norm_residual: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "dim_fixed_space": self.dim_fixed_space,
            "dim_fixed_algebra": self.dim_fixed_algebra,
            "span_residual": self.span_residual,
            "multiplicativity_residual": self.multiplicativity_residual,
            "norm_residual": self.norm_residual,
            "passed": self.passed,
        }


def poisson_boundary(ch: Channel, lift: AsymptoticLift,
                     config: Config = DEFAULT_CONFIG):
    """The fixed space H = ker(L - id) as a Choi-Effros algebra, plus the
    isomorphism check that E identifies the alpha-fixed subalgebra of N with H.

    Returns (algebra_on_H, report). A dimension mismatch is a hard failure:
    theory guarantees dim N^alpha = dim H for valid inputs.
    """
    pd = lift.peripheral
    d = pd.dim
    one_clusters = [i for i, lam in enumerate(pd.peripheral_eigenvalues)
                    if abs(lam - 1.0) <= config.tol_cluster * 10]
    if not one_clusters:
        raise InternalInconsistencyError("unital map with no fixed space")
    q_h = sum(pd.cluster_projectors[i] for i in one_clusters)
    dim_h = int(sum(pd.multiplicities[i] for i in one_clusters))

    u, sv, _ = np.linalg.svd(q_h)
    h_ops = [unvec(u[:, i], d) for i in range(int(np.sum(sv > 0.5)))]
    h_basis = hermitian_basis(h_ops, d, tol=config.tol_span, seed_identity=True)
    if len(h_basis) != dim_h:
        raise InternalInconsistencyError("fixed space basis dimension mismatch")
    h_system = OperatorSubsystem(d, tuple(h_basis),
                                 coords_in_basis(np.eye(d), h_basis))
    h_algebra = choi_effros(h_system, Superoperator(d, q_h), config)

    fixed = lift.fixed_coords_basis(tol=config.tol_alg)
    dim_fixed = fixed.shape[1]
    if dim_fixed != dim_h:
        raise InternalInconsistencyError(
            f"dim N^alpha = {dim_fixed} != dim H = {dim_h}: numerical fault"
        )

    # E maps N^alpha onto H: images must lie in span(H) and exhaust it.
    worst_span = 0.0
    images = []
    for i in range(dim_fixed):
        img = lift.embed(fixed[:, i])
        images.append(img)
        worst_span = max(worst_span, span_residual(img, h_basis))
    img_rank = np.linalg.matrix_rank(
        np.stack([vec(im) for im in images], axis=1), tol=1e-8
    ) if images else 0
    if img_rank != dim_h:
        raise InternalInconsistencyError("E(N^alpha) does not exhaust the fixed space")

    # Multiplicativity: Q(xy) = Q_H(xy) for x, y in N^alpha, and the abstract
    # C*-norm of N^alpha elements agrees with the ambient operator norm.
    rng = config.rng()
    mult_res = 0.0
    norm_res = 0.0
    q_mat = lift.q.matrix
    for _ in range(16):
        a = fixed @ (rng.standard_normal(dim_fixed) + 1j * rng.standard_normal(dim_fixed))
        b = fixed @ (rng.standard_normal(dim_fixed) + 1j * rng.standard_normal(dim_fixed))
        x, y = lift.embed(a), lift.embed(b)
        prod_n = unvec(q_mat @ vec(x @ y), d)
        prod_h = unvec(q_h @ vec(x @ y), d)
        scale = max(1.0, float(np.linalg.norm(x)) * float(np.linalg.norm(y)))
        mult_res = max(mult_res, float(np.linalg.norm(prod_n - prod_h)) / scale)
        nx = operator_norm(x)
        if nx > 1e-12:
            norm_res = max(norm_res, abs(lift.algebra.abstract_norm(a / nx) - 1.0))
    passed = (worst_span <= config.tol_alg and mult_res <= config.tol_alg
              and norm_res <= config.tol_alg)
    report = PoissonBoundaryReport(
        dim_fixed_space=dim_h,
        dim_fixed_algebra=dim_fixed,
        span_residual=worst_span,
        multiplicativity_residual=mult_res,
        norm_residual=norm_res,
        passed=passed,
    )
    return h_algebra, report


# -- inverse sequences -------------------------------------------------------


def inverse_sequence(lift: AsymptoticLift, coords, n_min: int, n_max: int) -> list[np.ndarray]:
    """The orbit x_n = E(alpha^{-n}(a)) for n in [n_min, n_max].

    Satisfies x_n = L(x_{n+1}) and sup_n ||x_n|| = ||a|| since alpha acts
    isometrically on N.
    """
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    a = np.asarray(coords, dtype=complex)
    alpha_inv = lift.alpha_inverse()
    start = np.linalg.matrix_power(alpha_inv, n_min) @ a if n_min >= 0 else \
        np.linalg.matrix_power(lift.alpha, -n_min) @ a
    out = []
    cur = start
    for _ in range(n_min, n_max + 1):
        out.append(lift.embed(cur))
        cur = alpha_inv @ cur
    return out


# -- decay certificate (general channel version) -----------------------------


@dataclass(frozen=True)
class DecayCertificate:
    """Constants (c, rate) with curve_n <= c * rate^n pointwise up to n_max.

    The certified ``rate`` is sub_radius + margin; ``c`` is fitted from the
    data as the smallest constant making the bound pointwise (with ``c_at_one``
    the value a fit at n = 1 alone would give). ``empirical_rate`` is a
    log-linear regression diagnostic over the clean part of the curve; it is 0
    when fewer than two samples rise above the noise floor. ``norm`` records
    which matrix norm the curve uses.
    """

    n_max: int
    curve: np.ndarray
    rate: float                # certified rate: sub_radius + margin
    c: float
    c_at_one: float
    empirical_rate: float
    fit_points: int
    sub_radius: float
    pointwise_ok: bool
    norm: str

    @property
    def certified(self) -> bool:
        return self.pointwise_ok

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "curve": [float(v) for v in self.curve],
            "rate": self.rate,
            "c": self.c,
            "c_at_one": self.c_at_one,
            "empirical_rate": self.empirical_rate,
            "fit_points": self.fit_points,
            "sub_radius": self.sub_radius,
            "pointwise_ok": self.pointwise_ok,
            "certified": self.certified,
            "norm": self.norm,
        }


_DECAY_NOISE_FLOOR = 1e-12   # minimal exact-zero threshold for curve values
_DECAY_FIT_FLOOR = 1e-9      # log-fit only above this (full float SNR)


def _roundoff_floor(n_max: int, side: int) -> float:
    # n_max iterated products of side x side matrices of norm O(1) accumulate
    # roundoff at about eps * n * side; values below that are numerical zero.
    return max(_DECAY_NOISE_FLOOR, 8.0 * np.finfo(float).eps * n_max * side)


def _decay_certificate_from_curve(curve: np.ndarray, sub_radius: float,
                                  margin: float, norm: str,
                                  noise_floor: float = _DECAY_NOISE_FLOOR) -> DecayCertificate:
    n_max = curve.size
    r = sub_radius + margin
    ns = np.arange(1, n_max + 1)
    positive = curve > noise_floor
    fitted = 0.0
    fit_points = 0
    if positive.any():
        with np.errstate(divide="ignore", over="ignore"):
            ratios = curve[positive] / r ** ns[positive].astype(float)
        c = float(ratios[np.isfinite(ratios)].max(initial=0.0))
        c_at_one = float(curve[0] / r) if curve[0] > noise_floor else 0.0
        # Regression over the later half of the samples that still carry full
        # floating-point signal; short transients leave nothing to fit.
        idx = np.nonzero(curve > _DECAY_FIT_FLOOR * max(1.0, float(curve.max())))[0]
        tail = idx[idx.size // 2:]
        fit_points = int(tail.size)
        if fit_points >= 2:
            slope = np.polyfit(ns[tail], np.log(curve[tail]), 1)[0]
            fitted = float(np.exp(slope))
    else:
        c, c_at_one = 0.0, 0.0
    with np.errstate(under="ignore"):
        bound = np.maximum(c * r ** ns.astype(float), noise_floor)
    # One-ulp slack: c is a ratio, so c * r^n re-rounds at its own argmax.
    pointwise = bool(np.all(curve <= bound * (1.0 + 1e-12)))
    return DecayCertificate(
        n_max=n_max, curve=curve, rate=r, c=c, c_at_one=c_at_one,
        empirical_rate=fitted, fit_points=fit_points, sub_radius=sub_radius,
        pointwise_ok=pointwise, norm=norm,
    )


def decay_certificate(ch: Channel, pd: PeripheralDecomposition,
                      n_max: int = 200, margin: float = 1e-6) -> DecayCertificate:
    """Frobenius-norm decay of S^n minus its phase-carrying peripheral part."""
    s = ch.super.matrix
    q = pd.q.matrix
    a = s @ q
    curve = np.empty(n_max)
    sk, ak = np.array(s), np.array(q)
    for n in range(1, n_max + 1):
        ak = a @ ak if n > 1 else a          # A^n Q
        sk = s @ sk if n > 1 else s          # S^n
        curve[n - 1] = np.linalg.norm(sk - ak)
    return _decay_certificate_from_curve(
        curve, pd.sub_radius, margin, "frobenius",
        noise_floor=_roundoff_floor(n_max, s.shape[0]),
    )


# -- user-supplied candidate lifts -------------------------------------------


@dataclass(frozen=True)
class CandidateLift:
    """A user-supplied triple: basis of N, alpha on coordinates, E images.

    ``images[i] = E(basis[i])``; omitting images means E is the inclusion.
    The basis need not be orthonormal or Hermitian.
    """

    basis: tuple
    alpha: np.ndarray
    images: tuple

    @classmethod
    def inclusion(cls, basis, alpha) -> "CandidateLift":
        ops = tuple(np.asarray(b, dtype=complex) for b in basis)
        return cls(basis=ops, alpha=np.asarray(alpha, dtype=complex), images=ops)

    @property
    def dim_n(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis[0].shape[0]

    @classmethod
    def trivial(cls, ambient_dim: int) -> "CandidateLift":
        one = np.eye(ambient_dim, dtype=complex)
        return cls(basis=(one,), alpha=np.eye(1, dtype=complex), images=(one,))

    @classmethod
    def from_built(cls, lift: AsymptoticLift) -> "CandidateLift":
        return cls.inclusion(lift.subsystem.basis, lift.alpha)


def _functional_norm_on_subsystem(f: np.ndarray, basis, images) -> float:
    """sup { |trace(F E(y))| : y in span(basis), ||y|| <= 1 }, an exact SDP.

    The ball is circled, so the modulus sup equals the real-part sup.
    """
    import cvxpy as cp

    d = basis[0].shape[0]
    m = len(basis)
    a = cp.Variable(m, complex=True)
    y = sum(a[i] * basis[i] for i in range(m))
    ey = sum(a[i] * images[i] for i in range(m))
    objective = cp.Maximize(cp.real(cp.trace(f @ ey)))
    problem = cp.Problem(objective, [cp.norm(y, 2) <= 1])
    problem.solve(solver=cp.CLARABEL)
    if problem.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"functional norm SDP failed: {problem.status}")
    return float(problem.value)


def _limit_predual_norm(ch: Channel, f: np.ndarray, k_cap: int = 500) -> float:
    t = predual_matrix(ch.super)
    v = vec(f)
    prev = trace_norm(f)
    for _ in range(k_cap):
        v = t @ v
        cur = trace_norm(unvec(v, ch.dim))
        if abs(prev - cur) < 1e-13:
            return cur
        prev = cur
    return prev


@dataclass(frozen=True)
class ReversibleLiftReport:
    clauses: dict
    details: dict
    passed: bool

    def to_dict(self) -> dict:
        return {"clauses": self.clauses, "details": self.details, "passed": self.passed}


def verify_reversible_lift(candidate: CandidateLift, ch: Channel,
                           config: Config = DEFAULT_CONFIG,
                           samples: int = 8, tol: float = 1e-6) -> ReversibleLiftReport:
    """Audit a candidate (N, alpha, E) against the channel.

    Checks: alpha is an order automorphism (invertible, both directions unital
    and positive on sampled PSD elements at hierarchy levels 1 and 2), E is
    UCP the same way, equivariance E o alpha = L o E, nondegeneracy via the
    joint kernel, and the norm inequality ||rho o E|| <= lim_k ||rho o L^k||
    on sampled functionals. The report lists each clause separately.
    """
    d = ch.dim
    m = candidate.dim_n
    basis = [np.asarray(b, dtype=complex) for b in candidate.basis]
    images = [np.asarray(b, dtype=complex) for b in candidate.images]
    alpha = np.asarray(candidate.alpha, dtype=complex)
    clauses: dict = {}
    details: dict = {}

    b_mat = np.stack([vec(b) for b in basis], axis=1)
    rank = np.linalg.matrix_rank(b_mat, tol=1e-10)
    clauses["basis_independent"] = bool(rank == m)

    # identity of N: solve for coordinates of 1 in the basis.
    one_coords, *_ = np.linalg.lstsq(b_mat, vec(np.eye(d)), rcond=None)
    unit_resid = float(np.linalg.norm(b_mat @ one_coords - vec(np.eye(d))))
    clauses["contains_identity"] = bool(unit_resid <= tol)
    details["identity_residual"] = unit_resid

    sv = np.linalg.svd(alpha, compute_uv=False)
    clauses["alpha_invertible"] = bool(sv.min() > 1e-10)
    alpha_inv = np.linalg.inv(alpha) if clauses["alpha_invertible"] else None

    img_mat = np.stack([vec(b) for b in images], axis=1)

    def _unital(mat_coords) -> float:
        return float(np.linalg.norm(mat_coords @ one_coords - one_coords))

    clauses["alpha_unital"] = bool(_unital(alpha) <= tol)
    clauses["alpha_inverse_unital"] = bool(
        alpha_inv is not None and _unital(alpha_inv) <= tol
    )
    e_unit_res = float(np.linalg.norm(img_mat @ one_coords - vec(np.eye(d))))
    clauses["e_unital"] = bool(e_unit_res <= tol)

    # N must be adjoint-closed for PSD sampling inside M_n(N) to make sense.
    star_res = max(
        float(np.linalg.norm(
            b_mat @ np.linalg.lstsq(b_mat, vec(b.conj().T), rcond=None)[0]
            - vec(b.conj().T)
        ))
        for b in basis
    )
    clauses["star_closed"] = bool(star_res <= tol)
    details["star_closure_residual"] = star_res

    # Sampled complete positivity at hierarchy levels 1 and 2: PSD elements of
    # M_n(N) are built as h - lambda_min(h) * 1 for random Hermitian h.
    rng = config.rng()

    def _sampled_positivity(op_map: np.ndarray) -> float:
        worst = 0.0
        for level in (1, 2):
            for _ in range(samples):
                w = np.zeros((level * d, level * d), dtype=complex)
                for i in range(level):
                    for j in range(level):
                        coeff = rng.standard_normal(m) + 1j * rng.standard_normal(m)
                        blk = np.zeros((level, level))
                        blk[i, j] = 1.0
                        w += np.kron(blk, unvec(b_mat @ coeff, d))
                w = (w + w.conj().T) / 2.0
                lam_min = float(np.linalg.eigvalsh(w).min())
                w_psd = w - lam_min * np.eye(level * d)
                scale = max(1.0, float(np.linalg.norm(w_psd, 2)))
                out = np.zeros_like(w_psd)
                for i in range(level):
                    for j in range(level):
                        block = w_psd[i * d:(i + 1) * d, j * d:(j + 1) * d]
                        coords, *_ = np.linalg.lstsq(b_mat, vec(block), rcond=None)
                        out[i * d:(i + 1) * d, j * d:(j + 1) * d] = unvec(
                            op_map @ coords, d
                        )
                worst = max(worst, -float(np.linalg.eigvalsh(
                    (out + out.conj().T) / 2.0).min()) / scale)
        return worst

    def _as_operator_map(mat_coords):
        # coordinates map -> operator map via the basis (not the images).
        return b_mat @ mat_coords

    alpha_pos = _sampled_positivity(_as_operator_map(alpha))
    clauses["alpha_positive"] = bool(alpha_pos <= tol)
    details["alpha_positivity_violation"] = alpha_pos
    if alpha_inv is not None:
        inv_pos = _sampled_positivity(_as_operator_map(alpha_inv))
        clauses["alpha_inverse_positive"] = bool(inv_pos <= tol)
        details["alpha_inverse_positivity_violation"] = inv_pos
    else:
        clauses["alpha_inverse_positive"] = False
    e_pos = _sampled_positivity(img_mat)
    clauses["e_positive"] = bool(e_pos <= tol)
    details["e_positivity_violation"] = e_pos

    # Equivariance E o alpha = L o E.
    equiv = max(
        float(np.linalg.norm(unvec(img_mat @ alpha[:, i], d) - ch.apply(images[i])))
        for i in range(m)
    )
    clauses["equivariant"] = bool(equiv <= tol)
    details["equivariance_residual"] = equiv

    # Nondegeneracy via the joint kernel of E o alpha^{-n}.
    if alpha_inv is not None:
        blocks = []
        power = np.eye(m, dtype=complex)
        for _ in range(m + 1):
            blocks.append(img_mat @ power)
            power = power @ alpha_inv
        smin = float(np.linalg.svd(np.vstack(blocks), compute_uv=False).min())
        clauses["nondegenerate"] = bool(smin > 1e-10)
        details["nondegeneracy_min_singular_value"] = smin
    else:
        clauses["nondegenerate"] = False

    # Norm inequality on sampled functionals.
    gaps = []
    worst = -np.inf
    for f in pairing_matrices(rng, d, samples):
        lhs = _functional_norm_on_subsystem(f, basis, images)
        rhs = _limit_predual_norm(ch, f)
        gaps.append({"e_norm": lhs, "limit": rhs})
        worst = max(worst, lhs - rhs)
    clauses["norm_inequality"] = bool(worst <= tol)
    details["norm_inequality_max_violation"] = float(worst)
    details["norm_samples"] = gaps

    return ReversibleLiftReport(
        clauses=clauses, details=details, passed=all(clauses.values())
    )


# -- Wedderburn decomposition -------------------------------------------------


@dataclass(frozen=True)
class WedderburnDecomposition:
    block_dims: tuple
    center_dim: int
    warning: str | None

    @property
    def ok(self) -> bool:
        return self.warning is None

    def to_dict(self) -> dict:
        return {
            "block_dims": list(self.block_dims),
            "center_dim": self.center_dim,
            "warning": self.warning,
        }


def wedderburn(alg: ChoiEffrosAlgebra, config: Config = DEFAULT_CONFIG,
               rng: np.random.Generator | None = None) -> WedderburnDecomposition:
    """Numerical block decomposition of a finite-dimensional C*-algebra.

    Finds the center as the joint kernel of left-minus-right multiplications,
    splits it with a random self-adjoint central element, and reads block
    dimensions off the ranks of the corner maps y -> p o y o p.
    """
    c = alg.structure_constants
    m = alg.dim
    rng = rng or config.rng()

    # Center: a with sum_i a_i (c[i,j,k] - c[j,i,k]) = 0 for all j, k. Solve
    # over the reals so the basis stays Hermitian (real coordinates).
    k_mat = (np.transpose(c, (1, 2, 0)) - np.transpose(c, (0, 2, 1))).reshape(m * m, m)
    k_real = np.vstack([k_mat.real, k_mat.imag])
    _, sv, vh = np.linalg.svd(k_real)
    null_mask = np.concatenate([sv, np.zeros(m - sv.size)]) <= 1e-8
    center = vh[null_mask.nonzero()[0]] if null_mask.any() else np.zeros((0, m))
    center_dim = center.shape[0]
    if center_dim == 0:
        return WedderburnDecomposition((), 0, "empty center: algebra axioms failed")

    z = center.T @ rng.standard_normal(center_dim)
    lam_z = alg.left_multiplication(z)
    mu = np.linalg.eigvals(lam_z)
    mu = np.real(mu)   # central self-adjoint element: spectrum is real

    # Cluster the central spectrum; ambiguity here yields a warning.
    order = np.argsort(mu)
    mu_sorted = mu[order]
    splits = np.nonzero(np.diff(mu_sorted) > 1e-6)[0]
    groups = np.split(np.arange(m), splits + 1)
    warning = None
    if len(groups) != center_dim:
        warning = (
            f"central spectrum clustered into {len(groups)} groups but the "
            f"center has dimension {center_dim}; decomposition is partial"
        )
    values = [float(np.mean(mu_sorted[g])) for g in groups]
    gaps = np.diff(sorted(values))
    if gaps.size and gaps.min() < 1e-4:
        warning = warning or "central eigenvalue clusters are nearly degenerate"

    block_dims = []
    for i, val in enumerate(values):
        p = alg.unit_coords.astype(complex)
        for j, other in enumerate(values):
            if j != i:
                p = (lam_z @ p - other * p) / (val - other)
        corner = alg.left_multiplication(p) @ alg.right_multiplication(p)
        rank = int(np.linalg.matrix_rank(corner, tol=1e-6))
        n_i = int(round(np.sqrt(rank)))
        if n_i * n_i != rank:
            warning = warning or f"corner rank {rank} is not a perfect square"
            n_i = max(1, n_i)
        block_dims.append(n_i)

    block_dims.sort(reverse=True)
    if sum(b * b for b in block_dims) != m and warning is None:
        warning = "block dimensions do not sum to dim N; decomposition is partial"
    return WedderburnDecomposition(tuple(block_dims), center_dim, warning)
