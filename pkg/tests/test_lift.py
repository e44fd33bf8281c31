import numpy as np
import pytest

from asymlift.catalog import (
    LAZY_CHAIN,
    PAULI_Z,
    TWO_CYCLE,
    ad_z,
    depolarizing,
    depolarizing_times_rotation,
)
from asymlift.channels import (
    KrausSet,
    Superoperator,
    from_kraus,
    from_stochastic,
    identity_channel,
    predual_matrix,
)
from asymlift.config import Config
from asymlift.errors import AlgebraAxiomError, QRangeMismatchError
from asymlift.lift import (
    CandidateLift,
    _functional_norm_on_subsystem,
    _limit_predual_norm,
    build_lift,
    build_subsystem,
    choi_effros,
    decay_certificate,
    inverse_sequence,
    poisson_boundary,
    verify_asymptotic_equalities,
    verify_reversible_lift,
    wedderburn,
)
from asymlift.operators import (
    hermitian_basis,
    operator_norm,
    span_residual,
    trace_norm,
    unvec,
    vec,
)
from asymlift.spectral import eigendecompose, peripheral

from oracles import matrix_unit

CFG = Config(samples=16, seed=20260810)


def _pd(ch):
    return peripheral(eigendecompose(ch.super, CFG), config=CFG)


# -- build_subsystem ----------------------------------------------------------


def test_subsystem_depolarizing_is_scalars():
    ns = build_subsystem(_pd(depolarizing(2)), CFG)
    assert ns.dim == 1
    assert np.abs(ns.basis[0] - np.eye(2) / np.sqrt(2)).max() < 1e-12


def test_subsystem_adz_is_full_algebra(rng):
    ns = build_subsystem(_pd(ad_z()), CFG)
    assert ns.dim == 4
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert span_residual(x, ns.basis) < 1e-10


def test_subsystem_pinching_is_diagonal():
    ns = build_subsystem(_pd(from_stochastic(np.eye(2))), CFG)
    assert ns.dim == 2
    for h in ns.basis:
        assert np.abs(h - np.diag(np.diagonal(h))).max() < 1e-10
    assert span_residual(np.diag([1.0, -1.0]), ns.basis) < 1e-10


def test_subsystem_star_closed_and_unital():
    ns = build_subsystem(_pd(ad_z()), CFG)
    for h in ns.basis:
        assert np.abs(h - h.conj().T).max() < 1e-12
        assert span_residual(h.conj().T, ns.basis) < 1e-10
    one = ns.assemble(ns.identity_coords)
    assert np.abs(one - np.eye(2)).max() < 1e-12


# -- choi_effros --------------------------------------------------------------


def test_choi_effros_scalars_single_constant():
    ch = depolarizing(2)
    pd = _pd(ch)
    alg = choi_effros(build_subsystem(pd, CFG), pd.q, CFG)
    # h0 = 1/sqrt(2): h0 o h0 = 1/2 = (1/sqrt 2) h0, and the unit is sqrt(2) h0.
    assert alg.structure_constants.shape == (1, 1, 1)
    assert alg.structure_constants[0, 0, 0] == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert alg.unit_coords[0] == pytest.approx(np.sqrt(2), abs=1e-12)
    u = alg.unit_coords
    assert np.abs(alg.product(u, u) - u).max() < 1e-12


def test_choi_effros_adz_is_ordinary_multiplication(rng):
    ch = ad_z()
    pd = _pd(ch)
    ns = build_subsystem(pd, CFG)
    alg = choi_effros(ns, pd.q, CFG)
    a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    direct = ns.assemble(a) @ ns.assemble(b)
    via_alg = ns.assemble(alg.product(a, b))
    assert np.abs(direct - via_alg).max() < 1e-10


def test_choi_effros_pinching_is_diagonal_product(rng):
    ch = from_stochastic(np.eye(2))
    pd = _pd(ch)
    ns = build_subsystem(pd, CFG)
    alg = choi_effros(ns, pd.q, CFG)
    a, b = rng.standard_normal(2), rng.standard_normal(2)
    direct = ns.assemble(a) @ ns.assemble(b)    # diagonal times diagonal
    assert np.abs(ns.assemble(alg.product(a, b)) - direct).max() < 1e-10


def test_choi_effros_axiom_residuals_recorded(lifts):
    for name, lift in lifts.items():
        res = lift.algebra.residuals
        assert res["associativity"] <= 1e-8, name
        assert res["involution"] <= 1e-8, name
        assert res["unit"] <= 1e-8, name
        assert res["cstar_identity"] <= 1e-8, name


def test_choi_effros_q_range_mismatch():
    # span{1, X, Y} is not closed under multiplication (XY = iZ), and the
    # identity idempotent does not project back into it.
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    basis = hermitian_basis([x, y], 2, tol=1e-10, seed_identity=True)
    from asymlift.lift import OperatorSubsystem
    from asymlift.operators import coords_in_basis

    ns = OperatorSubsystem(2, tuple(basis), coords_in_basis(np.eye(2), basis))
    with pytest.raises(QRangeMismatchError):
        choi_effros(ns, Superoperator(2, np.eye(4)), CFG)


def test_choi_effros_unit_axiom_failure():
    # Q projects onto the diagonal but N contains X: the unit law breaks.
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    basis = hermitian_basis([x], 2, tol=1e-10, seed_identity=True)
    from asymlift.lift import OperatorSubsystem
    from asymlift.operators import coords_in_basis

    ns = OperatorSubsystem(2, tuple(basis), coords_in_basis(np.eye(2), basis))
    pinch_q = _pd(from_stochastic(np.eye(2))).q
    with pytest.raises(AlgebraAxiomError):
        choi_effros(ns, pinch_q, CFG)


# -- build_lift ---------------------------------------------------------------


def test_build_lift_depolarizing_is_trivial(lifts):
    lift = lifts["depolarizing"]
    assert lift.dim_n == 1
    assert np.abs(lift.alpha - np.eye(1)).max() < 1e-12
    # E is the scalar inclusion lambda -> lambda * 1 up to normalization.
    assert np.abs(lift.embed([np.sqrt(2)]) - np.eye(2)).max() < 1e-12


def test_build_lift_adz_alpha_implements_conjugation(lifts, rng):
    lift = lifts["ad_z"]
    assert lift.dim_n == 4
    ns = lift.subsystem
    y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    lhs = lift.embed(lift.alpha @ ns.coords(y))
    assert np.abs(lhs - PAULI_Z @ y @ PAULI_Z).max() < 1e-10


def test_build_lift_residuals_within_tolerance(lifts):
    for name, lift in lifts.items():
        assert lift.residuals["equivariance"] <= 1e-8, name
        assert lift.residuals["alpha_multiplicative"] <= 1e-7, name
        assert lift.residuals["alpha_isometry"] <= 1e-6, name
        assert lift.residuals["nondegeneracy_min_singular_value"] > 1e-10, name


def test_dim_counting_invariants(channels, lifts):
    for name, ch in channels.items():
        lift = lifts[name]
        pd = lift.peripheral
        assert lift.dim_n == pd.peripheral_count, name
        one_mult = sum(
            m for lam, m in zip(pd.peripheral_eigenvalues, pd.multiplicities)
            if abs(lam - 1) < 1e-8
        )
        _, pb = poisson_boundary(ch, lift, CFG)
        assert pb.dim_fixed_space == one_mult, name
        assert pb.dim_fixed_algebra == pb.dim_fixed_space, name


def test_build_lift_uniqueness_under_basis_permutation(rng):
    ch = ad_z()
    lift1 = build_lift(ch, CFG)
    lift2 = build_lift(ch, CFG, basis_permutation=[2, 0, 3, 1])
    ns1, ns2 = lift1.subsystem, lift2.subsystem
    # theta matches elements through E: coordinates of E1(h_i) in basis 2.
    theta = np.stack([ns2.coords(h) for h in ns1.basis], axis=1)
    for i, h in enumerate(ns1.basis):
        assert np.abs(ns2.assemble(theta[:, i]) - h).max() < 1e-10
    # Equivariance of the matching and transport of the product.
    assert np.abs(theta @ lift1.alpha - lift2.alpha @ theta).max() < 1e-8
    a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    lhs = theta @ lift1.algebra.product(a, b)
    rhs = lift2.algebra.product(theta @ a, theta @ b)
    assert np.abs(lhs - rhs).max() < 1e-8


def test_uniqueness_under_permutation_complex_phases(rng):
    # Same check on a channel whose alpha has genuinely complex spectrum.
    ch = depolarizing_times_rotation(CFG)
    lift1 = build_lift(ch, CFG)
    lift2 = build_lift(ch, CFG, basis_permutation=[3, 1, 0, 2])
    ns1, ns2 = lift1.subsystem, lift2.subsystem
    theta = np.stack([ns2.coords(h) for h in ns1.basis], axis=1)
    for i, h in enumerate(ns1.basis):
        assert np.abs(ns2.assemble(theta[:, i]) - h).max() < 1e-9
    assert np.abs(theta @ lift1.alpha - lift2.alpha @ theta).max() < 1e-8
    a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    lhs = theta @ lift1.algebra.product(a, b)
    rhs = lift2.algebra.product(theta @ a, theta @ b)
    assert np.abs(lhs - rhs).max() < 1e-8


# -- hierarchy norm equalities -------------------------------------------------


def test_equalities_identity_channel_constant():
    ch = identity_channel(2)
    lift = build_lift(ch, CFG)
    rep = verify_asymptotic_equalities(ch, lift, levels=(1, 2), k_max=20,
                                       samples=8, config=CFG)
    assert rep.passed
    for lvl in rep.levels:
        assert lvl.max_gap < 1e-10


def test_equalities_depolarizing_traceless_functional():
    ch = depolarizing(2)
    lift = build_lift(ch, CFG)
    t = predual_matrix(ch.super)
    tq = predual_matrix(lift.q)
    f = np.diag([1.0, -1.0])
    v = t @ vec(f)
    assert trace_norm(unvec(v, 2)) < 1e-14            # rho o L^k = 0 for k >= 1
    assert trace_norm(unvec(tq @ vec(f), 2)) < 1e-14  # ||rho o E|| = 0


def test_equalities_lazy_chain_closed_form():
    ch = from_stochastic(LAZY_CHAIN)
    lift = build_lift(ch, CFG)
    t = predual_matrix(ch.super)
    f = np.diag([1.0, -1.0])        # delta_1 - delta_2
    v = vec(f)
    for k in range(1, 12):
        v = t @ v
        assert trace_norm(unvec(v, 2)) == pytest.approx(2 * 0.8 ** k, abs=1e-12)
    rep = verify_asymptotic_equalities(ch, lift, levels=(1, 2), k_max=100,
                                       samples=8, config=CFG)
    assert rep.passed


# -- Poisson boundary ----------------------------------------------------------


def test_poisson_adz_diagonal_fixed_algebra(channels, lifts):
    halg, rep = poisson_boundary(channels["ad_z"], lifts["ad_z"], CFG)
    assert rep.dim_fixed_space == 2
    assert rep.passed
    for h in halg.system.basis:
        assert np.abs(h - np.diag(np.diagonal(h))).max() < 1e-10


def test_poisson_depolarizing_trivial(channels, lifts):
    _, rep = poisson_boundary(channels["depolarizing"], lifts["depolarizing"], CFG)
    assert rep.dim_fixed_space == 1
    assert rep.passed


def test_poisson_two_cycle_strict_inclusion():
    ch = from_stochastic(TWO_CYCLE)
    lift = build_lift(ch, CFG)
    assert lift.dim_n == 2                      # N is two-dimensional
    _, rep = poisson_boundary(ch, lift, CFG)
    assert rep.dim_fixed_space == 1             # but N^alpha is scalars only
    assert rep.passed


def test_reducible_chain_boundary_algebra():
    # Two absorbing states and one transient: the fixed space is spanned by
    # harmonic functions, and the Choi-Effros product makes the hitting
    # indicator a projection (classical boundary behavior).
    p = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.3, 0.2, 0.5]])
    ch = from_stochastic(p, CFG)
    lift = build_lift(ch, CFG)
    assert lift.dim_n == 2
    ns = lift.subsystem
    h = np.diag([1.0, 0.0, 0.6])        # harmonic extension of (1, 0)
    assert np.abs(ch.apply(h) - h).max() < 1e-12
    coords = ns.coords(h)
    assert np.abs(ns.assemble(coords) - h).max() < 1e-10   # h lies in N
    prod = lift.algebra.product(coords, coords)
    assert np.abs(ns.assemble(prod) - h).max() < 1e-8      # h o h = h
    assert wedderburn(lift.algebra, CFG).block_dims == (1, 1)
    _, rep = poisson_boundary(ch, lift, CFG)
    assert rep.dim_fixed_space == 2 and rep.passed


def test_poisson_identity_pinching_full_fixed_algebra():
    ch = from_stochastic(np.eye(2))
    lift = build_lift(ch, CFG)
    _, rep = poisson_boundary(ch, lift, CFG)
    assert lift.dim_n == 2
    assert rep.dim_fixed_space == 2             # N^alpha = N, dim > 1
    assert rep.passed


# -- inverse sequences ----------------------------------------------------------


def test_inverse_sequence_unit_is_constant(lifts):
    lift = lifts["ad_z"]
    seq = inverse_sequence(lift, lift.algebra.unit_coords, -3, 3)
    for x in seq:
        assert np.abs(x - np.eye(2)).max() < 1e-10


def test_inverse_sequence_adz_alternates(lifts):
    lift = lifts["ad_z"]
    e12 = matrix_unit(2, 0, 1)
    coords = lift.subsystem.coords(e12)
    seq = inverse_sequence(lift, coords, 0, 5)
    for n, x in enumerate(seq):
        assert np.abs(x - (-1.0) ** n * e12).max() < 1e-10


def test_inverse_sequence_defining_relation_and_norm(lifts, channels, rng):
    for name in ("ad_z", "lazy_chain", "depolarizing_rotation"):
        ch, lift = channels[name], lifts[name]
        a = rng.standard_normal(lift.dim_n) + 1j * rng.standard_normal(lift.dim_n)
        seq = inverse_sequence(lift, a, -4, 4)
        for x_n, x_next in zip(seq, seq[1:]):
            assert np.abs(ch.apply(x_next) - x_n).max() < 1e-8, name
        norms = [operator_norm(x) for x in seq]
        assert max(norms) == pytest.approx(
            operator_norm(lift.embed(a)), abs=1e-8
        ), name


def test_fixed_points_give_constant_sequences(channels, lifts):
    ch, lift = channels["ad_z"], lifts["ad_z"]
    fixed = lift.fixed_coords_basis()
    a = fixed @ np.array([0.3, -1.2])
    seq = inverse_sequence(lift, a, -2, 2)
    for x in seq:
        assert np.abs(x - seq[0]).max() < 1e-10


def test_ball_intersection_witness(channels, lifts, rng):
    # E(ball N) sits inside every L^k(ball M), witnessed by preimage chains.
    for name in ("ad_z", "lazy_chain"):
        ch, lift = channels[name], lifts[name]
        alpha_inv = lift.alpha_inverse()
        for _ in range(5):
            a = rng.standard_normal(lift.dim_n) + 1j * rng.standard_normal(lift.dim_n)
            a = a / operator_norm(lift.embed(a))
            target = lift.embed(a)
            for k in (1, 3, 7):
                xk = lift.embed(np.linalg.matrix_power(alpha_inv, k) @ a)
                assert operator_norm(xk) <= 1.0 + 1e-8
                img = xk
                for _ in range(k):
                    img = ch.apply(img)
                assert np.abs(img - target).max() < 1e-8


# -- candidate lifts -------------------------------------------------------------


def test_trivial_lift_passes_for_any_ucp(channels):
    for name in ("depolarizing", "ad_z", "lazy_chain"):
        ch = channels[name]
        report = verify_reversible_lift(CandidateLift.trivial(ch.dim), ch,
                                        CFG, samples=4)
        assert report.passed, (name, report.clauses)


def test_built_lift_passes_with_equality(channels, lifts):
    ch, lift = channels["ad_z"], lifts["ad_z"]
    report = verify_reversible_lift(CandidateLift.from_built(lift), ch,
                                    CFG, samples=4)
    assert report.passed
    for sample in report.details["norm_samples"]:
        assert sample["e_norm"] == pytest.approx(sample["limit"], abs=1e-6)


def test_trivial_lift_against_adz_strict_inequality(channels):
    # rho pairing the (1,2) entry: zero on scalars, norm 1 along the iterates.
    ch = channels["ad_z"]
    candidate = CandidateLift.trivial(2)
    f = matrix_unit(2, 1, 0)   # trace(F x) = x_{12}
    e_norm = _functional_norm_on_subsystem(f, list(candidate.basis),
                                           list(candidate.images))
    limit = _limit_predual_norm(ch, f)
    assert e_norm == pytest.approx(0.0, abs=1e-7)
    assert limit == pytest.approx(1.0, abs=1e-10)
    report = verify_reversible_lift(candidate, ch, CFG, samples=4)
    assert report.passed


def test_non_lift_candidate_fails():
    ch = ad_z()
    bad = CandidateLift(basis=(np.eye(2, dtype=complex),),
                        alpha=np.array([[2.0]], dtype=complex),
                        images=(np.eye(2, dtype=complex),))
    report = verify_reversible_lift(bad, ch, CFG, samples=2)
    assert not report.passed
    assert not report.clauses["alpha_unital"]


def test_non_equivariant_candidate_fails():
    ch = ad_z()
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    cand = CandidateLift.inclusion(
        (np.eye(2, dtype=complex), x), np.eye(2, dtype=complex)
    )
    report = verify_reversible_lift(cand, ch, CFG, samples=2)
    assert not report.passed
    assert not report.clauses["equivariant"]   # L(X) = -X but alpha fixes X


# -- Wedderburn -----------------------------------------------------------------


def test_wedderburn_scalars(lifts):
    assert wedderburn(lifts["depolarizing"].algebra, CFG).block_dims == (1,)


def test_wedderburn_full_matrix_algebra(lifts):
    wd = wedderburn(lifts["ad_z"].algebra, CFG)
    assert wd.block_dims == (2,)
    assert wd.center_dim == 1
    assert wd.ok


def test_wedderburn_diagonal():
    lift = build_lift(from_stochastic(np.eye(2)), CFG)
    wd = wedderburn(lift.algebra, CFG)
    assert wd.block_dims == (1, 1)
    assert wd.center_dim == 2


def test_wedderburn_mixed_blocks():
    # Pinching onto M_2 (+) C inside M_3.
    p1, p2 = np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])
    ch = from_kraus(KrausSet(3, (p1, p2)), CFG)
    lift = build_lift(ch, CFG)
    assert lift.dim_n == 5
    wd = wedderburn(lift.algebra, CFG)
    assert wd.block_dims == (2, 1)
    assert wd.center_dim == 2


# -- decay certificates -----------------------------------------------------------


def test_decay_certificate_lazy_chain():
    ch = from_stochastic(LAZY_CHAIN)
    cert = decay_certificate(ch, _pd(ch), n_max=100)
    assert cert.certified
    assert cert.empirical_rate == pytest.approx(0.8, abs=1e-6)
    expected = 0.8 ** np.arange(1, 51)
    assert np.abs(cert.curve[:50] - expected).max() < 1e-10


def test_decay_certificate_peripheral_only_channel():
    ch = ad_z()
    cert = decay_certificate(ch, _pd(ch), n_max=50)
    assert cert.certified
    assert cert.curve.max() < 1e-12
    assert cert.empirical_rate == 0.0
