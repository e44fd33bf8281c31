import numpy as np
import pytest

from asymlift.catalog import LAZY_CHAIN, ad_z, depolarizing
from asymlift.channels import (
    Superoperator,
    choi_of_superoperator,
    from_stochastic,
    identity_channel,
)
from asymlift.config import Config
from asymlift.errors import PeripheralDefectError
from asymlift.spectral import (
    eigendecompose,
    kuperberg_sequence,
    peripheral,
    power_limit_check,
    spectral_radius_complement,
)

from oracles import matrix_unit

CFG = Config()


def _sorted_eigs(ch):
    return np.sort_complex(eigendecompose(ch.super, CFG).eigenvalues)


def test_eigendecompose_identity():
    sd = eigendecompose(identity_channel(2).super, CFG)
    assert np.abs(sd.eigenvalues - 1.0).max() < 1e-12
    assert sd.clusters[0].multiplicity == 4


def test_eigendecompose_adz_by_direct_application():
    # E_11, E_22 are fixed; E_12, E_21 are negated.
    ch = ad_z()
    for (i, j), lam in {(0, 0): 1, (1, 1): 1, (0, 1): -1, (1, 0): -1}.items():
        e = matrix_unit(2, i, j)
        assert np.abs(ch.apply(e) - lam * e).max() < 1e-14
    assert np.allclose(_sorted_eigs(ch), [-1, -1, 1, 1], atol=1e-12)


def test_eigendecompose_depolarizing():
    assert np.allclose(_sorted_eigs(depolarizing(2)), [0, 0, 0, 1], atol=1e-12)


def test_biorthogonality_and_reconstruction(rng):
    from asymlift.sampling import random_ucp_channel

    ch = random_ucp_channel(rng, 3, 2)
    sd = eigendecompose(ch.super, CFG)
    assert sd.biorthogonality_residual() < 1e-8
    assert sd.reconstruction_residual() < 1e-8


def test_eigenvalues_closed_under_conjugation(rng):
    from asymlift.sampling import random_ucp_channel

    for _ in range(5):
        ch = random_ucp_channel(rng, 3, 3)
        w = eigendecompose(ch.super, CFG).eigenvalues
        for lam in w:
            assert np.abs(w - np.conj(lam)).min() < 1e-8


def test_peripheral_adz_q_is_identity():
    pd = peripheral(eigendecompose(ad_z().super, CFG), config=CFG)
    assert np.abs(pd.q.matrix - np.eye(4)).max() < 1e-10
    assert pd.sub_radius == pytest.approx(0.0, abs=1e-12)
    assert sorted(pd.multiplicities) == [2, 2]


def test_peripheral_depolarizing_projects_onto_scalars():
    ch = depolarizing(2)
    pd = peripheral(eigendecompose(ch.super, CFG), config=CFG)
    assert pd.peripheral_eigenvalues == (1.0 + 0.0j,)
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.abs(pd.q.apply(x) - np.trace(x) / 2.0 * np.eye(2)).max() < 1e-12
    assert pd.sub_radius == pytest.approx(0.0, abs=1e-10)


def test_peripheral_lazy_chain_sub_radius():
    ch = from_stochastic(LAZY_CHAIN)
    pd = peripheral(eigendecompose(ch.super, CFG), config=CFG)
    assert pd.peripheral_eigenvalues == (1.0 + 0.0j,)
    assert pd.sub_radius == pytest.approx(0.8, abs=1e-12)


def test_pinching_spectrum_is_markov_spectrum_plus_zeros():
    # The pinch-then-act channel keeps the eigenvalues of P on the diagonal
    # sector and kills the off-diagonal one.
    ch = from_stochastic(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(_sorted_eigs(ch), [-1, 0, 0, 1], atol=1e-12)
    ch = from_stochastic(LAZY_CHAIN)
    assert np.allclose(_sorted_eigs(ch), [0, 0, 0.8, 1], atol=1e-12)


def test_peripheral_q_is_ucp_idempotent(rng):
    from asymlift.sampling import random_ucp_channel

    for _ in range(5):
        ch = random_ucp_channel(rng, 3, 2)
        pd = peripheral(eigendecompose(ch.super, CFG), config=CFG)
        assert pd.idempotent_residual < 1e-8
        assert pd.commutation_residual < 1e-8
        # Q is itself UCP: unital and Choi-positive.
        q = pd.q
        assert np.abs(q.apply(np.eye(3)) - np.eye(3)).max() < 1e-8
        choi = choi_of_superoperator(q)
        assert np.linalg.eigvalsh((choi + choi.conj().T) / 2).min() > -1e-8


def test_defective_peripheral_cluster_raises():
    # Jordan block at eigenvalue 1 inside a d=2 superoperator.
    s = np.eye(4)
    s[0, 1] = 1.0
    with pytest.raises(PeripheralDefectError):
        eigendecompose(Superoperator(2, s), CFG)
    # peripheral() re-checks through the invariant-subspace restriction even
    # when handed spectral data that missed the defect.
    sd = eigendecompose(Superoperator(2, np.eye(4)), CFG)
    object.__setattr__(sd, "source_matrix", s)
    with pytest.raises(PeripheralDefectError):
        peripheral(sd, config=CFG)


def test_sub_peripheral_defect_is_tolerated():
    # Nilpotent block strictly inside the disk must not break peripheral().
    s = np.diag([1.0, 0.5, 0.5, 0.2])
    s[1, 2] = 1.0   # Jordan structure at 0.5
    pd = peripheral(eigendecompose(Superoperator(2, s), CFG), config=CFG)
    assert pd.peripheral_eigenvalues == (1.0 + 0.0j,)
    assert pd.sub_radius == pytest.approx(0.5, abs=1e-10)
    assert pd.idempotent_residual < 1e-10


def test_kuperberg_trivial_spectrum():
    assert kuperberg_sequence([1.0], 1e-9, 10) == list(range(1, 11))


def test_kuperberg_minus_one_gives_evens():
    assert kuperberg_sequence([1.0, -1.0], 1e-9, 12) == [2, 4, 6, 8, 10, 12]


def test_kuperberg_cube_roots():
    w = np.exp(2j * np.pi / 3)
    assert kuperberg_sequence([1.0, w], 1e-9, 12) == [3, 6, 9, 12]
    assert kuperberg_sequence([1.0, w, np.conj(w)], 1e-9, 12) == [3, 6, 9, 12]


def test_kuperberg_empty_result_is_valid():
    lam = np.exp(2j * np.pi * ((1 + np.sqrt(5)) / 2))
    assert kuperberg_sequence([lam], 1e-9, 100) == []


def test_kuperberg_rejects_nonunimodular():
    with pytest.raises(ValueError):
        kuperberg_sequence([0.5], 1e-6, 10)


def test_kuperberg_golden_phase_deep_search():
    lam = np.exp(2j * np.pi * ((1 + np.sqrt(5)) / 2))
    seq = kuperberg_sequence([lam], 1e-6, 4_000_000)
    assert seq, "expected a return below 4e6"
    assert 3524578 in seq   # Fibonacci denominator of the phase
    for n in seq[:5]:
        assert abs(lam ** n - 1.0) < 1e-6


def test_power_limit_depolarizing_immediate():
    ch = depolarizing(2)
    pd = peripheral(eigendecompose(ch.super, CFG), config=CFG)
    rep = power_limit_check(ch, pd, [1, 2, 3])
    assert rep.plain_at_largest < 1e-12
    assert rep.curve[0][1] < 1e-12   # L = Q exactly at n = 1


def test_power_limit_adz_on_evens():
    ch = ad_z()
    pd = peripheral(eigendecompose(ch.super, CFG), config=CFG)
    rep = power_limit_check(ch, pd, [2, 4, 6, 8])
    assert rep.plain_at_largest < 1e-12
    assert rep.adjusted_at_largest < 1e-12


def test_power_limit_lazy_chain_geometric_curve():
    ch = from_stochastic(LAZY_CHAIN)
    pd = peripheral(eigendecompose(ch.super, CFG), config=CFG)
    rep = power_limit_check(ch, pd, list(range(1, 21)))
    for n, plain, _ in rep.curve:
        assert plain == pytest.approx(0.8 ** n, rel=1e-8)


def test_complement_spectral_radius_matches_sub_radius():
    ch = from_stochastic(LAZY_CHAIN)
    pd = peripheral(eigendecompose(ch.super, CFG), config=CFG)
    assert spectral_radius_complement(ch, pd) == pytest.approx(0.8, abs=1e-8)
    s, q = ch.super.matrix, pd.q.matrix
    assert np.abs(s - (s @ q + s @ (np.eye(4) - q))).max() < 1e-12


def test_eigenvalue_ordering_is_deterministic():
    sd = eigendecompose(ad_z().super, CFG)
    mods = np.abs(sd.eigenvalues)
    assert all(mods[i] >= mods[i + 1] - 1e-12 for i in range(3))
    phases = np.mod(np.angle(sd.eigenvalues), 2 * np.pi)
    for i in range(3):
        if abs(mods[i] - mods[i + 1]) < 1e-12:
            assert phases[i] <= phases[i + 1] + 1e-12
