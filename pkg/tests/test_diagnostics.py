import numpy as np
import pytest

from asymlift.catalog import LAZY_CHAIN, ad_unitary, ad_z, depolarizing
from asymlift.channels import from_stochastic, identity_channel, predual_matrix
from asymlift.config import Config
from asymlift.diagnostics import classify, fixed_point_audit, monotonicity_audit
from asymlift.lift import build_lift
from asymlift.operators import trace_norm, unvec, vec
from asymlift.sampling import random_ucp_channel

from oracles import matrix_unit

CFG = Config(samples=12, seed=404)


def _classified(ch):
    return classify(ch, build_lift(ch, CFG), samples=12, k_max=60, config=CFG)


def test_classify_depolarizing_all_true():
    rep = _classified(depolarizing(2, CFG))
    assert rep.spectral_verdict and rep.sampled_verdict and rep.alpha_trivial
    assert rep.agree and rep.slowly_oscillating
    assert rep.witness is None


def test_classify_adz_all_false_with_witness():
    rep = _classified(ad_z(CFG))
    assert not (rep.spectral_verdict or rep.sampled_verdict or rep.alpha_trivial)
    assert rep.agree
    w = rep.witness
    assert w is not None
    assert w.eigenvalue == pytest.approx(-1.0)
    assert w.gap == pytest.approx(2.0)
    assert w.achieved >= w.gap - 1e-6


def test_classify_lazy_chain_true_despite_slow_rate():
    rep = _classified(from_stochastic(LAZY_CHAIN, CFG))
    assert rep.agree and rep.slowly_oscillating
    assert rep.sub_radius == pytest.approx(0.8, abs=1e-12)


def test_classify_rotation_with_distinct_phases_fails():
    u = np.diag([1.0, np.exp(0.7j)])
    rep = _classified(ad_unitary(u, CFG))
    assert rep.agree and not rep.slowly_oscillating
    assert rep.witness.achieved >= rep.witness.gap - 1e-6


def test_classify_scalar_phase_unitary_is_trivial():
    u = np.exp(0.3j) * np.eye(2)
    rep = _classified(ad_unitary(u, CFG))
    assert rep.agree and rep.slowly_oscillating


def test_trichotomy_on_random_channels(rng):
    for _ in range(10):
        d = int(rng.integers(2, 4))
        ch = random_ucp_channel(rng, d, int(rng.integers(2, 5)), CFG)
        rep = _classified(ch)
        assert rep.agree


def test_monotonicity_identity_constant():
    rep = monotonicity_audit(identity_channel(2), samples=8, k_max=20, config=CFG)
    assert rep.largest_violation <= 0.0 + 1e-15
    assert rep.passed


def test_monotonicity_depolarizing_traceless_drop():
    ch = depolarizing(2, CFG)
    t = predual_matrix(ch.super)
    f = np.diag([1.0, -1.0])
    v = t @ vec(f)
    assert trace_norm(f) == pytest.approx(2.0)
    assert trace_norm(unvec(v, 2)) < 1e-14    # (||rho||, 0, 0, ...)
    assert monotonicity_audit(ch, samples=8, config=CFG).passed


def test_monotonicity_lazy_chain_strict_decrease():
    ch = from_stochastic(LAZY_CHAIN, CFG)
    t = predual_matrix(ch.super)
    v = vec(np.diag([1.0, -1.0]))
    prev = 2.0
    for k in range(1, 10):
        v = t @ v
        cur = trace_norm(unvec(v, 2))
        assert cur == pytest.approx(2 * 0.8 ** k, abs=1e-12)
        assert cur < prev
        prev = cur
    assert monotonicity_audit(ch, samples=8, config=CFG).passed


def test_fixed_point_audit_depolarizing():
    ch = depolarizing(2, CFG)
    rep = fixed_point_audit(ch, build_lift(ch, CFG), config=CFG)
    assert rep.slowly_oscillating
    assert rep.max_residual < 1e-10
    assert rep.consistent


def test_fixed_point_audit_adz_witness():
    ch = ad_z(CFG)
    rep = fixed_point_audit(ch, build_lift(ch, CFG), config=CFG)
    assert not rep.slowly_oscillating
    assert rep.expected_gap == pytest.approx(2.0)
    assert rep.witness_residual == pytest.approx(2.0, abs=1e-8)
    # E_12 is the canonical witness: it is flipped outright.
    e12 = matrix_unit(2, 0, 1)
    assert np.abs(ch.apply(e12) + e12).max() < 1e-14
    assert rep.consistent


def test_fixed_point_audit_two_cycle_flip():
    ch = from_stochastic([[0.0, 1.0], [1.0, 0.0]], CFG)
    rep = fixed_point_audit(ch, build_lift(ch, CFG), config=CFG)
    x = np.diag([1.0, -1.0])
    assert np.abs(ch.apply(x) + x).max() < 1e-14
    assert rep.expected_gap == pytest.approx(2.0)
    assert rep.consistent


def test_slow_oscillation_bridge(rng):
    # alpha trivial on N <=> predual increments vanish, both directions.
    for ch in (depolarizing(2, CFG), ad_z(CFG), from_stochastic(LAZY_CHAIN, CFG),
               random_ucp_channel(rng, 3, 3, CFG)):
        lift = build_lift(ch, CFG)
        rep = classify(ch, lift, samples=10, k_max=60, config=CFG)
        alpha_trivial = np.abs(lift.alpha - np.eye(lift.dim_n)).max() <= 1e-8
        assert rep.sampled_verdict == alpha_trivial
