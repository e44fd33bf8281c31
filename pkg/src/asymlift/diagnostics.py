"""Slow-oscillation classification and monotonicity / fixed-point audits.

A UCP map on a matrix algebra oscillates slowly (predual increments vanish)
exactly when its peripheral spectrum is {1}, exactly when the lifted
automorphism is trivial. ``classify`` evaluates all three criteria
independently and attaches a witness whenever a verdict is negative: a
peripheral eigenvalue lambda != 1 together with a functional built from its
eigen-operator that keeps ||rho o L^{n+1} - rho o L^n|| >= |lambda - 1|.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import Channel, predual_matrix
from .config import Config, DEFAULT_CONFIG
from .lift import AsymptoticLift
from .operators import trace_norm, unvec, vec
from .sampling import pairing_matrices


@dataclass(frozen=True)
class OscillationWitness:
    """Eigenvalue lambda != 1 and a norm-1 functional achieving |lambda - 1|."""

    eigenvalue: complex
    gap: float                    # |lambda - 1|
    achieved: float               # measured sup_n ||rho o L^{n+1} - rho o L^n||
    pairing_matrix: np.ndarray
    eigen_operator: np.ndarray

    def to_dict(self) -> dict:
        return {
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
            "gap": self.gap,
            "achieved": self.achieved,
        }


@dataclass(frozen=True)
class ClassificationReport:
    spectral_verdict: bool
    sampled_verdict: bool
    alpha_trivial: bool
    residual_curves: tuple        # per-sample final residuals
    witness: OscillationWitness | None
    alpha_distance: float
    sub_radius: float
    threshold: float

    @property
    def agree(self) -> bool:
        return self.spectral_verdict == self.sampled_verdict == self.alpha_trivial

    @property
    def slowly_oscillating(self) -> bool:
        return self.spectral_verdict and self.agree

    def to_dict(self) -> dict:
        return {
            "spectral_verdict": self.spectral_verdict,
            "sampled_verdict": self.sampled_verdict,
            "alpha_trivial": self.alpha_trivial,
            "agree": self.agree,
            "slowly_oscillating": self.slowly_oscillating,
            "alpha_distance": self.alpha_distance,
            "sub_radius": self.sub_radius,
            "threshold": self.threshold,
            "witness": self.witness.to_dict() if self.witness else None,
        }


def _eigen_witness(ch: Channel, lift: AsymptoticLift, lam: complex,
                   k_probe: int = 4) -> OscillationWitness:
    """Unit eigen-operator x for lambda and rho with rho(x) = 1, ||rho|| = 1."""
    s = ch.super.matrix
    d = ch.dim
    w, v = np.linalg.eig(s)
    idx = int(np.argmin(np.abs(w - lam)))
    x = unvec(v[:, idx], d)
    u, sv, vh = np.linalg.svd(x)
    x = x / sv[0]
    # F = v1 u1^dag pairs x to its top singular value: trace(F x) = 1.
    f = np.outer(vh.conj().T[:, 0], u[:, 0].conj())
    t = predual_matrix(ch.super)
    achieved = 0.0
    vf = vec(f)
    for _ in range(k_probe):
        diff = unvec(t @ vf - vf, d)
        achieved = max(achieved, trace_norm(diff))
        vf = t @ vf
    return OscillationWitness(
        eigenvalue=complex(lam),
        gap=abs(lam - 1.0),
        achieved=achieved,
        pairing_matrix=f,
        eigen_operator=x,
    )


def classify(ch: Channel, lift: AsymptoticLift, samples: int | None = None,
             k_max: int = 100, tol: float = 1e-8,
             config: Config = DEFAULT_CONFIG) -> ClassificationReport:
    """Evaluate the three equivalent slow-oscillation criteria independently.

    The sampled decay threshold is rate-aware: residuals at k_max count as
    decayed when below max(tol, 10 * c * sub_radius^k_max) with c the initial
    increment, so slow sub-peripheral rates do not produce false negatives.
    """
    samples = config.samples if samples is None else samples
    pd = lift.peripheral
    spectral_verdict = all(abs(lam - 1.0) <= 10 * config.tol_cluster
                           for lam in pd.peripheral_eigenvalues)

    m = lift.alpha.shape[0]
    alpha_distance = float(np.abs(lift.alpha - np.eye(m)).max())
    alpha_trivial = alpha_distance <= tol

    t = predual_matrix(ch.super)
    rng = config.rng()
    sub = pd.sub_radius
    finals = []
    threshold = tol
    sampled_verdict = True
    for f in pairing_matrices(rng, ch.dim, samples):
        v = vec(f)
        g = t @ v - v
        c0 = trace_norm(unvec(g, ch.dim))
        for _ in range(k_max):
            g = t @ g
        final = trace_norm(unvec(g, ch.dim))
        finals.append(final)
        thr = max(tol, 10.0 * c0 * sub ** k_max)
        threshold = max(threshold, thr)
        if final > thr:
            sampled_verdict = False

    witness = None
    if not spectral_verdict:
        lam = max(pd.peripheral_eigenvalues, key=lambda z: abs(z - 1.0))
        witness = _eigen_witness(ch, lift, lam)

    return ClassificationReport(
        spectral_verdict=spectral_verdict,
        sampled_verdict=sampled_verdict,
        alpha_trivial=alpha_trivial,
        residual_curves=tuple(finals),
        witness=witness,
        alpha_distance=alpha_distance,
        sub_radius=sub,
        threshold=threshold,
    )


@dataclass(frozen=True)
class MonotonicityReport:
    levels: tuple
    k_max: int
    samples: int
    largest_violation: float

    @property
    def passed(self) -> bool:
        return self.largest_violation <= 1e-10

    def to_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "k_max": self.k_max,
            "samples": self.samples,
            "largest_violation": self.largest_violation,
            "passed": self.passed,
        }


def monotonicity_audit(ch: Channel, samples: int | None = None, k_max: int = 50,
                       levels=(1, 2), config: Config = DEFAULT_CONFIG) -> MonotonicityReport:
    """Assert the predual iterate norms never increase, at levels 1 and 2."""
    from .channels import amplify

    samples = config.samples if samples is None else samples
    rng = config.rng()
    worst = 0.0
    for n in levels:
        amp = amplify(ch, n, config)
        t = predual_matrix(amp.super)
        nd = ch.dim * n
        for f in pairing_matrices(rng, nd, samples):
            v = vec(f)
            prev = trace_norm(f)
            for _ in range(k_max):
                v = t @ v
                cur = trace_norm(unvec(v, nd))
                worst = max(worst, cur - prev)
                prev = cur
    return MonotonicityReport(levels=tuple(levels), k_max=k_max,
                              samples=samples, largest_violation=worst)


@dataclass(frozen=True)
class FixedPointAuditReport:
    max_residual: float           # over sampled unit-ball elements of N
    witness_residual: float       # ||L(x) - x|| for the best witness found
    expected_gap: float           # max |lambda - 1| over peripheral spectrum
    slowly_oscillating: bool

    @property
    def consistent(self) -> bool:
        if self.slowly_oscillating:
            return self.max_residual <= 1e-8
        return self.witness_residual >= self.expected_gap - 1e-6

    def to_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "witness_residual": self.witness_residual,
            "expected_gap": self.expected_gap,
            "slowly_oscillating": self.slowly_oscillating,
            "consistent": self.consistent,
        }


def fixed_point_audit(ch: Channel, lift: AsymptoticLift,
                      samples: int = 32, config: Config = DEFAULT_CONFIG) -> FixedPointAuditReport:
    """Probe whether the image of ball N is pointwise fixed by the map.

    For slowly oscillating channels every sampled x = E(y), ||y|| <= 1 must
    satisfy L(x) = x; otherwise the report exhibits an x moved by at least the
    spectral gap max |lambda - 1|.
    """
    from .operators import operator_norm

    pd = lift.peripheral
    rng = config.rng()
    m = lift.alpha.shape[0]
    worst = 0.0
    for _ in range(samples):
        a = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        x = lift.embed(a)
        nrm = operator_norm(x)
        if nrm < 1e-12:
            continue
        x = x / nrm
        worst = max(worst, float(np.linalg.norm(ch.apply(x) - x, 2)))

    gap = max((abs(lam - 1.0) for lam in pd.peripheral_eigenvalues), default=0.0)
    witness_res = 0.0
    if gap > 1e-12:
        lam = max(pd.peripheral_eigenvalues, key=lambda z: abs(z - 1.0))
        s = ch.super.matrix
        w, v = np.linalg.eig(s)
        idx = int(np.argmin(np.abs(w - lam)))
        x = unvec(v[:, idx], ch.dim)
        x = x / operator_norm(x)
        witness_res = float(np.linalg.norm(ch.apply(x) - x, 2))

    return FixedPointAuditReport(
        max_residual=worst,
        witness_residual=witness_res,
        expected_gap=gap,
        slowly_oscillating=gap <= 1e-12,
    )
