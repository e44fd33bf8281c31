"""End-to-end orchestration: validate, analyze, lift, classify, verify.

``run_pipeline`` is fail-soft: a failure in any stage is recorded in the
bundle's ``errors`` section and the completed stages are kept, so partial
results from a defective input remain inspectable.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .channels import Channel, validate
from .config import Config, DEFAULT_CONFIG
from .diagnostics import classify, fixed_point_audit, monotonicity_audit
from .errors import AsymliftError
from .lift import (
    build_lift,
    decay_certificate,
    poisson_boundary,
    verify_asymptotic_equalities,
    wedderburn,
)
from .markov import (
    StochasticMatrix,
    analyze_structure,
    build_markov_lift,
    markov_decay_certificate,
    peripheral_spectrum_check,
)
from .serialize import (
    _jsonable,
    document_to_channel,
    dumps,
    encode_complex_matrix,
    stochastic_matrix_from_document,
)
from .spectral import eigendecompose, kuperberg_sequence, peripheral, power_limit_check

log = logging.getLogger("asymlift")

KUPERBERG_EPSILON = 1e-6
_KMAX_ESCALATIONS = 2
_KMAX_FACTOR = 8


@dataclass
class AnalysisBundle:
    sections: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = dict(self.sections)
        out["errors"] = dict(self.errors)
        return _jsonable(out)

    def to_json(self, indent: int | None = 2) -> str:
        return dumps(self.to_dict(), indent=indent)


def dual_route_q_check(ch: Channel, pd, config: Config = DEFAULT_CONFIG,
                       epsilon: float = KUPERBERG_EPSILON):
    """Compare spectral Q with the power-subsequence limit (Lemma route).

    Escalates k_max when the simultaneous-phase search comes back empty,
    which happens for irrational peripheral phases at tight epsilon.
    """
    k_max = config.k_max
    seq: list[int] = []
    for _ in range(_KMAX_ESCALATIONS + 1):
        seq = kuperberg_sequence(pd.peripheral_eigenvalues, epsilon, k_max)
        if seq:
            break
        k_max *= _KMAX_FACTOR
        log.info("kuperberg_sequence empty, raising k_max to %d", k_max)
    if not seq:
        raise AsymliftError(
            f"no simultaneous phase return below k_max={k_max}; raise k_max"
        )
    return power_limit_check(ch, pd, seq)


def _spectral_section(sd, pd) -> dict:
    return {
        "eigenvalues": [[z.real, z.imag] for z in sd.eigenvalues],
        "clusters": [c.to_dict() for c in sd.clusters],
        "peripheral": [[z.real, z.imag] for z in pd.peripheral_eigenvalues],
        "multiplicities": list(pd.multiplicities),
        "sub_radius": pd.sub_radius,
        "semisimple": pd.semisimple,
        "idempotent_residual": pd.idempotent_residual,
        "commutation_residual": pd.commutation_residual,
    }


def _lift_section(lift_obj, wd) -> dict:
    ns = lift_obj.subsystem
    return {
        "dim_n": lift_obj.dim_n,
        "basis": [encode_complex_matrix(h) for h in ns.basis],
        "structure_constants": [
            encode_complex_matrix(lift_obj.algebra.structure_constants[i])
            for i in range(lift_obj.dim_n)
        ],
        "alpha": encode_complex_matrix(lift_obj.alpha),
        "unit_coords": [[z.real, z.imag] for z in lift_obj.algebra.unit_coords],
        "wedderburn": wd.to_dict(),
        "residuals": {k: float(v) for k, v in lift_obj.residuals.items()},
    }


def run_pipeline(doc, config: Config = DEFAULT_CONFIG,
                 levels=(1, 2), k_max: int = 100,
                 samples: int | None = None, n_max: int = 200) -> AnalysisBundle:
    """validate -> analyze -> lift -> classify -> (markov) -> verify."""
    bundle = AnalysisBundle()
    bundle.sections["tool_version"] = __version__
    bundle.sections["config"] = config.to_dict()

    try:
        ch = document_to_channel(doc, config)
    except Exception as exc:  # noqa: BLE001 - fail-soft boundary
        bundle.errors["parse"] = str(exc)
        return bundle
    kind = doc.get("kind") if isinstance(doc, dict) else "stochastic"

    report = validate(ch, config.tol_psd, config.tol_herm)
    bundle.sections["channel"] = {
        "kind": kind, "dim": ch.dim, "validation": report.to_dict(),
    }
    if not report.ok:
        bundle.errors["validate"] = "channel is not a UCP map"
        return bundle

    lift_obj = None
    pd = None
    try:
        sd = eigendecompose(ch.super, config)
        pd = peripheral(sd, config=config)
        bundle.sections["spectral"] = _spectral_section(sd, pd)
    except AsymliftError as exc:
        bundle.errors["analyze"] = str(exc)

    if pd is not None:
        try:
            lift_obj = build_lift(ch, config, spectral_data=sd)
            wd = wedderburn(lift_obj.algebra, config)
            bundle.sections["lift"] = _lift_section(lift_obj, wd)
        except AsymliftError as exc:
            bundle.errors["lift"] = str(exc)

    if lift_obj is not None:
        try:
            _, pb = poisson_boundary(ch, lift_obj, config)
            bundle.sections["poisson"] = pb.to_dict()
        except AsymliftError as exc:
            bundle.errors["poisson"] = str(exc)
        try:
            cls = classify(ch, lift_obj, samples=samples, k_max=k_max, config=config)
            bundle.sections["classification"] = cls.to_dict()
        except AsymliftError as exc:
            bundle.errors["classification"] = str(exc)

    if kind == "stochastic":
        try:
            sm = StochasticMatrix(stochastic_matrix_from_document(doc))
            cs = analyze_structure(sm)
            markov_section = {"structure": cs.to_dict()}
            if cs.irreducible:
                markov_section["peripheral"] = peripheral_spectrum_check(sm, cs).to_dict()
                ml = build_markov_lift(sm, cs)
                markov_section["lift"] = ml.to_dict()
                markov_section["decay"] = markov_decay_certificate(
                    sm, ml, n_max=n_max
                ).to_dict()
            bundle.sections["markov"] = markov_section
        except AsymliftError as exc:
            bundle.errors["markov"] = str(exc)

    if lift_obj is not None:
        verification: dict = {}
        try:
            eq = verify_asymptotic_equalities(
                ch, lift_obj, levels=levels, k_max=k_max, samples=samples,
                config=config,
            )
            verification["asymptotic_equalities"] = eq.to_dict()
        except AsymliftError as exc:   # includes the amplification resource guard
            bundle.errors["verify.asymptotic_equalities"] = str(exc)
        try:
            verification["monotonicity"] = monotonicity_audit(
                ch, samples=samples, config=config
            ).to_dict()
        except AsymliftError as exc:
            bundle.errors["verify.monotonicity"] = str(exc)
        try:
            verification["dual_route_q"] = dual_route_q_check(
                ch, lift_obj.peripheral, config
            ).to_dict()
        except AsymliftError as exc:
            # Many independent irrational peripheral phases (e.g. a generic
            # unitary conjugation) may have no simultaneous return below any
            # feasible k_max; that is an inconclusive check, not a defect.
            verification["dual_route_q"] = {"inconclusive": str(exc)}
        try:
            verification["decay"] = decay_certificate(
                ch, lift_obj.peripheral, n_max=n_max
            ).to_dict()
        except AsymliftError as exc:
            bundle.errors["verify.decay"] = str(exc)
        try:
            verification["fixed_point_audit"] = fixed_point_audit(
                ch, lift_obj, config=config
            ).to_dict()
        except AsymliftError as exc:
            bundle.errors["verify.fixed_point_audit"] = str(exc)
        bundle.sections["verification"] = verification

    return bundle


# -- golden fixtures ----------------------------------------------------------


def compare_nested(expected, actual, tol: float, path: str = "$",
                   skip_keys=("tool_version",)) -> list[str]:
    """Recursive comparison with numeric tolerance; returns drift paths."""
    drifts: list[str] = []
    if isinstance(expected, dict) and isinstance(actual, dict):
        for k in sorted(set(expected) | set(actual)):
            if k in skip_keys:
                continue
            if k not in expected or k not in actual:
                drifts.append(f"{path}.{k}: missing on one side")
                continue
            drifts.extend(compare_nested(expected[k], actual[k], tol, f"{path}.{k}"))
    elif isinstance(expected, list) and isinstance(actual, list):
        if len(expected) != len(actual):
            drifts.append(f"{path}: length {len(expected)} != {len(actual)}")
        else:
            for i, (e, a) in enumerate(zip(expected, actual)):
                drifts.extend(compare_nested(e, a, tol, f"{path}[{i}]"))
    elif isinstance(expected, bool) or isinstance(actual, bool):
        if bool(expected) != bool(actual):
            drifts.append(f"{path}: {expected} != {actual}")
    elif isinstance(expected, (int, float)) and isinstance(actual, (int, float)):
        if not (abs(expected - actual) <= tol or
                (np.isnan(expected) and np.isnan(actual))):
            drifts.append(f"{path}: {expected} != {actual} beyond {tol}")
    elif expected != actual:
        drifts.append(f"{path}: {expected!r} != {actual!r}")
    return drifts


@dataclass
class GoldenSummary:
    checked: list = field(default_factory=list)
    failed: dict = field(default_factory=dict)
    missing: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict:
        return {
            "checked": self.checked,
            "failed": self.failed,
            "missing": self.missing,
            "passed": self.passed,
        }


def golden_suite(directory: str, config: Config = DEFAULT_CONFIG) -> GoldenSummary:
    """Re-run every <name>.channel.json and diff against <name>.expected.json.

    Numeric fields are compared at tol_alg; an empty directory passes
    vacuously and missing fixtures are reported, not fatal.
    """
    import json

    summary = GoldenSummary()
    names = sorted(
        f[: -len(".channel.json")]
        for f in os.listdir(directory)
        if f.endswith(".channel.json")
    )
    for name in names:
        channel_path = os.path.join(directory, f"{name}.channel.json")
        expected_path = os.path.join(directory, f"{name}.expected.json")
        if not os.path.exists(expected_path):
            summary.missing.append(name)
            continue
        with open(channel_path) as fh:
            doc = json.load(fh)
        with open(expected_path) as fh:
            expected = json.load(fh)
        actual = run_pipeline(doc, config).to_dict()
        drifts = compare_nested(expected, actual, config.tol_alg)
        summary.checked.append(name)
        if drifts:
            summary.failed[name] = drifts
    return summary
