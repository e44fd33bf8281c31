"""Command-line surface.

Every subcommand writes machine-readable JSON to stdout and human-readable
logs to stderr. Exit codes: 0 success (for ``classify``: slowly oscillating),
1 negative/failed verdict, 2 parse or validation error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .channels import validate
from .config import Config, DEFAULT_CONFIG
from .diagnostics import classify
from .errors import AsymliftError
from .lift import build_lift, verify_reversible_lift, wedderburn
from .markov import (
    StochasticMatrix,
    analyze_structure,
    build_markov_lift,
    markov_decay_certificate,
    peripheral_spectrum_check,
)
from .pipeline import (
    AnalysisBundle,
    _lift_section,
    _spectral_section,
    golden_suite,
    run_pipeline,
)
from .serialize import (
    candidate_from_document,
    document_to_channel,
    dumps,
    load_json,
    stochastic_matrix_from_document,
)
from .spectral import eigendecompose, peripheral

log = logging.getLogger("asymlift")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


def _emit(payload, out_path: str | None) -> None:
    text = dumps(payload)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _config_from_args(args) -> Config:
    cfg = DEFAULT_CONFIG
    if getattr(args, "config", None):
        cfg = Config.from_dict(load_json(args.config))
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "samples", None) is not None:
        overrides["samples"] = args.samples
    return cfg.with_(**overrides) if overrides else cfg


def _levels(args) -> tuple:
    raw = getattr(args, "levels", None) or "1,2"
    return tuple(int(x) for x in raw.split(","))


def cmd_validate(args) -> int:
    cfg = _config_from_args(args)
    ch = document_to_channel(load_json(args.channel), cfg)
    report = validate(ch, cfg.tol_psd, cfg.tol_herm)
    _emit(report.to_dict(), args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_analyze(args) -> int:
    cfg = _config_from_args(args)
    ch = document_to_channel(load_json(args.channel), cfg)
    sd = eigendecompose(ch.super, cfg)
    pd = peripheral(sd, config=cfg)
    _emit(_spectral_section(sd, pd), args.out)
    return EXIT_OK


def cmd_lift(args) -> int:
    cfg = _config_from_args(args)
    ch = document_to_channel(load_json(args.channel), cfg)
    lift_obj = build_lift(ch, cfg)
    wd = wedderburn(lift_obj.algebra, cfg)
    payload = _lift_section(lift_obj, wd)
    if args.verify:
        from .lift import verify_asymptotic_equalities

        eq = verify_asymptotic_equalities(
            ch, lift_obj, levels=_levels(args), k_max=args.kmax,
            samples=cfg.samples, config=cfg,
        )
        payload["verification"] = eq.to_dict()
        _emit(payload, args.out)
        return EXIT_OK if eq.passed else EXIT_FAIL
    _emit(payload, args.out)
    return EXIT_OK


def cmd_verify_lift(args) -> int:
    cfg = _config_from_args(args)
    ch = document_to_channel(load_json(args.channel), cfg)
    candidate = candidate_from_document(load_json(args.candidate))
    report = verify_reversible_lift(candidate, ch, cfg)
    _emit(report.to_dict(), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_markov(args) -> int:
    sm = StochasticMatrix(stochastic_matrix_from_document(load_json(args.matrix)))
    cs = analyze_structure(sm)
    payload = {"structure": cs.to_dict()}
    if cs.irreducible:
        payload["peripheral"] = peripheral_spectrum_check(sm, cs).to_dict()
        ml = build_markov_lift(sm, cs)
        payload["lift"] = ml.to_dict()
        payload["decay"] = markov_decay_certificate(sm, ml, n_max=args.nmax).to_dict()
    _emit(payload, args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = _config_from_args(args)
    ch = document_to_channel(load_json(args.channel), cfg)
    report = validate(ch, cfg.tol_psd, cfg.tol_herm)
    if not report.ok:
        _emit({"validation": report.to_dict()}, args.out)
        return EXIT_ERROR
    lift_obj = build_lift(ch, cfg)
    cls = classify(ch, lift_obj, samples=cfg.samples, k_max=args.kmax, config=cfg)
    _emit(cls.to_dict(), args.out)
    return EXIT_OK if cls.slowly_oscillating else EXIT_FAIL


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    bundle: AnalysisBundle = run_pipeline(
        load_json(args.channel), cfg, levels=_levels(args),
        k_max=args.kmax, samples=cfg.samples, n_max=args.nmax,
    )
    _emit(bundle.to_dict(), args.out)
    return EXIT_OK if not bundle.errors else EXIT_FAIL


def cmd_golden(args) -> int:
    cfg = _config_from_args(args)
    summary = golden_suite(args.directory, cfg)
    _emit(summary.to_dict(), args.out)
    return EXIT_OK if summary.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymlift",
        description="Asymptotic structure of unital completely positive maps",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, channel_arg="channel"):
        p.add_argument(channel_arg, help="channel document (JSON)")
        p.add_argument("--config", help="config record (JSON)")
        p.add_argument("--seed", type=int)
        p.add_argument("--kmax", type=int, default=100,
                       help="iteration cap for norm-sequence checks")
        p.add_argument("--samples", type=int)
        p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("validate", help="UCP validation report")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="spectrum and peripheral decomposition")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("lift", help="build the asymptotic lift")
    common(p)
    p.add_argument("--verify", action="store_true",
                   help="also run the hierarchy norm-equality checks")
    p.add_argument("--levels", default="1,2")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("verify-lift", help="audit a candidate reversible lift")
    common(p)
    p.add_argument("candidate", help="candidate lift document (JSON)")
    p.set_defaults(func=cmd_verify_lift)

    p = sub.add_parser("markov", help="cyclic structure of a stochastic matrix")
    p.add_argument("matrix", help="stochastic matrix (JSON document or bare array)")
    p.add_argument("--nmax", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_markov)

    p = sub.add_parser("classify", help="slow-oscillation trichotomy")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("run", help="full pipeline bundle")
    common(p)
    p.add_argument("--levels", default="1,2")
    p.add_argument("--nmax", type=int, default=200)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("golden", help="compare fixtures in a directory")
    p.add_argument("directory")
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_golden)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except AsymliftError as exc:
        log.error("%s", exc)
        print(dumps({"error": str(exc)}))
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        log.error("%s", exc)
        print(dumps({"error": str(exc)}))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
