"""gschur: generalized Schur products, ropp recognition, JSR certificates and positivity checks.

Exit codes: 0 success / check passed, 1 check ran and failed (counterexample,
violation, refutation), 2 usage or input error, 3 inconclusive.

Commands that produce a document (product, matrix, tensor, witness bundle) write
it to --output when given, otherwise to stdout; the report then goes to
stderr.  Commands without a document print their report to stdout.  Reports are
key: value lines with --format human and sorted JSON with --format structured.

Environment: GSCHUR_SEED sets the default --seed; GSCHUR_DISABLE_JIT=1 selects
the pure-numpy kernels instead of numba.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import io as gio
from . import kernels
from .algebra import check_algebra
from .product import hadamard, make_product, saropp_from
from .ropp import RoppError, check_ropp, find_identity, reconstruct, verify_mixed_law
from .schoenberg import (
    PositivityError,
    build_witness,
    scan_negative_coefficients,
    test_positivity_preserving,
    verify_witness,
)
from .series import eval_series
from .spectral import (
    DEFAULT_GRID,
    Verdict,
    certify_contraction,
    jsr_bounds,
    search_contraction_witness,
    star_spectral_radius,
)
from .zoo import algebra as zoo_algebra

SEED_ENV = "GSCHUR_SEED"

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VERDICT_EXIT = {Verdict.CERTIFIED: EXIT_OK, Verdict.REFUTED: EXIT_FAILED, Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}


@dataclass
class RunConfig:
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: {
        "rank": 1e-8, "psd": 1e-8, "assoc": 1e-10, "witness": 1e-12,
    })
    word_length: int = 8
    samples: int = 100
    output: Optional[str] = None
    format: str = "human"
    validate: bool = True

    def __post_init__(self):
        for name, value in self.tolerances.items():
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive")
        if self.word_length < 1:
            raise ValueError("word length must be >= 1")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        tols = cls().tolerances
        for name in list(tols):
            value = getattr(args, f"tol_{name}", None)
            if value is not None:
                tols[name] = value
        return cls(args.seed, tols, args.word_length, args.samples, args.output, args.format,
                   not args.no_validate)


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{SEED_ENV} must be an integer, got {raw!r}")


def _positive_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=default_seed(),
                   help=f"root random seed (default: ${SEED_ENV} or 0)")
    g.add_argument("--tol.rank", dest="tol_rank", type=float, help="rank-one tolerance (1e-8)")
    g.add_argument("--tol.psd", dest="tol_psd", type=float, help="PSD tolerance (1e-8)")
    g.add_argument("--tol.assoc", dest="tol_assoc", type=float, help="algebra validation tolerance (1e-10)")
    g.add_argument("--tol.witness", dest="tol_witness", type=float, help="witness re-check tolerance (1e-12)")
    g.add_argument("--word-length", type=int, default=8, help="maximum JSR word length (8)")
    g.add_argument("--samples", type=int, default=100, help="sample count for randomized checks (100)")
    g.add_argument("--format", choices=["human", "structured"], default="human")
    g.add_argument("--no-validate", action="store_true", help="skip algebra validation on load")
    g.add_argument("-o", "--output", help="write the produced document here")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="gschur", description=__doc__.split("\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter,
                                     epilog=__doc__.split("\n", 1)[1])
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(parent, name, func, help):
        p = parent.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(func=func)
        return p

    alg = sub.add_parser("algebra", help="algebra documents").add_subparsers(dest="action", required=True)
    p = leaf(alg, "check", cmd_algebra_check, "validate associativity and the unit law")
    p.add_argument("algebra")
    p = leaf(alg, "zoo", cmd_algebra_zoo, "emit a built-in algebra document")
    p.add_argument("kind", choices=["entrywise", "matrix", "cyclic", "free"])
    p.add_argument("--size", type=int, default=2, help="dimension / matrix size / group order")
    p.add_argument("--vars", type=int, default=1, help="free algebra: number of letters")
    p.add_argument("--degree", type=int, default=2, help="free algebra: truncation degree")

    prod = sub.add_parser("product", help="generalized Schur products").add_subparsers(dest="action", required=True)
    p = leaf(prod, "make", cmd_product_make, "build a product document")
    p.add_argument("--hadamard", nargs=2, type=int, metavar=("N", "M"))
    p.add_argument("--saropp", metavar="ALGEBRA", help="A = B = this algebra, VB = VA")
    p.add_argument("--alg-a")
    p.add_argument("--alg-b")
    p.add_argument("--va", help="matrix document for VA (default identity)")
    p.add_argument("--vb", help="matrix document for VB (default identity)")
    p = leaf(prod, "multiply", cmd_product_multiply, "multiply two matrices")
    p.add_argument("product")
    p.add_argument("x")
    p.add_argument("y")
    p = leaf(prod, "tensor-export", cmd_product_tensor, "materialize the dense product tensor")
    p.add_argument("product")

    ropp = sub.add_parser("ropp", help="recognise rank-one preserving products").add_subparsers(dest="action", required=True)
    p = leaf(ropp, "check", cmd_ropp_check, "sample for rank-one and associativity counterexamples")
    p.add_argument("tensor")
    p = leaf(ropp, "reconstruct", cmd_ropp_reconstruct, "rebuild a tensor as a generalized Schur product")
    p.add_argument("tensor")

    p = leaf(sub, "jsr", cmd_jsr, "joint spectral radius bounds under a product")
    p.add_argument("product")
    p.add_argument("tuple")
    p.add_argument("--norm", choices=["2", "holder", "auto"], default="2")

    con = sub.add_parser("contraction", help="Schur spectral contraction certificates").add_subparsers(dest="action", required=True)
    p = leaf(con, "certify", cmd_contraction_certify, "certify with given A, B")
    p.add_argument("product")
    p.add_argument("tuple")
    p.add_argument("--a", required=True, help="matrix document for the top-left block")
    p.add_argument("--b", required=True, help="matrix document for the bottom-right block")
    p = leaf(con, "search", cmd_contraction_search, "grid search over scaled identities")
    p.add_argument("product")
    p.add_argument("tuple")
    p.add_argument("--grid", type=_float_list, default=list(DEFAULT_GRID), help="comma-separated scales")

    p = leaf(sub, "eval-series", cmd_eval_series, "evaluate a series on a tuple")
    p.add_argument("series")
    p.add_argument("product")
    p.add_argument("tuple")
    p.add_argument("--max-degree", type=int)

    sch = sub.add_parser("schoenberg", help="positivity preservation").add_subparsers(dest="action", required=True)
    p = leaf(sch, "test", cmd_schoenberg_test, "sample certified PSD tuples on saropps")
    p.add_argument("series")
    p.add_argument("products", nargs="+")
    p = leaf(sch, "witness", cmd_schoenberg_witness, "build a refutation bundle from a negative coefficient")
    p.add_argument("series")
    p.add_argument("--word", type=_positive_int_list, help="comma-separated letters of the negative word")
    p.add_argument("--epsilon", type=float, default=1.0)
    p = leaf(sch, "verify", cmd_schoenberg_verify, "re-verify a witness bundle")
    p.add_argument("bundle")
    return parser


# ---------------------------------------------------------------------------
# commands: each returns (exit code, report dict, document or None)


def cmd_algebra_check(args, cfg):
    alg = gio.parse_algebra(args.algebra, validate=False, tol=cfg.tolerances["assoc"])
    report = check_algebra(alg, cfg.tolerances["assoc"])
    return (EXIT_OK if report.passed else EXIT_FAILED), {"command": "algebra check", **report.to_dict()}, None


def cmd_algebra_zoo(args, cfg):
    alg = zoo_algebra(args.kind, args.size, args.vars, args.degree)
    return EXIT_OK, {"command": "algebra zoo", "kind": args.kind, "dim": alg.dim}, gio.algebra_to_doc(alg)


def cmd_product_make(args, cfg):
    tol = cfg.tolerances["assoc"]
    va = gio.parse_matrix(args.va) if args.va else None
    vb = gio.parse_matrix(args.vb) if args.vb else None
    if args.hadamard:
        gsp = hadamard(*args.hadamard)
    elif args.saropp:
        gsp = saropp_from(gio.parse_algebra(args.saropp, cfg.validate, tol), va, tol=tol, validate=cfg.validate)
    elif args.alg_a and args.alg_b:
        gsp = make_product(gio.parse_algebra(args.alg_a, cfg.validate, tol),
                           gio.parse_algebra(args.alg_b, cfg.validate, tol), va, vb, tol=tol,
                           validate=cfg.validate)
    else:
        raise UsageError("give --hadamard N M, --saropp ALGEBRA, or --alg-a and --alg-b")
    return EXIT_OK, {"command": "product make", "n": gsp.n, "m": gsp.m}, gio.product_to_doc(gsp)


def _product(path, cfg):
    return gio.parse_product(path, cfg.validate, cfg.tolerances["assoc"])


def cmd_product_multiply(args, cfg):
    gsp = _product(args.product, cfg)
    Z = gsp.multiply(gio.parse_matrix(args.x), gio.parse_matrix(args.y))
    return EXIT_OK, {"command": "product multiply", "shape": list(Z.shape)}, gio.matrix_to_doc(Z)


def cmd_product_tensor(args, cfg):
    gsp = _product(args.product, cfg)
    P = gsp.materialize()
    return EXIT_OK, {"command": "product tensor-export", "n": P.n, "m": P.m}, gio.tensor_to_doc(P)


def cmd_ropp_check(args, cfg):
    P = gio.parse_tensor(args.tensor)
    verdict = check_ropp(P, trials=cfg.samples, tol=cfg.tolerances["rank"], seed=cfg.seed)
    report = {"command": "ropp check", "seed": cfg.seed, **verdict.to_dict()}
    if verdict.passed:
        idf = find_identity(P, rank_tol=cfg.tolerances["rank"])
        report["mixed_law"] = verify_mixed_law(P, idf, cfg.tolerances["rank"]).to_dict()
        if not report["mixed_law"]["passed"]:
            return EXIT_FAILED, report, None
    return (EXIT_OK if verdict.passed else EXIT_FAILED), report, None


def cmd_ropp_reconstruct(args, cfg):
    P = gio.parse_tensor(args.tensor)
    try:
        gsp = reconstruct(P, trials=cfg.samples, seed=cfg.seed, tol=cfg.tolerances["rank"])
    except RoppError as exc:
        return EXIT_FAILED, {"command": "ropp reconstruct", "seed": cfg.seed, "error": str(exc)}, None
    return EXIT_OK, {"command": "ropp reconstruct", "seed": cfg.seed, "n": gsp.n, "m": gsp.m}, gio.product_to_doc(gsp)


def cmd_jsr(args, cfg):
    gsp = _product(args.product, cfg)
    Ys = gio.parse_matrix_tuple(args.tuple)
    est = jsr_bounds(gsp, Ys, cfg.word_length, norm=args.norm)
    report = {"command": "jsr", **est.to_dict()}
    if len(Ys) == 1:
        report["star_spectral_radius"] = star_spectral_radius(gsp, Ys[0])
    return EXIT_OK, report, None


def cmd_contraction_certify(args, cfg):
    gsp = _product(args.product, cfg)
    Xs = gio.parse_matrix_tuple(args.tuple)
    cert = certify_contraction(gsp, Xs, gio.parse_matrix(args.a), gio.parse_matrix(args.b), cfg.word_length)
    return VERDICT_EXIT[cert.verdict], {"command": "contraction certify", **cert.to_dict()}, None


def cmd_contraction_search(args, cfg):
    gsp = _product(args.product, cfg)
    Xs = gio.parse_matrix_tuple(args.tuple)
    cert = search_contraction_witness(gsp, Xs, args.grid, cfg.word_length)
    return VERDICT_EXIT[cert.verdict], {"command": "contraction search", **cert.to_dict()}, None


def cmd_eval_series(args, cfg):
    series = gio.parse_series(args.series)
    gsp = _product(args.product, cfg)
    F = eval_series(series, gsp, gio.parse_matrix_tuple(args.tuple), args.max_degree)
    return EXIT_OK, {"command": "eval-series", "shape": list(F.shape)}, gio.matrix_to_doc(F)


def cmd_schoenberg_test(args, cfg):
    series = gio.parse_series(args.series)
    products = [_product(p, cfg) for p in args.products]
    report = test_positivity_preserving(series, products, cfg.samples, cfg.tolerances["psd"], cfg.seed,
                                        max_word_length=min(cfg.word_length, 4))
    out = {"command": "schoenberg test", **report.to_dict()}
    return (EXIT_FAILED if report.failures else EXIT_OK), out, None


def cmd_schoenberg_witness(args, cfg):
    series = gio.parse_series(args.series)
    word = tuple(args.word) if args.word else None
    if word is None:
        negatives = [w for w in scan_negative_coefficients(series) if w]
        if not negatives:
            return EXIT_FAILED, {"command": "schoenberg witness",
                                 "error": "no negative coefficient on a nonempty word; nothing to refute"}, None
        word = negatives[0]
    w = build_witness(series, word, args.epsilon, cfg.word_length)
    expected = series.coeff(word).real * w.epsilon ** (2 * len(word))
    report = {
        "command": "schoenberg witness",
        "negative_word": list(word),
        "epsilon": w.epsilon,
        "min_eig_of_fX": w.min_eig_of_fX,
        "coefficient_bound": expected,
        "certificate_verdict": w.certificate.verdict.value,
        "at_floor": w.at_floor,
        "domain_note": "inputs scaled by epsilon until certified as a Schur spectral contraction",
    }
    code = EXIT_OK if w.certified else EXIT_INCONCLUSIVE
    return code, report, gio.witness_to_doc(w, series)


def cmd_schoenberg_verify(args, cfg):
    w, series = gio.parse_witness(args.bundle)
    ok = verify_witness(w, series, cfg.tolerances["witness"])
    return (EXIT_OK if ok else EXIT_FAILED), {"command": "schoenberg verify", "verified": ok}, None


# ---------------------------------------------------------------------------


class UsageError(ValueError):
    pass


def _human(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "structured":
        return json.dumps(report, sort_keys=True, indent=1) + "\n"
    return _human(report)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        code, report, doc = args.func(args, cfg)
    except (gio.FormatError, gio.ValidationError, UsageError, PositivityError, OSError, ValueError) as exc:
        print(f"gschur: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {**report, "backend": kernels.BACKEND, "exit_code": code}
    text = render(report, cfg.format)
    if doc is not None:
        if cfg.output:
            gio.write_document(doc, cfg.output)
            sys.stdout.write(text)
        else:
            sys.stdout.write(gio.dumps(doc))
            sys.stderr.write(text)
    else:
        if cfg.output:
            Path(cfg.output).write_text(text)
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
