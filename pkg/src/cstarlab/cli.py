"""Command-line front end.

Subcommands
-----------
decompose     block-decompose an algebra fixture
ideal         projection generator + certificate for an ideal fixture
tro-classify  block classification of a TRO fixture
verify-dz     sampled maximal-ideal certificates for an algebra fixture
selftest      deterministic smoke suite
random        emit a random fixture with ground truth

Reports are deterministic JSON (sorted keys, no timestamps), written to
``--json PATH`` or standard output.  Seeds come from ``--seed`` or the
``CSTAR_SEED`` environment variable.  Exit codes: 0 success, 1 bad
input/usage, 2 a verified invariant failed.
"""

import argparse
import json
import os
import sys

import numpy as np

from .config import DEFAULT_TOL
from .errors import CStarError, INPUT_ERRORS, ParamError, ParseError
from .algebra import generate_algebra
from .ideals import generate_right_ideal, projection_generator, support_projection
from .instances import planted_block_algebra, planted_block_tro, random_right_ideal
from .jsonio import (
    certificate_report,
    decode_fixture,
    dumps_report,
    encode_algebra_fixture,
    encode_ideal_fixture,
    encode_tro_fixture,
)
from .linalg import hs_norm
from .selftest import run_selftest
from .structure import verify_dales_zelazko, wedderburn_decompose
from .tro import classify_tro, generate_tro


def _resolve_seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CSTAR_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ParamError(f"CSTAR_SEED must be an integer, got {env!r}") from exc
    return 0


def _resolve_tol(args):
    tol = DEFAULT_TOL
    if getattr(args, "tol_member", None) is not None:
        if args.tol_member <= 0:
            raise ParamError("--tol-member must be positive")
        tol = tol.with_member(args.tol_member)
    if getattr(args, "tol_spec", None) is not None:
        if args.tol_spec <= 0:
            raise ParamError("--tol-spec must be positive")
        tol = tol.with_spec(args.tol_spec)
    return tol


def _load_fixture(path, want):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    fix = decode_fixture(raw)
    if fix["kind"] not in want:
        raise ParseError(f"expected a {'/'.join(want)} fixture, got {fix['kind']!r}")
    return fix


def _emit(report, args):
    text = dumps_report(report)
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_decompose(args):
    tol = _resolve_tol(args)
    fix = _load_fixture(args.fixture, ("algebra",))
    alg = generate_algebra(fix["ambient"], fix["generators"], tol=tol)
    dec = wedderburn_decompose(alg, seed=_resolve_seed(args), tol=tol)
    report = {
        "command": "decompose",
        "ambient": alg.ambient_dim,
        "algebra_dim": alg.dim,
        "blocks": [
            {"size": n, "multiplicity": m}
            for n, m in zip(dec.block_sizes, dec.multiplicities)
        ],
        "dimension_identity_ok": sum(n * n for n in dec.block_sizes) == alg.dim,
        "block_form_residual": dec.residuals["block_form"],
    }
    gt = fix.get("ground_truth")
    if gt is not None:
        expected = sorted(zip(gt[0], gt[1]), reverse=True)
        report["ground_truth_match"] = dec.block_signature() == expected
    ok = report["dimension_identity_ok"] and report.get("ground_truth_match", True)
    report["ok"] = ok
    _emit(report, args)
    if not ok:
        sys.stderr.write("verification failed: block structure mismatch\n")
        return 2
    return 0


def _cmd_ideal(args):
    tol = _resolve_tol(args)
    fix = _load_fixture(args.fixture, ("ideal",))
    alg = generate_algebra(fix["ambient"], fix["algebra_generators"], tol=tol)
    ideal = generate_right_ideal(alg, fix["ideal_generators"], tol=tol)
    cert = projection_generator(alg, ideal, tol=tol)
    agreement = hs_norm(cert.projection - support_projection(alg, ideal, tol=tol))
    report = {
        "command": "ideal",
        "ambient": alg.ambient_dim,
        "algebra_dim": alg.dim,
        "ideal_dim": ideal.dim,
        "certificate": certificate_report(cert),
        "support_agreement": agreement,
    }
    ok = agreement <= tol.member and (
        cert.is_trivial or max(cert.residuals.values()) <= tol.member
    )
    report["ok"] = ok
    _emit(report, args)
    if not ok:
        sys.stderr.write("verification failed: projection certificate residuals\n")
        return 2
    return 0


def _cmd_tro_classify(args):
    tol = _resolve_tol(args)
    fix = _load_fixture(args.fixture, ("tro",))
    rows, cols = fix["ambient"]
    tro = generate_tro(rows, cols, fix["generators"], tol=tol)
    cls = classify_tro(tro, seed=_resolve_seed(args), tol=tol)
    report = {
        "command": "tro-classify",
        "ambient": [rows, cols],
        "tro_dim": tro.dim,
        "left_algebra_dim": tro.left_algebra.dim,
        "right_algebra_dim": tro.right_algebra.dim,
        "blocks": [{"rows": m, "cols": n} for m, n in cls.blocks],
        "dimension_identity_ok": cls.total_dim() == tro.dim,
        "ternary_morphism_residual": cls.residuals["ternary_morphism"],
    }
    gt = fix.get("ground_truth")
    if gt is not None:
        report["ground_truth_match"] = sorted(cls.blocks, reverse=True) == sorted(
            gt, reverse=True
        )
    ok = report["dimension_identity_ok"] and report.get("ground_truth_match", True)
    report["ok"] = ok
    _emit(report, args)
    if not ok:
        sys.stderr.write("verification failed: TRO block structure mismatch\n")
        return 2
    return 0


def _cmd_verify_dz(args):
    tol = _resolve_tol(args)
    fix = _load_fixture(args.fixture, ("algebra",))
    alg = generate_algebra(fix["ambient"], fix["generators"], tol=tol)
    result = verify_dales_zelazko(
        alg, trials=args.trials, seed=_resolve_seed(args), tol=tol
    )
    report = {
        "command": "verify-dz",
        "ambient": alg.ambient_dim,
        "algebra_dim": alg.dim,
        "block_sizes": result.block_sizes,
        "multiplicities": result.multiplicities,
        "dimension_identity_ok": result.dimension_identity_ok,
        "trials": [
            {
                "block": t.block_index,
                "is_maximal": t.is_maximal,
                "single_generation": t.single_generation,
                "support_agreement": t.support_agreement,
                "certificate": certificate_report(t.certificate),
            }
            for t in result.trials
        ],
        "ok": result.all_ok,
    }
    _emit(report, args)
    if not result.all_ok:
        sys.stderr.write("verification failed: maximal ideal certificates\n")
        return 2
    return 0


def _cmd_selftest(args):
    tol = _resolve_tol(args)
    report = run_selftest(seed=_resolve_seed(args), tol=tol)
    _emit(report, args)
    if not report["ok"]:
        failed = [c["name"] for c in report["checks"] if not c["ok"]]
        sys.stderr.write(f"verification failed: {', '.join(failed)}\n")
        return 2
    return 0


def _parse_blocks(text):
    """'2,1' -> [2, 1]; '2x3,1x1' -> [(2, 3), (1, 1)]."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "x" in part:
            lhs, _, rhs = part.partition("x")
            out.append((int(lhs), int(rhs)))
        else:
            out.append(int(part))
    if not out:
        raise ParamError("empty block list")
    return out


def _cmd_random(args):
    seed = _resolve_seed(args)
    tol = _resolve_tol(args)
    try:
        blocks = _parse_blocks(args.blocks)
    except ValueError as exc:
        raise ParamError(f"cannot parse --blocks {args.blocks!r}: {exc}") from exc
    if args.kind == "tro":
        if not all(isinstance(b, tuple) for b in blocks):
            raise ParamError("TRO blocks must be ROWSxCOLS pairs, e.g. 2x3,1x1")
        planted = planted_block_tro(blocks, seed=seed, tol=tol)
        fixture = encode_tro_fixture(
            planted.tro.rows,
            planted.tro.cols,
            list(planted.tro.basis.matrices),
            ground_truth=planted.signature(),
        )
    else:
        if not all(isinstance(b, int) for b in blocks):
            raise ParamError("algebra blocks must be plain sizes, e.g. 2,1")
        if args.mults is not None:
            mults = _parse_blocks(args.mults)
            if not all(isinstance(m, int) for m in mults) or len(mults) != len(blocks):
                raise ParamError("--mults must list one integer per block")
        else:
            mults = [1] * len(blocks)
        planted = planted_block_algebra(
            blocks, mults, ambient_dim=args.ambient, seed=seed
        )
        generators = list(planted.algebra.basis.matrices)
        if args.kind == "algebra":
            fixture = encode_algebra_fixture(
                planted.algebra.ambient_dim,
                generators,
                ground_truth=(planted.block_sizes, planted.multiplicities),
            )
        else:  # ideal
            rng = np.random.default_rng([seed, 0x1DEA1])
            ideal = random_right_ideal(planted.algebra, args.gens, rng, tol=tol)
            fixture = encode_ideal_fixture(
                planted.algebra.ambient_dim, generators, ideal.generators
            )
    _emit(fixture, args)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cstarlab",
        description="structure computations for finite-dimensional matrix *-algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fixture=True):
        if fixture:
            p.add_argument("fixture", help="path to a JSON fixture")
        p.add_argument("--seed", type=int, default=None,
                       help="random seed (default: $CSTAR_SEED or 0)")
        p.add_argument("--tol-member", type=float, default=None,
                       help="membership tolerance override")
        p.add_argument("--tol-spec", type=float, default=None,
                       help="spectral tolerance override")
        p.add_argument("--json", default=None, metavar="PATH",
                       help="write the report here instead of stdout")

    p = sub.add_parser("decompose", help="block-decompose an algebra fixture")
    common(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("ideal", help="projection generator for an ideal fixture")
    common(p)
    p.set_defaults(func=_cmd_ideal)

    p = sub.add_parser("tro-classify", help="classify a TRO fixture")
    common(p)
    p.set_defaults(func=_cmd_tro_classify)

    p = sub.add_parser("verify-dz", help="sampled maximal-ideal certificates")
    common(p)
    p.add_argument("--trials", type=int, default=10)
    p.set_defaults(func=_cmd_verify_dz)

    p = sub.add_parser("selftest", help="deterministic smoke suite")
    common(p, fixture=False)
    p.set_defaults(func=_cmd_selftest)

    p = sub.add_parser("random", help="emit a random fixture with ground truth")
    p.add_argument("kind", choices=("algebra", "tro", "ideal"))
    p.add_argument("--blocks", required=True,
                   help="block sizes: '2,1' for algebras, '2x3,1x1' for TROs")
    p.add_argument("--mults", default=None, help="multiplicities, one per block")
    p.add_argument("--ambient", type=int, default=None,
                   help="ambient dimension (algebra kinds; default: occupied rank)")
    p.add_argument("--gens", type=int, default=2,
                   help="ideal generator count (ideal kind)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol-member", type=float, default=None)
    p.add_argument("--tol-spec", type=float, default=None)
    p.add_argument("--json", default=None, metavar="PATH")
    p.set_defaults(func=_cmd_random)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except CStarError as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return 2


def entry():  # console_scripts hook
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
