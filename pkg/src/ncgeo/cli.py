"""Command line surface: one verb per construction.

Exit codes: 0 all requested checks pass, 1 a check or prerequisite fails,
2 the input file cannot be parsed.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .convert import (
    CliffordModuleData,
    appendix_equivalence_check,
    double_odd_triple,
    poincare_pairing_matrix,
    riemannian_to_spinc,
    round_trip_check,
    spinc_to_riemannian,
)
from .examples import EXAMPLE_KINDS, build_example
from .io import (
    FormatError,
    data_to_matrix,
    load_triple,
    matrix_to_data,
    save_triple,
    triple_to_dict,
    vector_to_data,
)
from .linalg import Tolerance
from .report import CheckReport
from .triples import run_condition_suite, zeta_diagnostic

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2


def _tol(args) -> Tolerance:
    return Tolerance(rel=args.tol, rank_cut=args.rank_cut)


def _emit(args, payload: dict, report: CheckReport | None = None):
    header = {"seed": args.seed, "tol": args.tol}
    if args.format == "json":
        doc = {"header": header}
        doc.update(payload)
        if report is not None:
            doc["report"] = report.as_dict()
        print(json.dumps(doc, indent=2, default=_json_default))
    else:
        print(f"# seed={args.seed} tol={args.tol}")
        for key, value in payload.items():
            if key == "report":
                continue
            print(f"{key}: {value}")
        if report is not None:
            print(report.as_text())


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return matrix_to_data(obj) if obj.ndim == 2 else vector_to_data(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj)}")


def _load(path):
    try:
        return load_triple(path)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def cmd_example(args) -> int:
    params = {}
    if args.kind == "trivial_points":
        params["n"] = args.n or 3
    elif args.kind == "two_point":
        params["coupling"] = args.coupling
    elif args.kind == "matrix_geometry":
        params["n"] = args.n or 2
        params["seed"] = args.seed
    try:
        t = build_example(args.kind, **params)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = args.output or f"{args.kind}.striple"
    save_triple(out, t)
    _emit(args, {"written": out, "hilbert_dim": t.hilbert_dim})
    return EXIT_OK


def cmd_check(args) -> int:
    t, _ = _load(args.path)
    rep = run_condition_suite(t, _tol(args), strict_orientation=args.strict_orientation)
    _emit(args, {"path": args.path}, rep)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_convert(args) -> int:
    t, doc = _load(args.path)
    tol = _tol(args)
    try:
        if args.direction == "to-riemannian":
            result = spinc_to_riemannian(t, tol)
            extra = {
                "witness": {
                    "phi": vector_to_data(result.witness["phi"]),
                    "J_kernel": matrix_to_data(result.witness["conjugation_kernel"]),
                    "epsilon": matrix_to_data(result.witness["epsilon"]),
                    "intertwiner": None,
                    "c_basis_src": [matrix_to_data(w) for w in result.witness["c_basis_src"]]
                    if result.witness.get("c_basis_src") else None,
                    "c_basis_out": [matrix_to_data(w) for w in result.witness["c_basis_out"]]
                    if result.witness.get("c_basis_out") else None,
                },
                "source": triple_to_dict(t),
            }
        else:
            witness = doc.get("witness")
            source_doc = doc.get("source")
            if witness is None or source_doc is None or witness.get("c_basis_src") is None:
                print("error: to-spinc needs a file produced by to-riemannian "
                      "(bundled module data missing)", file=sys.stderr)
                return EXIT_FAIL
            from .io import dict_to_triple
            source = dict_to_triple(source_doc)
            module = CliffordModuleData(
                carrier_dim=source.hilbert_dim,
                left_action=[data_to_matrix(w) for w in witness["c_basis_src"]],
                right_action_gens=source.right_action_gens,
                algebra_basis=[data_to_matrix(w) for w in witness["c_basis_out"]]
                if witness.get("c_basis_out") else None,
            )
            from .convert import derived_backward_potential, intertwine_triples
            pot = derived_backward_potential(t, module, source.dirac, tol)
            result = riemannian_to_spinc(t, module, tol, potential=pot)
            u, irep = intertwine_triples(source, result.output, tol)
            result.report.extend(irep, prefix="roundtrip:")
            extra = {
                "witness": {
                    "intertwiner": matrix_to_data(u) if u is not None else None,
                }
            }
    except ValueError as exc:
        print(f"error: conversion prerequisite failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = args.output or (args.path + ".converted")
    save_triple(out, result.output, extra=extra)
    _emit(args, {"written": out}, result.report)
    return EXIT_OK if result.report.passed else EXIT_FAIL


def cmd_product(args) -> int:
    from .kasparov import BimoduleConnection, ModuleOverAlgebra, product_triple
    t, _ = _load(args.path)
    try:
        with open(args.module) as fh:
            mdoc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    tol = _tol(args)
    try:
        n = int(mdoc["size"])
        q_big = data_to_matrix(mdoc["projector"])
        right = t.right_algebra(tol)
        if right is None:
            print("error: triple has no right action to twist against", file=sys.stderr)
            return EXIT_FAIL
        module = ModuleOverAlgebra(n, q_big, right)
        potential = None
        if mdoc.get("potential") is not None:
            potential = [[data_to_matrix(p) for p in row] for row in mdoc["potential"]]
        conn = BimoduleConnection(module, potential)
        out, _, rep = product_triple(t, conn, tol)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    outpath = args.output or (args.path + ".product")
    save_triple(outpath, out)
    _emit(args, {"written": outpath}, rep)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_double(args) -> int:
    t, _ = _load(args.path)
    try:
        out, rep = double_odd_triple(t, _tol(args))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    outpath = args.output or (args.path + ".doubled")
    save_triple(outpath, out)
    _emit(args, {"written": outpath}, rep)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_homotopy(args) -> int:
    t, _ = _load(args.path)
    rep = appendix_equivalence_check(t, samples=args.samples, tol=_tol(args))
    _emit(args, {"path": args.path}, rep)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_pair(args) -> int:
    t, _ = _load(args.path)
    try:
        with open(args.projectors) as fh:
            pdoc = json.load(fh)
        left = [data_to_matrix(p) for p in pdoc["left"]]
        right = [data_to_matrix(p) for p in pdoc["right"]]
        mat, unimodular, rep = poincare_pairing_matrix(t, left, right, _tol(args))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(args, {"matrix": mat.tolist(), "unimodular": unimodular}, rep)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_zeta(args) -> int:
    t, _ = _load(args.path)
    table = zeta_diagnostic(t, args.s)
    _emit(args, {"zeta": {str(s): v for s, v in table}})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncgeo",
                                 description="finite noncommutative geometry workbench")
    ap.add_argument("--tol", type=float, default=1e-9, help="relative residual tolerance")
    ap.add_argument("--rank-cut", type=float, default=1e-10, help="numerical rank cutoff")
    ap.add_argument("--seed", type=int, default=0, help="seed recorded in reports")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    g = ap.add_mutually_exclusive_group()
    g.add_argument("--strict-orientation", dest="strict_orientation", action="store_true",
                   default=True, help="require all orientation legs inside the algebra")
    g.add_argument("--generalized-orientation", dest="strict_orientation",
                   action="store_false", help="allow the leading orientation leg outside")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example", help="write a built-in example geometry")
    p.add_argument("kind", choices=EXAMPLE_KINDS)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--coupling", type=complex, default=1.0)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="seed for the seeded examples (also accepted globally)")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("check", help="run the condition suite on a triple file")
    p.add_argument("path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("convert", help="run a conversion")
    p.add_argument("direction", choices=("to-riemannian", "to-spinc"))
    p.add_argument("path")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("product", help="twist a triple by a module file")
    p.add_argument("path")
    p.add_argument("--module", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("double", help="double an ungraded triple")
    p.add_argument("path")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_double)

    p = sub.add_parser("homotopy-check", help="verify the doubling equivalences")
    p.add_argument("path")
    p.add_argument("--samples", type=int, default=10)
    p.set_defaults(func=cmd_homotopy)

    p = sub.add_parser("pair", help="index pairing matrix against projector files")
    p.add_argument("path")
    p.add_argument("--projectors", required=True)
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("zeta", help="regularized trace diagnostics")
    p.add_argument("path")
    p.add_argument("-s", "--s-values", dest="s", type=float, nargs="+",
                   default=[0.0, 1.0, 2.0])
    p.set_defaults(func=cmd_zeta)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
