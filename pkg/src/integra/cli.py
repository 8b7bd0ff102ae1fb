"""Command-line front end.

Exit codes: 0 success or certified, 1 usage error or infeasible request,
2 verification mismatch.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .charpoly import (
    DEFAULT_ORACLE_MAX_VERTICES,
    OracleBudgetExceeded,
    charpoly_c_factored,
    charpoly_t_factored,
    oracle_charpoly,
    spectrum_report,
    spectrum_report_from_poly,
)
from .families import (
    CertificationError,
    InfeasibleParameters,
    certify,
    family_4k1,
    family_4k3,
    instance_for_diameter,
    pell_solutions,
)
from .poly import format_factored, format_poly
from .trees import (
    DEFAULT_MAX_VERTICES,
    FORMATS,
    CsikvariParams,
    OddTreeParams,
    VertexBudgetExceeded,
    build_c,
    build_t,
    serialize,
    vertex_count_c,
    vertex_count_t,
)

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    max_vertices: int = DEFAULT_MAX_VERTICES
    oracle_max_vertices: int = DEFAULT_ORACLE_MAX_VERTICES
    output_format: str = "text"
    output_path: str | None = None

    def __post_init__(self):
        if self.max_vertices < 1 or self.oracle_max_vertices < 1:
            raise UsageError("vertex caps must be positive")
        if self.oracle_max_vertices > self.max_vertices:
            raise UsageError("--oracle-max-vertices cannot exceed --max-vertices")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        def pick(flag, env, default):
            if flag is not None:
                return flag
            if env in os.environ:
                try:
                    return int(os.environ[env])
                except ValueError:
                    raise UsageError(f"{env} must be an integer") from None
            return default

        max_vertices = pick(args.max_vertices, "INTEGRA_MAX_VERTICES", DEFAULT_MAX_VERTICES)
        # an unset oracle cap follows a lowered materialization cap
        oracle = pick(
            args.oracle_max_vertices,
            "INTEGRA_ORACLE_MAX",
            min(DEFAULT_ORACLE_MAX_VERTICES, max_vertices),
        )
        return cls(
            max_vertices=max_vertices,
            oracle_max_vertices=oracle,
            output_format=args.output_format,
            output_path=args.out,
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _construction(args):
    """Return (kind, params) from --c / --t."""
    try:
        if args.c is not None:
            return "c", CsikvariParams(tuple(args.c))
        return "t", OddTreeParams.from_sequence(args.t)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _certificate_text(cert) -> str:
    doc = cert.to_json()
    spec = doc["spectrum"]
    p = cert.instance.params
    lines = [
        f"family      {doc['family']} ({'k' if doc['family'] == '4k+1' else 'a'} = {doc['parameter']})",
        f"tree        {p}",
        f"diameter    {doc['diameter']}"
        + ("" if doc["diameter_checked"] else " (BFS check skipped: above vertex cap)"),
        f"vertices    {doc['vertices']}",
        f"integral    {spec['integral']}",
        "eigenvalue  multiplicity",
    ]
    lines += [f"{lam:>10}  {m}" for lam, m in spec["eigenvalues"]]
    return "\n".join(lines)


def cmd_gen(args, cfg: RunConfig) -> int:
    try:
        if args.diameter is not None:
            if args.family is not None:
                raise UsageError("use either --diameter or --family, not both")
            inst = instance_for_diameter(args.diameter, args.index)
        elif args.family == "4k1":
            if args.k is None or args.n is None:
                raise UsageError("--family 4k1 needs --k and --n")
            inst = family_4k1(args.k, args.n)
        elif args.family == "4k3":
            if args.a is None or args.n is None:
                raise UsageError("--family 4k3 needs --a and --n")
            inst = family_4k3(args.a, args.n)
        else:
            raise UsageError("give --family 4k1|4k3 or --diameter D")
    except InfeasibleParameters as exc:
        raise UsageError(str(exc)) from None
    try:
        cert = certify(inst, cfg.max_vertices)
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    _emit(cfg, _dump(cert.to_json()) if cfg.output_format == "json" else _certificate_text(cert))
    return EXIT_OK


def cmd_spectrum(args, cfg: RunConfig) -> int:
    kind, params = _construction(args)
    closed = charpoly_c_factored(params) if kind == "c" else charpoly_t_factored(params)
    n_vertices = vertex_count_c(params) if kind == "c" else vertex_count_t(params)
    oracle = None
    if args.method in ("oracle", "both"):
        if n_vertices > cfg.oracle_max_vertices:
            raise UsageError(
                f"oracle refuses {n_vertices} vertices (cap {cfg.oracle_max_vertices});"
                " use --method closed"
            )
        tree = build_c(params, cfg.max_vertices) if kind == "c" else build_t(params, cfg.max_vertices)
        oracle = oracle_charpoly(tree, cfg.oracle_max_vertices)
    agree = None
    if args.method == "both":
        agree = closed.expand() == oracle
    if args.method == "oracle":
        report = spectrum_report_from_poly(oracle)
    else:
        report = spectrum_report(closed, n_vertices)

    if cfg.output_format == "json":
        doc = {"tree": str(params), "vertices": n_vertices, "method": args.method}
        if args.method != "oracle":
            doc["factored"] = format_factored(closed)
        if oracle is not None:
            doc["oracle"] = oracle.to_list()
        if agree is not None:
            doc["agree"] = agree
        doc["spectrum"] = report.to_json()
        text = _dump(doc)
    else:
        lines = [f"tree        {params}", f"vertices    {n_vertices}"]
        if args.method != "oracle":
            lines.append(f"closed      {format_factored(closed)}")
        if oracle is not None:
            lines.append(f"oracle      {format_poly(oracle)}")
        if agree is not None:
            lines.append("methods agree" if agree else "METHODS DISAGREE")
        lines.append(f"integral    {report.integral}")
        lines += [f"{lam:>10}  {m}" for lam, m in report.eigenvalues.items()]
        for p, e in report.residuals:
            lines.append(f"residual    ({format_poly(p)})" + (f"^{e}" if e != 1 else ""))
        text = "\n".join(lines)
    _emit(cfg, text)
    return EXIT_MISMATCH if agree is False else EXIT_OK


def cmd_pell(args, cfg: RunConfig) -> int:
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    rows = [(s.x, s.y, s.a_value()) for s in pell_solutions(args.count)]
    if cfg.output_format == "json":
        text = _dump([{"x": x, "y": y, "a": a} for x, y, a in rows])
    else:
        wx = max(len("x"), *(len(str(x)) for x, _, _ in rows))
        wy = max(len("y"), *(len(str(y)) for _, y, _ in rows))
        lines = [f"{'x':>{wx}}  {'y':>{wy}}  a"]
        lines += [
            f"{x:>{wx}}  {y:>{wy}}  {'-' if a is None else a}" for x, y, a in rows
        ]
        text = "\n".join(lines)
    _emit(cfg, text)
    return EXIT_OK


def cmd_export(args, cfg: RunConfig) -> int:
    kind, params = _construction(args)
    try:
        tree = build_c(params, cfg.max_vertices) if kind == "c" else build_t(params, cfg.max_vertices)
    except VertexBudgetExceeded as exc:
        raise UsageError(f"{exc}; raise --max-vertices to at least {exc.required}") from None
    _emit(cfg, serialize(tree, args.format))
    return EXIT_OK


# --------------------------------------------------------------------------
# wiring
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-vertices", type=int, default=None,
                        help="materialization cap (env INTEGRA_MAX_VERTICES)")
    common.add_argument("--oracle-max-vertices", type=int, default=None,
                        help="brute-force oracle cap (env INTEGRA_ORACLE_MAX)")
    common.add_argument("--output-format", "--output", choices=("text", "json"), default="text")
    common.add_argument("--out", default=None, help="write to this file instead of stdout")

    tree_args = argparse.ArgumentParser(add_help=False)
    grp = tree_args.add_mutually_exclusive_group(required=True)
    grp.add_argument("--c", type=_int_list, metavar="R1,...,RN", help="C(r1, ..., rn)")
    grp.add_argument("--t", type=_int_list, metavar="R,R0,R1,...,RN", help="T(r, r0, r1, ..., rn)")

    parser = _Parser(prog="integra", description="Integral trees of odd diameter.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", parents=[common], help="generate and certify a family instance")
    gen.add_argument("--family", choices=("4k1", "4k3"))
    gen.add_argument("--k", type=int)
    gen.add_argument("--a", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--diameter", type=int)
    gen.add_argument("--index", type=int, default=0)
    gen.set_defaults(func=cmd_gen)

    spec = sub.add_parser("spectrum", parents=[common, tree_args],
                          help="characteristic polynomial and spectrum of C or T")
    spec.add_argument("--method", choices=("closed", "oracle", "both"), default="closed")
    spec.set_defaults(func=cmd_spectrum)

    pell = sub.add_parser("pell", parents=[common], help="solutions of x^2 - 3y^2 = -2")
    pell.add_argument("--count", type=int, default=5)
    pell.set_defaults(func=cmd_pell)

    export = sub.add_parser("export", parents=[common, tree_args], help="write a tree as edges")
    export.add_argument("--format", choices=FORMATS, default="edge-list")
    export.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        return args.func(args, cfg)
    except (UsageError, OracleBudgetExceeded, VertexBudgetExceeded) as exc:
        print(f"integra: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
