"""Command-line entry point: ``digraph-spectra {analyze,generate,bounds,verify,experiment}``.

Exit codes: 0 success, 1 eigensolver failure, 2 bad input, 3 verification
findings. Machine-readable output goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import families
from .alpha import parse_alpha
from .bounds import BoundDomainError, BoundReport, bound_report
from .certify import MAX_SCOPE, certify
from .digraph import DigraphError, parse_digraph, serialize_digraph
from .eigensolver import METHODS, EigensolverError
from .experiments import (
    THREADS_ENV,
    SampleError,
    emit_table,
    run_table,
    table_cells,
)
from .families import GeneratorError
from .spectral import (
    build_alpha_matrix,
    eigenvalues,
    frobenius_norm,
    low_energy,
    normality,
    spectral_moments,
    spectral_radius,
)

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_INPUT = 2
EXIT_FINDINGS = 3

log = logging.getLogger("digraph_spectra")


class InputError(Exception):
    pass


def _alpha_arg(text: str):
    try:
        return parse_alpha(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_digraph(path: str):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{path}: no such file")
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    try:
        return parse_digraph(text)
    except DigraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def _check_out_dir(prefix: str) -> None:
    parent = Path(prefix).expanduser().resolve().parent
    if not parent.is_dir():
        raise InputError(f"output directory {parent} does not exist")


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _table(rows: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {_fmt(v)}" for k, v in rows)


# ---- subcommands ------------------------------------------------------------

def cmd_analyze(args) -> int:
    g = _read_digraph(args.path)
    if g.n < 1:
        raise InputError("analyze needs at least one vertex")
    mat = build_alpha_matrix(g, args.alpha)
    spec = eigenvalues(mat, method=args.method)
    m1, m2 = spectral_moments(mat)
    verdict = normality(g, args.alpha)
    doc = {
        "n": g.n,
        "m": g.m,
        "alpha": args.alpha.value,
        "alpha_exact": str(args.alpha) if args.alpha.is_exact else None,
        **spec.to_json(),
        "spectral_radius": spectral_radius(spec),
        "low_energy": low_energy(spec),
        "M1": m1,
        "M2": m2,
        "frobenius_norm": frobenius_norm(mat),
        "normality": {
            "algebraic": verdict.algebraic,
            "topological": verdict.topological,
            "max_commutator_entry": verdict.max_commutator_entry,
            "witness": list(verdict.witness) if verdict.witness else None,
            "exact": verdict.exact,
        },
    }
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        rows = [(k, doc[k]) for k in ("n", "m", "alpha", "alpha_exact", "spectral_radius", "low_energy",
                                        "M1", "M2", "frobenius_norm", "residual_tol")]
        rows.append(("normal (algebraic)", verdict.algebraic))
        rows.append(("normal (topological)", verdict.topological))
        print(_table(rows))
        print("eigenvalues:")
        for re, im in doc["eigenvalues"]:
            print(f"  {re:+.12f} {im:+.12f}i")
    return EXIT_OK


def cmd_bounds(args) -> int:
    g = _read_digraph(args.path)
    rep = bound_report(g, args.alpha, method=args.method)
    if args.format == "json":
        print(json.dumps(rep.to_json(), indent=2))
    elif args.format == "csv":
        sys.stdout.write(rep.to_csv())
    else:
        doc = rep.to_json()
        print(_table([(k, doc[k]) for k in doc if k != "equality_flags"]))
        print("equality:")
        for bid, flags in rep.equality_flags.items():
            print(f"  {bid:<15} numeric={flags['numeric_equality']!s:<5} structural={flags['structural_match']!s:<5} "
                  f"case={flags['case'] or '-'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if not 1 <= args.scope <= MAX_SCOPE:
        raise InputError(f"--scope must lie in [1, {MAX_SCOPE}], got {args.scope}")
    result = certify(args.scope, method=args.method)
    print(result.summary())
    return EXIT_OK if result.passed else EXIT_FINDINGS


GENERATORS = {
    "complete": lambda a: families.complete_symmetric(a.n),
    "complete-plus-isolated": lambda a: families.complete_plus_isolated(a.k, a.n),
    "empty": lambda a: families.empty(a.n),
    "digon-union": lambda a: families.digon_union(a.t),
    "digon-chain": lambda a: families.digon_chain(a.t, _parse_arc_list(a.inter_arcs)),
    "cycle": lambda a: families.directed_cycle(a.k),
    "bipartite": lambda a: families.complete_bipartite_symmetric(a.t),
    "tournament": lambda a: families.rotational_tournament(a.n),
    "core-complete": lambda a: families.core_complete_random(
        families.CoreCompleteParams(a.n, a.r, a.beta, 2 * a.n if a.extra_arcs is None else a.extra_arcs), a.seed),
    "k-regular": lambda a: families.random_k_regular(a.n, a.k, a.seed),
    "random": lambda a: families.random_digraph(a.n, a.p, a.seed),
}

_REQUIRED = {
    "complete": ("n",), "complete-plus-isolated": ("k", "n"), "empty": ("n",), "digon-union": ("t",),
    "digon-chain": ("t",), "cycle": ("k",), "bipartite": ("t",), "tournament": ("n",),
    "core-complete": ("n", "r", "beta"), "k-regular": ("n", "k"), "random": ("n", "p"),
}


def _parse_arc_list(text: str | None) -> list[tuple[int, int]]:
    if not text:
        return []
    arcs = []
    for item in text.replace(";", " ").split():
        u, sep, v = item.partition(",")
        if not sep:
            raise InputError(f"malformed arc {item!r}; expected 'u,v'")
        try:
            arcs.append((int(u), int(v)))
        except ValueError:
            raise InputError(f"malformed arc {item!r}; expected 'u,v'") from None
    return arcs


def cmd_generate(args) -> int:
    missing = [f"--{p.replace('_', '-')}" for p in _REQUIRED[args.family] if getattr(args, p) is None]
    if missing:
        raise InputError(f"{args.family} needs {', '.join(missing)}")
    if args.out:
        _check_out_dir(args.out)
    try:
        g = GENERATORS[args.family](args)
    except (DigraphError, ValueError) as exc:
        raise InputError(str(exc)) from None
    text = serialize_digraph(g)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_experiment(args) -> int:
    _check_out_dir(args.out)
    if args.table == 1 and args.k_grid:
        raise InputError("--k-grid applies to table 2 only")
    if args.table == 2 and (args.beta_grid or args.extra_arcs is not None):
        raise InputError("--beta-grid/--extra-arcs apply to table 1 only")
    if args.samples < 1:
        raise InputError("--samples must be >= 1")
    grid = args.beta_grid if args.table == 1 else args.k_grid
    try:
        cells = table_cells(args.table, args.alpha.value, args.samples, args.seed, grid, args.extra_arcs,
                            tuple(args.bounds or ()))
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    results = run_table(cells, workers=args.workers)
    echo = {
        "table": args.table,
        "alpha": args.alpha.value,
        "samples": args.samples,
        "seed": args.seed,
        "grid": [c[0] for c in cells],
    }
    csv_text, json_text = emit_table(results, config_echo=echo)
    Path(args.out + ".csv").write_text(csv_text, encoding="utf-8")
    Path(args.out + ".json").write_text(json_text, encoding="utf-8")
    if args.format == "csv":
        sys.stdout.write(csv_text)
    elif args.format == "json":
        sys.stdout.write(json_text)
    else:
        for params, stats in results:
            for bid, s in stats.per_bound.items():
                key = ", ".join(f"{k}={v}" for k, v in params.items() if k != "alpha")
                print(f"{bid:<12} {key:<40} {s.mean:.4f} +- {s.std:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="digraph-spectra",
        description="Spectra, low energy and bound certification for A_alpha matrices of digraphs.",
        epilog=f"Environment: {THREADS_ENV} caps the number of experiment worker processes.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_alpha(p):
        p.add_argument("--alpha", type=_alpha_arg, required=True,
                       help="alpha in [0,1], decimal or exact rational 'p/q'")

    def add_method(p):
        p.add_argument("--method", choices=METHODS, default="lapack", help="eigensolver route (default: lapack)")

    p = sub.add_parser("analyze", help="spectrum, radius, low energy, moments and normality of a digraph")
    p.add_argument("path", help="edge-list file: header 'n m' then m lines 'u v'")
    add_alpha(p)
    add_method(p)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bounds", help="all bounds with equality verdicts for a digraph")
    p.add_argument("path")
    add_alpha(p)
    add_method(p)
    p.add_argument("--format", choices=("json", "table", "csv"), default="json")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="exhaustive invariant certification over all digraphs of one order")
    p.add_argument("--scope", type=int, default=4, help=f"vertex count to enumerate (default 4, max {MAX_SCOPE})")
    add_method(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="emit a named or random digraph as an edge list")
    p.add_argument("family", choices=sorted(GENERATORS))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--p", type=float, help="arc probability for 'random'")
    p.add_argument("--extra-arcs", type=int, help="extra arcs for 'core-complete' (default 2n)")
    p.add_argument("--inter-arcs", help="forward arcs for 'digon-chain', e.g. '1,2;3,4'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("experiment", help="Monte-Carlo bound comparison on generated families")
    p.add_argument("--table", type=int, choices=(1, 2), required=True,
                   help="1: spectral radius on core-complete digraphs; 2: low energy on di-regular digraphs")
    add_alpha(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta-grid", type=float, nargs="+", help="table 1 attachment parameters")
    p.add_argument("--k-grid", type=int, nargs="+", help="table 2 degrees (n = 10k)")
    p.add_argument("--extra-arcs", type=int, help="table 1 extra random arcs (default 2n)")
    p.add_argument("--bounds", nargs="+", help="bound ids to evaluate (default per table)")
    p.add_argument("--workers", type=int, help=f"worker processes (capped by {THREADS_ENV})")
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX.csv and PREFIX.json")
    p.add_argument("--format", choices=("json", "table", "csv"), default="table")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BoundDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EigensolverError as exc:
        print(f"eigensolver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (SampleError, GeneratorError) as exc:
        cause = getattr(exc, "cause", None)
        print(f"experiment failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER if isinstance(cause, EigensolverError) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
