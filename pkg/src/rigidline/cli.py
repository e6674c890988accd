"""Command-line entry point: ``rigidline <subcommand> ...``.

Exit codes: 0 success, 2 inconsistent input, 3 algorithm-reported failure,
64 usage error or malformed input.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import cliques, constructions, formats, monotone, reconstruction, report
from .core import DEFAULT_SEED, Graph, Space, sample_measurements
from .determination import InconsistentInput, closure

EXIT_OK = 0
EXIT_INCONSISTENT = 2
EXIT_FAILED = 3
EXIT_USAGE = 64

log = logging.getLogger("rigidline")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def cmd_close(args) -> int:
    m = formats.parse_measurements(_read(args.input))
    try:
        closed = closure(m, Space(args.space))
    except InconsistentInput as exc:
        print(f"inconsistent input: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    _emit(formats.format_measurements((m.n, closed.determined)), args.output)
    return EXIT_OK


def cmd_clique(args) -> int:
    g = formats.parse_edge_list(_read(args.input))
    cert = cliques.extract_clique(g, args.k, args.seed)
    _emit(formats.format_certificate(cert), args.output)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    m = formats.parse_measurements(_read(args.input))
    result = reconstruction.embed_line(m, args.seed, args.max_rounds)
    if not result.succeeded:
        print(f"FAILED after {result.iterations_used} rounds", file=sys.stderr)
        return EXIT_FAILED
    _emit(formats.format_positions(Space.LINE, result.emb), args.output)
    return EXIT_OK


def cmd_correct(args) -> int:
    n, table = formats.parse_full_table(_read(args.input))
    if n < 2:
        raise UsageError("distance table needs at least two points")
    result = reconstruction.correct_distances(table, args.c)
    if not result.succeeded:
        print(f"FAILED: {result.reason}", file=sys.stderr)
        return EXIT_FAILED
    _emit(formats.format_full_table(n, result.distances), args.output)
    return EXIT_OK


def cmd_threshold(args) -> int:
    sweep = monotone.threshold_sweep(args.n, args.eps_list, args.trials, args.seed, args.workers)
    _emit(report.threshold_csv(sweep), args.output)
    if args.plot:
        report.plot_threshold(sweep, args.plot)
    return EXIT_OK


def cmd_coverage(args) -> int:
    hits, p = monotone.coverage_counts(args.n, args.C, args.trials, args.seed, args.workers)
    _emit(report.coverage_csv(args.n, args.C, p, hits, args.trials), args.output)
    return EXIT_OK


def _base_graph(args) -> Graph:
    if args.base:
        return formats.parse_edge_list(_read(args.base))
    if args.kind == "tgraph":
        return Graph.complete(3)
    return constructions.gen_incidence_c4free(args.q)


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "incidence":
        text = formats.format_edge_list(constructions.gen_incidence_c4free(args.q))
    elif kind == "blowup":
        text = formats.format_edge_list(constructions.blow_up(_base_graph(args), args.k))
    elif kind == "tgraph":
        g = constructions.iterate_T(_base_graph(args), args.steps)[-1]
        text = formats.format_edge_list(g)
    elif kind == "tree-ambiguity":
        inst = constructions.gen_tree_ambiguity(args.t_scale, args.points_per_side)
        text = formats.format_ambiguity(inst)
    else:
        if Space(args.space) is Space.CIRCLE:
            cfg = constructions.gen_planted_circle(args.n, args.seed)
        else:
            cfg = constructions.gen_planted_line(args.n, args.plant, args.seed)
        text = formats.format_config(cfg)
    _emit(text, args.output)
    return EXIT_OK


def cmd_demo(args) -> int:
    cfg = constructions.gen_planted_line(args.n, args.plant, args.seed)
    p = min(1.0, args.C * math.log(args.n) / args.n)
    m = sample_measurements(cfg, p, args.seed)
    result = reconstruction.embed_line(m, args.seed, args.max_rounds)
    lines = [f"n={args.n} C={args.C:g} p={p:.6f} measurements={len(m)}"]
    truth = reconstruction.config_embedding(cfg)
    if result.succeeded:
        match = reconstruction.isometry_match(result.emb, truth)
        lines.append(f"SUCCESS rounds={result.iterations_used}")
        lines.append(f"isometry: {'MATCH' if match else 'MISMATCH'}")
        if args.plot:
            report.plot_embedding(truth, result.emb, args.plot)
    else:
        lines.append(f"FAILED rounds={result.iterations_used}")
        lines.append("isometry: n/a")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if result.succeeded else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rigidline", description="Reconstruct point sets on the line and circle from partial distances.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        return p

    p = add("close", cmd_close, "determine every distance derivable by local rules")
    p.add_argument("input")
    p.add_argument("--space", choices=[s.value for s in Space], default="line")

    p = add("clique", cmd_clique, "extract a certified clique from an edge list")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=0, help="common-neighbour bound for non-adjacent pairs")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = add("reconstruct", cmd_reconstruct, "embed a sparse random measurement set on the line")
    p.add_argument("--input", required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--max-rounds", type=int, default=None)

    p = add("correct", cmd_correct, "repair a full distance table with corrupted entries")
    p.add_argument("input")
    p.add_argument("--c", type=float, default=None, help="declared per-point corruption fraction")

    for name, fn, help_ in (
        ("threshold", cmd_threshold, "monotone 1->n path frequency around p = ln(n)/n"),
        ("coverage", cmd_coverage, "frequency of monotone paths between all far-apart pairs"),
    ):
        p = add(name, fn, help_)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--workers", type=int, default=None, help="process count (default: RIGIDITY_THREADS or all cores)")
        if name == "threshold":
            p.add_argument("--eps-list", type=_float_list, required=True)
            p.add_argument("--plot", help="also render the sweep as a figure (png/pdf/svg)")
        else:
            p.add_argument("--C", type=float, required=True)

    p = add("gen", cmd_gen, "generate constructions and planted configurations")
    p.add_argument("--kind", required=True, choices=["incidence", "blowup", "tgraph", "tree-ambiguity", "planted"])
    p.add_argument("--q", type=int, default=2, help="prime order of the projective plane")
    p.add_argument("--k", type=int, default=2, help="clique size of the blow-up")
    p.add_argument("--base", help="edge-list file for blowup/tgraph (default: incidence graph / K3)")
    p.add_argument("--steps", type=int, default=1, help="T(G) iterations")
    p.add_argument("--t-scale", type=int, default=1)
    p.add_argument("--points-per-side", type=int, default=2)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--plant", choices=[k.value for k in constructions.PlantKind], default="uniform")
    p.add_argument("--space", choices=[s.value for s in Space], default="line")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = add("demo", cmd_demo, "plant, sample, reconstruct and check the result")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--C", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--plant", choices=[k.value for k in constructions.PlantKind], default="uniform")
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--plot", help="also render recovered vs planted positions")
    return parser


def _glue_negative_lists(argv: list[str]) -> list[str]:
    # "--eps-list -0.5,0.5" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--eps-list":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_lists(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except formats.FormatError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
