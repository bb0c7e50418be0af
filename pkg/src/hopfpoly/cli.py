"""Command-line front end: ``hopfpoly <command> [flags]``.

Exit status is 0 when every check in the report passes, 1 when a statistic
misses its tolerance, and 2 on bad usage (argparse's own convention).
"""

import argparse
import csv
import sys

import numpy as np

from . import __version__, experiments, polyfile
from .polystats import EdgeSet
from .sampler import RejectionTimeout
from .theory import SpaceKind

SAMPLED_SPACES = ["arm2", "arm3", "pol2", "pol3", "earm2", "earm3"]
BASE_SPACES = ["arm2", "arm3", "pol2", "pol3"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _int_list(text):
    try:
        values = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _space_list(text):
    values = [t.strip().lower() for t in text.split(",") if t.strip()]
    bad = [v for v in values if v not in SAMPLED_SPACES]
    if bad or not values:
        raise argparse.ArgumentTypeError(f"unknown space(s) {bad or text!r}; choose from {SAMPLED_SPACES}")
    return values


def _common(p, seed_required=True, workers=True):
    p.add_argument("--seed", type=_seed, required=seed_required, default=None if seed_required else 0,
                   help="unsigned 64-bit seed" + ("" if seed_required else " (default 0)"))
    if workers:
        p.add_argument("--workers", type=_positive_int, default=1,
                       help="worker processes; results do not depend on this (default 1)")
    p.add_argument("--report", help="write the JSON report here as well as summarising on stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hopfpoly",
        description="Sample random polygons and check their statistics against closed forms.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("sample", help="write a polygon ensemble to a file")
    p.add_argument("--space", choices=SAMPLED_SPACES, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--count", type=_positive_int, required=True)
    p.add_argument("--out", default="-", help="output path, '-' for stdout (text only)")
    p.add_argument("--format", choices=["text", "binary"], default="text")
    _common(p, seed_required=False)

    p = sub.add_parser("verify-chords", help="mean squared chord lengths")
    p.add_argument("--space", choices=SAMPLED_SPACES, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--count", type=_positive_int, default=20000)
    p.add_argument("--k", type=_int_list, required=True, help="chord spans, e.g. 1,10,250")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", help="write per-k rows (csv) or the report (json) here")
    _common(p)

    p = sub.add_parser("verify-gyradius", help="mean gyradius")
    p.add_argument("--space", type=_space_list, required=True, help="one or more, comma-separated")
    p.add_argument("--n", type=_int_list, required=True, help="one or more, comma-separated")
    p.add_argument("--count", type=_positive_int, default=10000)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    _common(p)

    p = sub.add_parser("verify-pdf", help="edgelength histogram against its density")
    p.add_argument("--space", choices=BASE_SPACES, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--count", type=_positive_int, default=100000)
    p.add_argument("--bins", type=_positive_int, default=50)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="histogram CSV (or report JSON) path")
    _common(p)

    p = sub.add_parser("verify-ese", help="exact edge set ensemble identities")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=["pentagon", "irregular5"])
    src.add_argument("--edges", help="polyfile (first polygon) or whitespace table of edge vectors")
    p.add_argument("--k", type=_positive_int, default=2)
    p.add_argument("--report")

    p = sub.add_parser("reject", help="quasi-equilateral polygons by rejection")
    p.add_argument("--space", choices=BASE_SPACES, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True,
                   help="keep polygons whose longest edge is below lambda * 2/n")
    p.add_argument("--count", type=_positive_int, default=1000)
    p.add_argument("--out", help="write the accepted polygons here")
    p.add_argument("--format", choices=["text", "binary"], default="text")
    _common(p)

    p = sub.add_parser("curvature", help="total curvature of closed space polygons (exploratory)")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--count", type=_positive_int, default=10000)
    _common(p)

    p = sub.add_parser("project", help="project closed space polygons to random planes")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--count", type=_positive_int, default=10000)
    _common(p)
    return parser


def _finish(report, args, out=None):
    out = out or sys.stdout
    for line in report.summary_lines():
        print(line, file=out)
    for key in sorted(report.extra):
        value = report.extra[key]
        if isinstance(value, (int, float, str, bool)) or value is None:
            print(f"  {key}: {value}", file=out)
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} {report.command} ({report.wall_time:.2f} s)", file=out)
    path = getattr(args, "report", None)
    if path:
        report.write(path)
    return EXIT_OK if report.passed else EXIT_FAIL


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _estimate_rows(report, keys):
    header = list(keys) + ["estimate", "stderr", "theory", "rel_deviation", "passed"]
    rows = []
    for e in report.estimates:
        rel = e.rel_deviation
        rows.append([e.params.get(k) for k in keys]
                    + [e.estimate, e.stderr, e.theory, "" if rel is None else rel, int(e.passed)])
    return header, rows


def _tabular_output(report, args, keys):
    if not args.out:
        return
    if args.format == "csv":
        _write_rows(args.out, *_estimate_rows(report, keys))
    else:
        report.write(args.out)


def _validate_space_n(parser, space, n):
    kind = SpaceKind.parse(space)
    if n < kind.min_n:
        parser.error(f"{space} needs --n >= {kind.min_n}")


def cmd_sample(args, parser):
    _validate_space_n(parser, args.space, args.n)
    kind = SpaceKind.parse(args.space)
    edges = experiments.sample_ensemble(kind, args.n, args.count, args.seed, args.workers)
    pf = polyfile.PolyFile(edges, kind.closed)
    comments = [f"hopfpoly {__version__} sample --space {kind.value} --n {args.n} "
                f"--count {args.count} --seed {args.seed}"]
    if args.out == "-":
        if args.format != "text":
            parser.error("binary output needs --out PATH")
        polyfile.write_text(pf, sys.stdout, comments)
    else:
        polyfile.write(pf, args.out, args.format, comments)
        print(f"wrote {args.count} {kind.value} polygons with {args.n} edges to {args.out}")
    return EXIT_OK


def cmd_verify_chords(args, parser):
    _validate_space_n(parser, args.space, args.n)
    bad = [k for k in args.k if not 1 <= k <= args.n]
    if bad:
        parser.error(f"--k values {bad} outside [1, {args.n}]")
    report = experiments.verify_chords(args.space, args.n, args.count, args.seed, args.k, args.workers)
    _tabular_output(report, args, ["k"])
    return _finish(report, args)


def cmd_verify_gyradius(args, parser):
    for space in args.space:
        for n in args.n:
            _validate_space_n(parser, space, n)
    report = experiments.verify_gyradius(args.space, args.n, args.count, args.seed, args.workers)
    _tabular_output(report, args, ["space", "n"])
    return _finish(report, args)


def cmd_verify_pdf(args, parser):
    _validate_space_n(parser, args.space, args.n)
    if args.bins < 10:
        parser.error("--bins must be at least 10")
    if args.space == "pol2" and args.n < 3:
        parser.error("pol2 density needs --n >= 3")
    report = experiments.verify_pdf(args.space, args.n, args.count, args.bins, args.seed, args.workers)
    if args.out:
        if args.format == "csv":
            _write_rows(args.out, report.extra["histogram_columns"], report.extra["histogram"])
        else:
            report.write(args.out)
    return _finish(report, args)


def _load_edge_set(path):
    try:
        pf = polyfile.read(path)
        return EdgeSet(pf.edges[0])
    except polyfile.PolyFileError:
        return EdgeSet(np.loadtxt(path, ndmin=2))


def cmd_verify_ese(args, parser):
    if args.builtin:
        E, label = experiments.builtin_edge_set(args.builtin), args.builtin
    else:
        try:
            E, label = _load_edge_set(args.edges), args.edges
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read edge set: {exc}")
    if E.n > 8:
        parser.error(f"edge set has {E.n} edges; the permutation oracle stops at 8")
    if not 1 <= args.k <= E.n:
        parser.error(f"--k must lie in [1, {E.n}]")
    report = experiments.verify_ese(E, args.k, label)
    for e in report.estimates:
        print(f"{e.name}: oracle {e.estimate:.17g} formula {e.theory:.17g} "
              f"difference {e.estimate - e.theory:.3g}")
    return _finish(report, args)


def cmd_reject(args, parser):
    _validate_space_n(parser, args.space, args.n)
    if not args.lam > 1:
        parser.error("--lambda must exceed 1")
    report = experiments.reject(args.space, args.n, args.lam, args.count, args.seed,
                                args.workers, keep_edges=bool(args.out))
    if args.out:
        kind = SpaceKind.parse(args.space)
        polyfile.write(polyfile.PolyFile(report.payload, kind.closed), args.out, args.format,
                       [f"rejection lambda={args.lam} seed={args.seed}"])
    return _finish(report, args)


def cmd_curvature(args, parser):
    if args.n < 3:
        parser.error("--n must be at least 3")
    return _finish(experiments.curvature(args.n, args.count, args.seed, args.workers), args)


def cmd_project(args, parser):
    if args.n < 3:
        parser.error("--n must be at least 3")
    return _finish(experiments.project(args.n, args.count, args.seed, args.workers), args)


COMMANDS = {
    "sample": cmd_sample,
    "verify-chords": cmd_verify_chords,
    "verify-gyradius": cmd_verify_gyradius,
    "verify-pdf": cmd_verify_pdf,
    "verify-ese": cmd_verify_ese,
    "reject": cmd_reject,
    "curvature": cmd_curvature,
    "project": cmd_project,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, parser)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except RejectionTimeout as exc:
        print(f"hopfpoly: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"hopfpoly: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
