"""Command-line entry point: ``interevent analyze|ccdf|sweep|generate``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import IntereventError, InvalidSpec, UnknownUser
from .ingest import build_streams, load_files, write_events_csv
from .intervals import intervals_of, parse_duration
from .powerlaw import empirical_ccdf, fit, model_ccdf, write_ccdf_tsv
from .report import (
    DEFAULT_WINDOWS,
    WINDOW_NOTE,
    AnalysisOptions,
    analyze,
    render_human,
    render_tsv,
    run_header,
    sweep,
)
from .synth import GeneratorSpec, expected_metrics, generate, to_event_stream

EXIT_OK, EXIT_USAGE, EXIT_INPUT = 0, 1, 2

log = logging.getLogger("interevent")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _xmin_arg(text: str):
    if text in ("auto", "min"):
        return None if text == "min" else "auto"
    try:
        return parse_duration(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _duration_arg(text: str) -> float:
    try:
        return parse_duration(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _windows_arg(text: str) -> list[float]:
    windows = [_duration_arg(part) for part in text.split(",") if part.strip()]
    if not windows:
        raise argparse.ArgumentTypeError("empty window list")
    if any(b <= a for a, b in zip(windows, windows[1:])):
        raise argparse.ArgumentTypeError("windows must be strictly ascending")
    return windows


def _threads_arg(text: str):
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError:
        value = 0
    if value < 1:
        raise argparse.ArgumentTypeError("threads must be a positive integer or 'auto'")
    return value


def _seed_arg(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "jsonl"),
                        help="input format (default: from file suffix, else csv)")
    common.add_argument("--dedup", choices=("merge", "epsilon"), default="merge",
                        help="identical timestamps: merge them, or shift copies by 1 s")
    common.add_argument("--xmin", type=_xmin_arg, default=None, metavar="auto|min|SECONDS",
                        help="power-law cutoff (default: smallest interval)")
    common.add_argument("--fit-method", choices=("mle", "ccdf-ls"), default="mle")
    common.add_argument("--strict", action="store_true",
                        help="fail on the first malformed line instead of skipping it")
    common.add_argument("--seed", type=_seed_arg, default=None,
                        help="seed recorded in the run header")
    common.add_argument("--threads", type=_threads_arg, default=1, metavar="N|auto")
    common.add_argument("--human", action="store_true", help="aligned table instead of TSV")
    common.add_argument("--burst-threshold", type=float, default=0.1,
                        help="|B| band classified as poisson-like (default 0.1)")

    parser = _Parser(prog="interevent", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="per-user table of alpha, B and M")
    p.add_argument("inputs", nargs="+", type=Path)
    p.add_argument("--window", type=_duration_arg, default=None,
                   help="only analyse intervals no longer than this (e.g. 5h)")

    p = sub.add_parser("ccdf", parents=[common], help="export one user's empirical CCDF")
    p.add_argument("input", type=Path)
    p.add_argument("--user", help="user id (optional when the file holds one user)")
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--fit", action="store_true", help="also write the fitted model CCDF")
    p.add_argument("--fit-output", type=Path, default=None,
                   help="model CCDF path (default: OUTPUT with .model before the suffix)")

    p = sub.add_parser("sweep", parents=[common], help="refit after truncating at each window")
    p.add_argument("input", type=Path)
    p.add_argument("--users", default=None, help="comma-separated user ids (default: all)")
    p.add_argument("--windows", type=_windows_arg, default=list(DEFAULT_WINDOWS),
                   help="ascending durations, suffixes s/m/h/d (default 1h,2h,3h,4h,5h)")

    p = sub.add_parser("generate", help="write a synthetic event file")
    p.add_argument("--kind", required=True, choices=("poisson", "powerlaw", "periodic", "alternating"))
    p.add_argument("--n", type=int, required=True, help="number of intervals")
    p.add_argument("--seed", type=_seed_arg, default=0)
    p.add_argument("--rate", type=float, help="poisson: events per second")
    p.add_argument("--alpha", type=float, help="powerlaw: exponent > 1")
    p.add_argument("--xmin", type=float, help="powerlaw: cutoff in seconds")
    p.add_argument("--period", type=float, help="periodic: interval in seconds")
    p.add_argument("--a", type=float, help="alternating: first interval")
    p.add_argument("--b", type=float, help="alternating: second interval")
    p.add_argument("-o", "--output", default="-", help="output CSV (default: stdout)")
    p.set_defaults(usage_parser=p)
    return parser


def _load(args, paths):
    mode = "strict" if args.strict else "lenient"
    parsed = load_files(paths, args.format, mode)
    for line, why in parsed.skipped:
        log.warning("skipped line %d: %s", line, why)
    dedup = "keep-with-epsilon" if args.dedup == "epsilon" else "merge"
    return parsed, build_streams(parsed.records, dedup), dedup


def _options(args, window=None) -> AnalysisOptions:
    return AnalysisOptions(args.fit_method, args.xmin, window, args.burst_threshold)


def _header(command, args, paths, parsed, dedup, options, **extra):
    return run_header(
        command,
        inputs=",".join(str(p) for p in paths),
        format=args.format or "auto",
        dedup=dedup,
        fit_method=options.method,
        xmin=options.xmin_label,
        **extra,
        seed=args.seed if args.seed is not None else "none",
        skipped_lines=parsed.skip_count,
    )


def _emit(report, human: bool) -> None:
    sys.stdout.write(render_human(report) if human else render_tsv(report))


def cmd_analyze(args) -> int:
    parsed, streams, dedup = _load(args, args.inputs)
    options = _options(args, args.window)
    window = "none" if args.window is None else f"{args.window:g}s ({WINDOW_NOTE})"
    header = _header("analyze", args, args.inputs, parsed, dedup, options, window=window)
    _emit(analyze(streams, options, header, args.threads), args.human)
    return EXIT_OK


def cmd_ccdf(args) -> int:
    _, streams, _ = _load(args, [args.input])
    user = args.user
    if user is None:
        if len(streams) != 1:
            raise UsageError(f"--user is required: input holds {len(streams)} users")
        user = next(iter(streams))
    if user not in streams:
        raise UnknownUser(f"user {user!r} not found in {args.input}")
    seq = intervals_of(streams[user])
    points = empirical_ccdf(seq)
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        write_ccdf_tsv(fh, points.x, points.p)
    if args.fit:
        fitted = fit(seq, args.fit_method, args.xmin)
        xs = points.x[points.x >= fitted.xmin]
        target = args.fit_output or args.output.with_name(
            f"{args.output.stem}.model{args.output.suffix or '.tsv'}")
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            write_ccdf_tsv(fh, xs, model_ccdf(fitted, xs))
        print(f"alpha={fitted.alpha!r} xmin={fitted.xmin!r} ks={fitted.ks_stat!r} "
              f"method={fitted.method}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    parsed, streams, dedup = _load(args, [args.input])
    users = None
    if args.users:
        users = [u.strip() for u in args.users.split(",") if u.strip()]
        missing = [u for u in users if u not in streams]
        if missing:
            raise UnknownUser(f"user(s) not found: {', '.join(missing)}")
    options = _options(args)
    header = _header("sweep", args, [args.input], parsed, dedup, options,
                     windows=",".join(f"{w:g}" for w in args.windows),
                     window_interpretation=WINDOW_NOTE)
    _emit(sweep(streams, users, args.windows, options, header, args.threads), args.human)
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = GeneratorSpec(args.kind, args.n, args.seed, args.rate, args.alpha, args.xmin,
                         args.period, args.a, args.b)
    try:
        stream = to_event_stream(generate(spec))
        expected = expected_metrics(spec)
    except InvalidSpec as exc:
        args.usage_parser.print_usage(sys.stderr)
        print(f"interevent generate: invalid spec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output == "-":
        write_events_csv([stream], sys.stdout)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            write_events_csv([stream], fh)
    print(f"# expected {spec}", file=sys.stderr)
    for key, value in vars(expected).items():
        if value is not None:
            print(f"#   {key}: {value!r}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="interevent: %(levelname)s: %(message)s")
    try:
        handler = {"analyze": cmd_analyze, "ccdf": cmd_ccdf, "sweep": cmd_sweep,
                   "generate": cmd_generate}[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"interevent {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntereventError, OSError) as exc:
        print(f"interevent {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
