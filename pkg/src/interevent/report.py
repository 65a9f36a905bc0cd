"""Per-user analysis and window sweeps, rendered as TSV or aligned text."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .burst import BURST_THRESHOLD, BurstMetrics, Classification, burst_metrics, classify
from .errors import IntereventError
from .ingest import EventStream, summarize
from .intervals import IntervalSequence, intervals_of, truncate
from .powerlaw import PowerLawFit, fit
from .tsv import format_number, undef

ANALYSIS_COLUMNS = (
    "user_id", "message_count", "span_months", "n_tau", "alpha", "xmin",
    "ks_stat", "B", "M", "burst_class", "memory_class",
)
SWEEP_COLUMNS = ("user_id", "window_s", "n_tail", "alpha", "ks_stat")
DEFAULT_WINDOWS = (3600.0, 7200.0, 10800.0, 14400.0, 18000.0)

WINDOW_NOTE = "truncation (keep intervals <= W, refit)"


@dataclass(frozen=True)
class AnalysisOptions:
    method: str = "mle"
    xmin: object = None  # None -> smallest interval, "auto", or seconds
    window: float | None = None
    threshold: float = BURST_THRESHOLD

    @property
    def xmin_label(self) -> str:
        if self.xmin is None:
            return "min"
        return self.xmin if isinstance(self.xmin, str) else format_number(float(self.xmin))


@dataclass(frozen=True)
class AnalysisRow:
    user_id: str
    message_count: int
    span_months: float
    n_tau: int
    fit: PowerLawFit | None
    fit_error: str | None
    metrics: BurstMetrics | None
    classes: Classification | None

    def cells(self) -> list[str]:
        if self.fit is not None:
            fit_cells = [format_number(self.fit.alpha), format_number(self.fit.xmin),
                         format_number(self.fit.ks_stat)]
        else:
            fit_cells = [undef(self.fit_error)] * 3
        m = self.metrics
        if m is None:
            metric_cells = [undef("insufficient-events")] * 2
            class_cells = ["undefined", "undefined"]
        else:
            metric_cells = [
                format_number(m.B),
                format_number(m.M) if m.M is not None else undef(m.m_undefined_reason),
            ]
            class_cells = list(self.classes)
        return [
            self.user_id, str(self.message_count), format_number(self.span_months),
            str(self.n_tau), *fit_cells, *metric_cells, *class_cells,
        ]


@dataclass
class AnalysisReport:
    header: dict[str, str]
    rows: list[AnalysisRow]
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def table(self) -> list[list[str]]:
        return [list(ANALYSIS_COLUMNS)] + [row.cells() for row in self.rows]


@dataclass(frozen=True)
class SweepRow:
    user_id: str
    window_s: float
    n_tail: int
    fit: PowerLawFit | None
    fit_error: str | None

    def cells(self) -> list[str]:
        if self.fit is None:
            tail = [undef(self.fit_error)] * 2
        else:
            tail = [format_number(self.fit.alpha), format_number(self.fit.ks_stat)]
        return [self.user_id, format_number(self.window_s), str(self.n_tail), *tail]


@dataclass
class SweepResult:
    header: dict[str, str]
    rows: list[SweepRow]
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def table(self) -> list[list[str]]:
        return [list(SWEEP_COLUMNS)] + [row.cells() for row in self.rows]


def resolve_threads(threads) -> int:
    if threads in (None, "auto"):
        return os.cpu_count() or 1
    return max(1, int(threads))


def _ordered_map(func, items, threads: int):
    # executor.map yields in submission order, so output order never depends on scheduling
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _try_fit(seq: IntervalSequence, options: AnalysisOptions):
    try:
        return fit(seq, options.method, options.xmin), None
    except IntereventError as exc:
        return None, exc.reason


def analyze_stream(stream: EventStream, options: AnalysisOptions = AnalysisOptions()) -> AnalysisRow:
    """Full per-user pipeline; raises :class:`InsufficientEvents` below 2 events."""
    summary = summarize(stream)
    seq = intervals_of(stream)
    if options.window is not None:
        seq = truncate(seq, options.window)
    fitted, err = _try_fit(seq, options)
    metrics = classes = None
    if seq.n_tau >= 1:
        metrics = burst_metrics(seq)
        classes = classify(metrics, options.threshold)
    return AnalysisRow(
        stream.user_id, summary.message_count, summary.span_months, seq.n_tau,
        fitted, err, metrics, classes,
    )


def _skip_reason(stream: EventStream) -> str:
    return f"insufficient-events ({len(stream)} event{'s' if len(stream) != 1 else ''})"


def analyze(streams: dict[str, EventStream], options: AnalysisOptions = AnalysisOptions(),
            header: dict[str, str] | None = None, threads=1) -> AnalysisReport:
    users = sorted(streams)
    ready = [u for u in users if len(streams[u]) >= 2]
    skipped = [(u, _skip_reason(streams[u])) for u in users if len(streams[u]) < 2]
    rows = _ordered_map(lambda u: analyze_stream(streams[u], options), ready, resolve_threads(threads))
    return AnalysisReport(dict(header or {}), rows, skipped)


def sweep_stream(stream: EventStream, windows, options: AnalysisOptions = AnalysisOptions()) -> list[SweepRow]:
    seq = intervals_of(stream)
    rows = []
    for w in windows:
        part = truncate(seq, w)
        fitted, err = _try_fit(part, options)
        if fitted is not None:
            n_tail = fitted.n_tail
        elif options.xmin is None or isinstance(options.xmin, str):
            n_tail = part.n_tau
        else:
            n_tail = int((part.intervals >= float(options.xmin)).sum())
        rows.append(SweepRow(stream.user_id, float(w), n_tail, fitted, err))
    return rows


def sweep(streams: dict[str, EventStream], users=None, windows=DEFAULT_WINDOWS,
          options: AnalysisOptions = AnalysisOptions(), header: dict[str, str] | None = None,
          threads=1) -> SweepResult:
    """Truncate each user's intervals at every window and refit."""
    windows = [float(w) for w in windows]
    if not windows or any(w <= 0 for w in windows):
        raise ValueError("windows must be a non-empty list of positive durations")
    if any(b <= a for a, b in zip(windows, windows[1:])):
        raise ValueError("windows must be strictly ascending")
    chosen = sorted(streams) if users is None else sorted(users)
    ready = [u for u in chosen if len(streams[u]) >= 2]
    skipped = [(u, _skip_reason(streams[u])) for u in chosen if len(streams[u]) < 2]
    per_user = _ordered_map(lambda u: sweep_stream(streams[u], windows, options), ready,
                            resolve_threads(threads))
    return SweepResult(dict(header or {}), [r for rows in per_user for r in rows], skipped)


def run_header(command: str, **fields) -> dict[str, str]:
    head = {"tool": f"interevent {command}", "version": __version__}
    head.update({k: str(v) for k, v in fields.items()})
    return head


def render_tsv(report) -> str:
    lines = [f"# {key}: {value}" for key, value in report.header.items()]
    lines.extend("\t".join(row) for row in report.table())
    if report.skipped:
        lines.append("# skipped\tuser_id\treason")
        lines.extend(f"# skipped\t{user}\t{why}" for user, why in report.skipped)
    return "\n".join(lines) + "\n"


def render_human(report) -> str:
    table = report.table()
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    lines = [f"{key}: {value}" for key, value in report.header.items()]
    lines.append("")
    for k, row in enumerate(table):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    if report.skipped:
        lines.append("")
        lines.append("skipped:")
        lines.extend(f"  {user}: {why}" for user, why in report.skipped)
    return "\n".join(lines) + "\n"


def read_tsv_table(text: str) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Parse :func:`render_tsv` output back into its header and row dicts."""
    header, rows, columns = {}, [], None
    for line in text.splitlines():
        if line.startswith("# skipped"):
            continue
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            header[key] = value
            continue
        cells = line.split("\t")
        if columns is None:
            columns = cells
        else:
            rows.append(dict(zip(columns, cells)))
    return header, rows
