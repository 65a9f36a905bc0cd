"""Event-log parsing and per-user stream construction.

Two on-disk formats are accepted:

* CSV with a ``user_id,timestamp`` header (LF or CRLF, UTF-8)
* JSONL, one object per line with keys ``user`` and ``ts``

Timestamps are epoch seconds (integers, or decimals truncated toward zero)
or ISO-8601 strings. ISO strings without a zone are read as UTC.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import IO, Iterable, NamedTuple

import numpy as np

from .errors import EmptyStream, ParseError

logger = logging.getLogger(__name__)

#: Julian year / 12, in seconds
MEAN_MONTH_S = 2_629_746

DEDUP_POLICIES = ("merge", "keep-with-epsilon")
_DEDUP_ALIASES = {"merge": "merge", "keep-with-epsilon": "keep-with-epsilon", "epsilon": "keep-with-epsilon"}

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_INT64_MAX = 2**63 - 1


class RawEventRecord(NamedTuple):
    user_id: str
    timestamp: int
    source_line: int


@dataclass
class ParseResult:
    """Records kept by :func:`parse_events` plus the lines it skipped."""

    records: list[RawEventRecord]
    skipped: list[tuple[int, str]] = field(default_factory=list)
    naive_iso: int = 0

    @property
    def skip_count(self) -> int:
        return len(self.skipped)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


@dataclass(frozen=True, eq=False)
class EventStream:
    """One user's strictly increasing event times (epoch seconds)."""

    user_id: str
    timestamps: np.ndarray
    duplicate_count: int = 0

    def __post_init__(self):
        ts = np.array(self.timestamps, dtype=np.int64)
        if ts.ndim != 1:
            raise ValueError("timestamps must be one-dimensional")
        if ts.size > 1 and not np.all(ts[1:] > ts[:-1]):
            raise ValueError("timestamps must be strictly increasing")
        ts.flags.writeable = False
        object.__setattr__(self, "timestamps", ts)

    def __len__(self):
        return int(self.timestamps.size)

    def __eq__(self, other):
        if not isinstance(other, EventStream):
            return NotImplemented
        return (
            self.user_id == other.user_id
            and self.duplicate_count == other.duplicate_count
            and np.array_equal(self.timestamps, other.timestamps)
        )

    __hash__ = None

    @property
    def record_count(self) -> int:
        """Number of source records before duplicates were merged away."""
        return len(self) + self.duplicate_count


@dataclass(frozen=True)
class StreamSummary:
    user_id: str
    message_count: int
    span_months: float
    first_ts: int
    last_ts: int


def parse_timestamp(value) -> tuple[int, bool]:
    """Convert one timestamp cell to epoch seconds.

    Returns ``(seconds, naive)`` where ``naive`` flags an ISO-8601 value
    that carried no zone and was read as UTC. Raises ``ValueError`` on
    anything else, including negative or out-of-range times.
    """
    if isinstance(value, bool):
        raise ValueError(value)
    if isinstance(value, int):
        secs = value
    elif isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(value)
        secs = int(value)
    elif isinstance(value, str):
        text = value.strip()
        try:
            secs = int(text)
        except ValueError:
            secs = None
        if secs is None:
            try:
                secs = int(Decimal(text))
            except (InvalidOperation, ValueError, OverflowError):
                secs = None
        if secs is None:
            return _parse_iso(text)
    else:
        raise ValueError(value)
    if secs < 0 or secs > _INT64_MAX:
        raise ValueError(value)
    return secs, False


def _parse_iso(text: str) -> tuple[int, bool]:
    if text[-1:] in ("Z", "z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    naive = dt.tzinfo is None
    if naive:
        dt = dt.replace(tzinfo=timezone.utc)
    delta = dt - _EPOCH
    secs = delta.days * 86400 + delta.seconds
    if secs < 0:
        raise ValueError(text)
    return secs, naive


def _as_text(source) -> str:
    if isinstance(source, str):
        return source
    if isinstance(source, (bytes, bytearray, memoryview)):
        data = bytes(source)
    else:
        data = source.read()
        if isinstance(data, str):
            return data
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(0, f"input is not valid UTF-8 ({exc.reason})") from None


def parse_events(source, format: str = "csv", mode: str = "strict") -> ParseResult:
    """Parse an event log into raw records.

    ``source`` may be bytes, str, or a readable file object. In ``strict``
    mode the first malformed line raises :class:`ParseError`; in
    ``lenient`` mode malformed lines are collected in ``result.skipped``.
    Blank lines are ignored and do not count as data lines.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown mode {mode!r}")
    text = _as_text(source)
    if format == "csv":
        result = _parse_csv(text, mode == "strict")
    elif format == "jsonl":
        result = _parse_jsonl(text, mode == "strict")
    else:
        raise ValueError(f"unknown format {format!r}")
    if result.naive_iso:
        logger.warning(
            "%d ISO-8601 timestamp(s) without a zone offset were read as UTC",
            result.naive_iso,
        )
    return result


def _parse_csv(text: str, strict: bool) -> ParseResult:
    result = ParseResult([])
    records, skipped = result.records, result.skipped
    reader = csv.reader(io.StringIO(text, newline=""))
    rows = iter(reader)
    header = None
    # csv.Error aborts the inner loop; the reader itself resumes on the next line
    while True:
        try:
            if header is None:
                header = _read_header(rows, reader)
                if header is None:
                    break
            user_col, ts_col, width = header
            for row in rows:
                if len(row) >= width:
                    user = row[user_col].strip()
                    cell = row[ts_col]
                    try:
                        secs = int(cell)
                    except ValueError:
                        secs = -1
                    if user and 0 <= secs <= _INT64_MAX:
                        records.append(RawEventRecord(user, secs, reader.line_num))
                        continue
                    if not row or (len(row) == 1 and not row[0].strip()):
                        continue
                    if not user:
                        reason = "empty user_id"
                    else:
                        try:
                            secs, naive = parse_timestamp(cell)
                        except ValueError:
                            reason = "invalid timestamp"
                        else:
                            result.naive_iso += naive
                            records.append(RawEventRecord(user, secs, reader.line_num))
                            continue
                elif not row or (len(row) == 1 and not row[0].strip()):
                    continue
                else:
                    reason = f"expected at least {width} fields, got {len(row)}"
                if strict:
                    raise ParseError(reader.line_num, reason)
                skipped.append((reader.line_num, reason))
            break
        except csv.Error as exc:
            reason = f"unreadable CSV line ({exc})"
            if strict or header is None:
                raise ParseError(reader.line_num, reason) from None
            skipped.append((reader.line_num, reason))
    if header is None and strict:
        raise ParseError(1, "missing header user_id,timestamp")
    return result


def _read_header(rows, reader):
    for row in rows:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        names = [c.strip() for c in row]
        if "user_id" not in names or "timestamp" not in names:
            raise ParseError(reader.line_num, "missing header user_id,timestamp")
        user_col, ts_col = names.index("user_id"), names.index("timestamp")
        return user_col, ts_col, max(user_col, ts_col) + 1
    return None


def _parse_jsonl(text: str, strict: bool) -> ParseResult:
    result = ParseResult([])
    for line, raw in enumerate(text.split("\n"), start=1):
        if not raw.strip():
            continue
        reason = None
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError:
            reason = "invalid JSON"
        else:
            if not isinstance(obj, dict):
                reason = "expected a JSON object"
            elif not isinstance(obj.get("user"), str) or not obj["user"].strip():
                reason = "missing or empty user"
            elif "ts" not in obj:
                reason = "missing ts"
            else:
                try:
                    secs, naive = parse_timestamp(obj["ts"])
                except ValueError:
                    reason = "invalid timestamp"
                else:
                    result.naive_iso += naive
                    result.records.append(RawEventRecord(obj["user"].strip(), secs, line))
        if reason is None:
            continue
        if strict:
            raise ParseError(line, reason)
        result.skipped.append((line, reason))
    return result


def build_streams(records: Iterable[RawEventRecord], dedup: str = "merge") -> dict[str, EventStream]:
    """Group records by user into sorted, duplicate-free streams.

    ``merge`` collapses identical timestamps and counts the collapsed
    events in ``duplicate_count``. ``keep-with-epsilon`` keeps every event
    and pushes each duplicate one second past its predecessor, so the k-th
    copy of a time ``t`` lands on ``t + k`` unless that slot is taken.
    The result is keyed in lexicographic user order.
    """
    try:
        policy = _DEDUP_ALIASES[dedup]
    except KeyError:
        raise ValueError(f"unknown dedup policy {dedup!r}") from None
    grouped: dict[str, list[int]] = {}
    for rec in records:
        grouped.setdefault(rec[0], []).append(rec[1])

    streams = {}
    for user in sorted(grouped):
        ts = np.sort(np.array(grouped[user], dtype=np.int64))
        if policy == "merge":
            uniq = np.unique(ts)
            streams[user] = EventStream(user, uniq, int(ts.size - uniq.size))
        else:
            idx = np.arange(ts.size, dtype=np.int64)
            shifted = np.maximum.accumulate(ts - idx) + idx
            streams[user] = EventStream(user, shifted, 0)
    return streams


def summarize(stream: EventStream, original_count: int | None = None) -> StreamSummary:
    """Message count and time span of one stream."""
    if len(stream) == 0:
        raise EmptyStream(f"user {stream.user_id!r} has no events")
    if original_count is None:
        original_count = stream.record_count
    first, last = int(stream.timestamps[0]), int(stream.timestamps[-1])
    return StreamSummary(
        user_id=stream.user_id,
        message_count=int(original_count),
        span_months=(last - first) / MEAN_MONTH_S,
        first_ts=first,
        last_ts=last,
    )


def write_events_csv(streams: Iterable[EventStream], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("user_id", "timestamp"))
    for stream in streams:
        user = stream.user_id
        writer.writerows((user, t) for t in stream.timestamps.tolist())


def infer_format(path) -> str:
    return "jsonl" if Path(path).suffix.lower() in (".jsonl", ".ndjson") else "csv"


def load_files(paths, format: str | None = None, mode: str = "strict") -> ParseResult:
    """Parse several files into one combined :class:`ParseResult`.

    ``format=None`` picks the format per file from its suffix.
    Parse errors are re-raised with the file name prepended.
    """
    combined = ParseResult([])
    for path in paths:
        fmt = format or infer_format(path)
        data = Path(path).read_bytes()
        try:
            part = parse_events(data, fmt, mode)
        except ParseError as exc:
            err = ParseError(exc.line, f"{path}: {exc.detail}")
            raise err from None
        combined.records.extend(part.records)
        combined.skipped.extend((line, f"{path}: {why}") for line, why in part.skipped)
        combined.naive_iso += part.naive_iso
    return combined
