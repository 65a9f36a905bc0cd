"""Inter-event interval sequences and their moments."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientEvents
from .ingest import EventStream

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class IntervalSequence:
    """Chronologically ordered positive gaps between consecutive events, in seconds."""

    user_id: str
    intervals: np.ndarray

    def __post_init__(self):
        iv = np.array(self.intervals, dtype=np.float64)
        if iv.ndim != 1:
            raise ValueError("intervals must be one-dimensional")
        if iv.size and not (np.all(iv > 0) and np.all(np.isfinite(iv))):
            raise ValueError("intervals must be finite and strictly positive")
        iv.flags.writeable = False
        object.__setattr__(self, "intervals", iv)

    @property
    def n_tau(self) -> int:
        return int(self.intervals.size)

    def __len__(self):
        return self.n_tau

    def __eq__(self, other):
        if not isinstance(other, IntervalSequence):
            return NotImplemented
        return self.user_id == other.user_id and np.array_equal(self.intervals, other.intervals)

    __hash__ = None

    def scaled(self, c: float) -> "IntervalSequence":
        return IntervalSequence(self.user_id, self.intervals * c)

    def reversed(self) -> "IntervalSequence":
        return IntervalSequence(self.user_id, self.intervals[::-1])


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    std: float
    min: float
    max: float
    n: int


def intervals_of(stream: EventStream) -> IntervalSequence:
    if len(stream) < 2:
        raise InsufficientEvents(
            f"user {stream.user_id!r} has {len(stream)} event(s); need at least 2"
        )
    return IntervalSequence(stream.user_id, np.diff(stream.timestamps).astype(np.float64))


def moments(seq: IntervalSequence) -> MomentSummary:
    """Mean and population (divisor-n) standard deviation.

    A constant sequence gets ``std == 0`` and ``mean`` equal to that
    constant exactly, independent of summation rounding.
    """
    x = seq.intervals
    if x.size == 0:
        raise InsufficientEvents("moments need at least one interval")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return MomentSummary(lo, 0.0, lo, hi, int(x.size))
    mean = float(x.mean())
    std = float(np.sqrt(np.mean((x - mean) ** 2)))
    # rounding can push the mean a hair outside [min, max]
    mean = min(max(mean, lo), hi)
    return MomentSummary(mean, std, lo, hi, int(x.size))


def truncate(seq: IntervalSequence, window_s: float) -> IntervalSequence:
    """Keep, in order, the intervals no longer than ``window_s`` (inclusive)."""
    if not window_s > 0:
        raise ValueError(f"window must be positive, got {window_s!r}")
    x = seq.intervals
    return IntervalSequence(seq.user_id, x[x <= window_s])


def shuffle_intervals(seq: IntervalSequence, seed: int) -> IntervalSequence:
    """Seeded random reordering of the intervals (null model for memory).

    The permutation comes from ``numpy.random.Generator(PCG64(seed))``,
    whose ``permutation`` is a Fisher-Yates shuffle. Seeds are reduced
    modulo 2**64.
    """
    if seq.n_tau == 0:
        raise InsufficientEvents("cannot shuffle an empty sequence")
    rng = np.random.Generator(np.random.PCG64(int(seed) & _MASK64))
    return IntervalSequence(seq.user_id, seq.intervals[rng.permutation(seq.n_tau)])


_DURATION = re.compile(r"^\s*(\d+(?:\.\d*)?|\.\d+)\s*([smhd]?)\s*$", re.IGNORECASE)
_UNIT_S = {"": 1, "s": 1, "m": 60, "h": 3600, "d": 86400}


def parse_duration(text: str) -> float:
    """``'90'``, ``'90s'``, ``'15m'``, ``'2h'``, ``'1.5d'`` -> seconds."""
    m = _DURATION.match(text)
    if not m:
        raise ValueError(f"invalid duration {text!r}")
    value = float(m.group(1)) * _UNIT_S[m.group(2).lower()]
    if value <= 0:
        raise ValueError(f"duration must be positive: {text!r}")
    return value
