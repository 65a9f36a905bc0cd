"""Burstiness and memory coefficients of an interval sequence."""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import InsufficientEvents, ZeroVariance
from .intervals import IntervalSequence, moments

BURST_THRESHOLD = 0.1

_EXACT_LIMIT = 2.0**53


@dataclass(frozen=True)
class BurstMetrics:
    B: float
    M: float | None
    m_tau: float | None = None
    sigma_tau: float | None = None
    n_tau: int | None = None
    m_undefined_reason: str | None = None


class Classification(NamedTuple):
    burst: str
    memory: str


def burstiness(seq: IntervalSequence) -> float:
    """``(sigma - mean) / (sigma + mean)`` with the population sigma."""
    if seq.n_tau == 0:
        raise InsufficientEvents("burstiness needs at least one interval")
    mom = moments(seq)
    return (mom.std - mom.mean) / (mom.std + mom.mean)


def _as_scaled_ints(x: np.ndarray) -> list[int]:
    """Exact integers proportional to ``x`` (common power-of-two scale)."""
    if x.max() < _EXACT_LIMIT and np.all(x == np.floor(x)):
        return x.astype(np.int64).tolist()
    mant, expo = np.frexp(x)
    mant = (mant * 2.0**53).astype(np.int64)
    shift = expo - expo.min()
    return [m << int(k) for m, k in zip(mant.tolist(), shift.tolist())]


def _correlation(a: list[int], b: list[int]) -> float:
    n = len(a)
    sa, sb = sum(a), sum(b)
    cov = n * sum(map(operator.mul, a, b)) - sa * sb
    va = n * sum(map(operator.mul, a, a)) - sa * sa
    vb = n * sum(map(operator.mul, b, b)) - sb * sb
    r = math.sqrt(float(Fraction(cov * cov, va * vb)))
    return math.copysign(min(r, 1.0), cov)


def memory(seq: IntervalSequence) -> float:
    """Lag-one Pearson correlation between consecutive intervals.

    The first ``n - 1`` intervals are paired with the last ``n - 1``; each
    subsequence uses its own mean and population sigma. Raises
    :class:`ZeroVariance` when either subsequence is constant.

    Every double is a dyadic rational, so the moment sums are taken
    exactly over integers and only the final ratio is rounded. Perfectly
    (anti)correlated input therefore yields exactly +1 or -1.
    """
    x = seq.intervals
    if x.size < 2:
        raise InsufficientEvents(f"memory needs at least 2 intervals, got {x.size}")
    first, second = x[:-1], x[1:]
    if first.min() == first.max() or second.min() == second.max():
        raise ZeroVariance("a lagged subsequence is constant")
    ints = _as_scaled_ints(x)
    return _correlation(ints[:-1], ints[1:])


def burst_metrics(seq: IntervalSequence) -> BurstMetrics:
    mom = moments(seq)
    B = (mom.std - mom.mean) / (mom.std + mom.mean)
    M, why = None, None
    if seq.n_tau < 2:
        why = "too-short"
    else:
        try:
            M = memory(seq)
        except ZeroVariance:
            why = "zero-variance"
    return BurstMetrics(B, M, mom.mean, mom.std, seq.n_tau, why)


def classify(metrics: BurstMetrics, threshold: float = BURST_THRESHOLD) -> Classification:
    """Label burstiness by a symmetric band around 0 and memory by the sign of M.

    There is no neutral memory class: an M of exactly zero is labelled by
    its IEEE sign bit.
    """
    B = metrics.B
    if B > threshold:
        burst = "bursty"
    elif B < -threshold:
        burst = "periodic-like"
    else:
        burst = "poisson-like"
    M = metrics.M
    if M is None:
        mem = "undefined"
    else:
        mem = "anti-memory" if math.copysign(1.0, M) < 0 else "memory"
    return Classification(burst, mem)
