"""Continuous power-law fits to interval tails.

The density is taken as ``p(t) ∝ t**-alpha`` for ``t >= xmin``, so the
survival function normalised at the cutoff is ``(t / xmin)**-(alpha - 1)``.
The exponent is estimated with the closed-form maximum-likelihood
estimator; a least-squares line through the log-log CCDF is kept as a
cross-check only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTail, DomainError, InsufficientEvents
from .intervals import IntervalSequence
from .tsv import format_number

METHODS = ("mle", "ccdf-ls")

# candidate rows evaluated together by the xmin scan
_SCAN_CHUNK = 256


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    xmin: float
    n_tail: int
    ks_stat: float
    method: str = "mle"


@dataclass(frozen=True, eq=False)
class CcdfPoints:
    """Empirical survival function ``P(X >= x)`` at each distinct ``x``."""

    x: np.ndarray
    p: np.ndarray

    def __len__(self):
        return int(self.x.size)

    def __iter__(self):
        return zip(self.x.tolist(), self.p.tolist())

    def __eq__(self, other):
        if not isinstance(other, CcdfPoints):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.p, other.p)

    __hash__ = None


def _distinct(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct values and, for each, how many samples are >= it."""
    ux, counts = np.unique(values, return_counts=True)
    at_least = np.cumsum(counts[::-1])[::-1]
    return ux, at_least


def empirical_ccdf(seq: IntervalSequence) -> CcdfPoints:
    if seq.n_tau == 0:
        raise InsufficientEvents("CCDF of an empty sequence")
    ux, at_least = _distinct(seq.intervals)
    return CcdfPoints(ux, at_least / seq.n_tau)


def _tail(seq: IntervalSequence, xmin: float) -> np.ndarray:
    if not xmin > 0:
        raise DomainError(f"xmin must be positive, got {xmin!r}")
    x = seq.intervals
    return x[x >= xmin]


def _mle_alpha(tail: np.ndarray, xmin: float) -> float:
    if tail.size < 2:
        raise InsufficientEvents(f"power-law tail above xmin={xmin:g} has {tail.size} value(s); need 2")
    log_sum = float(np.log(tail / xmin).sum())
    if log_sum <= 0:
        raise DegenerateTail(f"every tail value equals xmin={xmin:g}")
    return 1.0 + tail.size / log_sum


def model_ccdf(fit: PowerLawFit, x):
    """``(x / xmin) ** -(alpha - 1)``, equal to 1 at the cutoff.

    Accepts a scalar or an array; every ``x`` must be at least ``xmin``.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < fit.xmin) or np.any(np.isnan(arr)):
        raise DomainError(f"model CCDF is only defined for x >= xmin={fit.xmin:g}")
    out = (arr / fit.xmin) ** (1.0 - fit.alpha)
    return float(out) if out.ndim == 0 else out


def _ks_from_tail(tail: np.ndarray, alpha: float, xmin: float) -> float:
    ux, at_least = _distinct(tail)
    emp = at_least / tail.size
    model = (ux / xmin) ** (1.0 - alpha)
    return float(np.max(np.abs(emp - model)))


def ks_statistic(seq: IntervalSequence, fit: PowerLawFit) -> float:
    """Largest gap between the tail's empirical CCDF and the model CCDF.

    Both are evaluated at the distinct tail values, with the empirical
    CCDF recomputed over ``x >= xmin`` only.
    """
    tail = _tail(seq, fit.xmin)
    if tail.size == 0:
        raise InsufficientEvents(f"no intervals at or above xmin={fit.xmin:g}")
    return _ks_from_tail(tail, fit.alpha, fit.xmin)


def scan_xmin(seq: IntervalSequence) -> tuple[float, float]:
    """Pick the cutoff whose MLE fit has the smallest KS distance.

    Every distinct interval value that leaves a non-degenerate tail is a
    candidate; ties go to the smallest cutoff. Returns ``(xmin, ks)``.
    Cost grows with the square of the number of distinct values.
    """
    x = seq.intervals
    if x.size < 2:
        raise InsufficientEvents(f"xmin scan needs at least 2 intervals, got {x.size}")
    ux, at_least = _distinct(x)
    if ux.size < 2:
        raise DegenerateTail("all intervals are equal; no cutoff leaves a usable tail")
    counts = -np.diff(np.append(at_least, 0))
    log_u = np.log(ux)
    k = ux.size
    cols = np.arange(k)
    n_cand = k - 1
    ks = np.empty(n_cand)
    for start in range(0, n_cand, _SCAN_CHUNK):
        rows = np.arange(start, min(start + _SCAN_CHUNK, n_cand))
        mask = cols[None, :] >= rows[:, None]
        log_ratio = np.where(mask, log_u[None, :] - log_u[rows, None], 0.0)
        n_tail = at_least[rows].astype(np.float64)
        alpha = 1.0 + n_tail / (log_ratio * counts[None, :]).sum(axis=1)
        model = np.exp((1.0 - alpha)[:, None] * log_ratio)
        emp = at_least[None, :] / n_tail[:, None]
        gap = np.where(mask, np.abs(emp - model), 0.0)
        ks[rows] = gap.max(axis=1)
    best = int(np.argmin(ks))
    return float(ux[best]), float(ks[best])


def _resolve_xmin(seq: IntervalSequence, xmin) -> float:
    if xmin is None or xmin == "min":
        if seq.n_tau == 0:
            raise InsufficientEvents("cannot fit an empty sequence")
        return float(seq.intervals.min())
    if xmin == "auto":
        return scan_xmin(seq)[0]
    return float(xmin)


def fit_mle(seq: IntervalSequence, xmin=None) -> PowerLawFit:
    """Closed-form MLE ``alpha = 1 + n / sum(ln(t / xmin))`` over ``t >= xmin``.

    ``xmin`` is a number of seconds, ``None``/``"min"`` for the smallest
    interval, or ``"auto"`` for the KS-minimising scan.
    """
    cut = _resolve_xmin(seq, xmin)
    tail = _tail(seq, cut)
    alpha = _mle_alpha(tail, cut)
    return PowerLawFit(alpha, cut, int(tail.size), _ks_from_tail(tail, alpha, cut), "mle")


def ccdf_slope(points: CcdfPoints) -> float:
    """Least-squares slope of ``ln p`` against ``ln x``."""
    if len(points) < 2:
        raise DegenerateTail("need at least 2 distinct CCDF points for a slope")
    lx, lp = np.log(points.x), np.log(points.p)
    dx = lx - lx.mean()
    return float(np.dot(dx, lp - lp.mean()) / np.dot(dx, dx))


def fit_ccdf_ls(seq: IntervalSequence, xmin=None) -> PowerLawFit:
    """Cross-check estimator: ``alpha = 1 - slope`` of the log-log tail CCDF."""
    cut = _resolve_xmin(seq, xmin)
    tail = _tail(seq, cut)
    ux, at_least = _distinct(tail)
    if ux.size < 2:
        raise DegenerateTail(f"tail above xmin={cut:g} has fewer than 2 distinct values")
    alpha = 1.0 - ccdf_slope(CcdfPoints(ux, at_least / tail.size))
    return PowerLawFit(alpha, cut, int(tail.size), _ks_from_tail(tail, alpha, cut), "ccdf-ls")


def fit(seq: IntervalSequence, method: str = "mle", xmin=None) -> PowerLawFit:
    if method == "mle":
        return fit_mle(seq, xmin)
    if method == "ccdf-ls":
        return fit_ccdf_ls(seq, xmin)
    raise ValueError(f"unknown fit method {method!r}")


def write_ccdf_tsv(fh, x, p, header: bool = True) -> None:
    """Two-column ``x<TAB>p`` export, ``x`` ascending."""
    if header:
        fh.write("x\tp\n")
    for xi, pi in zip(np.asarray(x).tolist(), np.asarray(p).tolist()):
        fh.write(f"{format_number(float(xi))}\t{format_number(float(pi))}\n")


def read_ccdf_tsv(fh) -> CcdfPoints:
    xs, ps = [], []
    for line in fh:
        line = line.strip()
        if not line or line == "x\tp":
            continue
        a, b = line.split("\t")
        xs.append(float(a))
        ps.append(float(b))
    return CcdfPoints(np.array(xs), np.array(ps))
