"""Inter-event time statistics for per-user event logs."""

__version__ = "0.1.0"

from .burst import BurstMetrics, Classification, burst_metrics, burstiness, classify, memory
from .errors import (
    DegenerateTail,
    DomainError,
    EmptyStream,
    InsufficientEvents,
    IntereventError,
    InvalidSpec,
    ParseError,
    UnknownUser,
    ZeroVariance,
)
from .ingest import EventStream, RawEventRecord, StreamSummary, build_streams, parse_events, summarize
from .intervals import IntervalSequence, MomentSummary, intervals_of, moments, shuffle_intervals, truncate
from .powerlaw import (
    CcdfPoints,
    PowerLawFit,
    empirical_ccdf,
    fit_ccdf_ls,
    fit_mle,
    ks_statistic,
    model_ccdf,
)
from .synth import ExpectedMetrics, GeneratorSpec, expected_metrics, generate
