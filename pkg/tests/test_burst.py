import statistics

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interevent.burst import BurstMetrics, burst_metrics, burstiness, classify, memory
from interevent.errors import InsufficientEvents, ZeroVariance
from interevent.intervals import shuffle_intervals
from interevent.synth import GeneratorSpec, generate

from conftest import make_seq


def textbook_pearson(values):
    return statistics.correlation(list(values[:-1]), list(values[1:]))


def test_periodic_is_minus_one():
    assert burstiness(make_seq([5, 5, 5, 5])) == -1.0
    assert burstiness(make_seq([0.1] * 17)) == -1.0


def test_burstiness_hand_value():
    sigma = statistics.pstdev([1, 1, 1, 9])
    expected = (sigma - 3) / (sigma + 3)
    assert burstiness(make_seq([1, 1, 1, 9])) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.0718, abs=5e-5)


def test_burstiness_poisson_near_zero():
    seq = generate(GeneratorSpec("poisson", 10**5, seed=1, rate=1.0))
    assert abs(burstiness(seq)) <= 0.02


def test_burstiness_empty():
    with pytest.raises(InsufficientEvents):
        burstiness(make_seq([]))


def test_memory_perfect_cases():
    assert memory(make_seq([1, 9, 1, 9, 1])) == -1.0
    assert memory(make_seq([1, 2, 3, 4, 5])) == 1.0
    assert memory(make_seq([0.5, 1.5, 2.5, 3.5])) == 1.0


def test_memory_errors():
    with pytest.raises(ZeroVariance):
        memory(make_seq([5, 5, 5]))
    with pytest.raises(ZeroVariance):
        memory(make_seq([1, 2]))
    with pytest.raises(InsufficientEvents):
        memory(make_seq([3]))


def test_memory_integer_and_fractional_data(rng):
    ints = rng.integers(1, 10**6, 500).astype(float)
    exact = memory(make_seq(ints))
    assert exact == pytest.approx(textbook_pearson(ints), abs=1e-12)
    assert memory(make_seq(ints + 0.5)) == pytest.approx(exact, abs=1e-12)


def test_memory_shuffled_heavy_tail_small():
    seq = generate(GeneratorSpec("powerlaw", 10**5, seed=2, alpha=1.5, xmin=1.0))
    assert abs(memory(shuffle_intervals(seq, 9))) <= 0.03


def test_burst_metrics_fields():
    m = burst_metrics(make_seq([1, 1, 1, 9]))
    assert m.n_tau == 4 and m.m_tau == 3
    assert (m.M, m.m_undefined_reason) == (None, "zero-variance")
    m = burst_metrics(make_seq([1, 3, 1, 9]))
    assert m.M == pytest.approx(textbook_pearson([1, 3, 1, 9]), abs=1e-12)
    assert burst_metrics(make_seq([4])).m_undefined_reason == "too-short"
    periodic = burst_metrics(make_seq([5, 5, 5]))
    assert (periodic.B, periodic.M, periodic.m_undefined_reason) == (-1.0, None, "zero-variance")


@pytest.mark.parametrize("B, M, expected", [
    (0.9033, -0.0081, ("bursty", "anti-memory")),
    (0.9091, 0.007, ("bursty", "memory")),
    (0.0, None, ("poisson-like", "undefined")),
    (-1.0, None, ("periodic-like", "undefined")),
    (0.1, 1e-9, ("poisson-like", "memory")),
    (-0.1, -1e-9, ("poisson-like", "anti-memory")),
    (0.3, -0.0, ("bursty", "anti-memory")),
    (0.3, 0.0, ("bursty", "memory")),
])
def test_classify(B, M, expected):
    assert classify(BurstMetrics(B, M)) == expected


def test_classify_threshold_configurable():
    assert classify(BurstMetrics(0.2, 0.5), threshold=0.25).burst == "poisson-like"


seqs = st.lists(st.floats(1e-2, 1e5, allow_nan=False), min_size=3, max_size=200).filter(
    lambda v: len(set(v[:-1])) > 1 and len(set(v[1:])) > 1)


@given(seqs)
@settings(max_examples=200)
def test_memory_matches_textbook_pearson(values):
    assert memory(make_seq(values)) == pytest.approx(textbook_pearson(values), abs=1e-12)


@given(seqs)
@settings(max_examples=200)
def test_ranges(values):
    m = burst_metrics(make_seq(values))
    assert -1 <= m.B <= 1
    assert -1 <= m.M <= 1
