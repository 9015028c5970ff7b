import math

import numpy as np
import pytest

from meshwave.errors import InvalidMean, InvalidRate, Saturated, ZeroCapacity
from meshwave.traffic import (
    Schedule,
    TrafficParams,
    active_sessions,
    aggregate_load,
    blocking_probability,
    load_sample,
    mm1_latency,
    queueing_delay,
    sample_arrivals,
    sample_session_duration,
    utilization,
)


def test_schedule_lookup():
    s = Schedule(segments=((0.0, 1.5), (100.0, 3.0), (200.0, 2.0)))
    assert s(0.0) == 1.5
    assert s(99.9) == 1.5
    assert s(100.0) == 3.0
    assert s(10_000.0) == 2.0
    assert s.peak == 3.0
    assert list(s.at(np.array([0.0, 150.0, 250.0]))) == [1.5, 3.0, 2.0]
    assert Schedule.constant(4).segments == ((0.0, 4.0),)


def test_schedule_validation():
    with pytest.raises(ValueError, match="must start at time 0"):
        Schedule(segments=((5.0, 1.0),))
    with pytest.raises(ValueError, match="strictly increasing"):
        Schedule(segments=((0.0, 1.0), (10.0, 2.0), (10.0, 3.0)))
    with pytest.raises(ValueError, match="non-negative"):
        Schedule(segments=((0.0, -1.0),))


def test_load_and_utilization():
    assert aggregate_load(30.0, 12.5) == 42.5
    assert utilization(25.0, 50.0) == 0.5
    sample = load_sample(10.0, 40.0, 50.0)
    assert sample.utilization == pytest.approx(0.8)

    with pytest.raises(InvalidRate):
        aggregate_load(-1.0, 0.0)
    with pytest.raises(ZeroCapacity, match="capacity must be positive"):
        utilization(1.0, 0.0)


def test_mm1_latency():
    assert mm1_latency(0.0, 250.0) == pytest.approx(0.004)
    assert mm1_latency(200.0, 250.0) == pytest.approx(0.02)
    with pytest.raises(Saturated, match="saturated"):
        mm1_latency(250.0, 250.0)
    with pytest.raises(InvalidRate):
        mm1_latency(-1.0, 250.0)


def test_mm1_latency_grows_with_load():
    latency = [mm1_latency(rate, 250.0) for rate in np.linspace(0.0, 249.0, 50)]
    assert all(a < b for a, b in zip(latency, latency[1:]))
    assert mm1_latency(0.9, 1.0) == pytest.approx(10.0)


def test_utilization_is_linear():
    loads = np.array([0.0, 12.5, 30.0, 61.0])
    for k in (0.5, 2.0, 3.0):
        np.testing.assert_allclose(utilization(k * loads, 50.0), k * utilization(loads, 50.0))
    assert utilization(30.0 + 12.5, 50.0) == pytest.approx(
        utilization(30.0, 50.0) + utilization(12.5, 50.0)
    )


def test_queueing_delay_matches_mm1():
    rho = np.array([0.0, 0.5, 0.8, 0.999, 1.0, 2.0])
    delay = queueing_delay(rho, 4.0, 500.0)
    assert delay[0] == pytest.approx(4.0)
    assert delay[1] == pytest.approx(8.0)
    assert delay[2] == pytest.approx(1000 * mm1_latency(200.0, 250.0))
    assert delay[3] == pytest.approx(500.0)
    assert delay[4] == delay[5] == 500.0


def test_blocking_probability():
    p = blocking_probability(np.array([0.0, 0.5, 1.0, 2.0, 1e6]), 8)
    assert p[0] == 0.0
    assert p[1] == pytest.approx(0.5 * 0.5**8 / (1 - 0.5**9))
    assert p[2] == pytest.approx(1 / 9)
    assert p[3] == pytest.approx((1 - 2.0) * 2.0**8 / (1 - 2.0**9))
    assert p[4] == pytest.approx(1 - 1e-6)
    assert np.all(np.diff(p) >= 0)


def test_sampling_validation():
    rng = np.random.default_rng(0)
    assert sample_arrivals(0.0, 1.0, rng) == 0
    with pytest.raises(InvalidRate):
        sample_arrivals(-1.0, 1.0, rng)
    with pytest.raises(InvalidRate):
        sample_arrivals(1.0, 0.0, rng)
    assert sample_session_duration(180.0, rng) > 0
    with pytest.raises(InvalidMean, match="must be positive"):
        sample_session_duration(0.0, rng)


def test_active_sessions_settles_on_little():
    params = TrafficParams(user_rate=Schedule.constant(2.0), mean_session_duration=60.0)
    sessions = active_sessions(params, 20_000, 1.0, np.random.default_rng(3))
    assert sessions.shape == (20_000,)
    assert sessions.min() >= 0
    # Little's law with ceil-rounded durations: about rate * (mean + 0.5)
    assert sessions.mean() == pytest.approx(2.0 * 60.5, rel=0.05)


def test_active_sessions_idle():
    params = TrafficParams()
    sessions = active_sessions(params, 100, 1.0, np.random.default_rng(0))
    assert not sessions.any()


def test_arrival_counts_are_poisson():
    rng = np.random.default_rng(7)
    n, rate, dt = 100_000, 2.5, 2.0
    counts = np.array([sample_arrivals(rate, dt, rng) for _ in range(n)])
    mean = rate * dt
    # Var of the sample variance of a Poisson(m) is about (m + 2 m^2) / n
    assert abs(counts.mean() - mean) < 4 * math.sqrt(mean / n)
    assert abs(counts.var(ddof=1) - mean) < 4 * math.sqrt((mean + 2 * mean**2) / n)


def test_session_durations_are_memoryless():
    rng = np.random.default_rng(11)
    mean = 180.0
    durations = np.array([sample_session_duration(mean, rng) for _ in range(100_000)])
    survived = durations[durations > mean]
    conditional = np.mean(survived > 2 * mean)
    unconditional = math.exp(-1.0)
    stderr = math.sqrt(unconditional * (1 - unconditional) / survived.size)
    assert abs(conditional - unconditional) < 4 * stderr
    assert np.mean(survived - mean) == pytest.approx(mean, rel=0.03)
