from __future__ import annotations

import logging
import math

import chz
import numpy as np

from meshwave.errors import InvalidMean, InvalidRate, Saturated, ZeroCapacity

logger = logging.getLogger(__name__)


@chz.chz
class Schedule:
    """Piecewise-constant rate over time.

    Each ``(start, value)`` segment holds from its start second until the next segment starts;
    the last one holds until the end of the run.
    """

    segments: tuple[tuple[float, float], ...] = ((0.0, 0.0),)

    @chz.validate
    def _well_formed(self) -> None:
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        starts = [start for start, _ in self.segments]
        if starts[0] != 0:
            raise ValueError(f"schedule must start at time 0, got {starts[0]}")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError(f"schedule segment starts must be strictly increasing, got {starts}")
        if any(value < 0 for _, value in self.segments):
            raise ValueError("schedule rates must be non-negative")

    @classmethod
    def constant(cls, value: float) -> Schedule:
        return cls(segments=((0.0, float(value)),))

    def at(self, times: np.ndarray) -> np.ndarray:
        starts = np.array([start for start, _ in self.segments], dtype=float)
        values = np.array([value for _, value in self.segments], dtype=float)
        return values[np.searchsorted(starts, times, side="right") - 1]

    def __call__(self, time: float) -> float:
        return float(self.at(np.array([time]))[0])

    @property
    def peak(self) -> float:
        return max(value for _, value in self.segments)


@chz.chz
class TrafficParams:
    user_rate: Schedule = chz.field(
        default_factory=Schedule, doc="Session arrivals per second (lambda_u)."
    )
    video_rate: Schedule = chz.field(
        default_factory=Schedule, doc="Broadcast-eligible video demand in Mbps (lambda_v)."
    )
    mean_session_duration: float = chz.field(
        default=180.0, validator=chz.validators.gt(0), doc="1/mu, seconds."
    )
    per_session_bandwidth: float = chz.field(
        default=2.0, validator=chz.validators.ge(0), doc="Unicast Mbps carried by one session."
    )
    total_capacity: float = chz.field(
        default=50.0, validator=chz.validators.gt(0), doc="C_tot, Mbps of the shared access."
    )


@chz.chz
class LoadSample:
    time: float
    offered_load: float
    utilization: float


def load_sample(time: float, offered_load: float, total_capacity: float) -> LoadSample:
    return LoadSample(
        time=time,
        offered_load=offered_load,
        utilization=utilization(offered_load, total_capacity),
    )


def sample_arrivals(rate: float, dt: float, rng: np.random.Generator) -> int:
    """Poisson count of session arrivals within one step of ``dt`` seconds."""
    if rate < 0:
        raise InvalidRate(f"arrival rate must be non-negative, got {rate}")
    if dt <= 0:
        raise InvalidRate(f"step length must be positive, got {dt}")
    return int(rng.poisson(rate * dt))


def sample_session_duration(mean: float, rng: np.random.Generator) -> float:
    if mean <= 0:
        raise InvalidMean(f"mean session duration must be positive, got {mean}")
    while True:
        duration = float(rng.exponential(mean))
        if duration > 0:
            return duration


def aggregate_load(user_mbps: float, video_mbps: float) -> float:
    if user_mbps < 0 or video_mbps < 0:
        raise InvalidRate(f"loads must be non-negative, got ({user_mbps}, {video_mbps})")
    return user_mbps + video_mbps


def utilization(offered_load, total_capacity: float):
    if total_capacity <= 0:
        raise ZeroCapacity(f"capacity must be positive, got {total_capacity}")
    return offered_load / total_capacity


def mm1_latency(arrival_rate: float, service_rate: float) -> float:
    """Mean time in an M/M/1 system, in the time unit of the rates."""
    if arrival_rate < 0:
        raise InvalidRate(f"arrival rate must be non-negative, got {arrival_rate}")
    if arrival_rate >= service_rate:
        raise Saturated(
            f"queue is saturated: arrival rate {arrival_rate} >= service rate {service_rate}"
        )
    return 1.0 / (service_rate - arrival_rate)


def queueing_delay(rho: np.ndarray, service_time: float, cap: float) -> np.ndarray:
    """Vectorised ``mm1_latency`` on utilisation: ``s / (1 - rho)`` held at ``cap`` past rho 1."""
    rho = np.asarray(rho, dtype=float)
    headroom = np.where(rho < 1.0, 1.0 - rho, 1.0)
    return np.where(rho < 1.0, np.minimum(service_time / headroom, cap), cap)


def blocking_probability(rho: np.ndarray, slots: int) -> np.ndarray:
    """M/M/1/K probability that an arrival finds all ``slots`` places taken."""
    rho = np.asarray(rho, dtype=float)
    k = float(slots)
    at_one = np.isclose(rho, 1.0, rtol=0.0, atol=1e-12)
    safe = np.where(at_one | (rho <= 0), 0.5, rho)
    with np.errstate(over="ignore", invalid="ignore"):
        # divide through by rho^K so large utilisations stay finite
        general = (1.0 - safe) / (safe ** (-k) - safe)
    general = np.where(np.isfinite(general), general, np.where(safe > 1, 1.0 - 1.0 / safe, 0.0))
    out = np.where(at_one, 1.0 / (k + 1.0), general)
    return np.where(rho <= 0, 0.0, out)


def active_sessions(
    params: TrafficParams, n_steps: int, dt: float, rng: np.random.Generator
) -> np.ndarray:
    """Concurrent session count per step.

    A session arriving in step k with duration D stays active for ``ceil(D / dt)`` steps. The run
    opens on the stationary population of the first schedule segment.
    """
    times = np.arange(n_steps) * dt
    rates = params.user_rate.at(times)
    arrivals = rng.poisson(rates * dt)
    survive = math.exp(-dt / params.mean_session_duration)
    carried_over = int(rng.poisson(rates[0] * dt * survive / (1.0 - survive))) if n_steps else 0

    starts = np.concatenate(
        [np.zeros(carried_over, dtype=np.int64), np.repeat(np.arange(n_steps), arrivals)]
    )
    durations = rng.exponential(params.mean_session_duration, size=starts.size)
    lengths = np.maximum(np.ceil(durations / dt).astype(np.int64), 1)
    ends = np.minimum(starts + lengths, n_steps)

    delta = np.bincount(starts, minlength=n_steps + 1) - np.bincount(ends, minlength=n_steps + 1)
    logger.debug("Drew %d sessions over %d steps", starts.size, n_steps)
    return np.cumsum(delta)[:n_steps]
