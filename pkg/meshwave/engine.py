"""
Time-stepped fluid simulation of the three-layer network and its replication harness.

One step is ``sample_interval`` seconds. Offered load is the active sessions' unicast demand plus
broadcast-eligible video; D2M carries what its capacity allows, the remainder queues at the shared
unicast bottleneck, and failure windows remove disrupted users until ``t_rec`` has elapsed.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import logging
import math
import os
from collections.abc import Sequence
from typing import IO

import chz
import numpy as np

from meshwave import broker, d2m, metrics, traffic
from meshwave.broker import FailoverMode, FailureKind, RecoveryEvent
from meshwave.errors import EmptyInput, MismatchedScenarios, TooFewReplications, ValidationError
from meshwave.mesh import (
    attach_users,
    capacity_share,
    compute_routes,
    control_overhead,
    mesh_latency,
    path_loss,
    reroute_on_failure,
)
from meshwave.metrics import KPI_DIRECTIONS, ConfidenceInterval, KpiSnapshot
from meshwave.policy import coverage_deficit
from meshwave.rng import replication_seed, resolve_seed, substream
from meshwave.scenario import Mode, ScenarioConfig, comparable_view
from meshwave.topology import ALL_MEDIA, Medium, NodeKind

logger = logging.getLogger(__name__)

LAYER_NAMES = ("mesh", "d2m", "broker")
ATTRIBUTED_KPIS = ("latency_mean", "throughput", "loss", "t_rec_mean")


@chz.chz
class Layers:
    """Which architecture layers a run switches on."""

    mesh: bool = True
    d2m: bool = True
    broker: bool = True

    @classmethod
    def for_mode(cls, mode: Mode) -> Layers:
        on = mode is Mode.PROPOSED
        return cls(mesh=on, d2m=on, broker=on)

    def without(self, layer: str) -> Layers:
        if layer not in LAYER_NAMES:
            raise ValueError(f"unknown layer {layer!r}")
        return chz.replace(self, **{layer: False})


SAMPLE_COLUMNS = (
    "t",
    "lambda_mbps",
    "rho",
    "latency_ms",
    "throughput_mbps",
    "loss",
    "beff",
    "alpha_s",
    "rho_unicast",
    "d_mesh",
    "d2m_mbps",
    "carried_mbps",
    "shed_mbps",
    "lost_mbps",
)


@chz.chz
class Samples:
    """Per-step series of one run, one array per column of ``samples.csv``."""

    t: np.ndarray
    lambda_mbps: np.ndarray
    rho: np.ndarray
    latency_ms: np.ndarray
    throughput_mbps: np.ndarray
    loss: np.ndarray
    beff: np.ndarray
    alpha_s: np.ndarray
    rho_unicast: np.ndarray
    d_mesh: np.ndarray
    d2m_mbps: np.ndarray
    carried_mbps: np.ndarray
    shed_mbps: np.ndarray
    lost_mbps: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Samples):
            return NotImplemented
        return all(np.array_equal(getattr(self, c), getattr(other, c)) for c in SAMPLE_COLUMNS)

    def __len__(self) -> int:
        return len(self.t)

    def table(self) -> np.ndarray:
        return np.column_stack([getattr(self, c) for c in SAMPLE_COLUMNS])


@chz.chz
class RunResult:
    samples: Samples
    recovery_events: tuple[RecoveryEvent, ...]
    kpis: KpiSnapshot
    seed: int
    mode: Mode
    layers: Layers
    user_throughput: tuple[float, ...] = chz.field(doc="Time-averaged Mbps per served user.")
    served: int
    users: int
    fingerprint: str = chz.field(doc="Digest of the scenario with mode-specific settings removed.")


def fingerprint(config: ScenarioConfig) -> str:
    view = json.dumps(comparable_view(config), sort_keys=True)
    return hashlib.sha256(view.encode()).hexdigest()[:16]


class _Network:
    """Static per-run view of the topology: routes, user paths and per-user capacity shares."""

    def __init__(self, config: ScenarioConfig, layers: Layers):
        topology = config.topology
        net = config.network
        media = ALL_MEDIA if layers.mesh else frozenset({Medium.WIRED})
        self.state = compute_routes(topology, media=media, v_sdn=net.v_sdn)
        paths = attach_users(topology, self.state)
        self.users = len(paths)
        self.paths = [p for p in paths if p.served]
        self.theta = np.array([capacity_share(p, net) for p in self.paths], dtype=float)
        self.loss = float(np.mean([path_loss(p, net) for p in self.paths])) if self.paths else 0.0
        self.propagation = (
            float(np.mean([p.propagation_ms for p in self.paths])) if self.paths else 0.0
        )
        self.transmitters = topology.ids_of(NodeKind.D2M_TRANSMITTER)
        logger.debug(
            "%d of %d users served, d_mesh %.3f, mean propagation %.3f ms",
            len(self.paths),
            self.users,
            self.state.d_mesh,
            self.propagation,
        )


class _Disruption:
    """Everything the failure windows of one run change, per step."""

    def __init__(self, n_steps: int, base_d_mesh: float, n_users: int):
        self.rerouted_d_mesh = np.full(n_steps, np.nan)
        self.base_d_mesh = base_d_mesh
        self.outage = np.zeros(n_steps)
        self.tx_available = np.ones(n_steps)
        self.down: list[list[tuple[int, int]]] = [[] for _ in range(n_users)]
        self.events: list[RecoveryEvent] = []

    @property
    def d_mesh(self) -> np.ndarray:
        return np.where(
            np.isnan(self.rerouted_d_mesh), self.base_d_mesh, self.rerouted_d_mesh
        )

    def merged_down(self) -> list[list[tuple[int, int]]]:
        merged = []
        for intervals in self.down:
            out: list[tuple[int, int]] = []
            for start, stop in sorted(intervals):
                if out and start <= out[-1][1]:
                    out[-1] = (out[-1][0], max(out[-1][1], stop))
                else:
                    out.append((start, stop))
            merged.append(out)
        return merged


def _apply_failures(
    config: ScenarioConfig, layers: Layers, network: _Network, seed: int
) -> _Disruption:
    n_steps = config.n_steps
    dt = config.sample_interval
    cluster = config.cluster
    disruption = _Disruption(n_steps, network.state.d_mesh, len(network.paths))

    failures = broker.inject_failures(
        config.failure_plan,
        config.topology,
        substream(seed, "failures"),
        horizon=config.duration,
    )
    rng = substream(seed, "recovery")
    failover_mode = cluster.failover_mode if layers.broker else FailoverMode.CENTRALIZED
    buffer = cluster.buffer_seconds if layers.broker else 0.0

    for failure in failures:
        failed = set(failure.nodes)
        rerouted, t_sdwmn = reroute_on_failure(
            network.state,
            config.topology,
            failed,
            failure_kind=failure.kind,
            timing=config.reroute,
            rng=rng,
        )
        t_kafka = broker.failover_time(cluster, failure.kind, rng, mode=failover_mode)
        t_rec = broker.compose_recovery(t_sdwmn, t_kafka)
        disruption.events.append(
            RecoveryEvent(
                time=failure.time,
                t_sdwmn=t_sdwmn,
                t_kafka=t_kafka,
                t_rec=t_rec,
                failure_kind=failure.kind,
                nodes=failure.nodes,
            )
        )
        logger.debug(
            "Failure of %s at %.1f s recovered in %.2f s (%.2f + %.2f)",
            ",".join(failure.nodes),
            failure.time,
            t_rec,
            t_sdwmn,
            t_kafka,
        )

        start = int(failure.time // dt)
        stop = min(n_steps, max(start + 1, math.ceil((failure.time + t_rec) / dt)))
        window = slice(start, stop)
        disruption.rerouted_d_mesh[window] = np.fmax(
            disruption.rerouted_d_mesh[window], rerouted.d_mesh
        )

        disrupted = [i for i, path in enumerate(network.paths) if path.crosses(failed)]
        for i in disrupted:
            disruption.down[i].append((start, stop))
        if network.paths:
            share = len(disrupted) / len(network.paths)
            disruption.outage[window] += share * broker.residual_loss(1.0, t_rec, buffer)

        if network.transmitters:
            lost = len(failed.intersection(network.transmitters)) / len(network.transmitters)
            disruption.tx_available[window] = np.minimum(
                disruption.tx_available[window], 1.0 - lost
            )
    return disruption


class _Series:
    """Output columns of the serving model, filled one slice of steps at a time."""

    def __init__(self, n_steps: int):
        self.columns = {c: np.zeros(n_steps) for c in SAMPLE_COLUMNS}
        self.blocking = np.zeros(n_steps)


def _serve(
    config: ScenarioConfig,
    layers: Layers,
    network: _Network,
    disruption: _Disruption,
    user_load: np.ndarray,
    video: np.ndarray,
    series: _Series,
    window: slice,
    alpha_s: float,
) -> None:
    plan = chz.replace(config.spectrum, alpha_s=alpha_s)
    net = config.network
    capacity = config.traffic.total_capacity
    _, decodable = d2m.sinr(plan)
    active = layers.d2m and alpha_s > 0 and bool(network.transmitters) and decodable

    s_d2m, _ = d2m.split_spectrum(plan)
    c_d2m = d2m.d2m_capacity(s_d2m, plan.eta_d2m) * disruption.tx_available[window] * active
    offered = user_load[window] + video[window]
    broadcast = d2m.carried_broadcast(c_d2m, video[window])
    unicast = offered - broadcast
    c_unicast = capacity * (1.0 - alpha_s) if active else capacity

    rho_b = traffic.utilization(unicast, c_unicast)
    blocking = traffic.blocking_probability(rho_b, net.queue_slots)
    shed = unicast * blocking
    lost = (unicast - shed) * np.minimum(1.0, network.loss + disruption.outage[window])
    d_mesh = disruption.d_mesh[window]

    cols = series.columns
    cols["lambda_mbps"][window] = offered
    cols["rho"][window] = traffic.utilization(offered, capacity)
    cols["latency_ms"][window] = (
        network.propagation
        + mesh_latency(d_mesh, net.v_sdn)
        + traffic.queueing_delay(rho_b, net.service_time_ms, net.latency_cap_ms)
    )
    loaded = offered > 0
    beff = np.zeros_like(offered)
    if loaded.any():
        beff[loaded] = d2m.offload_efficiency(
            c_d2m[loaded], video[window][loaded], offered[loaded]
        )
    cols["beff"][window] = beff
    cols["loss"][window] = np.divide(
        shed + lost, offered, out=np.zeros_like(offered), where=offered > 0
    )
    cols["alpha_s"][window] = alpha_s if active else 0.0
    cols["rho_unicast"][window] = rho_b
    cols["d_mesh"][window] = d_mesh
    cols["d2m_mbps"][window] = broadcast
    cols["carried_mbps"][window] = unicast - shed - lost
    cols["shed_mbps"][window] = shed
    cols["lost_mbps"][window] = lost
    series.blocking[window] = blocking


def _serve_adaptive(
    config: ScenarioConfig,
    layers: Layers,
    network: _Network,
    disruption: _Disruption,
    user_load: np.ndarray,
    video: np.ndarray,
    series: _Series,
) -> None:
    plan = config.spectrum
    step = max(1, round(plan.adapt_interval / config.sample_interval))
    alpha_s = plan.alpha_s
    for start in range(0, config.n_steps, step):
        window = slice(start, min(start + step, config.n_steps))
        _serve(config, layers, network, disruption, user_load, video, series, window, alpha_s)
        offered = float(np.sum(series.columns["lambda_mbps"][window]))
        carried = float(np.sum(series.columns["d2m_mbps"][window]))
        measured = carried / offered if offered > 0 else 0.0
        qos_ok = float(np.mean(series.columns["latency_ms"][window])) <= config.kpi.l_max_ms
        _, decodable = d2m.sinr(chz.replace(plan, alpha_s=alpha_s))
        alpha_s = d2m.adaptive_alpha(
            alpha_s, measured, qos_ok, decodable, curve=plan.beff_curve
        )


def _user_throughput(
    network: _Network, disruption: _Disruption, blocking: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per served user Theta_i averaged over the run, and the Theta lost to disruption per step.

    A user carries nothing while disrupted and ``Theta_i * (1 - P_K)`` otherwise.
    """
    n_steps = len(blocking)
    up = np.concatenate([[0.0], np.cumsum(1.0 - blocking)])
    down = np.zeros(n_steps + 1)
    averages = np.empty(len(network.paths))
    for i, intervals in enumerate(disruption.merged_down()):
        weight = up[-1] - sum(up[stop] - up[start] for start, stop in intervals)
        averages[i] = network.theta[i] * weight / n_steps
        for start, stop in intervals:
            down[start] += network.theta[i]
            down[stop] -= network.theta[i]
    return averages, np.cumsum(down)[:n_steps]


def run(
    config: ScenarioConfig, seed: int | None = None, *, layers: Layers | None = None
) -> RunResult:
    """Simulates one replication; identical ``(config, seed, layers)`` give identical results."""
    seed = resolve_seed(seed, config.seed)
    layers = layers if layers is not None else Layers.for_mode(config.mode)
    n_steps = config.n_steps
    dt = config.sample_interval
    logger.info(
        "Running %s scenario for %d steps with seed %d (mesh=%s d2m=%s broker=%s)",
        config.mode.value,
        n_steps,
        seed,
        layers.mesh,
        layers.d2m,
        layers.broker,
    )

    network = _Network(config, layers)
    disruption = _apply_failures(config, layers, network, seed)

    times = np.arange(n_steps) * dt
    sessions = traffic.active_sessions(config.traffic, n_steps, dt, substream(seed, "sessions"))
    user_load = sessions * config.traffic.per_session_bandwidth
    video = config.traffic.video_rate.at(times)

    series = _Series(n_steps)
    series.columns["t"][:] = times
    if config.spectrum.adaptive and layers.d2m:
        _serve_adaptive(config, layers, network, disruption, user_load, video, series)
    else:
        _serve(
            config,
            layers,
            network,
            disruption,
            user_load,
            video,
            series,
            slice(0, n_steps),
            config.spectrum.alpha_s,
        )

    user_throughput, down_theta = _user_throughput(network, disruption, series.blocking)
    if network.paths:
        series.columns["throughput_mbps"][:] = (
            (network.theta.sum() - down_theta)
            / len(network.paths)
            * (1.0 - series.blocking)
        )
    saturated = int(np.count_nonzero(series.columns["rho_unicast"] >= 1.0))
    if saturated:
        logger.warning("Unicast bottleneck saturated in %d of %d steps", saturated, n_steps)

    samples = Samples(**series.columns)
    events = tuple(disruption.events)
    kpis = compute_kpis(
        samples,
        user_throughput,
        events,
        len(network.paths),
        network.users,
        config,
        layers=layers,
    )
    logger.info(
        "Finished seed %d: latency %.2f ms, throughput %.2f Mbps, loss %.4f",
        seed,
        kpis.latency_mean,
        kpis.throughput,
        kpis.loss,
    )
    return RunResult(
        samples=samples,
        recovery_events=events,
        kpis=kpis,
        seed=seed,
        mode=config.mode,
        layers=layers,
        user_throughput=tuple(float(x) for x in user_throughput),
        served=len(network.paths),
        users=network.users,
        fingerprint=fingerprint(config),
    )


def _mean_or_none(values: Sequence[float]) -> float | None:
    return float(np.mean(values)) if len(values) else None


def compute_kpis(
    samples: Samples,
    user_throughput: Sequence[float],
    events: Sequence[RecoveryEvent],
    served: int,
    users: int,
    config: ScenarioConfig,
    *,
    layers: Layers | None = None,
) -> KpiSnapshot:
    layers = layers if layers is not None else Layers.for_mode(config.mode)
    kpi = config.kpi
    weights = config.weights

    latency_mean = float(np.mean(samples.latency_ms))
    throughput = float(np.mean(samples.throughput_mbps))
    offered = float(np.sum(samples.lambda_mbps))
    dropped = float(np.sum(samples.shed_mbps + samples.lost_mbps))
    loss = metrics.loss_rate(min(dropped, offered), offered) if offered > 0 else 0.0
    jain = metrics.jain_index(user_throughput) if any(x > 0 for x in user_throughput) else None
    cqs = metrics.cqs(
        latency_mean, kpi.l_max_ms, throughput, kpi.theta_max_mbps, jain or 0.0, weights.cqs
    )
    rho_u = metrics.percentile(samples.rho_unicast, kpi.congestion_percentile)
    delta_r = (
        coverage_deficit(100.0 * served / users, kpi.coverage_requirement) if users else 0.0
    )

    t_rec_mean = _mean_or_none([e.t_rec for e in events])
    peak = (samples.t >= kpi.peak_window[0]) & (samples.t < kpi.peak_window[1])
    beff_mean = float(np.mean(samples.beff))

    n_routers = len(config.topology.ids_of(NodeKind.MESH_ROUTER))
    return KpiSnapshot(
        latency_mean=latency_mean,
        latency_p95=metrics.percentile(samples.latency_ms, kpi.latency_percentile),
        throughput=throughput,
        loss=loss,
        jain=jain,
        cqs=cqs,
        rho_u=rho_u,
        delta_r=delta_r,
        t_rec_mean=t_rec_mean,
        t_rec_single=_mean_or_none(
            [e.t_rec for e in events if e.failure_kind is FailureKind.SINGLE_NODE]
        ),
        t_rec_multi=_mean_or_none(
            [e.t_rec for e in events if e.failure_kind is FailureKind.MULTI_NODE]
        ),
        gpl=metrics.gpl(rho_u, delta_r, (t_rec_mean or 0.0) / kpi.t_norm_s, weights.gpl),
        gpi=metrics.gpi(cqs, 1.0 - delta_r, kpi.cost_efficiency, weights.gpi),
        beff_mean=beff_mean,
        beff_peak=float(np.mean(samples.beff[peak])) if peak.any() else beff_mean,
        control_overhead=(
            control_overhead(n_routers, config.network.control_messages_per_pair)
            if layers.mesh
            else 0.0
        ),
        broadcast_rate=(
            d2m.per_user_broadcast_rate(config.spectrum.broadcast_bitrate, served)
            if layers.d2m and served
            else None
        ),
    )


@chz.chz
class KpiSummary:
    """Means and confidence intervals of each KPI over a set of runs."""

    n: int
    means: dict[str, float | None]
    intervals: dict[str, ConfidenceInterval] = chz.field(default_factory=dict)


def summarise(kpis: Sequence[KpiSnapshot], level: float = 0.95) -> KpiSummary:
    if not kpis:
        raise EmptyInput("cannot summarise an empty run list")
    means: dict[str, float | None] = {}
    intervals = {}
    for name in KPI_DIRECTIONS:
        values = [v for v in (getattr(k, name) for k in kpis) if v is not None]
        means[name] = _mean_or_none(values)
        if len(values) >= 2:
            intervals[name] = metrics.confidence_interval(values, level)
    return KpiSummary(n=len(kpis), means=means, intervals=intervals)


@chz.chz
class Replication:
    runs: tuple[RunResult, ...]
    summary: KpiSummary
    seed: int


def _run_one(args: tuple[ScenarioConfig, int, Layers | None]) -> RunResult:
    config, seed, layers = args
    return run(config, seed, layers=layers)


def replicate(
    config: ScenarioConfig,
    n: int | None = None,
    *,
    seed: int | None = None,
    jobs: int = 1,
    layers: Layers | None = None,
) -> Replication:
    """Runs ``n`` replications on seeds ``seed ^ i``; results keep replication order."""
    n = n if n is not None else config.replications
    if n < 2:
        raise TooFewReplications(f"need at least 2 replications for confidence intervals, got {n}")
    base = resolve_seed(seed, config.seed)
    tasks = [(config, replication_seed(base, i), layers) for i in range(n)]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=min(jobs, n)) as pool:
            runs = list(pool.map(_run_one, tasks))
    else:
        runs = [_run_one(task) for task in tasks]
    logger.info("Completed %d replications from seed %d", n, base)
    return Replication(runs=tuple(runs), summary=summarise([r.kpis for r in runs]), seed=base)


def default_jobs() -> int:
    return os.cpu_count() or 1


@chz.chz
class ComparisonReport:
    baseline: KpiSummary
    proposed: KpiSummary
    deltas: dict[str, float | None] = chz.field(
        doc="Improvement per KPI; positive means the proposed arm did better."
    )
    attribution: dict[str, dict[str, float]] = chz.field(default_factory=dict)
    seed: int | None = None


def improvement(name: str, base: float | None, new: float | None) -> float | None:
    if base is None or new is None or base == 0:
        return None
    if KPI_DIRECTIONS[name]:
        return metrics.relative_change(base, new)
    return metrics.relative_gain(base, new)


def compare(
    baseline_runs: Sequence[RunResult],
    proposed_runs: Sequence[RunResult],
    *,
    attribution: dict[str, dict[str, float]] | None = None,
    seed: int | None = None,
) -> ComparisonReport:
    if not baseline_runs or not proposed_runs:
        raise EmptyInput("both arms of a comparison need at least one run")
    fingerprints = {r.fingerprint for r in [*baseline_runs, *proposed_runs]}
    if len(fingerprints) > 1:
        raise MismatchedScenarios("baseline and proposed runs come from different scenarios")

    baseline = summarise([r.kpis for r in baseline_runs])
    proposed = summarise([r.kpis for r in proposed_runs])
    deltas = {
        name: improvement(name, baseline.means[name], proposed.means[name])
        for name in KPI_DIRECTIONS
    }
    return ComparisonReport(
        baseline=baseline,
        proposed=proposed,
        deltas=deltas,
        attribution=attribution or {},
        seed=seed,
    )


def attribute_components(
    config: ScenarioConfig,
    seed: int | None = None,
    *,
    kpis: Sequence[str] = ATTRIBUTED_KPIS,
) -> dict[str, dict[str, float]]:
    """Share of each layer in the proposed design's advantage, per KPI.

    Each layer is switched off in turn on the same seed; its share of a KPI is its degradation over
    the sum of the three. KPIs that no layer degrades map to an empty table.
    """
    if config.mode is not Mode.PROPOSED:
        raise ValidationError("component attribution needs a proposed-mode scenario")
    full = run(config, seed, layers=Layers())
    counterfactuals = {
        layer: run(config, seed, layers=Layers().without(layer)) for layer in LAYER_NAMES
    }

    shares: dict[str, dict[str, float]] = {}
    for name in kpis:
        reference = getattr(full.kpis, name)
        degradation = {}
        for layer, result in counterfactuals.items():
            value = getattr(result.kpis, name)
            if reference is None or value is None:
                degradation[layer] = 0.0
                continue
            worse = value - reference if KPI_DIRECTIONS[name] else reference - value
            degradation[layer] = max(worse, 0.0)
        total = sum(degradation.values())
        shares[name] = {k: v / total for k, v in degradation.items()} if total > 0 else {}
    return shares


@chz.chz
class ProfileRow:
    start: float
    latency_ms: float
    d_mesh: float
    rho: float
    beff: float


def diurnal_profile(result: RunResult, bucket_seconds: float = 3600.0) -> list[ProfileRow]:
    """Per-bucket means of latency, mesh diameter, utilisation and offload efficiency."""
    s = result.samples
    if len(s) == 0:
        return []
    bucket = (s.t // bucket_seconds).astype(np.int64)
    counts = np.bincount(bucket)
    present = np.flatnonzero(counts)

    def means(values: np.ndarray) -> np.ndarray:
        return np.bincount(bucket, weights=values)[present] / counts[present]

    columns = [means(s.latency_ms), means(s.d_mesh), means(s.rho), means(s.beff)]
    return [
        ProfileRow(
            start=float(b * bucket_seconds),
            latency_ms=float(lat),
            d_mesh=float(d),
            rho=float(rho),
            beff=float(beff),
        )
        for b, lat, d, rho, beff in zip(present, *columns)
    ]


def write_samples_csv(result: RunResult, stream: IO[str]) -> None:
    np.savetxt(
        stream,
        result.samples.table(),
        fmt="%.6g",
        delimiter=",",
        header=",".join(SAMPLE_COLUMNS),
        comments="",
    )


@chz.chz
class SimulationReport:
    """What ``simulate`` writes to ``run.json``."""

    description: str
    mode: Mode
    seed: int
    runs: tuple[KpiSnapshot, ...]
    summary: KpiSummary
    recovery_events: tuple[tuple[RecoveryEvent, ...], ...] = ()


def simulation_report(config: ScenarioConfig, replication: Replication) -> SimulationReport:
    return SimulationReport(
        description=config.description,
        mode=config.mode,
        seed=replication.seed,
        runs=tuple(r.kpis for r in replication.runs),
        summary=replication.summary,
        recovery_events=tuple(r.recovery_events for r in replication.runs),
    )
