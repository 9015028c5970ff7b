from __future__ import annotations

import enum
import logging

import chz
import numpy as np

from meshwave.errors import OutOfRange
from meshwave.rng import Triangular
from meshwave.topology import Topology

logger = logging.getLogger(__name__)


class FailureKind(enum.Enum):
    SINGLE_NODE = "single_node"
    MULTI_NODE = "multi_node"


class FailoverMode(enum.Enum):
    CENTRALIZED = "centralized"
    DUAL_LAYER = "dual_layer"


def _fraction(self: object, attr: str) -> None:
    value = getattr(self, attr)
    if not 0 <= value <= 1:
        raise ValueError(f"Expected {attr} to be in [0, 1], got {value}")


def _triangular(low: float, mode: float, high: float):
    return lambda: Triangular(low=low, mode=mode, high=high)


@chz.chz
class FailoverTiming:
    """Broker-side restoration time per failover mode and failure kind, in seconds."""

    dual_single: Triangular = chz.field(default_factory=_triangular(2.0, 3.0, 4.0))
    dual_multi: Triangular = chz.field(default_factory=_triangular(3.0, 4.5, 6.0))
    central_single: Triangular = chz.field(default_factory=_triangular(2.4, 3.6, 4.8))
    central_multi: Triangular = chz.field(default_factory=_triangular(3.6, 5.2, 6.8))

    def distribution(self, mode: FailoverMode, kind: FailureKind) -> Triangular:
        if mode is FailoverMode.DUAL_LAYER:
            return self.dual_single if kind is FailureKind.SINGLE_NODE else self.dual_multi
        return self.central_single if kind is FailureKind.SINGLE_NODE else self.central_multi


@chz.chz
class BrokerCluster:
    size: int = chz.field(default=5, validator=chz.validators.ge(1), doc="M, broker count.")
    replication_factor: int = chz.field(default=3, validator=chz.validators.ge(1))
    buffer_seconds: float = chz.field(
        default=4.0, validator=chz.validators.ge(0), doc="Seconds of flow absorbed in an outage."
    )
    failover_mode: FailoverMode = FailoverMode.DUAL_LAYER
    rereplication_penalty: float = chz.field(
        default=0.5,
        validator=chz.validators.ge(0),
        doc="Extra failover time, as a fraction, when partitions have a single replica.",
    )
    timing: FailoverTiming = chz.field(default_factory=FailoverTiming)

    @chz.validate
    def _replicas_fit(self) -> None:
        if self.replication_factor > self.size:
            raise ValueError(
                f"replication_factor {self.replication_factor} exceeds cluster size {self.size}"
            )


@chz.chz
class FailurePlan:
    count: int = chz.field(default=0, validator=chz.validators.ge(0), doc="Failures per run.")
    multi_fraction: float = chz.field(
        default=0.0, validator=_fraction, doc="Probability that an event is multi-node."
    )
    multi_size: int = chz.field(default=2, validator=chz.validators.ge(2))
    horizon: float | None = chz.field(
        default=None, doc="T of U(0, T); the scenario duration when unset."
    )

    @chz.validate
    def _positive_horizon(self) -> None:
        if self.horizon is not None and self.horizon <= 0:
            raise ValueError(f"Expected horizon to be greater than 0, got {self.horizon}")


@chz.chz
class FailureEvent:
    time: float
    nodes: tuple[str, ...]
    kind: FailureKind


@chz.chz
class RecoveryEvent:
    time: float
    t_sdwmn: float = chz.field(validator=chz.validators.ge(0))
    t_kafka: float = chz.field(validator=chz.validators.ge(0))
    t_rec: float
    failure_kind: FailureKind
    nodes: tuple[str, ...] = ()

    @chz.validate
    def _additive(self) -> None:
        if self.t_rec != self.t_sdwmn + self.t_kafka:
            raise ValueError(
                f"t_rec {self.t_rec} != t_sdwmn {self.t_sdwmn} + t_kafka {self.t_kafka}"
            )


def inject_failures(
    plan: FailurePlan,
    topology: Topology,
    rng: np.random.Generator,
    *,
    horizon: float | None = None,
) -> list[FailureEvent]:
    """Draws failure instants uniformly on [0, T] and picks their target infrastructure nodes."""
    if plan.count == 0:
        return []
    t_end = plan.horizon if plan.horizon is not None else horizon
    if t_end is None:
        raise OutOfRange("failure plan has no horizon")
    candidates = sorted(topology.infrastructure_ids)
    if not candidates:
        return []

    times = np.sort(rng.uniform(0.0, t_end, size=plan.count))
    multi = rng.random(plan.count) < plan.multi_fraction
    events = []
    for time, is_multi in zip(times, multi):
        size = min(plan.multi_size if is_multi else 1, len(candidates))
        picked = rng.choice(len(candidates), size=size, replace=False)
        events.append(
            FailureEvent(
                time=float(time),
                nodes=tuple(sorted(candidates[i] for i in picked)),
                kind=FailureKind.MULTI_NODE if size > 1 else FailureKind.SINGLE_NODE,
            )
        )
    logger.debug("Injected %d failures over %.0f s", len(events), t_end)
    return events


def failover_time(
    cluster: BrokerCluster,
    failure_kind: FailureKind,
    rng: np.random.Generator,
    *,
    mode: FailoverMode | None = None,
) -> float:
    """t_kafka for one failure; ``mode`` overrides the cluster's own failover mode."""
    mode = mode if mode is not None else cluster.failover_mode
    t_kafka = cluster.timing.distribution(mode, failure_kind).sample(rng)
    if cluster.replication_factor == 1:
        t_kafka *= 1.0 + cluster.rereplication_penalty
    return t_kafka


def compose_recovery(t_sdwmn: float, t_kafka: float) -> float:
    if t_sdwmn < 0 or t_kafka < 0:
        raise OutOfRange(f"recovery components must be non-negative, got ({t_sdwmn}, {t_kafka})")
    return t_sdwmn + t_kafka


def residual_loss(raw_loss_fraction: float, outage_seconds: float, buffer_seconds: float) -> float:
    """Loss left after the buffer absorbs the first ``buffer_seconds`` of an outage."""
    if not 0 <= raw_loss_fraction <= 1:
        raise OutOfRange(f"raw loss must be a fraction, got {raw_loss_fraction}")
    if outage_seconds < 0 or buffer_seconds < 0:
        raise OutOfRange("outage and buffer durations must be non-negative")
    if outage_seconds == 0:
        return 0.0
    return raw_loss_fraction * max(0.0, outage_seconds - buffer_seconds) / outage_seconds
