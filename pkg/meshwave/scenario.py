from __future__ import annotations

import enum
import importlib.resources
import logging
import math
import re
from collections import Counter
from pathlib import Path
from typing import Any

import chz
import networkx as nx

from meshwave import serialise
from meshwave.broker import BrokerCluster, FailurePlan
from meshwave.d2m import SpectrumPlan
from meshwave.errors import ParseError, ValidationError
from meshwave.mesh import NetworkParams, RerouteTiming
from meshwave.metrics import WEIGHT_TOLERANCE, KpiParams
from meshwave.topology import NodeKind, Topology
from meshwave.traffic import TrafficParams

logger = logging.getLogger(__name__)

BUNDLED = (
    "urban_proposed",
    "urban_baseline",
    "suburban",
    "suburban_baseline",
    "rural_baseline",
    "rural_proposed",
    "policy_inputs",
)


class Mode(enum.Enum):
    BASELINE = "baseline"
    PROPOSED = "proposed"


def _non_negative_weights(self: object, attr: str) -> None:
    weights = getattr(self, attr)
    if any(w < 0 for w in weights):
        raise ValueError(f"Expected {attr} to be non-negative, got {weights}")


@chz.chz
class WeightSet:
    gpl: tuple[float, float, float] = chz.field(
        default=(0.4, 0.3, 0.3), validator=_non_negative_weights, doc="w1..w3, free sum."
    )
    gpi: tuple[float, float, float] = chz.field(
        default=(0.4, 0.3, 0.3), validator=_non_negative_weights, doc="alpha1..alpha3, sum to 1."
    )
    cqs: tuple[float, float, float] = chz.field(
        default=(0.4, 0.4, 0.2), validator=_non_negative_weights, doc="eta1..eta3, sum to 1."
    )
    ps: tuple[float, float, float, float] = chz.field(
        default=(0.25, 0.25, 0.25, 0.25), validator=_non_negative_weights, doc="theta1..theta4."
    )


def _baseline_spectrum(self: ScenarioConfig, value: SpectrumPlan) -> SpectrumPlan:
    if self.mode is Mode.BASELINE and value.alpha_s != 0:
        logger.warning("Baseline mode ignores alpha_s=%.2f", value.alpha_s)
        return chz.replace(value, alpha_s=0.0)
    return value


@chz.chz
class ScenarioConfig:
    topology: Topology = chz.field(default_factory=Topology)
    duration: float = chz.field(default=86400.0, validator=chz.validators.gt(0), doc="Seconds.")
    sample_interval: float = chz.field(default=1.0, validator=chz.validators.gt(0))
    mode: Mode = Mode.PROPOSED
    traffic: TrafficParams = chz.field(default_factory=TrafficParams)
    spectrum: SpectrumPlan = chz.field(
        default_factory=SpectrumPlan,
        munger=_baseline_spectrum,
        doc="Baseline runs always see alpha_s = 0.",
    )
    failure_plan: FailurePlan = chz.field(default_factory=FailurePlan)
    cluster: BrokerCluster = chz.field(default_factory=BrokerCluster)
    reroute: RerouteTiming = chz.field(default_factory=RerouteTiming)
    network: NetworkParams = chz.field(default_factory=NetworkParams)
    kpi: KpiParams = chz.field(default_factory=KpiParams)
    weights: WeightSet = chz.field(default_factory=WeightSet)
    seed: int | None = chz.field(default=None, doc="Falls back to $MESHWAVE_SEED, then 0.")
    replications: int = chz.field(default=10, validator=chz.validators.ge(1))
    description: str = ""
    notes: tuple[str, ...] = ()

    @property
    def n_steps(self) -> int:
        return round(self.duration / self.sample_interval)


@chz.chz
class InfrastructureSummary:
    routers: int
    brokers: int
    edge_servers: int
    nodes: int
    links: int

    @property
    def infrastructure(self) -> int:
        """|V| restricted to infrastructure, N + M + E_s."""
        return self.routers + self.brokers + self.edge_servers


def infrastructure_summary(topology: Topology) -> InfrastructureSummary:
    counts = Counter(node.kind for node in topology.nodes)
    return InfrastructureSummary(
        routers=counts[NodeKind.MESH_ROUTER],
        brokers=counts[NodeKind.BROKER],
        edge_servers=counts[NodeKind.EDGE_SERVER],
        nodes=len(topology.nodes),
        links=len(topology.links),
    )


def _topology_violations(topology: Topology) -> list[str]:
    ids = [node.id for node in topology.nodes]
    violations = []
    if len(set(ids)) != len(ids):
        violations.append("node ids must be unique")
    if not topology.infrastructure_ids:
        violations.append("topology must contain at least one infrastructure node")

    known = set(ids)
    for link in topology.links:
        a, b = link.endpoints
        if a == b:
            violations.append(f"link {link.id} must join two distinct nodes")
        for end in sorted({a, b} - known):
            violations.append(f"link {link.id} references unknown node {end!r}")

    if topology.infrastructure_ids and not nx.is_connected(topology.graph()):
        violations.append("infrastructure subgraph must be connected")
    return violations


def validate(config: ScenarioConfig) -> list[str]:
    """Every cross-field rule the config breaks, in a fixed order; empty when valid."""
    violations = []
    if abs(sum(config.weights.gpi) - 1.0) > WEIGHT_TOLERANCE:
        violations.append("gpi weights must sum to 1")
    if abs(sum(config.weights.cqs) - 1.0) > WEIGHT_TOLERANCE:
        violations.append("cqs weights must sum to 1")
    violations.extend(_topology_violations(config.topology))

    steps = config.duration / config.sample_interval
    if not math.isclose(steps, round(steps), rel_tol=0.0, abs_tol=1e-9):
        violations.append("duration must be divisible by sample_interval")

    brokers = len(config.topology.ids_of(NodeKind.BROKER))
    if brokers and config.cluster.size != brokers:
        violations.append(
            f"cluster size {config.cluster.size} must match the {brokers} broker nodes"
        )
    return violations


def _strip_field_prefix(message: str) -> str:
    return re.sub(r"\bX_(\w+)", r"\1", message)


def parse_scenario(data: Any, source: str = "<scenario>") -> ScenarioConfig:
    try:
        config = serialise.structure(ScenarioConfig, data)
    except ParseError as e:
        raise ParseError(f"{source}: {e}") from None
    except TypeError as e:
        raise ParseError(f"{source}: {e}") from None
    except ValueError as e:
        raise ValidationError(f"{source}: {_strip_field_prefix(str(e))}") from None

    violations = validate(config)
    if violations:
        raise ValidationError(f"{source}: " + "; ".join(violations))
    return config


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Reads and validates a JSON scenario file."""
    config = parse_scenario(serialise.read_json(path), str(path))
    summary = infrastructure_summary(config.topology)
    logger.info(
        "Loaded %s: %s mode, %d routers, %d brokers, %d edge servers, %d nodes",
        path,
        config.mode.value,
        summary.routers,
        summary.brokers,
        summary.edge_servers,
        summary.nodes,
    )
    return config


def save_scenario(config: ScenarioConfig, path: str | Path) -> None:
    serialise.dump(config, path)


def comparable_view(config: ScenarioConfig) -> dict[str, Any]:
    """The config as plain data minus what may differ between two arms of one comparison."""
    view = serialise.unstructure(config)
    for key in ("mode", "seed", "description", "notes"):
        del view[key]
    del view["spectrum"]["alpha_s"]
    return view


def bundled_scenario(name: str) -> Path:
    if name not in BUNDLED:
        raise FileNotFoundError(f"no bundled scenario named {name!r}; choose from {BUNDLED}")
    return Path(str(importlib.resources.files("meshwave") / "scenarios" / f"{name}.json"))
