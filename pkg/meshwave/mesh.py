from __future__ import annotations

import logging
from collections.abc import Collection, Iterable

import chz
import networkx as nx
import numpy as np

from meshwave.broker import FailureKind
from meshwave.errors import OutOfRange, ZeroControllerRate
from meshwave.rng import Triangular
from meshwave.topology import ALL_MEDIA, Medium, NodeKind, Topology

logger = logging.getLogger(__name__)


def _fraction_below_one(self: object, attr: str) -> None:
    value = getattr(self, attr)
    if not 0 <= value < 1:
        raise ValueError(f"Expected {attr} to be in [0, 1), got {value}")


@chz.chz
class NetworkParams:
    v_sdn: float = chz.field(
        default=0.05, validator=chz.validators.gt(0), doc="Controller rate, hops per ms."
    )
    hop_efficiency: float = chz.field(
        default=0.8,
        validator=[chz.validators.gt(0), chz.validators.le(1)],
        doc="Capacity share kept per relay hop beyond the first.",
    )
    wireless_loss: float = chz.field(
        default=0.015, validator=_fraction_below_one, doc="Loss per wireless link traversed."
    )
    service_time_ms: float = chz.field(
        default=4.0, validator=chz.validators.gt(0), doc="Mean service time at the bottleneck."
    )
    queue_slots: int = chz.field(default=8, validator=chz.validators.ge(1), doc="K of M/M/1/K.")
    latency_cap_ms: float = chz.field(default=500.0, validator=chz.validators.gt(0))
    control_messages_per_pair: float = chz.field(default=1.0, validator=chz.validators.ge(0))


def _triangular(low: float, mode: float, high: float):
    return lambda: Triangular(low=low, mode=mode, high=high)


@chz.chz
class RerouteTiming:
    """t_sdwmn distributions: SDWMN-assisted rerouting against static restoration."""

    assisted_single: Triangular = chz.field(default_factory=_triangular(3.6, 5.1, 6.6))
    assisted_multi: Triangular = chz.field(default_factory=_triangular(5.1, 7.2, 9.3))
    static_single: Triangular = chz.field(default_factory=_triangular(6.0, 9.0, 12.0))
    static_multi: Triangular = chz.field(default_factory=_triangular(9.9, 13.2, 16.5))

    def distribution(self, kind: FailureKind, assisted: bool) -> Triangular:
        single = kind is FailureKind.SINGLE_NODE
        if assisted:
            return self.assisted_single if single else self.assisted_multi
        return self.static_single if single else self.static_multi


@chz.chz
class RoutingState:
    next_hop: dict[str, dict[str, str]]
    distance: dict[str, dict[str, int]]
    d_mesh: float
    connected_pairs: int
    disconnected_pairs: int
    v_sdn: float = 0.05
    media: frozenset[Medium] = ALL_MEDIA
    failed: frozenset[str] = frozenset()

    @property
    def mesh_assisted(self) -> bool:
        return Medium.WIRELESS in self.media

    def hops(self, src: str, dst: str) -> int | None:
        return self.distance.get(src, {}).get(dst)

    def reachable(self, src: str, dst: str) -> bool:
        return self.hops(src, dst) is not None


def compute_routes(
    topology: Topology,
    *,
    media: Collection[Medium] = ALL_MEDIA,
    v_sdn: float = 0.05,
    failed: Iterable[str] = (),
) -> RoutingState:
    """Minimum-hop routes among infrastructure nodes.

    Among equal-hop next hops the lowest node id wins. ``d_mesh`` is the mean shortest-path
    length over connected ordered pairs; disconnected pairs are only counted.
    """
    failed = frozenset(failed)
    g = topology.graph(media, exclude=failed)
    distance = {src: dict(lengths) for src, lengths in nx.all_pairs_shortest_path_length(g)}

    next_hop: dict[str, dict[str, str]] = {}
    total = 0
    pairs = 0
    for src in g:
        neighbours = sorted(g.neighbors(src))
        table = {}
        for dst, d in distance[src].items():
            if dst == src:
                continue
            table[dst] = next(n for n in neighbours if distance[n].get(dst) == d - 1)
            total += d
            pairs += 1
        next_hop[src] = table

    n = g.number_of_nodes()
    state = RoutingState(
        next_hop=next_hop,
        distance=distance,
        d_mesh=total / pairs if pairs else 0.0,
        connected_pairs=pairs,
        disconnected_pairs=n * (n - 1) - pairs,
        v_sdn=v_sdn,
        media=frozenset(media),
        failed=failed,
    )
    logger.debug(
        "Routed %d nodes: d_mesh %.3f over %d pairs, %d unroutable",
        n,
        state.d_mesh,
        pairs,
        state.disconnected_pairs,
    )
    return state


def route(state: RoutingState, src: str, dst: str) -> list[str]:
    if not state.reachable(src, dst):
        return []
    path = [src]
    while path[-1] != dst:
        path.append(state.next_hop[path[-1]][dst])
    return path


def mesh_latency(d_mesh: float, v_sdn: float) -> float:
    """Control-plane latency in ms of a mesh with mean path length ``d_mesh`` hops."""
    if v_sdn <= 0:
        raise ZeroControllerRate(f"controller rate must be positive, got {v_sdn}")
    return d_mesh / v_sdn


def reroute_on_failure(
    state: RoutingState,
    topology: Topology,
    failed: Iterable[str],
    *,
    failure_kind: FailureKind = FailureKind.SINGLE_NODE,
    timing: RerouteTiming | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[RoutingState, float]:
    """Recomputes routes on the surviving graph and draws the rerouting time t_sdwmn.

    ``failed`` may hold node ids and link ids. Without a generator the distribution mean is used.
    """
    failed = frozenset(failed)
    known = {node.id for node in topology.nodes} | {link.id for link in topology.links}
    unknown = failed - known
    if unknown:
        raise OutOfRange(f"unknown node or link ids: {sorted(unknown)}")
    if not failed:
        return state, 0.0

    rerouted = compute_routes(
        topology, media=state.media, v_sdn=state.v_sdn, failed=state.failed | failed
    )
    dist = (timing if timing is not None else RerouteTiming()).distribution(
        failure_kind, state.mesh_assisted
    )
    t_sdwmn = dist.sample(rng) if rng is not None else dist.mean
    return rerouted, t_sdwmn


def control_overhead(n: int, c: float) -> float:
    """Messages per routing update for ``n`` routers exchanging ``c`` messages per pair."""
    if n < 0 or c < 0:
        raise OutOfRange(f"router count and message rate must be non-negative, got ({n}, {c})")
    return c * n * n


@chz.chz
class UserPath:
    """Where one user device enters the network and how its traffic reaches a gateway."""

    user: str
    router: str | None = None
    gateway: str | None = None
    nodes: tuple[str, ...] = ()
    access_link: str | None = None
    access_capacity: float = 0.0
    hops: int = 0
    wireless_links: int = 0
    propagation_ms: float = 0.0

    @property
    def covered(self) -> bool:
        return self.router is not None

    @property
    def served(self) -> bool:
        return self.router is not None and self.gateway is not None

    def crosses(self, failed: Collection[str]) -> bool:
        return any(node in failed for node in self.nodes) or self.access_link in failed


def attach_users(topology: Topology, state: RoutingState) -> list[UserPath]:
    """Attaches every user device to a router and routes it to the nearest edge server.

    A user attaches to the lowest-id router it holds an access link to. When the topology has no
    edge server at all, routers serve their own users.
    """
    g = topology.graph(state.media, exclude=state.failed)
    gateways = [e for e in topology.ids_of(NodeKind.EDGE_SERVER) if e not in state.failed]
    self_served = not topology.ids_of(NodeKind.EDGE_SERVER)
    routers = set(topology.ids_of(NodeKind.MESH_ROUTER)) - state.failed

    paths = []
    for user in topology.ids_of(NodeKind.USER_DEVICE):
        access = sorted(
            (link.other(user), link.delay_ms, link)
            for link in topology.links_of(user)
            if link.other(user) in routers and link.id not in state.failed
        )
        if not access:
            paths.append(UserPath(user=user))
            continue
        router, _, link = access[0]

        if self_served:
            gateway: str | None = router
        else:
            reachable = [(state.hops(router, e), e) for e in gateways if state.reachable(router, e)]
            gateway = min(reachable)[1] if reachable else None
        if gateway is None:
            paths.append(
                UserPath(
                    user=user,
                    router=router,
                    access_link=link.id,
                    access_capacity=link.capacity_mbps,
                )
            )
            continue

        nodes = route(state, router, gateway)
        hops = list(zip(nodes, nodes[1:]))
        paths.append(
            UserPath(
                user=user,
                router=router,
                gateway=gateway,
                nodes=tuple(nodes),
                access_link=link.id,
                access_capacity=link.capacity_mbps,
                hops=len(hops),
                wireless_links=(link.medium is Medium.WIRELESS)
                + sum(g.edges[a, b]["medium"] is Medium.WIRELESS for a, b in hops),
                propagation_ms=link.delay_ms + sum(g.edges[a, b]["delay_ms"] for a, b in hops),
            )
        )
    return paths


def capacity_share(path: UserPath, params: NetworkParams) -> float:
    """Mbps the user's access and relay path can sustain before congestion."""
    if not path.served:
        return 0.0
    relays = max(path.hops - 1, 0)
    return (
        path.access_capacity
        * params.hop_efficiency**relays
        * (1.0 - params.wireless_loss) ** path.wireless_links
    )


def path_loss(path: UserPath, params: NetworkParams) -> float:
    return 1.0 - (1.0 - params.wireless_loss) ** path.wireless_links
