from __future__ import annotations

import enum
from collections.abc import Collection, Iterable

import chz
import networkx as nx


class NodeKind(enum.Enum):
    MESH_ROUTER = "mesh_router"
    BROKER = "broker"
    EDGE_SERVER = "edge_server"
    D2M_TRANSMITTER = "d2m_transmitter"
    USER_DEVICE = "user_device"

    @property
    def is_infrastructure(self) -> bool:
        return self is not NodeKind.USER_DEVICE


class Medium(enum.Enum):
    WIRED = "wired"
    WIRELESS = "wireless"


class AreaTag(enum.Enum):
    URBAN = "urban"
    SUBURBAN = "suburban"
    RURAL = "rural"


ALL_MEDIA = frozenset(Medium)


def link_id(a: str, b: str) -> str:
    """Canonical identifier of the link between two nodes, independent of endpoint order."""
    return "~".join(sorted((a, b)))


@chz.chz
class Node:
    id: str
    kind: NodeKind
    tag: AreaTag = AreaTag.URBAN


@chz.chz
class Link:
    endpoints: tuple[str, str]
    medium: Medium = Medium.WIRED
    capacity_mbps: float = chz.field(default=1000.0, validator=chz.validators.gt(0))
    delay_ms: float = chz.field(default=0.0, validator=chz.validators.ge(0))

    @property
    def id(self) -> str:
        return link_id(*self.endpoints)

    def other(self, node_id: str) -> str:
        a, b = self.endpoints
        return b if node_id == a else a


@chz.chz
class Topology:
    nodes: tuple[Node, ...] = ()
    links: tuple[Link, ...] = ()

    @chz.init_property
    def kind_of(self) -> dict[str, NodeKind]:
        return {node.id: node.kind for node in self.nodes}

    def ids_of(self, kind: NodeKind) -> list[str]:
        return sorted(node.id for node in self.nodes if node.kind is kind)

    @property
    def infrastructure_ids(self) -> list[str]:
        return [node.id for node in self.nodes if node.kind.is_infrastructure]

    def links_of(self, node_id: str) -> list[Link]:
        return [link for link in self.links if node_id in link.endpoints]

    def graph(
        self, media: Collection[Medium] = ALL_MEDIA, exclude: Iterable[str] = ()
    ) -> nx.Graph:
        """Undirected infrastructure graph over the given media.

        ``exclude`` may name nodes or links (see ``link_id``). Parallel links collapse to the one
        with the lowest propagation delay.
        """
        excluded = set(exclude)
        g = nx.Graph()
        g.add_nodes_from(
            node.id
            for node in self.nodes
            if node.kind.is_infrastructure and node.id not in excluded
        )
        for link in self.links:
            a, b = link.endpoints
            if link.medium not in media or link.id in excluded:
                continue
            if a not in g or b not in g or a == b:
                continue
            if g.has_edge(a, b) and g.edges[a, b]["delay_ms"] <= link.delay_ms:
                continue
            g.add_edge(
                a, b, medium=link.medium, delay_ms=link.delay_ms, capacity_mbps=link.capacity_mbps
            )
        return g
