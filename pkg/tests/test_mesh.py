import collections

import numpy as np
import pytest

from meshwave.broker import FailureKind
from meshwave.errors import OutOfRange, ZeroControllerRate
from meshwave.mesh import (
    NetworkParams,
    RerouteTiming,
    attach_users,
    capacity_share,
    compute_routes,
    control_overhead,
    mesh_latency,
    path_loss,
    reroute_on_failure,
    route,
)
from meshwave.topology import Link, Medium, Node, NodeKind, Topology

WIRED = frozenset({Medium.WIRED})


def _ring() -> Topology:
    """e0 - r0 - r1 - r2 wired, closed by a wireless r2 - e0 link."""
    return Topology(
        nodes=(
            Node(id="e0", kind=NodeKind.EDGE_SERVER),
            Node(id="r0", kind=NodeKind.MESH_ROUTER),
            Node(id="r1", kind=NodeKind.MESH_ROUTER),
            Node(id="r2", kind=NodeKind.MESH_ROUTER),
            Node(id="u0", kind=NodeKind.USER_DEVICE),
            Node(id="u1", kind=NodeKind.USER_DEVICE),
            Node(id="u2", kind=NodeKind.USER_DEVICE),
        ),
        links=(
            Link(endpoints=("e0", "r0"), delay_ms=0.1),
            Link(endpoints=("r0", "r1"), delay_ms=0.1),
            Link(endpoints=("r1", "r2"), delay_ms=0.1),
            Link(endpoints=("r2", "e0"), medium=Medium.WIRELESS, delay_ms=0.5),
            Link(endpoints=("u0", "r2"), medium=Medium.WIRELESS, capacity_mbps=50, delay_ms=0.5),
            Link(endpoints=("u1", "r0"), capacity_mbps=10),
        ),
    )


def test_compute_routes_mean_path_length():
    full = compute_routes(_ring())
    assert full.d_mesh == pytest.approx(16 / 12)
    assert full.connected_pairs == 12
    assert full.disconnected_pairs == 0
    assert full.mesh_assisted

    wired = compute_routes(_ring(), media=WIRED)
    assert wired.d_mesh == pytest.approx(20 / 12)
    assert not wired.mesh_assisted


def test_next_hop_ties_go_to_lowest_id():
    state = compute_routes(_ring())
    assert route(state, "r1", "e0") == ["r1", "r0", "e0"]
    assert route(state, "r2", "e0") == ["r2", "e0"]
    assert route(state, "e0", "e0") == ["e0"]
    assert state.hops("r1", "e0") == 2
    assert state.hops("r1", "u0") is None
    assert route(state, "r1", "u0") == []


def test_reroute_on_failure():
    state = compute_routes(_ring())
    rerouted, t_sdwmn = reroute_on_failure(state, _ring(), {"r1"})
    assert rerouted.failed == frozenset({"r1"})
    assert rerouted.d_mesh == pytest.approx(8 / 6)
    assert t_sdwmn == pytest.approx(RerouteTiming().assisted_single.mean)

    wired = compute_routes(_ring(), media=WIRED)
    rerouted, t_sdwmn = reroute_on_failure(
        wired, _ring(), {"r1"}, failure_kind=FailureKind.MULTI_NODE
    )
    assert rerouted.connected_pairs == 2
    assert rerouted.disconnected_pairs == 4
    assert t_sdwmn == pytest.approx(RerouteTiming().static_multi.mean)


def test_reroute_on_failure_draws_and_edge_cases():
    state = compute_routes(_ring())
    same, t = reroute_on_failure(state, _ring(), set())
    assert same is state
    assert t == 0.0

    by_link, _ = reroute_on_failure(state, _ring(), {"e0~r2"})
    assert route(by_link, "r2", "e0") == ["r2", "r1", "r0", "e0"]

    _, drawn = reroute_on_failure(state, _ring(), {"r1"}, rng=np.random.default_rng(0))
    assert 3.6 <= drawn <= 6.6

    with pytest.raises(OutOfRange, match="unknown node or link ids"):
        reroute_on_failure(state, _ring(), {"r9"})


def test_attach_users():
    params = NetworkParams()
    paths = {p.user: p for p in attach_users(_ring(), compute_routes(_ring()))}

    u0 = paths["u0"]
    assert (u0.router, u0.gateway, u0.hops, u0.wireless_links) == ("r2", "e0", 1, 2)
    assert u0.propagation_ms == pytest.approx(1.0)
    assert capacity_share(u0, params) == pytest.approx(50 * 0.985**2)
    assert path_loss(u0, params) == pytest.approx(1 - 0.985**2)

    u1 = paths["u1"]
    assert (u1.router, u1.hops, u1.wireless_links) == ("r0", 1, 0)
    assert capacity_share(u1, params) == pytest.approx(10.0)
    assert path_loss(u1, params) == 0.0

    u2 = paths["u2"]
    assert not u2.covered
    assert not u2.served
    assert capacity_share(u2, params) == 0.0


def test_attach_users_wired_only():
    params = NetworkParams()
    state = compute_routes(_ring(), media=WIRED)
    u0 = {p.user: p for p in attach_users(_ring(), state)}["u0"]
    assert u0.nodes == ("r2", "r1", "r0", "e0")
    assert u0.wireless_links == 1
    assert u0.propagation_ms == pytest.approx(0.8)
    assert capacity_share(u0, params) == pytest.approx(50 * 0.8**2 * 0.985)
    assert u0.crosses({"r1"})
    assert not u0.crosses({"u1"})


def test_routers_serve_themselves_without_edge_servers():
    topo = Topology(
        nodes=(Node(id="r0", kind=NodeKind.MESH_ROUTER), Node(id="u0", kind=NodeKind.USER_DEVICE)),
        links=(Link(endpoints=("u0", "r0"), capacity_mbps=5.0),),
    )
    (path,) = attach_users(topo, compute_routes(topo))
    assert path.served
    assert path.gateway == "r0"
    assert path.hops == 0
    assert capacity_share(path, NetworkParams()) == pytest.approx(5.0)


def test_mesh_latency_and_overhead():
    assert mesh_latency(5.678, 0.05) == pytest.approx(113.56)
    with pytest.raises(ZeroControllerRate):
        mesh_latency(1.0, 0.0)
    assert control_overhead(50, 1.0) == 2500.0
    assert control_overhead(0, 1.0) == 0.0
    with pytest.raises(OutOfRange):
        control_overhead(-1, 1.0)


def test_network_params_validation():
    with pytest.raises(ValueError, match=r"to be in \[0, 1\)"):
        NetworkParams(wireless_loss=1.0)
    with pytest.raises(ValueError, match="less or equal to 1"):
        NetworkParams(hop_efficiency=1.5)


def _routers(ids, links) -> Topology:
    return Topology(
        nodes=tuple(Node(id=i, kind=NodeKind.MESH_ROUTER) for i in ids), links=tuple(links)
    )


def _bfs_hops(topology: Topology, src: str) -> dict[str, int]:
    adjacency = collections.defaultdict(set)
    for link in topology.links:
        a, b = link.endpoints
        adjacency[a].add(b)
        adjacency[b].add(a)
    hops = {src: 0}
    queue = collections.deque([src])
    while queue:
        node = queue.popleft()
        for nxt in sorted(adjacency[node]):
            if nxt not in hops:
                hops[nxt] = hops[node] + 1
                queue.append(nxt)
    return hops


def test_compute_routes_matches_breadth_first_search():
    rng = np.random.default_rng(4)
    for _ in range(30):
        n = int(rng.integers(1, 13))
        p = float(rng.uniform(0.1, 0.6))
        ids = [f"r{i:02d}" for i in range(n)]
        links = [
            Link(endpoints=(a, b), medium=Medium.WIRED if rng.random() < 0.5 else Medium.WIRELESS)
            for i, a in enumerate(ids)
            for b in ids[i + 1 :]
            if rng.random() < p
        ]
        topo = _routers(ids, links)
        state = compute_routes(topo)

        total = pairs = 0
        for src in ids:
            oracle = _bfs_hops(topo, src)
            assert state.distance[src] == oracle
            for dst, d in oracle.items():
                if dst == src:
                    continue
                total += d
                pairs += 1
                path = route(state, src, dst)
                assert len(path) == d + 1
                neighbours = {link.other(src) for link in links if src in link.endpoints}
                closer = [v for v in neighbours if _bfs_hops(topo, v).get(dst) == d - 1]
                assert path[1] == min(closer)
        assert state.connected_pairs == pairs
        assert state.disconnected_pairs == n * (n - 1) - pairs
        assert state.d_mesh == pytest.approx(total / pairs if pairs else 0.0)


def test_d_mesh_is_monotone_in_links():
    rng = np.random.default_rng(9)
    ids = [f"r{i:02d}" for i in range(10)]
    tree = [Link(endpoints=(ids[int(rng.integers(0, i))], ids[i])) for i in range(1, len(ids))]
    extra = [
        Link(endpoints=(a, b), medium=Medium.WIRELESS)
        for i, a in enumerate(ids)
        for b in ids[i + 2 :]
    ]
    added = [extra[i] for i in rng.permutation(len(extra))[:12]]

    # the spanning tree keeps every step connected, so only distances can move
    growing = [compute_routes(_routers(ids, tree + added[:k])).d_mesh for k in range(13)]
    assert all(a >= b for a, b in zip(growing, growing[1:]))
    assert growing[-1] < growing[0]

    removal = [added[i] for i in rng.permutation(len(added))]
    shrinking = [compute_routes(_routers(ids, tree + removal[k:])).d_mesh for k in range(13)]
    assert all(a <= b for a, b in zip(shrinking, shrinking[1:]))
    assert shrinking[0] == pytest.approx(growing[-1])
    assert shrinking[-1] == pytest.approx(growing[0])


def test_mesh_latency_is_linear_in_hops():
    per_hop = mesh_latency(1.0, 0.05)
    assert per_hop == pytest.approx(20.0)
    for hops in (0.0, 2.5, 6.0, 9.0):
        assert mesh_latency(hops, 0.05) == pytest.approx(hops * per_hop)
    assert mesh_latency(6.0, 0.05) == pytest.approx(120.0)
    assert mesh_latency(0.0, 0.05) == 0.0


def test_reroute_on_failure_is_idempotent():
    state = compute_routes(_ring())
    once, _ = reroute_on_failure(state, _ring(), {"r1"})
    twice, t_sdwmn = reroute_on_failure(once, _ring(), {"r1"})
    assert twice.failed == once.failed
    assert twice.distance == once.distance
    assert twice.next_hop == once.next_hop
    assert twice.d_mesh == once.d_mesh
    assert t_sdwmn == pytest.approx(RerouteTiming().assisted_single.mean)


def test_failing_a_star_leaf():
    leaves = [f"l{i}" for i in range(5)]
    star = _routers(["hub", *leaves], [Link(endpoints=("hub", leaf)) for leaf in leaves])
    state = compute_routes(star)
    rerouted, _ = reroute_on_failure(state, star, {"l2"})

    survivors = ["hub", "l0", "l1", "l3", "l4"]
    for src in survivors:
        for dst in survivors:
            assert route(rerouted, src, dst) == route(state, src, dst)
    assert "l2" not in rerouted.distance
    assert not rerouted.reachable("hub", "l2")
    assert route(rerouted, "hub", "l2") == []
    assert rerouted.d_mesh == pytest.approx((8 * 1 + 12 * 2) / 20)


def test_failing_a_barbell_bridge():
    left = [Link(endpoints=(a, b)) for a, b in (("a0", "a1"), ("a1", "a2"), ("a0", "a2"))]
    right = [Link(endpoints=(a, b)) for a, b in (("b0", "b1"), ("b1", "b2"), ("b0", "b2"))]
    bridge = Link(endpoints=("a0", "b0"))
    barbell = _routers(["a0", "a1", "a2", "b0", "b1", "b2"], [*left, bridge, *right])
    state = compute_routes(barbell)
    assert state.disconnected_pairs == 0

    split, _ = reroute_on_failure(state, barbell, {bridge.id})
    assert split.connected_pairs == 12
    assert split.disconnected_pairs == 18
    assert split.d_mesh == pytest.approx(1.0)
    for a in ("a0", "a1", "a2"):
        for b in ("b0", "b1", "b2"):
            assert not split.reachable(a, b)
            assert not split.reachable(b, a)
            assert route(split, a, b) == []
    assert route(split, "a1", "a2") == ["a1", "a2"]
