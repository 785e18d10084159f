"""Swarm network topologies, routing-vs-flooding propagation, and
representative path planners (Dijkstra, A*, artificial potential field).

Graphs are plain adjacency maps with Euclidean edge costs; all algorithms
break ties by node id so results are deterministic.
"""
from __future__ import annotations

import enum
import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TopologyKind",
    "NodeRole",
    "TopologyGraph",
    "TopologyError",
    "PropagationResult",
    "ObstacleField",
    "ApfOutcome",
    "GROUND_STATION_ID",
    "build_topology",
    "route_shortest",
    "flood",
    "compare_propagation",
    "astar",
    "grid_graph",
    "apf_plan",
]

GROUND_STATION_ID = "gs"


class TopologyKind(enum.Enum):
    STAR = "star"
    MULTI_STAR = "multi_star"
    SINGLE_GROUP_AD_HOC = "single_group"
    MULTI_GROUP_AD_HOC = "multi_group"
    MULTI_LAYER_AD_HOC = "multi_layer"


class NodeRole(enum.Enum):
    GROUND_STATION = "ground_station"
    MASTER_UAV = "master"
    SLAVE_UAV = "slave"


class TopologyError(ValueError):
    """Raised when a topology cannot be built; carries the orphaned
    nodes when link range is the cause."""

    def __init__(self, message, orphans=()):
        super().__init__(message)
        self.orphans = tuple(orphans)


@dataclass
class TopologyGraph:
    """Undirected swarm network with one ground station."""

    kind: TopologyKind
    roles: dict[str, NodeRole]
    positions: dict[str, np.ndarray]
    adjacency: dict[str, dict[str, float]]

    @property
    def nodes(self) -> list[str]:
        return sorted(self.roles)

    @property
    def edges(self) -> list[tuple[str, str, float]]:
        seen = []
        for a in sorted(self.adjacency):
            for b, cost in sorted(self.adjacency[a].items()):
                if a < b:
                    seen.append((a, b, cost))
        return seen

    def neighbors(self, node: str) -> dict[str, float]:
        return self.adjacency[node]


@dataclass
class PropagationResult:
    """Outcome of one routing or flooding run."""

    delivered: set[str]
    total_messages: int
    hop_count: int
    path: list[str] | None = None
    cost: float | None = None

    @property
    def reached(self) -> bool:
        return bool(self.delivered)


def _euclid(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b))


def _empty_graph(kind: TopologyKind, positions) -> TopologyGraph:
    roles = {GROUND_STATION_ID: NodeRole.GROUND_STATION}
    adjacency = {GROUND_STATION_ID: {}}
    return TopologyGraph(kind=kind, roles=roles, positions=dict(positions),
                         adjacency=adjacency)


def _add_node(graph: TopologyGraph, node: str, role: NodeRole):
    graph.roles[node] = role
    graph.adjacency.setdefault(node, {})


def _add_edge(graph: TopologyGraph, a: str, b: str):
    cost = _euclid(graph.positions[a], graph.positions[b])
    graph.adjacency[a][b] = cost
    graph.adjacency[b][a] = cost


def _split_groups(uav_ids: list[str], n_groups: int) -> list[list[str]]:
    # first (n_uavs mod n_groups) groups take one extra member
    base, extra = divmod(len(uav_ids), n_groups)
    groups, start = [], 0
    for g in range(n_groups):
        size = base + (1 if g < extra else 0)
        groups.append(uav_ids[start:start + size])
        start += size
    return groups


def _mesh_in_range(graph: TopologyGraph, members: list[str],
                   link_range: float):
    for a, b in itertools.combinations(members, 2):
        if _euclid(graph.positions[a], graph.positions[b]) <= link_range:
            _add_edge(graph, a, b)


def _require_connected(graph: TopologyGraph, members: list[str],
                       context: str):
    if not members:
        return
    seen = {members[0]}
    stack = [members[0]]
    member_set = set(members)
    while stack:
        node = stack.pop()
        for nb in graph.adjacency[node]:
            if nb in member_set and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    orphans = sorted(member_set - seen)
    if orphans:
        raise TopologyError(
            f"{context}: nodes beyond link range of any neighbor: {orphans}",
            orphans=orphans)


def build_topology(kind: TopologyKind, n_uavs: int, n_groups: int,
                   link_range: float, positions) -> TopologyGraph:
    """Build a swarm topology over ``positions`` (id -> 3-vector).

    UAV ids are ``u0..u{n-1}``; the ground station id is ``gs`` and must
    have a position. Group meshes connect members within ``link_range``;
    a disconnected group raises :class:`TopologyError` with the orphans.
    """
    if n_uavs < 1 or n_groups < 1:
        raise ValueError("n_uavs and n_groups must be >= 1")
    if n_groups > n_uavs:
        raise ValueError("cannot have more groups than UAVs")
    positions = {k: np.asarray(v, dtype=float) for k, v in positions.items()}
    uav_ids = [f"u{i}" for i in range(n_uavs)]
    missing = [n for n in uav_ids + [GROUND_STATION_ID] if n not in positions]
    if missing:
        raise ValueError(f"missing positions for {missing}")
    graph = _empty_graph(kind, positions)

    if kind is TopologyKind.STAR:
        for u in uav_ids:
            _add_node(graph, u, NodeRole.SLAVE_UAV)
            _add_edge(graph, u, GROUND_STATION_ID)
        return graph

    groups = _split_groups(uav_ids, n_groups)
    masters = [g[0] for g in groups]

    if kind is TopologyKind.MULTI_STAR:
        for group in groups:
            master, slaves = group[0], group[1:]
            _add_node(graph, master, NodeRole.MASTER_UAV)
            _add_edge(graph, master, GROUND_STATION_ID)
            for s in slaves:
                _add_node(graph, s, NodeRole.SLAVE_UAV)
                _add_edge(graph, s, master)
        return graph

    if kind is TopologyKind.SINGLE_GROUP_AD_HOC:
        if n_groups != 1:
            raise ValueError("single-group topology requires n_groups == 1")
        master, slaves = uav_ids[0], uav_ids[1:]
        _add_node(graph, master, NodeRole.MASTER_UAV)
        for s in slaves:
            _add_node(graph, s, NodeRole.SLAVE_UAV)
        _mesh_in_range(graph, uav_ids, link_range)
        _require_connected(graph, uav_ids, "ad hoc group")
        _add_edge(graph, master, GROUND_STATION_ID)
        return graph

    # multi-group and multi-layer share the per-group meshes
    for group in groups:
        master, slaves = group[0], group[1:]
        _add_node(graph, master, NodeRole.MASTER_UAV)
        for s in slaves:
            _add_node(graph, s, NodeRole.SLAVE_UAV)
        _mesh_in_range(graph, group, link_range)
        _require_connected(graph, group, "ad hoc group")

    if kind is TopologyKind.MULTI_GROUP_AD_HOC:
        for master in masters:
            _add_edge(graph, master, GROUND_STATION_ID)
        return graph

    if kind is TopologyKind.MULTI_LAYER_AD_HOC:
        _mesh_in_range(graph, masters, link_range)
        _require_connected(graph, masters, "master layer")
        _add_edge(graph, masters[0], GROUND_STATION_ID)
        return graph

    raise ValueError(f"unknown topology kind {kind}")


def route_shortest(graph: TopologyGraph, src: str,
                   dst: str) -> PropagationResult:
    """Dijkstra shortest path by edge cost; ties break by node id."""
    for node in (src, dst):
        if node not in graph.roles:
            raise ValueError(f"unknown node {node!r}")
    dist = {src: 0.0}
    prev: dict[str, str] = {}
    heap = [(0.0, src)]
    done = set()
    while heap:
        d, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        if node == dst:
            break
        for nb in sorted(graph.adjacency[node]):
            cand = d + graph.adjacency[node][nb]
            if nb not in dist or cand < dist[nb] - 1e-15:
                dist[nb] = cand
                prev[nb] = node
                heapq.heappush(heap, (cand, nb))
    if dst not in done:
        return PropagationResult(delivered=set(), total_messages=0,
                                 hop_count=0, path=None, cost=None)
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    path.reverse()
    hops = len(path) - 1
    return PropagationResult(delivered={dst}, total_messages=hops,
                             hop_count=hops, path=path, cost=dist[dst])


def flood(graph: TopologyGraph, src: str, ttl: int) -> PropagationResult:
    """Synchronous-rounds flooding with duplicate suppression.

    The source transmits on every incident edge; each node that first
    receives the message retransmits next round on all incident edges
    except the one it arrived on. Nodes that have already seen the
    message drop duplicates without forwarding. ``total_messages`` counts
    one transmission per (sender, edge) forwarding event.
    """
    if src not in graph.roles:
        raise ValueError(f"unknown node {src!r}")
    if ttl < 0:
        raise ValueError("ttl must be >= 0")
    delivered = {src}
    frontier: list[tuple[str, str | None]] = [(src, None)]
    messages = 0
    depth = 0
    for _ in range(ttl):
        if not frontier:
            break
        next_frontier = []
        for sender, came_from in sorted(frontier):
            for nb in sorted(graph.adjacency[sender]):
                if nb == came_from:
                    continue
                messages += 1
                if nb not in delivered:
                    delivered.add(nb)
                    next_frontier.append((nb, sender))
        if next_frontier:
            depth += 1
        frontier = next_frontier
    return PropagationResult(delivered=delivered, total_messages=messages,
                             hop_count=depth)


def compare_propagation(graph: TopologyGraph, src: str, dst: str) -> dict:
    """Side-by-side routing vs flooding metrics for one (src, dst) pair."""
    routed = route_shortest(graph, src, dst)
    # flood just deep enough to reach dst (whole graph if unreachable)
    ttl = route_hops(graph, src, dst) if routed.reached else len(graph.roles)
    flooded = flood(graph, src, ttl=ttl)
    return {
        "routing": {
            "reached": routed.reached,
            "hops": routed.hop_count,
            "messages": routed.total_messages,
            "path": routed.path,
            "cost": routed.cost,
        },
        "flooding": {
            "reached": dst in flooded.delivered,
            "depth": flooded.hop_count,
            "messages": flooded.total_messages,
            "delivered": sorted(flooded.delivered),
        },
    }


def route_hops(graph: TopologyGraph, src: str, dst: str) -> int:
    """Minimum hop count between two nodes (BFS); -1 if unreachable."""
    if src == dst:
        return 0
    seen = {src}
    frontier = [src]
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for node in frontier:
            for nb in sorted(graph.adjacency[node]):
                if nb == dst:
                    return depth
                if nb not in seen:
                    seen.add(nb)
                    nxt.append(nb)
        frontier = nxt
    return -1


def astar(graph: TopologyGraph, src: str, dst: str,
          heuristic=None) -> tuple[PropagationResult, int]:
    """A* over the graph; returns (result, node expansions).

    The default heuristic is the straight-line distance between node
    positions, which is admissible for Euclidean edge costs. Passing
    ``heuristic=lambda a, b: 0`` degenerates to Dijkstra.
    """
    for node in (src, dst):
        if node not in graph.roles:
            raise ValueError(f"unknown node {node!r}")
    if heuristic is None:
        def heuristic(a, b):
            return _euclid(graph.positions[a], graph.positions[b])
    dist = {src: 0.0}
    prev: dict[str, str] = {}
    heap = [(heuristic(src, dst), src)]
    done = set()
    expansions = 0
    while heap:
        _, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        expansions += 1
        if node == dst:
            path = [dst]
            while path[-1] != src:
                path.append(prev[path[-1]])
            path.reverse()
            hops = len(path) - 1
            return PropagationResult(delivered={dst}, total_messages=hops,
                                     hop_count=hops, path=path,
                                     cost=dist[dst]), expansions
        for nb in sorted(graph.adjacency[node]):
            cand = dist[node] + graph.adjacency[node][nb]
            if nb not in dist or cand < dist[nb] - 1e-15:
                dist[nb] = cand
                prev[nb] = node
                heapq.heappush(heap, (cand + heuristic(nb, dst), nb))
    return PropagationResult(delivered=set(), total_messages=0, hop_count=0,
                             path=None, cost=None), expansions


def grid_graph(width: int, height: int, walls=()) -> TopologyGraph:
    """4-connected unit grid as a TopologyGraph; ``walls`` is a set of
    blocked (x, y) cells. Node ids are ``x,y`` strings."""
    walls = set(walls)
    roles = {}
    positions = {}
    adjacency = {}
    for x in range(width):
        for y in range(height):
            if (x, y) in walls:
                continue
            node = f"{x},{y}"
            roles[node] = NodeRole.SLAVE_UAV
            positions[node] = np.array([float(x), float(y), 0.0])
            adjacency[node] = {}
    graph = TopologyGraph(kind=TopologyKind.SINGLE_GROUP_AD_HOC, roles=roles,
                          positions=positions, adjacency=adjacency)
    for x in range(width):
        for y in range(height):
            if (x, y) in walls:
                continue
            for dx, dy in ((1, 0), (0, 1)):
                nx_, ny_ = x + dx, y + dy
                if nx_ < width and ny_ < height and (nx_, ny_) not in walls:
                    _add_edge(graph, f"{x},{y}", f"{nx_},{ny_}")
    return graph


class ApfOutcome(enum.Enum):
    REACHED_GOAL = "reached_goal"
    LOCAL_MINIMUM = "local_minimum"
    STEP_LIMIT = "step_limit"


@dataclass(frozen=True)
class ObstacleField:
    """Spherical obstacles plus the goal point inside a bounding box."""

    goal: np.ndarray
    obstacles: tuple = ()          # (center 3-vector, radius) pairs
    bounds_lower: np.ndarray = field(
        default_factory=lambda: np.full(3, -100.0))
    bounds_upper: np.ndarray = field(
        default_factory=lambda: np.full(3, 100.0))

    def __post_init__(self):
        object.__setattr__(self, "goal", np.asarray(self.goal, dtype=float))
        obstacles = tuple((np.asarray(c, dtype=float), float(r))
                          for c, r in self.obstacles)
        if any(r <= 0 for _, r in obstacles):
            raise ValueError("obstacle radii must be > 0")
        object.__setattr__(self, "obstacles", obstacles)
        object.__setattr__(self, "bounds_lower",
                           np.asarray(self.bounds_lower, dtype=float))
        object.__setattr__(self, "bounds_upper",
                           np.asarray(self.bounds_upper, dtype=float))


def _apf_gradient(point: np.ndarray, fld: ObstacleField, attract_gain: float,
                  repel_gain: float, influence_radius: float) -> np.ndarray:
    # quadratic attraction; inverse-distance repulsion inside the
    # influence radius, measured from the obstacle surface
    grad = attract_gain * (point - fld.goal)
    for center, radius in fld.obstacles:
        offset = point - center
        dist = float(np.linalg.norm(offset)) - radius
        if dist <= 0:
            dist = 1e-9
        if dist < influence_radius:
            direction = offset / max(np.linalg.norm(offset), 1e-12)
            grad += (-repel_gain * (1.0 / dist - 1.0 / influence_radius)
                     / (dist * dist)) * direction
    return grad


def _apf_potential(point: np.ndarray, fld: ObstacleField, attract_gain: float,
                   repel_gain: float, influence_radius: float) -> float:
    value = 0.5 * attract_gain * float(np.sum((point - fld.goal) ** 2))
    for center, radius in fld.obstacles:
        dist = float(np.linalg.norm(point - center)) - radius
        if dist <= 0:
            dist = 1e-9
        if dist < influence_radius:
            value += 0.5 * repel_gain * (1.0 / dist
                                         - 1.0 / influence_radius) ** 2
    return value


def apf_plan(start, fld: ObstacleField, attract_gain: float = 1.0,
             repel_gain: float = 100.0, influence_radius: float = 5.0,
             step: float = 0.05, max_steps: int = 10000,
             goal_tolerance: float = 0.5,
             stall_tolerance: float = 1e-4):
    """Gradient descent on the combined potential.

    Returns ``(trajectory, outcome)`` where trajectory is an (n, 3) array.
    A local minimum is declared when the per-step displacement drops below
    ``stall_tolerance`` while the goal is farther than ``goal_tolerance``.
    """
    point = np.asarray(start, dtype=float).copy()
    if np.any(point < fld.bounds_lower) or np.any(point > fld.bounds_upper):
        raise ValueError("start must lie inside the bounds")
    for center, radius in fld.obstacles:
        if np.linalg.norm(point - center) <= radius:
            raise ValueError("start must lie outside every obstacle")
    trajectory = [point.copy()]
    outcome = ApfOutcome.STEP_LIMIT
    for _ in range(max_steps):
        if np.linalg.norm(point - fld.goal) <= goal_tolerance:
            outcome = ApfOutcome.REACHED_GOAL
            break
        grad = _apf_gradient(point, fld, attract_gain, repel_gain,
                             influence_radius)
        norm = float(np.linalg.norm(grad))
        if norm < 1e-12:
            outcome = ApfOutcome.LOCAL_MINIMUM
            break
        move = min(step, norm * step)  # shrink near stationary points
        point = point - move * grad / norm
        point = np.clip(point, fld.bounds_lower, fld.bounds_upper)
        displacement = float(np.linalg.norm(point - trajectory[-1]))
        trajectory.append(point.copy())
        if displacement < stall_tolerance:
            outcome = (ApfOutcome.REACHED_GOAL
                       if np.linalg.norm(point - fld.goal) <= goal_tolerance
                       else ApfOutcome.LOCAL_MINIMUM)
            break
    return np.array(trajectory), outcome
