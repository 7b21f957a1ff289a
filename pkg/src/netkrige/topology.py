"""Directed topologies, shortest-path routing and routing matrices.

A routing matrix ``G`` has one row per path and one column per directed
link, with ``G[i, j] == 1`` when path ``i`` traverses link ``j``. Path
metrics that add up along links (delay, log of loss survival) then obey
``y = G @ x``.
"""

from __future__ import annotations

import heapq
import json
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class TopologyError(ValueError):
    """Malformed or unusable topology input."""


class DimensionError(ValueError):
    """Array shapes that do not line up with a routing matrix."""


@dataclass(frozen=True)
class Topology:
    """A strongly connected directed graph with dense integer ids.

    ``links[j] == (source, target)`` for link id ``j``.
    """

    labels: tuple
    links: tuple
    weights: tuple = field(default=())

    def __post_init__(self):
        if not self.weights:
            object.__setattr__(self, "weights", (1.0,) * len(self.links))
        _validate(self)

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_links(self) -> int:
        return len(self.links)

    def out_links(self):
        """Adjacency list ``node -> [(target, link id), ...]`` sorted by target."""
        adj = [[] for _ in range(self.n_nodes)]
        for j, (u, v) in enumerate(self.links):
            adj[u].append((v, j))
        for row in adj:
            row.sort()
        return adj

    def link_label(self, j: int) -> str:
        u, v = self.links[j]
        return f"{self.labels[u]}->{self.labels[v]}"


def _validate(topo: Topology):
    n = len(topo.labels)
    if n < 2:
        raise TopologyError("a topology needs at least two nodes")
    if len(topo.weights) != len(topo.links):
        raise TopologyError("one weight per link required")
    seen = set()
    for j, (u, v) in enumerate(topo.links):
        if not (0 <= u < n and 0 <= v < n):
            raise TopologyError(f"link {j} references unknown node ({u}, {v})")
        if u == v:
            raise TopologyError(f"self-loop at node {u} ({topo.labels[u]})")
        if (u, v) in seen:
            raise TopologyError(f"duplicate link {topo.labels[u]}->{topo.labels[v]}")
        seen.add((u, v))
    for w in topo.weights:
        if not (np.isfinite(w) and w > 0):
            raise TopologyError(f"link weights must be positive, got {w}")
    if not is_strongly_connected(n, topo.links):
        raise TopologyError("graph is not strongly connected")


def _reachable(n, adjacency, start):
    seen = [False] * n
    seen[start] = True
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return all(seen)


def is_strongly_connected(n: int, links: Sequence) -> bool:
    fwd = [[] for _ in range(n)]
    rev = [[] for _ in range(n)]
    for u, v in links:
        fwd[u].append(v)
        rev[v].append(u)
    return _reachable(n, fwd, 0) and _reachable(n, rev, 0)


def topology_from_dict(doc: dict) -> Topology:
    """Build a :class:`Topology` from the JSON edge-list document.

    Each undirected edge record expands into two consecutive directed links
    ``a->b`` then ``b->a``; a directed record contributes a single link.
    """
    try:
        nodes = doc["nodes"]
        edges = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise TopologyError("document needs 'nodes' and 'edges'") from exc
    if not isinstance(nodes, list) or not isinstance(edges, list):
        raise TopologyError("'nodes' and 'edges' must be lists")

    links, weights = [], []
    for m, rec in enumerate(edges):
        try:
            a, b = int(rec["a"]), int(rec["b"])
        except (KeyError, TypeError, ValueError) as exc:
            raise TopologyError(f"edge record {m} lacks integer 'a'/'b'") from exc
        w = float(rec.get("weight", 1.0))
        links.append((a, b))
        weights.append(w)
        if not rec.get("directed", False):
            links.append((b, a))
            weights.append(w)
    return Topology(tuple(str(x) for x in nodes), tuple(links), tuple(weights))


def load_topology(source) -> Topology:
    """Load a topology from a path, a JSON string, or an already-parsed dict."""
    if isinstance(source, dict):
        return topology_from_dict(source)
    text = source
    if isinstance(source, os.PathLike) or (
        isinstance(source, str) and not source.lstrip().startswith("{")
    ):
        with open(source) as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"cannot parse topology JSON: {exc}") from exc
    return topology_from_dict(doc)


def bundled_topology(name: str) -> Topology:
    """One of the topologies shipped in ``netkrige/data`` (e.g. ``"abilene"``)."""
    path = os.path.join(os.path.dirname(__file__), "data", f"{name}.json")
    if not os.path.exists(path):
        raise TopologyError(f"no bundled topology named {name!r}")
    return load_topology(path)


BUNDLED_FIXTURES = ("line3", "cycle3", "star5", "ring6_chord", "abilene")


# --- routing -----------------------------------------------------------------


def shortest_routes(topo: Topology, weights: Optional[Sequence[float]] = None):
    """Route every ordered pair along its shortest path.

    Among equal-weight paths the lexicographically smallest node sequence
    wins. Returns ``{(origin, destination): [link ids in order]}``.
    """
    if weights is None:
        weights = topo.weights
    weights = [float(w) for w in weights]
    if len(weights) != topo.n_links:
        raise DimensionError(f"expected {topo.n_links} link weights, got {len(weights)}")
    if any(not (np.isfinite(w) and w > 0) for w in weights):
        raise TopologyError("routing weights must be strictly positive")

    adj = topo.out_links()
    routes = {}
    for src in range(topo.n_nodes):
        # (distance, node sequence) orders candidates; extending two
        # equal-distance sequences by the same hop preserves their order.
        best = {}
        heap = [(0.0, (src,), ())]
        while heap:
            dist, nodes, hops = heapq.heappop(heap)
            u = nodes[-1]
            if u in best:
                continue
            best[u] = hops
            for v, j in adj[u]:
                if v not in best:
                    heapq.heappush(heap, (dist + weights[j], nodes + (v,), hops + (j,)))
        for dst in range(topo.n_nodes):
            if dst != src:
                routes[(src, dst)] = list(best[dst])
    return routes


@dataclass(frozen=True, eq=False)
class RoutingMatrix:
    """Binary path-by-link incidence matrix with its path list.

    ``paths[i] == (origin, destination)`` for path id ``i``; columns follow
    ``link_order``.
    """

    entries: np.ndarray
    paths: tuple
    link_order: tuple

    def __post_init__(self):
        G = np.asarray(self.entries, dtype=float)
        if G.ndim != 2:
            raise DimensionError("routing matrix must be two-dimensional")
        if not np.all((G == 0) | (G == 1)):
            raise DimensionError("routing matrix entries must be 0 or 1")
        if G.shape[0] != len(self.paths) or G.shape[1] != len(self.link_order):
            raise DimensionError(
                f"matrix shape {G.shape} does not match {len(self.paths)} paths "
                f"and {len(self.link_order)} links"
            )
        if G.shape[0] and np.any(G.sum(axis=1) == 0):
            raise DimensionError("every path must traverse at least one link")
        G.setflags(write=False)
        object.__setattr__(self, "entries", G)

    @property
    def n_paths(self) -> int:
        return self.entries.shape[0]

    @property
    def n_links(self) -> int:
        return self.entries.shape[1]

    @property
    def hop_counts(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.entries))

    def rows(self, indices) -> np.ndarray:
        return self.entries[np.asarray(indices, dtype=int)]


def build_routing_matrix(topo: Topology, weights=None) -> RoutingMatrix:
    """Routing matrix over all ordered node pairs, ordered by (origin, destination)."""
    routes = shortest_routes(topo, weights)
    pairs = sorted(routes)
    G = np.zeros((len(pairs), topo.n_links))
    for i, pair in enumerate(pairs):
        G[i, routes[pair]] = 1.0
    return RoutingMatrix(G, tuple(pairs), tuple(range(topo.n_links)))


def path_values(G: RoutingMatrix, x) -> np.ndarray:
    """Path metrics ``G @ x`` for link metrics ``x`` (also accepts epochs x links)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != G.n_links:
        raise DimensionError(f"expected {G.n_links} link values, got {x.shape[-1]}")
    return x @ G.entries.T


def hop_diameter(topo: Topology) -> int:
    """Longest shortest-path hop count over all ordered pairs."""
    fwd = [[v for v, _ in row] for row in topo.out_links()]
    worst = 0
    for src in range(topo.n_nodes):
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in fwd[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        worst = max(worst, max(dist.values()))
    return worst


# --- routing matrix text format ----------------------------------------------

HEADER_TAG = "%netkrige G"


def sidecar_path(matrix_path) -> str:
    root, _ = os.path.splitext(os.fspath(matrix_path))
    return root + ".paths.json"


def write_routing_matrix(G: RoutingMatrix, path, labels=None):
    """Write the triplet file plus the ``.paths.json`` sidecar next to it."""
    lines = [f"{HEADER_TAG} {G.n_paths} {G.n_links}"]
    for i, j in zip(*np.nonzero(G.entries)):
        lines.append(f"{i} {j} 1")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    sidecar = {
        "paths": [
            {"id": i, "origin": int(o), "destination": int(d)}
            for i, (o, d) in enumerate(G.paths)
        ],
        "link_order": [int(j) for j in G.link_order],
    }
    if labels is not None:
        sidecar["node_labels"] = list(labels)
    with open(sidecar_path(path), "w") as fh:
        json.dump(sidecar, fh, indent=1)


def read_routing_matrix(path) -> RoutingMatrix:
    """Read a triplet file; the sidecar is used when present."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith(HEADER_TAG):
        raise TopologyError(f"{path}: missing '{HEADER_TAG} <n_p> <n_e>' header")
    try:
        n_p, n_e = (int(t) for t in lines[0][len(HEADER_TAG):].split())
        G = np.zeros((n_p, n_e))
        for ln in lines[1:]:
            i, j, val = ln.split()
            if float(val) != 1.0:
                raise TopologyError(f"{path}: non-binary entry {ln!r}")
            G[int(i), int(j)] = 1.0
    except (ValueError, IndexError) as exc:
        raise TopologyError(f"{path}: malformed triplet line ({exc})") from exc

    paths = tuple((None, None) for _ in range(n_p))
    link_order = tuple(range(n_e))
    side = sidecar_path(path)
    if os.path.exists(side):
        with open(side) as fh:
            meta = json.load(fh)
        recs = sorted(meta["paths"], key=lambda r: r["id"])
        paths = tuple((r["origin"], r["destination"]) for r in recs)
        link_order = tuple(meta.get("link_order", link_order))
    return RoutingMatrix(G, paths, link_order)
