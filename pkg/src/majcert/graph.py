"""Undirected simple connected graphs, distance balls and corpus generators.

Nodes are the dense integers ``0..n-1``.  Every graph also carries an
injective identifier map (``ids``) used only by the certification protocols,
which compare identifiers rather than indices.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
import scipy.sparse as sp


class GraphError(ValueError):
    """Raised for malformed, disconnected or otherwise invalid graphs."""


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    edges: frozenset
    adjacency: tuple
    ids: tuple
    name: str = field(default="", compare=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix (no diagonal)."""
        rows, cols = [], []
        for u, v in self.edges:
            rows += [u, v]
            cols += [v, u]
        data = np.ones(len(rows), dtype=np.int32)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def node_of_id(self) -> dict:
        return {i: v for v, i in enumerate(self.ids)}

    def distances_from(self, r: int) -> np.ndarray:
        """BFS distances from ``r`` (the graph is connected, so all finite)."""
        dist = np.full(self.n, -1, dtype=np.int64)
        dist[r] = 0
        queue = deque([r])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def eccentricity(self, v: int) -> int:
        return int(self.distances_from(v).max())

    def to_networkx(self) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(range(self.n))
        h.add_edges_from(self.edges)
        return h

    def __repr__(self) -> str:
        label = f"{self.name}, " if self.name else ""
        return f"Graph({label}n={self.n}, m={self.m})"


def build_graph(
    n: int,
    edge_list: Iterable[Sequence[int]],
    ids: Sequence[int] | None = None,
    id_exponent: int = 2,
    name: str = "",
) -> Graph:
    """Validate an edge list and return an immutable connected :class:`Graph`.

    Rejects out-of-range endpoints, self-loops, duplicate edges (in either
    orientation) and disconnected graphs.  ``ids`` defaults to ``v + 1``;
    explicit identifiers must be distinct and lie in ``[1, n**id_exponent]``.
    """
    if n < 1:
        raise GraphError("a graph needs at least one node")
    seen = set()
    adj = [[] for _ in range(n)]
    for pair in edge_list:
        u, v = (int(p) for p in pair)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise GraphError(f"self-loop at node {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"duplicate edge {key}")
        seen.add(key)
        adj[u].append(v)
        adj[v].append(u)

    # connectivity
    reached = [False] * n
    reached[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not reached[w]:
                reached[w] = True
                stack.append(w)
    if not all(reached):
        missing = reached.count(False)
        raise GraphError(f"graph is disconnected ({missing} nodes unreachable from node 0)")

    if ids is None:
        ids = tuple(range(1, n + 1))
    else:
        ids = tuple(int(i) for i in ids)
        if len(ids) != n:
            raise GraphError("ids must have one entry per node")
        if len(set(ids)) != n:
            raise GraphError("ids must be pairwise distinct")
        hi = n ** id_exponent if n > 1 else 1
        if min(ids) < 1 or max(ids) > max(hi, n):
            raise GraphError(f"ids must lie in [1, {max(hi, n)}]")

    return Graph(
        n=n,
        edges=frozenset(seen),
        adjacency=tuple(tuple(sorted(a)) for a in adj),
        ids=ids,
        name=name,
    )


def with_ids(g: Graph, ids: Sequence[int], id_exponent: int = 2) -> Graph:
    return build_graph(g.n, g.edges, ids=ids, id_exponent=id_exponent, name=g.name)


def random_ids(g: Graph, rng: np.random.Generator, id_exponent: int = 2) -> Graph:
    hi = max(g.n ** id_exponent, g.n)
    ids = rng.choice(hi, size=g.n, replace=False) + 1
    return with_ids(g, ids, id_exponent)


# --------------------------------------------------------------------------
# growth


@dataclass(frozen=True)
class BallProfile:
    center: int
    boundary_sizes: tuple

    @property
    def radius(self) -> int:
        return len(self.boundary_sizes) - 1

    def ball_size(self, k: int) -> int:
        return sum(self.boundary_sizes[: k + 1])


def growth_profile(g: Graph, v: int, radius: int) -> BallProfile:
    """Sizes of the distance layers ``|{u : d(v,u) = k}|`` for ``k = 0..radius``."""
    if not 0 <= v < g.n:
        raise GraphError(f"node {v} not in graph")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    dist = g.distances_from(v)
    counts = np.bincount(dist, minlength=radius + 1)[: radius + 1]
    return BallProfile(center=v, boundary_sizes=tuple(int(c) for c in counts))


# --------------------------------------------------------------------------
# text format


def parse_graph(text: str, name: str = "") -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v``; ``#`` starts a comment."""
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if len(tokens) < 2:
        raise GraphError("graph text must start with 'n m'")
    try:
        nums = [int(t) for t in tokens]
    except ValueError as exc:
        raise GraphError(f"non-integer token in graph text: {exc}") from None
    n, m = nums[0], nums[1]
    body = nums[2:]
    if len(body) != 2 * m:
        raise GraphError(f"expected {m} edges, found {len(body) / 2:g}")
    pairs = [(body[2 * i], body[2 * i + 1]) for i in range(m)]
    return build_graph(n, pairs, name=name)


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read(), name=str(path))


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))


# --------------------------------------------------------------------------
# corpus generators


def single_edge() -> Graph:
    return build_graph(2, [(0, 1)], name="K2")


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)], name=f"P{n}")


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a simple cycle needs n >= 3")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)], name=f"C{n}")


def complete_graph(n: int) -> Graph:
    return build_graph(n, itertools.combinations(range(n), 2), name=f"K{n}")


def grid_graph(*dims: int) -> Graph:
    """d-dimensional grid (open boundary); node index is row-major."""
    return _lattice(dims, periodic=False)


def torus_graph(*dims: int) -> Graph:
    """d-dimensional torus; every side must be at least 3 to stay simple."""
    if min(dims) < 3:
        raise GraphError("torus sides must be >= 3")
    return _lattice(dims, periodic=True)


def _lattice(dims: Sequence[int], periodic: bool) -> Graph:
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    idx = np.arange(n).reshape(dims)
    edges = set()
    for axis, size in enumerate(dims):
        if periodic:
            nxt = np.roll(idx, -1, axis=axis)
            pairs = zip(idx.ravel(), nxt.ravel())
        else:
            lo = np.take(idx, range(size - 1), axis=axis)
            hi = np.take(idx, range(1, size), axis=axis)
            pairs = zip(lo.ravel(), hi.ravel())
        for u, v in pairs:
            edges.add((min(int(u), int(v)), max(int(u), int(v))))
    kind = "T" if periodic else "G"
    return build_graph(n, sorted(edges), name=f"{kind}{'x'.join(map(str, dims))}")


def random_cubic(n: int, rng: np.random.Generator, max_tries: int = 200) -> Graph:
    """Uniform-ish random connected 3-regular graph (n even, n >= 4)."""
    if n % 2 or n < 4:
        raise GraphError("random cubic graphs need even n >= 4")
    for _ in range(max_tries):
        h = nx.random_regular_graph(3, n, seed=int(rng.integers(2**32)))
        if nx.is_connected(h):
            return build_graph(n, h.edges(), name=f"cubic{n}")
    raise GraphError(f"no connected cubic graph on {n} nodes after {max_tries} tries")


def random_bounded_degree(
    n: int, max_degree: int, rng: np.random.Generator, density: float = 0.9
) -> Graph:
    """Random connected graph with every degree <= ``max_degree``.

    Starts from a random spanning tree with bounded degree, then adds random
    edges between unsaturated nodes until roughly ``density`` of the degree
    budget is used.
    """
    if max_degree < 2 and n > 2:
        raise GraphError("max_degree < 2 cannot connect more than two nodes")
    order = rng.permutation(n)
    deg = np.zeros(n, dtype=int)
    edges = set()
    for i in range(1, n):
        v = int(order[i])
        cands = [int(u) for u in order[:i] if deg[u] < max_degree]
        u = cands[int(rng.integers(len(cands)))]
        edges.add((min(u, v), max(u, v)))
        deg[u] += 1
        deg[v] += 1
    target = int(density * n * max_degree / 2)
    attempts = 0
    while len(edges) < target and attempts < 20 * n * max_degree:
        attempts += 1
        u, v = (int(a) for a in rng.integers(n, size=2))
        if u == v or deg[u] >= max_degree or deg[v] >= max_degree:
            continue
        key = (min(u, v), max(u, v))
        if key in edges:
            continue
        edges.add(key)
        deg[u] += 1
        deg[v] += 1
    return build_graph(n, sorted(edges), name=f"rand{n}d{max_degree}")


def disjoint_union(parts: Sequence[Graph], extra_edges: Iterable[Sequence[int]] = (), name: str = "") -> tuple[Graph, list[int]]:
    """Glue graphs side by side; returns the union and each part's index offset."""
    offsets, edges, total = [], [], 0
    for g in parts:
        offsets.append(total)
        edges += [(u + total, v + total) for u, v in g.edges]
        total += g.n
    edges += [tuple(e) for e in extra_edges]
    return build_graph(total, edges, name=name), offsets
