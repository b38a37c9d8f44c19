"""Spanning-tree certificates for Count-Ones: are exactly ``k`` inputs equal to 1?

Every node carries ``(root, parent, distance, count)`` for a BFS tree rooted
at the minimum identifier, where ``count`` sums the inputs of its subtree.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..graph import Graph
from .election_pred import ProverRefusal
from .harness import NodeView, Reject, Verdict, run_verifier


@dataclass(frozen=True)
class TreeCert:
    root: int
    parent: int
    distance: int
    count: int

    def to_json(self) -> dict:
        return {"root": self.root, "parent": self.parent, "distance": self.distance, "count": self.count}

    @classmethod
    def from_json(cls, doc: Mapping) -> "TreeCert":
        return cls(doc["root"], doc["parent"], doc["distance"], doc["count"])


def field_bits(N: int) -> int:
    return max(1, int(N).bit_length())


def tree_cert_bits(N: int) -> int:
    return 4 * field_bits(N)


def bfs_tree(g: Graph, root: int | None = None) -> tuple[list[int], list[int]]:
    """``(parent, depth)`` of the BFS tree; parents break ties by smaller id."""
    if root is None:
        root = min(range(g.n), key=lambda v: g.ids[v])
    depth = g.distances_from(root)
    parent = [-1] * g.n
    for v in range(g.n):
        if v == root:
            parent[v] = v
            continue
        ups = [u for u in g.adjacency[v] if depth[u] == depth[v] - 1]
        parent[v] = min(ups, key=lambda u: g.ids[u])
    return parent, [int(d) for d in depth]


def tree_certs(g: Graph, z, parent: Sequence[int], depth: Sequence[int]) -> list[TreeCert]:
    root = next(v for v in range(g.n) if parent[v] == v)
    count = [int(b) for b in z]
    for v in sorted(range(g.n), key=lambda v: -depth[v]):
        if v != root:
            count[parent[v]] += count[v]
    return [
        TreeCert(g.ids[root], g.ids[parent[v]], int(depth[v]), count[v])
        for v in range(g.n)
    ]


def prove_count_ones(g: Graph, z, k: int, honest: bool = True, root: int | None = None) -> list[TreeCert]:
    z = [int(b) for b in np.asarray(z).ravel()]
    if honest and sum(z) != k:
        raise ProverRefusal(f"sum(z) = {sum(z)} != k = {k}")
    parent, depth = bfs_tree(g, root)
    return tree_certs(g, z, parent, depth)


def _is_nat(v) -> bool:
    return type(v) is int and v >= 0


def verify_node(view: NodeView, params: Mapping) -> Reject | None:
    """``view.inputs["z"]`` is the node's bit; ``params["k"]`` the claimed total."""
    c = view.cert
    if not isinstance(c, TreeCert):
        return Reject("bad_certificate", "not a tree certificate")
    if not all(_is_nat(f) for f in (c.root, c.parent, c.distance, c.count)):
        return Reject("bad_certificate", "fields must be non-negative integers")
    nbrs = view.neighbors
    for _, nc in nbrs:
        if not isinstance(nc, TreeCert):
            return Reject("bad_neighbor_certificate")
        if nc.root != c.root:
            return Reject("root_mismatch", f"{c.root} vs {nc.root}")

    if view.id == c.root:
        if c.distance != 0 or c.parent != view.id:
            return Reject("bad_root", "root must have distance 0 and itself as parent")
    else:
        if c.distance < 1:
            return Reject("bad_distance", "non-root node at distance 0")
        par = [nc for nid, nc in nbrs if nid == c.parent]
        if not par:
            return Reject("bad_parent", f"parent {c.parent} is not a neighbour")
        if par[0].distance != c.distance - 1:
            return Reject("bad_distance", f"parent at {par[0].distance}, self at {c.distance}")

    children = sum(nc.count for _, nc in nbrs if nc.parent == view.id)
    if not _is_nat(children):
        return Reject("bad_neighbor_certificate")
    if c.count != view.inputs["z"] + children:
        return Reject("count_mismatch", f"count={c.count} != z + children = {view.inputs['z'] + children}")
    if view.id == c.root and c.count != params["k"]:
        return Reject("root_count", f"count={c.count} != k={params['k']}")
    return None


def verify_count_ones(g: Graph, z, k: int, certs: Sequence, stop_at_first_reject: bool = False) -> Verdict:
    inputs = [{"z": int(b)} for b in np.asarray(z).ravel()]
    return run_verifier(g, certs, verify_node, inputs, {"k": k}, stop_at_first_reject)
