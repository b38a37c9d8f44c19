"""One-round local verification.

A node's decision is a pure function of a :class:`NodeView`: its own inputs,
identifier, degree and certificate, plus the identifiers and certificates of
its neighbours.  The harness builds the views, so a node function cannot see
anything else by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from ..graph import Graph


@dataclass(frozen=True)
class Reject:
    code: str
    detail: str = ""
    time: int | None = None

    def __str__(self) -> str:
        at = f"@t={self.time}" if self.time is not None else ""
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.code}{at}{extra}"


@dataclass(frozen=True)
class NodeView:
    id: int
    degree: int
    inputs: Mapping[str, Any]
    cert: Any
    neighbors: tuple  # ((id, cert), ...)

    def neighbor_certs(self) -> list:
        return [c for _, c in self.neighbors]


NodeFn = Callable[[NodeView, Mapping[str, Any]], "Reject | None"]


@dataclass
class Verdict:
    results: list  # per node: None (accept) or Reject

    @property
    def accepted(self) -> bool:
        return all(r is None for r in self.results)

    @property
    def rejecting(self) -> list[int]:
        return [v for v, r in enumerate(self.results) if r is not None]

    def lines(self) -> list[str]:
        return [f"{v}: {'accept' if r is None else 'reject ' + str(r)}" for v, r in enumerate(self.results)]


def node_view(g: Graph, v: int, certs: Sequence, inputs: Sequence[Mapping]) -> NodeView:
    return NodeView(
        id=g.ids[v],
        degree=g.degree(v),
        inputs=inputs[v],
        cert=certs[v],
        neighbors=tuple((g.ids[u], certs[u]) for u in g.adjacency[v]),
    )


def run_verifier(
    g: Graph,
    certs: Sequence,
    node_fn: NodeFn,
    inputs: Sequence[Mapping],
    params: Mapping[str, Any],
    stop_at_first_reject: bool = False,
) -> Verdict:
    """Run ``node_fn`` at every node.  With ``stop_at_first_reject`` the
    remaining nodes are skipped (their slots hold ``None``) once any node
    rejects; only ``accepted`` is meaningful then."""
    if len(certs) != g.n:
        raise ValueError(f"{len(certs)} certificates for {g.n} nodes")
    results = [None] * g.n
    for v in range(g.n):
        try:
            res = node_fn(node_view(g, v, certs, inputs), params)
        except (TypeError, ValueError, AttributeError, KeyError, IndexError) as exc:
            # garbage certificates must not crash the verifier
            res = Reject("malformed", f"{type(exc).__name__}: {exc}")
        results[v] = res
        if res is not None and stop_at_first_reject:
            break
    return Verdict(results)
