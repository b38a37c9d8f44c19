"""ELECTION-PREDICTION: does opinion 1 hold a strict majority at time ``T``?

A node's certificate bundles its claimed final state ``y``, the claimed node
count ``n`` and number of ones ``p``, its change-list certificate for reaching
``y``, and two Count-Ones certificates (all-ones input against ``n``; ``y``
against ``p``).  Neighbours must agree on ``n`` and ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from ..dynamics import as_config, orbit
from ..graph import Graph
from . import count_ones, election_pred
from .count_ones import TreeCert
from .election_pred import ChangeCert, ProverRefusal
from .harness import NodeView, Reject, Verdict, run_verifier


@dataclass(frozen=True)
class CompositeCert:
    y: int
    n: int
    p: int
    pred: ChangeCert
    ones_all: TreeCert
    ones_y: TreeCert

    def to_json(self) -> dict:
        return {
            "y": self.y,
            "n": self.n,
            "p": self.p,
            "pred": self.pred.to_json(),
            "ones_all": self.ones_all.to_json(),
            "ones_y": self.ones_y.to_json(),
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "CompositeCert":
        return cls(
            doc["y"],
            doc["n"],
            doc["p"],
            ChangeCert.from_json(doc["pred"]),
            TreeCert.from_json(doc["ones_all"]),
            TreeCert.from_json(doc["ones_y"]),
        )


def composite_bits(cert: CompositeCert, N: int) -> int:
    return (
        1
        + 2 * count_ones.field_bits(N)
        + election_pred.cert_size_bits(cert.pred, N)
        + 2 * count_ones.tree_cert_bits(N)
    )


def assemble(y, pred_certs, all_certs, y_certs, n_claim: int, p_claim: int) -> list[CompositeCert]:
    return [
        CompositeCert(int(y[v]), n_claim, p_claim, pred_certs[v], all_certs[v], y_certs[v])
        for v in range(len(pred_certs))
    ]


def prove_election_prediction(g: Graph, x, T: int, N: int | None = None, honest: bool = True) -> list[CompositeCert]:
    N = g.n if N is None else N
    x = as_config(g, x)
    y = orbit(g, x).state(T)
    p = int(y.sum())
    if honest and not 2 * p > g.n:
        raise ProverRefusal(f"only {p} of {g.n} nodes hold 1 at T={T}: NO instance")
    pred = election_pred.prove_election_pred(g, x, y, T, N)
    ones_all = count_ones.prove_count_ones(g, np.ones(g.n, dtype=int), g.n)
    ones_y = count_ones.prove_count_ones(g, y, p)
    return assemble(y, pred, ones_all, ones_y, g.n, p)


def _project(view: NodeView, attr: str, inputs: Mapping) -> NodeView:
    return NodeView(
        id=view.id,
        degree=view.degree,
        inputs=inputs,
        cert=getattr(view.cert, attr),
        neighbors=tuple((i, getattr(c, attr)) for i, c in view.neighbors),
    )


def verify_node(view: NodeView, params: Mapping) -> Reject | None:
    c = view.cert
    if not isinstance(c, CompositeCert):
        return Reject("bad_certificate", "not a composite certificate")
    if any(not isinstance(nc, CompositeCert) for _, nc in view.neighbors):
        return Reject("bad_neighbor_certificate")
    if type(c.n) is not int or type(c.p) is not int or c.y not in (0, 1):
        return Reject("bad_certificate", "y, n, p fields")
    if c.n < 1 or not 0 <= c.p <= c.n:
        return Reject("bad_counts", f"n={c.n}, p={c.p}")
    for _, nc in view.neighbors:
        if (nc.n, nc.p) != (c.n, c.p):
            return Reject("count_disagreement", f"({c.n},{c.p}) vs ({nc.n},{nc.p})")

    sub = election_pred.verify_node(
        _project(view, "pred", {"x": view.inputs["x"], "y": c.y}), params
    )
    if sub is not None:
        return Reject("pred:" + sub.code, sub.detail, sub.time)
    sub = count_ones.verify_node(_project(view, "ones_all", {"z": 1}), {"k": c.n})
    if sub is not None:
        return Reject("ones_all:" + sub.code, sub.detail)
    sub = count_ones.verify_node(_project(view, "ones_y", {"z": c.y}), {"k": c.p})
    if sub is not None:
        return Reject("ones_y:" + sub.code, sub.detail)
    if not 2 * c.p > c.n:
        return Reject("no_majority", f"p={c.p}, n={c.n}")
    return None


def verify_election_prediction(
    g: Graph, x, T: int, N: int, certs: Sequence, stop_at_first_reject: bool = False
) -> Verdict:
    x = as_config(g, x)
    inputs = [{"x": int(b)} for b in x]
    return run_verifier(g, certs, verify_node, inputs, {"T": T, "N": N}, stop_at_first_reject)
