"""JSON certificate bundles: one record per node, keyed by node index."""

from __future__ import annotations

import json
from typing import Sequence

from .composite import CompositeCert, composite_bits
from .count_ones import TreeCert, tree_cert_bits
from .election_pred import ChangeCert, cert_size_bits

PROBLEMS = {
    "pred": ChangeCert,
    "count-ones": TreeCert,
    "prediction": CompositeCert,
}


def cert_bits(problem: str, cert, N: int) -> int:
    if problem == "pred":
        return cert_size_bits(cert, N)
    if problem == "count-ones":
        return tree_cert_bits(N)
    return composite_bits(cert, N)


def size_report(problem: str, certs: Sequence, N: int) -> dict:
    sizes = [cert_bits(problem, c, N) for c in certs]
    return {"total_bits": sum(sizes), "max_node_bits": max(sizes), "nodes": len(sizes)}


def dumps(problem: str, certs: Sequence, **params) -> str:
    doc = {
        "problem": problem,
        **params,
        "records": {str(v): c.to_json() for v, c in enumerate(certs)},
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def loads(text: str) -> tuple[str, list, dict]:
    """Returns ``(problem, certs, params)``; raises ``ValueError`` on bad input."""
    doc = json.loads(text)
    problem = doc.get("problem")
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}")
    cls = PROBLEMS[problem]
    records = doc["records"]
    try:
        certs = [cls.from_json(records[str(v)]) for v in range(len(records))]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed record: {exc}") from None
    params = {k: v for k, v in doc.items() if k not in ("problem", "records")}
    return problem, certs, params
