"""Change-list certificates for ELECTION-PRED: does ``x`` reach ``y`` at time ``T``?

Each node stores the times at which its state differs from its state two
steps earlier, split by parity, together with anchors at ``t = 0`` and
``t = 1``.  From a certificate a node (or a neighbour) rebuilds the whole
orbit: the state at ``i`` is the one recorded by the latest entry of ``i``'s
parity with time ``<= i``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..dynamics import as_config, orbit, two_step_changes
from ..graph import Graph
from .harness import NodeView, Reject, Verdict, run_verifier


class ProverRefusal(ValueError):
    """The honest prover was asked to certify a NO instance."""


@dataclass(frozen=True)
class ChangeCert:
    even: tuple  # ((state, time), ...), first entry at time 0
    odd: tuple   # ((state, time), ...), first entry at time 1

    def entries(self) -> int:
        return len(self.even) + len(self.odd)

    def to_json(self) -> dict:
        return {"even": [list(p) for p in self.even], "odd": [list(p) for p in self.odd]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "ChangeCert":
        return cls(
            even=tuple(tuple(p) for p in doc["even"]),
            odd=tuple(tuple(p) for p in doc["odd"]),
        )


def time_bits(N: int) -> int:
    return math.ceil(math.log2(N * N + 1))


def cert_size_bits(cert: ChangeCert, N: int) -> int:
    return cert.entries() * (1 + time_bits(N))


def cert_from_sequence(seq: Sequence[int]) -> ChangeCert:
    """Encode a node trajectory ``seq[0..H]``; entries mark ``seq[s] != seq[s-2]``."""
    if len(seq) < 2:
        raise ValueError("trajectory must cover t = 0 and t = 1")
    even, odd = [(int(seq[0]), 0)], [(int(seq[1]), 1)]
    for s in range(2, len(seq)):
        if seq[s] != seq[s - 2]:
            (even if s % 2 == 0 else odd).append((int(seq[s]), s))
    return ChangeCert(tuple(even), tuple(odd))


# --------------------------------------------------------------------------
# prover


def prove_election_pred(g: Graph, x, y, T: int, N: int | None = None, honest: bool = True) -> list[ChangeCert]:
    """Certificates built from the true orbit of ``x``.

    In honest mode the instance must satisfy ``x^T = y``; with ``honest=False``
    the same (true-orbit) certificates are produced regardless of ``y``.
    """
    N = g.n if N is None else N
    if N < g.n:
        raise ValueError(f"N = {N} is smaller than n = {g.n}")
    if T < 1:
        raise ValueError("T must be >= 1")
    x = as_config(g, x)
    y = as_config(g, y)
    orb = orbit(g, x)
    if honest and not np.array_equal(orb.state(T), y):
        raise ProverRefusal("x^T != y: NO instance")
    log = two_step_changes(g, x, orb)
    x1 = orb.state(1)
    certs = []
    for v in range(g.n):
        even = [(int(x[v]), 0)]
        odd = [(int(x1[v]), 1)]
        for s, q in log.entries[v]:
            (even if s % 2 == 0 else odd).append((q, s))
        certs.append(ChangeCert(tuple(even), tuple(odd)))
    return certs


# --------------------------------------------------------------------------
# reconstruction


def check_cert(cert, N: int) -> str | None:
    """Reason string if ``cert`` is not well formed, else ``None``."""
    if not isinstance(cert, ChangeCert):
        return "not a change certificate"
    limit = N * N
    for name, lst, parity in (("even", cert.even, 0), ("odd", cert.odd, 1)):
        if not lst:
            return f"{name} list empty"
        prev_t, prev_q = None, None
        for pair in lst:
            if len(pair) != 2:
                return f"{name} entry {pair!r} is not a pair"
            q, t = pair
            if type(q) is not int or type(t) is not int or q not in (0, 1):
                return f"{name} entry {pair!r} has bad types"
            if t % 2 != parity:
                return f"{name} entry at t={t} has wrong parity"
            if t > limit or t < 0:
                return f"{name} entry at t={t} outside [0, N^2]"
            if prev_t is not None:
                if t <= prev_t:
                    return f"{name} list not sorted"
                if q == prev_q:
                    return f"{name} states do not alternate at t={t}"
            prev_t, prev_q = t, q
        if lst[0][1] != parity:
            return f"{name} anchor missing"
    return None


class _Trajectory:
    """Random access to the orbit encoded by a well-formed certificate."""

    __slots__ = ("times", "states")

    def __init__(self, cert: ChangeCert):
        self.times = ([t for _, t in cert.even], [t for _, t in cert.odd])
        self.states = ([q for q, _ in cert.even], [q for q, _ in cert.odd])

    def __call__(self, i: int) -> int:
        p = i & 1
        k = bisect_right(self.times[p], i) - 1
        return self.states[p][k]


def reconstruct_orbit(cert: ChangeCert, horizon: int) -> list[int]:
    """``orbit_i`` for ``i = 0..horizon``.

    Raises ``ValueError`` if the anchors are missing or a list is unsorted.
    """
    for lst, parity in ((cert.even, 0), (cert.odd, 1)):
        if not lst or lst[0][1] != parity:
            raise ValueError("certificate lacks its t=0 / t=1 anchor")
        times = [t for _, t in lst]
        if times != sorted(set(times)):
            raise ValueError("certificate times not strictly increasing")
    traj = _Trajectory(cert)
    return [traj(i) for i in range(horizon + 1)]


# --------------------------------------------------------------------------
# verifier


def _majority(total: int, degree: int) -> int:
    return 1 if 2 * total > degree else 0


def verify_node(view: NodeView, params: Mapping, dense: bool = False) -> Reject | None:
    """Decision of one node.  ``view.inputs`` holds ``x`` and ``y``; ``params``
    holds the global ``T`` and ``N``.

    Consistency with the majority rule is checked at every ``t`` in
    ``1..N^2``.  Reconstructed orbits are constant within a parity class
    between entry times, so by default only the times where some input of the
    check can change are visited; ``dense=True`` visits every ``t``.
    """
    T, N = params["T"], params["N"]
    own = view.cert
    bad = check_cert(own, N)
    if bad:
        return Reject("bad_certificate", bad)
    nbrs = view.neighbor_certs()
    for c in nbrs:
        bad = check_cert(c, N)
        if bad:
            return Reject("bad_neighbor_certificate", bad)

    me = _Trajectory(own)
    if me(0) != view.inputs["x"]:
        return Reject("initial_mismatch", f"orbit_0={me(0)} but x_v={view.inputs['x']}")

    support = [_Trajectory(c) for c in nbrs]
    support_certs = list(nbrs)
    if view.degree % 2 == 0:
        support.append(me)
        support_certs.append(own)
    d = view.degree
    limit = N * N

    if dense:
        times = range(1, limit + 1)
    else:
        cand = {1, 2}
        for _, t in own.even + own.odd:
            cand.add(t)
        for c in support_certs:
            for _, t in c.even + c.odd:
                cand.add(t + 1)
        times = sorted(t for t in cand if 1 <= t <= limit)

    for t in times:
        expect = _majority(sum(s(t - 1) for s in support), d)
        if me(t) != expect:
            return Reject("majority_mismatch", f"orbit={me(t)} majority={expect}", time=t)

    if me(T) != view.inputs["y"]:
        return Reject("target_mismatch", f"orbit_T={me(T)} but y_v={view.inputs['y']}")
    return None


def verify_node_dense(view: NodeView, params: Mapping) -> Reject | None:
    return verify_node(view, params, dense=True)


def pred_inputs(x, y) -> list[dict]:
    return [{"x": int(a), "y": int(b)} for a, b in zip(x, y)]


def verify_election_pred(
    g: Graph,
    x,
    y,
    T: int,
    N: int,
    certs: Sequence,
    dense: bool = False,
    stop_at_first_reject: bool = False,
) -> Verdict:
    x = as_config(g, x)
    y = as_config(g, y)
    fn = verify_node_dense if dense else verify_node
    return run_verifier(g, certs, fn, pred_inputs(x, y), {"T": T, "N": N}, stop_at_first_reject)
