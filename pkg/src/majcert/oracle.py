"""Brute-force ground truth for small graphs.

Every configuration is an integer whose bit ``u`` is node ``u``'s state.  The
whole step map over ``{0,1}^n`` is computed with bit operations, then its
functional graph is analysed without assuming anything about periods: cycle
states are what survives repeated removal of in-degree-zero states, and
transients are backward BFS distances to the cycle set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

MAX_NODES = 22
TABLE_NODES = 20


class BudgetExceeded(ValueError):
    pass


def _check_budget(g: Graph) -> None:
    if g.n > MAX_NODES:
        raise BudgetExceeded(f"exhaustive oracle limited to {MAX_NODES} nodes, got {g.n}")


def to_int(x) -> int:
    return sum(int(b) << i for i, b in enumerate(np.asarray(x).ravel()))


def to_bits(code: int, n: int) -> str:
    return "".join("1" if (code >> i) & 1 else "0" for i in range(n))


def step_map(g: Graph) -> np.ndarray:
    """``F[code]`` = packed successor of every packed configuration."""
    _check_budget(g)
    size = 1 << g.n
    X = np.arange(size, dtype=np.uint32)
    out = np.zeros(size, dtype=np.uint32)
    bits = [((X >> u) & 1).astype(np.uint8) for u in range(g.n)]
    for u in range(g.n):
        nb = g.adjacency[u]
        cnt = np.zeros(size, dtype=np.uint8)
        for w in nb:
            cnt += bits[w]
        d = len(nb)
        twice = cnt.astype(np.int32) * 2
        new = np.where(twice > d, 1, np.where(twice == d, bits[u], 0)).astype(np.uint32)
        out |= new << u
    return out


def _cycle_mask(F: np.ndarray) -> np.ndarray:
    size = len(F)
    indeg = np.bincount(F, minlength=size).astype(np.int64)
    alive = np.ones(size, dtype=bool)
    frontier = np.flatnonzero(indeg == 0)
    while len(frontier):
        alive[frontier] = False
        targets = F[frontier]
        np.subtract.at(indeg, targets, 1)
        cand = np.unique(targets)
        frontier = cand[(indeg[cand] == 0) & alive[cand]]
    return alive


@dataclass
class DynamicsSummary:
    graph_id: str
    n: int
    m: int
    max_transient: int
    max_period: int
    fixed_points: list
    two_cycles: list
    other_cycles: list = field(default_factory=list)
    transient: np.ndarray | None = None
    period: np.ndarray | None = None

    def to_json(self) -> str:
        doc = {
            "graph": self.graph_id,
            "n": self.n,
            "m": self.m,
            "max_transient": self.max_transient,
            "max_period": self.max_period,
            "num_fixed_points": len(self.fixed_points),
            "num_two_cycles": len(self.two_cycles),
            "fixed_points": self.fixed_points,
            "two_cycles": self.two_cycles,
            "other_cycles": self.other_cycles,
        }
        return json.dumps(doc, indent=2)

    def table_csv(self) -> str:
        if self.transient is None:
            raise ValueError("per-configuration table only kept for n <= %d" % TABLE_NODES)
        lines = ["config,transient,period"]
        for code in range(1 << self.n):
            lines.append(f"{to_bits(code, self.n)},{self.transient[code]},{self.period[code]}")
        return "\n".join(lines) + "\n"


@dataclass
class _Analysis:
    F: np.ndarray
    on_cycle: np.ndarray
    transient: np.ndarray
    cycle_period: np.ndarray   # period of the cycle state (valid on cycles)
    attractor_rep: np.ndarray  # min code of the reached cycle


def _analyse(g: Graph) -> _Analysis:
    F = step_map(g)
    size = len(F)
    on_cycle = _cycle_mask(F)
    cyc = np.flatnonzero(on_cycle)

    # period and canonical representative of every cycle state
    period = np.zeros(size, dtype=np.int64)
    rep = np.full(size, -1, dtype=np.int64)
    cur = F[cyc].astype(np.int64)
    best = cyc.astype(np.int64).copy()
    steps = 1
    pending = np.ones(len(cyc), dtype=bool)
    while pending.any():
        hit = pending & (cur == cyc)
        period[cyc[hit]] = steps
        pending &= ~hit
        best = np.where(pending, np.minimum(best, cur), best)
        cur = F[cur].astype(np.int64)
        steps += 1
        if steps > size + 1:
            raise RuntimeError("cycle detection did not terminate")
    rep[cyc] = best

    # backward BFS from the cycle set
    transient = np.full(size, -1, dtype=np.int64)
    transient[cyc] = 0
    todo = np.flatnonzero(~on_cycle)
    while len(todo):
        succ = F[todo]
        known = transient[succ] >= 0
        if not known.any():
            raise RuntimeError("transient propagation stalled")
        done = todo[known]
        transient[done] = transient[succ[known]] + 1
        rep[done] = rep[succ[known]]
        todo = todo[~known]
    return _Analysis(F, on_cycle, transient, period, rep)


def enumerate_dynamics(g: Graph, graph_id: str | None = None) -> DynamicsSummary:
    """Transient and period of every configuration, plus the attractor list."""
    a = _analyse(g)
    n = g.n
    # period of an arbitrary configuration is the period of the cycle it enters
    per = a.cycle_period[a.attractor_rep]
    fixed, two, other = [], [], []
    reps = np.flatnonzero(a.on_cycle & (a.attractor_rep == np.arange(len(a.F))))
    for r in reps:
        p = int(a.cycle_period[r])
        if p == 1:
            fixed.append(to_bits(int(r), n))
        elif p == 2:
            two.append([to_bits(int(r), n), to_bits(int(a.F[r]), n)])
        else:
            states, c = [], int(r)
            for _ in range(p):
                states.append(to_bits(c, n))
                c = int(a.F[c])
            other.append(states)
    keep = n <= TABLE_NODES
    return DynamicsSummary(
        graph_id=graph_id or g.name or f"graph{n}",
        n=n,
        m=g.m,
        max_transient=int(a.transient.max()),
        max_period=int(per.max()),
        fixed_points=fixed,
        two_cycles=two,
        other_cycles=other,
        transient=a.transient if keep else None,
        period=per if keep else None,
    )


def predecessors(g: Graph, y) -> set:
    """Every configuration (as a '0'/'1' string) that steps onto ``y``."""
    F = step_map(g)
    code = to_int(y) if not isinstance(y, str) else to_int([int(c) for c in y])
    return {to_bits(int(c), g.n) for c in np.flatnonzero(F == code)}


@dataclass
class Attractor:
    states: list
    period: int
    basin: int


def classify_attractors(g: Graph) -> list[Attractor]:
    """All attractors with their periods and basin sizes, sorted by representative."""
    a = _analyse(g)
    basin = np.bincount(a.attractor_rep, minlength=len(a.F))
    out = []
    for r in np.flatnonzero(a.on_cycle & (a.attractor_rep == np.arange(len(a.F)))):
        p = int(a.cycle_period[r])
        states, c = [], int(r)
        for _ in range(p):
            states.append(to_bits(c, g.n))
            c = int(a.F[c])
        out.append(Attractor(states, p, int(basin[r])))
    return out


def oracle_orbit(g: Graph, x, steps: int) -> list[str]:
    """Plain iteration of the packed step map (for cross-checks)."""
    F = step_map(g)
    c = to_int(x)
    out = [to_bits(c, g.n)]
    for _ in range(steps):
        c = int(F[c])
        out.append(to_bits(c, g.n))
    return out
