"""Synchronous majority dynamics with the tie-keep rule.

A node of degree ``d`` moves to 1 when more than ``d/2`` of its neighbours are
1, to 0 when fewer than ``d/2`` are, and keeps its state on a tie (ties only
happen at even degree).  Configurations are ``uint8`` numpy vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph


class DynamicsError(RuntimeError):
    pass


class PeriodViolation(DynamicsError):
    """An orbit revisited a configuration with period > 2 or never settled."""


def parse_config(text: str, n: int | None = None) -> np.ndarray:
    s = "".join(text.split())
    if not s or any(c not in "01" for c in s):
        raise ValueError("configuration must be a non-empty string of '0'/'1'")
    if n is not None and len(s) != n:
        raise ValueError(f"configuration has length {len(s)}, graph has {n} nodes")
    return np.frombuffer(s.encode(), dtype=np.uint8) - ord("0")


def format_config(x) -> str:
    return "".join("1" if b else "0" for b in np.asarray(x).ravel())


def as_config(g: Graph, x) -> np.ndarray:
    if isinstance(x, str):
        return parse_config(x, g.n)
    arr = np.asarray(x, dtype=np.uint8)
    if arr.shape != (g.n,):
        raise ValueError(f"configuration has shape {arr.shape}, expected ({g.n},)")
    if arr.max(initial=0) > 1:
        raise ValueError("configuration entries must be 0 or 1")
    return arr


def majority_step(g: Graph, x) -> np.ndarray:
    x = as_config(g, x)
    ones = g.matrix @ x.astype(np.int32)
    twice = 2 * ones
    out = np.where(twice > g.degrees, 1, np.where(twice == g.degrees, x, 0))
    return out.astype(np.uint8)


def majority_step_sgn(g: Graph, x) -> np.ndarray:
    """Same rule written as ``sgn(sum_v a_uv x_v - d(u)/2)`` with a self-loop
    ``a_uu = 1`` on even-degree nodes."""
    x = as_config(g, x)
    even = (g.degrees % 2 == 0).astype(np.int32)
    s = g.matrix @ x.astype(np.int32) + even * x
    return (2 * s > g.degrees).astype(np.uint8)


def step_batch(g: Graph, X: np.ndarray) -> np.ndarray:
    """Apply the rule to every row of ``X`` (shape ``(batch, n)``)."""
    ones = np.asarray(g.matrix @ X.T.astype(np.int32)).T
    twice = 2 * ones
    out = np.where(twice > g.degrees, 1, np.where(twice == g.degrees, X, 0))
    return out.astype(np.uint8)


@dataclass
class Orbit:
    states: list
    transient: int
    period: int

    def state(self, t: int) -> np.ndarray:
        if t < len(self.states):
            return self.states[t]
        k = (t - self.transient) % self.period
        return self.states[self.transient + k]

    @property
    def attractor(self) -> list:
        return self.states[self.transient : self.transient + self.period]


def orbit(g: Graph, x, horizon: int | None = None) -> Orbit:
    """Iterate from ``x`` until the orbit closes.

    ``horizon`` must be at least ``|E| + 2``.  Closure is detected by comparing
    each new state with the previous two; a full history set catches any
    longer cycle, which is reported as :class:`PeriodViolation` instead of
    looping.
    """
    need = g.m + 2
    if horizon is None:
        horizon = need
    if horizon < need:
        raise ValueError(f"horizon {horizon} < |E| + 2 = {need}")
    x = as_config(g, x)
    states = [x]
    seen = {x.tobytes(): 0}
    for t in range(1, horizon + 1):
        nxt = majority_step(g, states[-1])
        states.append(nxt)
        if np.array_equal(nxt, states[t - 1]):
            return Orbit(states, t - 1, 1)
        if t >= 2 and np.array_equal(nxt, states[t - 2]):
            return Orbit(states, t - 2, 2)
        key = nxt.tobytes()
        if key in seen:
            j = seen[key]
            raise PeriodViolation(f"state at t={t} repeats t={j}: period {t - j} > 2")
        seen[key] = t
    raise PeriodViolation(f"no attractor within {horizon} steps (|E| = {g.m})")


def state_at(g: Graph, x, T: int, orb: Orbit | None = None) -> np.ndarray:
    """``x^T`` without iterating ``T`` times: past the transient the attractor is
    indexed by ``(T - transient) mod period``."""
    if T < 0:
        raise ValueError("T must be non-negative")
    if orb is None:
        orb = orbit(g, x)
    return orb.state(T)


@dataclass
class ChangeLog:
    """Two-step changes of every node along an orbit.

    ``entries[u]`` lists ``(s, state)`` for each time ``s >= 2`` with
    ``x^s_u != x^{s-2}_u`` (equivalently ``c_u^{s-1} = 1``), where ``state`` is
    the new value ``x^s_u``.  Entries of one parity class alternate in state.
    """

    entries: list
    transient: int
    period: int

    def count(self, u: int) -> int:
        return len(self.entries[u])

    def counts(self) -> np.ndarray:
        return np.array([len(e) for e in self.entries], dtype=np.int64)

    def parity(self, u: int, p: int) -> list:
        return [(s, q) for s, q in self.entries[u] if s % 2 == p]

    def c(self, u: int, t: int) -> int:
        """The two-step change indicator ``|x^{t+1}_u - x^{t-1}_u|``."""
        return int(any(s == t + 1 for s, _ in self.entries[u]))


def two_step_changes(g: Graph, x, orb: Orbit | None = None) -> ChangeLog:
    if orb is None:
        orb = orbit(g, x)
    n = g.n
    entries = [[] for _ in range(n)]
    last = orb.transient + orb.period
    for s in range(2, last + 1):
        cur, prev2 = orb.state(s), orb.state(s - 2)
        for u in np.flatnonzero(cur != prev2):
            entries[u].append((s, int(cur[u])))
    return ChangeLog(entries, orb.transient, orb.period)


def change_matrix(orb: Orbit) -> np.ndarray:
    """``C[t-1, u] = c_u^t`` for ``t = 1..transient+1`` (zero afterwards)."""
    T = orb.transient
    rows = [orb.state(t + 1) != orb.state(t - 1) for t in range(1, T + 2)]
    return np.array(rows, dtype=np.uint8)


def run_until_fixed_point(g: Graph, x, max_steps: int) -> tuple[np.ndarray, int]:
    """Step until ``x^{t+1} = x^t``; returns the fixed point and ``t``.

    Raises :class:`DynamicsError` if no fixed point is reached in
    ``max_steps`` steps.
    """
    cur = as_config(g, x)
    for t in range(max_steps + 1):
        nxt = majority_step(g, cur)
        if np.array_equal(nxt, cur):
            return cur, t
        cur = nxt
    raise DynamicsError(f"no fixed point within {max_steps} steps")
