"""Timer, sequencer and amplifier gadgets, the disjointness construction, and
the special configurations on paths and cycles.

A gadget is a graph with an initial configuration and a few *ports*, the
only nodes allowed to have neighbours outside the gadget.  Each port has a
capacity (how many outside neighbours it may have).  The behaviour of a
gadget must not depend on what those outside neighbours do; the driver
harness below checks that by attaching leaf nodes to the ports and
overriding their states from scripts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dynamics import majority_step, step_batch
from .graph import Graph, build_graph, disjoint_union

ZERO_TO_ONE = "zero_to_one"
ONE_TO_ZERO = "one_to_zero"

# Amplifier constants: alpha = 4/7 * (1 - EPSILON).  With EPSILON = 1/14 the
# untriggered share of zeros, (8s + 1) / (14s + 4), reaches alpha from s = 2.
EPSILON = Fraction(1, 14)
ALPHA = Fraction(4, 7) * (1 - EPSILON)
STRIPS_MIN = 2
DISJ_C = 1


class GadgetError(ValueError):
    pass


@dataclass
class GadgetInstance:
    g: Graph
    init: np.ndarray
    distinguished: dict  # name -> node
    external_ports: list  # [(node, capacity)]
    kind: str = ""
    params: dict = field(default_factory=dict)

    def manifest(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "n": self.g.n,
            "m": self.g.m,
            "distinguished": dict(sorted(self.distinguished.items())),
            "ports": [{"node": v, "capacity": c} for v, c in self.external_ports],
        }


class _Builder:
    def __init__(self):
        self.states: list[int] = []
        self.edges: list[tuple[int, int]] = []
        self.names: dict[str, int] = {}

    def node(self, state: int, name: str | None = None) -> int:
        self.states.append(int(state))
        v = len(self.states) - 1
        if name is not None:
            if name in self.names:
                raise GadgetError(f"duplicate name {name}")
            self.names[name] = v
        return v

    def triangle(self, state: int) -> tuple[int, int, int]:
        a, b, c = (self.node(state) for _ in range(3))
        self.edges += [(a, b), (b, c), (a, c)]
        return a, b, c

    def edge(self, u: int, v: int) -> None:
        self.edges.append((u, v))

    def finish(self, name: str) -> tuple[Graph, np.ndarray]:
        g = build_graph(len(self.states), self.edges, name=name)
        return g, np.array(self.states, dtype=np.uint8)


# --------------------------------------------------------------------------
# timer


def _timer_into(b: _Builder, n: int, kind: str, prefix: str) -> list[tuple[int, int]]:
    """Add a timer to ``b``; returns the distinguished pairs in order."""
    if kind == ZERO_TO_ONE:
        init, trig = 0, 1
    elif kind == ONE_TO_ZERO:
        init, trig = 1, 0
    else:
        raise GadgetError(f"unknown timer kind {kind!r}")
    anchor = b.triangle(trig)
    pairs = []
    for i in range(1, n + 1):
        pair = (b.node(init, f"{prefix}_{i}^1"), b.node(init, f"{prefix}_{i}^2"))
        for v in pair:
            base1, base2, _ = b.triangle(trig)
            b.edge(v, base1)
            b.edge(v, base2)
        pairs.append(pair)
    terminal = b.triangle(init)
    prev = anchor[:2]
    for pair in pairs:
        for v in pair:
            for u in prev:
                b.edge(u, v)
        prev = pair
    for v in pairs[-1]:
        b.edge(v, terminal[0])
        b.edge(v, terminal[1])
    return pairs


def build_timer(n: int, kind: str = ZERO_TO_ONE) -> GadgetInstance:
    """Timer of length ``n``: pair ``i`` switches to the triggering state at
    time ``i`` and keeps it.  Distinguished names are ``v_i^j`` for the
    zero-to-one kind and ``w_i^j`` for one-to-zero."""
    if n < 1:
        raise GadgetError("timer length must be >= 1")
    b = _Builder()
    prefix = "v" if kind == ZERO_TO_ONE else "w"
    pairs = _timer_into(b, n, kind, prefix)
    g, x = b.finish(f"timer-{kind}-{n}")
    ports = [(v, 1) for pair in pairs for v in pair]
    return GadgetInstance(g, x, dict(b.names), ports, "timer", {"n": n, "kind": kind})


def timer_expected(k: int, t: int, kind: str = ZERO_TO_ONE) -> int:
    on = int(t >= k)
    return on if kind == ZERO_TO_ONE else 1 - on


# --------------------------------------------------------------------------
# sequencer


def switch_positions(u: Sequence[int]) -> tuple[list[int], list[int]]:
    """1-based switch-up and switch-down positions ``j`` (``u_j != u_{j+1}``)."""
    ups = [j + 1 for j in range(len(u) - 1) if u[j] == 0 and u[j + 1] == 1]
    downs = [j + 1 for j in range(len(u) - 1) if u[j] == 1 and u[j + 1] == 0]
    return ups, downs


def build_sequencer(u: Sequence[int]) -> GadgetInstance:
    """Node ``v`` emits ``u_1, u_1, u_2, ..., u_n, u_n, ...``.

    For ``u_1 = 1`` the construction for the complement is built and every
    state is flipped.
    """
    u = [int(c) for c in u]
    if not u:
        raise GadgetError("sequence must be non-empty")
    if any(c not in (0, 1) for c in u):
        raise GadgetError("sequence must be binary")
    flip = u[0] == 1
    w = [1 - c for c in u] if flip else u
    ups, downs = switch_positions(w)

    b = _Builder()
    v = b.node(0, "v")
    if ups:
        pairs = _timer_into(b, max(ups), ZERO_TO_ONE, "v")
        for s in ups:
            for a in pairs[s - 1]:
                b.edge(v, a)
    if downs:
        pairs = _timer_into(b, max(downs), ONE_TO_ZERO, "w")
        for t in downs:
            for a in pairs[t - 1]:
                b.edge(v, a)
    if len(ups) == len(downs):
        tri = b.triangle(0)
        b.edge(v, tri[0])
        b.edge(v, tri[1])
    g, x = b.finish("sequencer-" + "".join(map(str, u)))
    if flip:
        x = 1 - x
    return GadgetInstance(g, x, dict(b.names), [(v, 1)], "sequencer", {"u": "".join(map(str, u))})


def sequencer_expected(u: Sequence[int], t: int) -> int:
    if t == 0:
        return int(u[0])
    return int(u[min(t, len(u)) - 1])


# --------------------------------------------------------------------------
# amplifier


def build_amplifier(strips: int) -> GadgetInstance:
    """``strips`` copies of a 14-node strip hanging off node ``v``.

    Untouched, the gadget is a fixed point with a zero majority of at least
    ``ALPHA``; once ``v`` sees two outside ones every rail turns to 1 and
    the share of zeros drops to ``6s / (14s + 4)``.
    """
    if strips < STRIPS_MIN:
        raise GadgetError(f"amplifier needs at least {STRIPS_MIN} strips")
    b = _Builder()
    v = b.node(0, "v")
    pendant = b.triangle(1)
    b.edge(v, pendant[0])
    prev = (v, v)
    for i in range(1, strips + 1):
        rails = (b.node(0, f"rail_{i}^1"), b.node(0, f"rail_{i}^2"))
        b.edge(*rails)
        for j, r in enumerate(rails):
            if prev[0] == v:
                if j == 0:
                    b.edge(v, rails[0])
                    b.edge(v, rails[1])
            else:
                b.edge(prev[j], r)
            ones = b.triangle(1)
            zeros = b.triangle(0)
            b.edge(r, ones[0])
            b.edge(r, ones[1])
            b.edge(ones[2], zeros[2])
        prev = rails
    g, x = b.finish(f"amplifier-{strips}")
    return GadgetInstance(g, x, dict(b.names), [(v, 2)], "amplifier", {"strips": strips})


def zero_share(x) -> Fraction:
    x = np.asarray(x)
    return Fraction(int((x == 0).sum()), len(x))


# --------------------------------------------------------------------------
# disjointness


@dataclass
class DisjInstance:
    a: tuple
    b: tuple
    h: Graph
    x: np.ndarray
    T: int
    strips: int
    nodes: dict  # "v_A", "v_B", "v" -> node in h
    sizes: dict  # "A", "B", "M" -> node counts

    def expected(self) -> int:
        return int(any(p == 1 and q == 1 for p, q in zip(self.a, self.b)))

    def intersections(self) -> list[int]:
        """0-based coordinates where both inputs are 1."""
        return [i for i, (p, q) in enumerate(zip(self.a, self.b)) if p == 1 and q == 1]


def amplifier_strips_for(n_other: int) -> int:
    """Least strip count with ``alpha * M > (1 - alpha) * M + n_other``."""
    s = STRIPS_MIN
    while not ALPHA * (14 * s + 4) > (1 - ALPHA) * (14 * s + 4) + n_other:
        s += 1
    return s


def build_disj_instance(a: Sequence[int], b: Sequence[int]) -> DisjInstance:
    a = tuple(int(c) for c in a)
    b = tuple(int(c) for c in b)
    if len(a) != len(b) or not a:
        raise GadgetError("inputs must be non-empty and of equal length")
    seq_a, seq_b = build_sequencer(a), build_sequencer(b)
    strips = amplifier_strips_for(seq_a.g.n + seq_b.g.n)
    amp = build_amplifier(strips)
    oa, ob, oamp = 0, seq_a.g.n, seq_a.g.n + seq_b.g.n
    va = oa + seq_a.distinguished["v"]
    vb = ob + seq_b.distinguished["v"]
    v = oamp + amp.distinguished["v"]
    h, _ = disjoint_union([seq_a.g, seq_b.g, amp.g], [(v, va), (v, vb)], name="disj")
    x = np.concatenate([seq_a.init, seq_b.init, amp.init]).astype(np.uint8)
    return DisjInstance(
        a, b, h, x, DISJ_C * h.n, strips,
        {"v_A": va, "v_B": vb, "v": v},
        {"A": seq_a.g.n, "B": seq_b.g.n, "M": amp.g.n},
    )


@dataclass
class DisjOutcome:
    majority: int  # 1 iff ones hold a strict majority in the final state
    fixed_at: int | None  # first t with x^{t+1} = x^t, if reached by T
    final: np.ndarray


def run_disj(inst: DisjInstance) -> DisjOutcome:
    """Simulate until a fixed point or ``T`` steps."""
    x = inst.x
    for t in range(inst.T + 1):
        nxt = majority_step(inst.h, x)
        if np.array_equal(nxt, x):
            return DisjOutcome(int(2 * int(x.sum()) > inst.h.n), t, x)
        x = nxt
    return DisjOutcome(int(2 * int(x.sum()) > inst.h.n), None, x)


# --------------------------------------------------------------------------
# driver harness


def attach_drivers(inst: GadgetInstance, use: Sequence[int] | None = None) -> tuple[Graph, list[int]]:
    """Gadget plus one leaf per unit of port capacity.

    ``use`` optionally limits how many leaves each port gets.  Returns the
    extended graph and the list of driver nodes (in port order).
    """
    extra, drivers = [], []
    n = inst.g.n
    for i, (port, cap) in enumerate(inst.external_ports):
        k = cap if use is None else min(cap, use[i])
        for _ in range(k):
            extra.append((port, n + len(drivers)))
            drivers.append(n + len(drivers))
    g = build_graph(n + len(drivers), list(inst.g.edges) + extra, name=inst.g.name + "+drivers")
    return g, drivers


def simulate_driven(inst: GadgetInstance, scripts: np.ndarray, use=None) -> np.ndarray:
    """Run the gadget with scripted outside neighbours.

    ``scripts`` has shape ``(batch, steps + 1, drivers)``: entry ``[b, t, j]``
    is driver ``j``'s state at time ``t``.  Returns gadget states of shape
    ``(batch, steps + 1, n)``.
    """
    g, drivers = attach_drivers(inst, use)
    scripts = np.asarray(scripts, dtype=np.uint8)
    B, H1, D = scripts.shape
    if D != len(drivers):
        raise GadgetError(f"scripts drive {D} nodes, gadget has {len(drivers)} driver slots")
    X = np.empty((B, g.n), dtype=np.uint8)
    X[:, : inst.g.n] = inst.init
    X[:, inst.g.n :] = scripts[:, 0]
    out = np.empty((B, H1, inst.g.n), dtype=np.uint8)
    out[:, 0] = X[:, : inst.g.n]
    for t in range(1, H1):
        X = step_batch(g, X)
        X[:, inst.g.n :] = scripts[:, t]
        out[:, t] = X[:, : inst.g.n]
    return out


def random_scripts(rng: np.random.Generator, batch: int, steps: int, drivers: int) -> np.ndarray:
    """Random driver bits; a third of the scripts are constant per driver."""
    S = rng.integers(0, 2, size=(batch, steps + 1, drivers), dtype=np.uint8)
    const = rng.random(batch) < 1 / 3
    S[const] = S[const][:, :1, :]
    return S


# --------------------------------------------------------------------------
# behaviour checks; each returns a list of failure strings


def check_timer(inst: GadgetInstance, traj: np.ndarray) -> list[str]:
    n, kind = inst.params["n"], inst.params["kind"]
    prefix = "v" if kind == ZERO_TO_ONE else "w"
    fails = []
    dist = set(inst.distinguished.values())
    for k in range(1, n + 1):
        want = np.array([timer_expected(k, t, kind) for t in range(traj.shape[1])], dtype=np.uint8)
        for j in (1, 2):
            node = inst.distinguished[f"{prefix}_{k}^{j}"]
            bad = np.flatnonzero((traj[:, :, node] != want).any(axis=1))
            if len(bad):
                fails.append(f"{prefix}_{k}^{j} off schedule in script {int(bad[0])}")
    internal = [v for v in range(inst.g.n) if v not in dist]
    moved = (traj[:, :, internal] != traj[:, :1, internal]).any(axis=(0, 1))
    if moved.any():
        fails.append(f"internal nodes changed: {[internal[i] for i in np.flatnonzero(moved)][:5]}")
    return fails


def check_sequencer(inst: GadgetInstance, traj: np.ndarray) -> list[str]:
    u = [int(c) for c in inst.params["u"]]
    v = inst.distinguished["v"]
    want = np.array([sequencer_expected(u, t) for t in range(traj.shape[1])], dtype=np.uint8)
    bad = np.flatnonzero((traj[:, :, v] != want).any(axis=1))
    if len(bad):
        got = "".join(map(str, traj[bad[0], :, v]))
        return [f"v emits {got}, expected {''.join(map(str, want))}"]
    return []


def trigger_script(batch: int, steps: int, at: int) -> np.ndarray:
    S = np.zeros((batch, steps + 1, 2), dtype=np.uint8)
    S[:, at:, :] = 1
    return S


def check_amplifier(strips: int, trigger_at: int = 5, rng=None, batch: int = 8) -> list[str]:
    """Untriggered: fixed point with enough zeros under drivers showing at most
    one 1.  Triggered: rails all 1 and few zeros within ``3 * strips + 10``
    steps after the trigger."""
    inst = build_amplifier(strips)
    fails = []
    rng = rng if rng is not None else np.random.default_rng(0)
    steps = 3 * strips + 10
    S = rng.integers(0, 2, size=(batch, steps + 1, 1), dtype=np.uint8)
    S = np.concatenate([S, np.zeros_like(S)], axis=2)
    traj = simulate_driven(inst, S)
    if (traj != inst.init).any():
        fails.append("untriggered amplifier moved")
    if zero_share(inst.init) < ALPHA:
        fails.append(f"untriggered zero share {zero_share(inst.init)} < {ALPHA}")
    traj = simulate_driven(inst, trigger_script(1, trigger_at + steps, trigger_at))[0]
    final = traj[-1]
    rails = [v for k, v in inst.distinguished.items() if k.startswith("rail")]
    if not final[rails].all():
        fails.append("rails not all 1 after trigger")
    if zero_share(final) > 1 - ALPHA:
        fails.append(f"triggered zero share {zero_share(final)} > {1 - ALPHA}")
    if not np.array_equal(majority_step(inst.g, final), final) and not np.array_equal(traj[-2], final):
        fails.append("triggered amplifier not settled")
    return fails


# --------------------------------------------------------------------------
# special configurations on paths and cycles


def path_sweep_config(n: int, k: int) -> np.ndarray:
    """Configuration on ``C_n`` with 1s at ``k, k+1`` (1-based, cyclic) followed
    by ``0, 1, 0, 1, ...``; ``n = 4, k = 1`` gives ``1101``."""
    if n < 3:
        raise GadgetError("cycle needs n >= 3")
    if not 1 <= k <= n:
        raise GadgetError("k must lie in 1..n")
    x = np.zeros(n, dtype=np.uint8)
    for j in range(n):
        pos = (k - 1 + j) % n
        x[pos] = 1 if j < 2 else j % 2
    return x


def alternating_config(n: int) -> np.ndarray:
    """``0101...`` on an even cycle."""
    if n < 2 or n % 2:
        raise GadgetError("alternating configuration needs an even n >= 2")
    return (np.arange(n) % 2).astype(np.uint8)
