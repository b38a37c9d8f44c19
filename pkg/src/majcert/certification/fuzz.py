"""Adversarial soundness fuzzing.

Every strategy builds a full certificate assignment for a NO instance and the
verifier is run on it; a global accept is a soundness violation and is kept
with everything needed to replay it.  Strategies range from random garbage
to forgeries that are consistent everywhere except at one node.

Change-list forgeries are produced in trajectory space: a per-node bit
sequence over ``0..N^2`` is edited (or re-simulated with some node states
forced) and then encoded with :func:`cert_from_sequence`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ..dynamics import as_config, format_config, majority_step, orbit
from .. import graph as gr
from ..graph import Graph, format_graph
from . import composite, count_ones, election_pred
from .count_ones import TreeCert, bfs_tree, tree_certs
from .election_pred import ChangeCert, cert_from_sequence


@dataclass
class PredInstance:
    g: Graph
    x: np.ndarray
    y: np.ndarray
    T: int
    N: int

    def is_yes(self) -> bool:
        return bool(np.array_equal(orbit(self.g, self.x).state(self.T), self.y))


@dataclass
class CountOnesInstance:
    g: Graph
    z: np.ndarray
    k: int

    def is_yes(self) -> bool:
        return int(np.sum(self.z)) == self.k


@dataclass
class PredictionInstance:
    g: Graph
    x: np.ndarray
    T: int
    N: int

    def is_yes(self) -> bool:
        return 2 * int(orbit(self.g, self.x).state(self.T).sum()) > self.g.n


@dataclass
class Violation:
    protocol: str
    strategy: str
    trial: int
    reproducer: dict


@dataclass
class FuzzReport:
    protocol: str
    trials: int = 0
    accepts: int = 0
    per_strategy: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.accepts == 0

    def merge(self, other: "FuzzReport") -> None:
        self.trials += other.trials
        self.accepts += other.accepts
        for k, (t, a) in other.per_strategy.items():
            t0, a0 = self.per_strategy.get(k, (0, 0))
            self.per_strategy[k] = (t0 + t, a0 + a)
        self.violations += other.violations

    def summary(self) -> str:
        parts = ", ".join(f"{k}:{a}/{t}" for k, (t, a) in sorted(self.per_strategy.items()))
        return f"{self.protocol}: {self.accepts} global accepts in {self.trials} trials [{parts}]"


# --------------------------------------------------------------------------
# trajectory tools


def true_trajectory(g: Graph, x, H: int) -> np.ndarray:
    orb = orbit(g, x)
    return np.array([orb.state(t) for t in range(H + 1)], dtype=np.uint8)


def certs_from_trajectory(traj: np.ndarray) -> list[ChangeCert]:
    return [cert_from_sequence(traj[:, v].tolist()) for v in range(traj.shape[1])]


def clamp_time(T: int, H: int) -> int:
    """Latest time <= H with the parity of T (or T itself)."""
    if T <= H:
        return T
    return H if (H - T) % 2 == 0 else H - 1


def forced_trajectory(g: Graph, x, H: int, pins: dict, tails: dict | None = None) -> np.ndarray:
    """Majority dynamics where ``pins[(v, t)]`` and ``tails[v] = (t0, q)``
    (every ``t >= t0`` of ``t0``'s parity) override node states."""
    tails = tails or {}
    cur = as_config(g, x).copy()
    for (v, t), q in pins.items():
        if t == 0:
            cur[v] = q
    by_time: dict = {}
    for (v, t), q in pins.items():
        by_time.setdefault(t, []).append((v, q))
    # past the last pin and tail start the update depends only on the state
    # and the parity of t, so a repeat at distance 2 repeats forever
    quiet = max([0, *by_time, *(t0 for t0, _ in tails.values())])
    rows = [cur.copy()]
    for t in range(1, H + 1):
        if t > quiet + 2 and np.array_equal(rows[-1], rows[-3]):
            rows.append(rows[-2])
            continue
        cur = majority_step(g, cur)
        for v, q in by_time.get(t, ()):
            cur[v] = q
        for v, (t0, q) in tails.items():
            if t >= t0 and (t - t0) % 2 == 0:
                cur[v] = q
        rows.append(cur.copy())
    return np.array(rows, dtype=np.uint8)


def _support(g: Graph, u: int) -> list[int]:
    s = list(g.adjacency[u])
    if g.degree(u) % 2 == 0:
        s.append(u)
    return s


def cascade_pins(g: Graph, targets: dict, depth: int) -> dict:
    """Pin ``targets[(v, t)]`` and, going back ``depth`` steps, pin every
    node feeding a pinned node to the pinned value so its majority agrees."""
    pins = dict(targets)
    frontier = dict(targets)
    for _ in range(depth):
        nxt = {}
        for (u, t), q in frontier.items():
            if t == 0:
                continue
            for w in _support(g, u):
                key = (w, t - 1)
                if key not in pins and key not in nxt:
                    nxt[key] = q
        pins.update(nxt)
        frontier = nxt
        if not frontier:
            break
    return pins


def _random_sticky(rng, H: int, n: int, p: float = 0.1) -> np.ndarray:
    traj = np.empty((H + 1, n), dtype=np.uint8)
    traj[:2] = rng.integers(0, 2, size=(min(2, H + 1), n))
    for t in range(2, H + 1):
        flip = rng.random(n) < p
        traj[t] = traj[t - 2] ^ flip
    return traj


# --------------------------------------------------------------------------
# change-list forgeries shared by ELECTION-PRED and the composite protocol


class _PredForge:
    def __init__(self, g: Graph, x, T: int, N: int, target):
        self.g, self.T, self.N = g, T, N
        self.x = as_config(g, x)
        self.H = N * N
        self.Tc = clamp_time(T, self.H)
        self.target = np.asarray(target, dtype=np.uint8)
        self.traj = true_trajectory(g, self.x, self.H)
        self.wrong = [int(v) for v in np.flatnonzero(self.traj[self.Tc] != self.target)]

    def honest(self, rng):
        return certs_from_trajectory(self.traj)

    def random(self, rng):
        return certs_from_trajectory(_random_sticky(rng, self.H, self.g.n))

    def _pick(self, rng):
        return int(rng.choice(self.wrong)) if self.wrong and rng.random() < 0.7 else int(rng.integers(self.g.n))

    def blip(self, rng, traj=None):
        traj = (self.traj if traj is None else traj).copy()
        v = self._pick(rng)
        t = int(rng.integers(0, self.H + 1))
        traj[t, v] ^= 1
        return certs_from_trajectory(traj)

    def tail_flip(self, rng, traj=None):
        traj = (self.traj if traj is None else traj).copy()
        v = self._pick(rng)
        t0 = int(rng.integers(0, self.H + 1))
        traj[t0::2, v] ^= 1
        return certs_from_trajectory(traj)

    def _patched(self):
        traj = self.traj.copy()
        for v in self.wrong:
            traj[self.Tc :: 2, v] = self.target[v]
        return traj

    def target_patch(self, rng):
        return certs_from_trajectory(self._patched())

    def forced(self, rng):
        tails = {v: (self.Tc, int(self.target[v])) for v in self.wrong}
        return certs_from_trajectory(forced_trajectory(self.g, self.x, self.H, {}, tails))

    def cascade(self, rng):
        targets = {(v, self.Tc): int(self.target[v]) for v in self.wrong}
        depth = int(rng.integers(1, self.Tc + 1))
        pins = cascade_pins(self.g, targets, depth)
        tails = {v: (self.Tc, int(self.target[v])) for v in self.wrong}
        return certs_from_trajectory(forced_trajectory(self.g, self.x, self.H, pins, tails))

    def time_shift(self, rng):
        certs = self.target_patch(rng) if rng.random() < 0.5 else self.honest(rng)
        for _ in range(20):
            v = int(rng.integers(self.g.n))
            c = certs[v]
            which = "even" if rng.random() < 0.5 else "odd"
            lst = list(getattr(c, which))
            if len(lst) < 2:
                continue
            i = int(rng.integers(1, len(lst)))
            q, t = lst[i]
            nt = t + (2 if rng.random() < 0.5 else -2)
            lo = lst[i - 1][1]
            hi = lst[i + 1][1] if i + 1 < len(lst) else self.H + 1
            if lo < nt < hi:
                lst[i] = (q, nt)
                certs[v] = replace(c, **{which: tuple(lst)})
                return certs
        return self.blip(rng)

    def swap(self, rng):
        certs = self.target_patch(rng)
        if self.g.n > 1:
            a, b = rng.choice(self.g.n, size=2, replace=False)
            certs[a], certs[b] = certs[b], certs[a]
        return certs

    def multi(self, rng):
        traj = self._patched()
        for _ in range(int(rng.integers(2, 5))):
            v = int(rng.integers(self.g.n))
            t = int(rng.integers(0, self.H + 1))
            if rng.random() < 0.5:
                traj[t, v] ^= 1
            else:
                traj[t::2, v] ^= 1
        return certs_from_trajectory(traj)


PRED_STRATEGIES = (
    "random", "honest", "blip", "tail_flip", "time_shift",
    "target_patch", "forced", "cascade", "swap", "multi",
)


# --------------------------------------------------------------------------
# Count-Ones forgeries


class _CountForge:
    def __init__(self, g: Graph, z, k: int):
        self.g = g
        self.z = np.asarray(z, dtype=np.int64).ravel()
        self.k = k
        self.parent, self.depth = bfs_tree(g)
        self.base = tree_certs(g, self.z, self.parent, self.depth)

    def _root_patch(self, certs):
        return [replace(c, count=self.k) if c.parent == self.g.ids[v] else c for v, c in enumerate(certs)]

    def random(self, rng):
        ids = list(self.g.ids)
        n = self.g.n
        out = []
        root = int(rng.choice(ids))
        for v in range(n):
            nbr = self.g.adjacency[v]
            par = self.g.ids[int(rng.choice(nbr))] if nbr and rng.random() < 0.8 else int(rng.choice(ids))
            out.append(TreeCert(root if rng.random() < 0.9 else int(rng.choice(ids)), par,
                                int(rng.integers(0, n)), int(rng.integers(0, n + 2))))
        return out

    def honest(self, rng):
        return list(self.base)

    def root_patch(self, rng):
        return self._root_patch(self.base)

    def path_patch(self, rng, certs=None, parent=None):
        certs = list(self.base if certs is None else certs)
        parent = self.parent if parent is None else parent
        delta = self.k - int(self.z.sum())
        v = int(rng.integers(self.g.n))
        seen = set()
        while v not in seen:
            seen.add(v)
            c = certs[v]
            certs[v] = replace(c, count=max(0, c.count + delta))
            if parent[v] == v:
                break
            v = parent[v]
        return certs

    def fake_input(self, rng):
        delta = self.k - int(self.z.sum())
        pool = np.flatnonzero(self.z == (0 if delta > 0 else 1))
        if not 0 <= self.k <= self.g.n or len(pool) < abs(delta):
            return self.path_patch(rng)
        z2 = self.z.copy()
        z2[rng.choice(pool, size=abs(delta), replace=False)] ^= 1
        return tree_certs(self.g, z2, self.parent, self.depth)

    def other_root(self, rng):
        r = int(rng.integers(self.g.n))
        parent, depth = bfs_tree(self.g, r)
        return self._root_patch(tree_certs(self.g, self.z, parent, depth))

    def parent_rewire(self, rng):
        parent, depth = list(self.parent), list(self.depth)
        cands = [v for v in range(self.g.n) if parent[v] != v and len(self.g.adjacency[v]) > 1]
        if cands:
            v = int(rng.choice(cands))
            u = int(rng.choice([w for w in self.g.adjacency[v] if w != parent[v]]))
            parent[v] = u
            depth[v] = depth[u] + 1
        certs = tree_certs(self.g, self.z, parent, depth) if self._acyclic(parent) else list(self.base)
        return self.path_patch(rng, certs, parent)

    @staticmethod
    def _acyclic(parent) -> bool:
        for v in range(len(parent)):
            seen = set()
            while parent[v] != v:
                if v in seen:
                    return False
                seen.add(v)
                v = parent[v]
        return True

    def distance_shift(self, rng):
        certs = self._root_patch(self.base)
        v = int(rng.integers(self.g.n))
        c = certs[v]
        certs[v] = replace(c, distance=max(0, c.distance + (1 if rng.random() < 0.5 else -1)))
        return certs

    def split_roots(self, rng):
        if self.g.n < 2:
            return self.root_patch(rng)
        r1, r2 = (int(a) for a in rng.choice(self.g.n, size=2, replace=False))
        d1, d2 = self.g.distances_from(r1), self.g.distances_from(r2)
        owner = [r1 if d1[v] <= d2[v] else r2 for v in range(self.g.n)]
        out = []
        for v in range(self.g.n):
            r = owner[v]
            d = d1 if r == r1 else d2
            if v == r:
                par = v
            else:
                ups = [u for u in self.g.adjacency[v] if d[u] == d[v] - 1]
                par = ups[0]
            out.append(TreeCert(self.g.ids[r], self.g.ids[par], int(d[v]),
                                self.k if v == r else int(self.z[v])))
        return out

    def multi(self, rng):
        certs = self._root_patch(self.base)
        for _ in range(int(rng.integers(1, 4))):
            v = int(rng.integers(self.g.n))
            c = certs[v]
            f = rng.integers(4)
            if f == 0:
                c = replace(c, count=max(0, c.count + int(rng.choice([-1, 1]))))
            elif f == 1:
                c = replace(c, distance=max(0, c.distance + int(rng.choice([-1, 1]))))
            elif f == 2 and self.g.adjacency[v]:
                c = replace(c, parent=self.g.ids[int(rng.choice(self.g.adjacency[v]))])
            else:
                c = replace(c, root=int(rng.choice(self.g.ids)))
            certs[v] = c
        return certs


COUNT_STRATEGIES = (
    "random", "honest", "root_patch", "path_patch", "fake_input",
    "other_root", "parent_rewire", "distance_shift", "split_roots", "multi",
)


# --------------------------------------------------------------------------
# composite forgeries


class _CompositeForge:
    def __init__(self, g: Graph, x, T: int, N: int):
        self.g, self.T, self.N = g, T, N
        self.x = as_config(g, x)
        self.y = orbit(g, self.x).state(T)
        self.p = int(self.y.sum())
        self.parent, self.depth = bfs_tree(g)
        self.ones = np.ones(g.n, dtype=np.int64)
        self._true = _PredForge(g, self.x, T, N, self.y)

    def _tree(self, z, claim):
        certs = tree_certs(self.g, z, self.parent, self.depth)
        return [replace(c, count=claim) if c.parent == self.g.ids[v] else c for v, c in enumerate(certs)]

    def _bundle(self, y, pred, n_claim, p_claim, honest_counts=True):
        all_c = self._tree(self.ones, n_claim)
        y_c = self._tree(np.asarray(y, dtype=np.int64), p_claim)
        return composite.assemble(y, pred, all_c, y_c, n_claim, p_claim)

    def _fake_y(self, rng):
        y2 = self.y.copy()
        zeros = np.flatnonzero(y2 == 0)
        need = self.g.n // 2 + 1 - int(y2.sum())
        y2[rng.choice(zeros, size=max(0, need), replace=False)] = 1
        return y2

    def random(self, rng):
        n = self.g.n
        y2 = rng.integers(0, 2, size=n).astype(np.uint8)
        pred = certs_from_trajectory(_random_sticky(rng, self.N * self.N, n))
        n_claim = int(rng.integers(1, n + 2))
        p_claim = int(rng.integers(n_claim // 2 + 1, n_claim + 1))
        return self._bundle(y2, pred, n_claim, p_claim)

    def honest(self, rng):
        pred = self._true.honest(rng)
        return self._bundle(self.y, pred, self.g.n, self.p)

    def inflate_p(self, rng):
        pred = self._true.honest(rng)
        return self._bundle(self.y, pred, self.g.n, self.g.n // 2 + 1)

    def deflate_n(self, rng):
        pred = self._true.honest(rng)
        p_claim = max(self.p, 1)
        return self._bundle(self.y, pred, 2 * p_claim - 1, p_claim)

    def fake_y_plain(self, rng):
        y2 = self._fake_y(rng)
        pred = _PredForge(self.g, self.x, self.T, self.N, y2).honest(rng)
        return self._bundle(y2, pred, self.g.n, int(y2.sum()))

    def fake_y_forced(self, rng):
        y2 = self._fake_y(rng)
        pred = _PredForge(self.g, self.x, self.T, self.N, y2).forced(rng)
        return self._bundle(y2, pred, self.g.n, int(y2.sum()))

    def fake_y_cascade(self, rng):
        y2 = self._fake_y(rng)
        pred = _PredForge(self.g, self.x, self.T, self.N, y2).cascade(rng)
        return self._bundle(y2, pred, self.g.n, int(y2.sum()))

    def inconsistent_np(self, rng):
        y2 = self._fake_y(rng)
        pred = _PredForge(self.g, self.x, self.T, self.N, y2).target_patch(rng)
        good = self._bundle(y2, pred, self.g.n, int(y2.sum()))
        alt = self._bundle(self.y, pred, self.g.n, max(self.p, self.g.n // 2 + 1))
        r = int(rng.integers(self.g.n))
        dist = self.g.distances_from(r)
        cut = int(rng.integers(0, int(dist.max()) + 1))
        return [alt[v] if dist[v] <= cut else good[v] for v in range(self.g.n)]

    def sub_swap(self, rng):
        certs = self.fake_y_forced(rng)
        if self.g.n > 1:
            a, b = (int(v) for v in rng.choice(self.g.n, size=2, replace=False))
            ca, cb = certs[a], certs[b]
            certs[a] = replace(ca, pred=cb.pred)
            certs[b] = replace(cb, pred=ca.pred)
        return certs

    def multi(self, rng):
        certs = self.fake_y_forced(rng)
        for _ in range(int(rng.integers(1, 4))):
            v = int(rng.integers(self.g.n))
            c = certs[v]
            f = rng.integers(3)
            if f == 0:
                c = replace(c, y=1 - c.y)
            elif f == 1:
                c = replace(c, ones_y=replace(c.ones_y, count=max(0, c.ones_y.count + int(rng.choice([-1, 1])))))
            else:
                c = replace(c, ones_all=replace(c.ones_all, count=max(0, c.ones_all.count - 1)))
            certs[v] = c
        return certs


PREDICTION_STRATEGIES = (
    "random", "honest", "inflate_p", "deflate_n", "fake_y_plain",
    "fake_y_forced", "fake_y_cascade", "inconsistent_np", "sub_swap", "multi",
)


# --------------------------------------------------------------------------
# driver


def _reproducer(inst, certs) -> dict:
    doc = {"graph": format_graph(inst.g), "certs": [c.to_json() for c in certs]}
    for k in ("x", "y", "z"):
        if hasattr(inst, k):
            doc[k] = format_config(getattr(inst, k))
    for k in ("T", "N", "k"):
        if hasattr(inst, k):
            doc[k] = getattr(inst, k)
    return doc


def _setup(instance, protocol: str):
    if protocol == "pred":
        forge = _PredForge(instance.g, instance.x, instance.T, instance.N, instance.y)

        def check(certs):
            return election_pred.verify_election_pred(
                instance.g, instance.x, instance.y, instance.T, instance.N, certs, stop_at_first_reject=True
            ).accepted

        return forge, PRED_STRATEGIES, check
    if protocol == "count-ones":
        forge = _CountForge(instance.g, instance.z, instance.k)

        def check(certs):
            return count_ones.verify_count_ones(
                instance.g, instance.z, instance.k, certs, stop_at_first_reject=True
            ).accepted

        return forge, COUNT_STRATEGIES, check
    if protocol == "prediction":
        forge = _CompositeForge(instance.g, instance.x, instance.T, instance.N)

        def check(certs):
            return composite.verify_election_prediction(
                instance.g, instance.x, instance.T, instance.N, certs, stop_at_first_reject=True
            ).accepted

        return forge, PREDICTION_STRATEGIES, check
    raise ValueError(f"unknown protocol {protocol!r}")


def fuzz_soundness(
    instance,
    protocol: str,
    trials: int,
    seed: int | np.random.SeedSequence,
    strategies=None,
    require_no: bool = True,
) -> FuzzReport:
    """Run ``trials`` forgeries per strategy against a NO instance.

    Any globally accepted assignment is recorded as a :class:`Violation`.
    """
    if require_no and instance.is_yes():
        raise ValueError("soundness fuzzing needs a NO instance")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.PCG64(ss))
    forge, names, check = _setup(instance, protocol)
    report = FuzzReport(protocol)
    for name in strategies or names:
        make: Callable = getattr(forge, name)
        acc = 0
        for trial in range(trials):
            certs = make(rng)
            if check(certs):
                acc += 1
                report.violations.append(Violation(protocol, name, trial, _reproducer(instance, certs)))
        report.per_strategy[name] = (trials, acc)
        report.trials += trials
        report.accepts += acc
    return report


def mutation_sanity(instance, protocol: str) -> bool:
    """Honest certificates on a YES instance are accepted everywhere."""
    if protocol == "pred":
        certs = election_pred.prove_election_pred(instance.g, instance.x, instance.y, instance.T, instance.N)
        return election_pred.verify_election_pred(instance.g, instance.x, instance.y, instance.T, instance.N, certs).accepted
    if protocol == "count-ones":
        certs = count_ones.prove_count_ones(instance.g, instance.z, instance.k)
        return count_ones.verify_count_ones(instance.g, instance.z, instance.k, certs).accepted
    certs = composite.prove_election_prediction(instance.g, instance.x, instance.T, instance.N)
    return composite.verify_election_prediction(instance.g, instance.x, instance.T, instance.N, certs).accepted


# --------------------------------------------------------------------------
# random instances


def random_small_graph(rng: np.random.Generator, lo: int = 4, hi: int = 12) -> Graph:
    """A path, cycle, cubic, degree-4 or ladder graph on ``lo..hi`` nodes."""
    n = int(rng.integers(lo, hi + 1))
    kind = int(rng.integers(5))
    if kind == 0:
        return gr.cycle_graph(max(n, 3))
    if kind == 1:
        return gr.path_graph(n)
    if kind == 2:
        return gr.random_cubic(n + n % 2, rng)
    if kind == 3:
        return gr.random_bounded_degree(n, 4, rng)
    return gr.grid_graph(2, max(2, n // 2))


def random_no_instances(protocol: str, count: int, rng: np.random.Generator, lo: int = 4, hi: int = 12) -> list:
    """NO instances: a target wrong at 1-3 nodes, a count off by 1 or 2, or a
    configuration without a final majority of ones."""
    out = []
    while len(out) < count:
        g = random_small_graph(rng, lo, hi)
        x = rng.integers(0, 2, g.n).astype(np.uint8)
        T = int(rng.integers(1, 2 * g.n + 3))
        if protocol == "pred":
            y = orbit(g, x).state(T).copy()
            flips = rng.choice(g.n, size=int(rng.integers(1, min(3, g.n) + 1)), replace=False)
            y[flips] ^= 1
            out.append(PredInstance(g, x, y, T, g.n))
        elif protocol == "count-ones":
            s = int(x.sum())
            k = s + int(rng.choice([-2, -1, 1, 2]))
            out.append(CountOnesInstance(g, x, k if k >= 0 else s + 1))
        elif protocol == "prediction":
            inst = PredictionInstance(g, x, T, g.n)
            if not inst.is_yes():
                out.append(inst)
        else:
            raise ValueError(f"unknown protocol {protocol!r}")
    return out


def random_yes_instances(protocol: str, count: int, rng: np.random.Generator, lo: int = 4, hi: int = 12) -> list:
    out = []
    while len(out) < count:
        g = random_small_graph(rng, lo, hi)
        if protocol == "prediction":
            # bias towards ones so that roughly half the draws qualify
            x = (rng.random(g.n) < 0.65).astype(np.uint8)
        else:
            x = rng.integers(0, 2, g.n).astype(np.uint8)
        T = int(rng.integers(1, 2 * g.n + 3))
        N = g.n + int(rng.integers(0, 3))
        if protocol == "pred":
            out.append(PredInstance(g, x, orbit(g, x).state(T), T, N))
        elif protocol == "count-ones":
            out.append(CountOnesInstance(g, x, int(x.sum())))
        elif protocol == "prediction":
            inst = PredictionInstance(g, x, T, N)
            if inst.is_yes():
                out.append(inst)
        else:
            raise ValueError(f"unknown protocol {protocol!r}")
    return out
