"""Energy functionals, change statistics and certificate-size scaling runs.

The energy at time ``t`` is

    E^t = sum_{u,v} a_uv |x_u^{t+1} - x_v^t|

over ordered pairs, where ``a_uv = 1`` on edges and on the diagonal of
even-degree nodes.  The centered variant multiplies each term by
``alpha ** min(d(r,u), d(r,v))``.  All arithmetic is exact: the centered
weights are scaled to integers by ``q**D`` for ``alpha = p/q``.

Both functionals are stated in terms of the step drop
``E^t - E^{t-1}``, which involves ``x^{t-1}, x^t, x^{t+1}`` and is bounded by
minus the number (global) or weighted number (centered) of nodes with a
two-step change at ``t``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import graph as gr
from .dynamics import Orbit, as_config, orbit, step_batch, two_step_changes
from .graph import Graph


def _pairs(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Ordered pairs (u, v) with a_uv = 1, diagonal included for even degree."""
    us, vs = [], []
    for u, v in g.edges:
        us += [u, v]
        vs += [v, u]
    for u in range(g.n):
        if g.degree(u) % 2 == 0:
            us.append(u)
            vs.append(u)
    return np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64)


def default_alpha(g: Graph) -> Fraction:
    d = g.max_degree
    if d <= 3:
        return Fraction(1, 2)
    return Fraction(d, d + 2)


@dataclass
class EnergySeries:
    values: list
    kind: str
    transient: int
    period: int
    center: int | None = None
    alpha: Fraction | None = None

    def drops(self) -> list:
        """``values[t] - values[t-1]`` for ``t = 1..len-1``."""
        return [self.values[t] - self.values[t - 1] for t in range(1, len(self.values))]


def _series_length(orb: Orbit) -> int:
    return orb.transient + orb.period + 1


def energy_series(g: Graph, x, orb: Orbit | None = None, length: int | None = None) -> EnergySeries:
    if orb is None:
        orb = orbit(g, x)
    U, V = _pairs(g)
    length = length or _series_length(orb)
    vals = []
    for t in range(length):
        a, b = orb.state(t + 1), orb.state(t)
        vals.append(int(np.abs(a[U].astype(np.int64) - b[V]).sum()))
    return EnergySeries(vals, "global", orb.transient, orb.period)


class CenteredWeights:
    """Integer-scaled edge weights ``q**D * alpha**delta(u,v)`` about ``r``."""

    def __init__(self, g: Graph, r: int, alpha: Fraction):
        alpha = Fraction(alpha)
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie strictly between 0 and 1")
        self.alpha = alpha
        self.r = r
        U, V = _pairs(g)
        dist = g.distances_from(r)
        delta = np.minimum(dist[U], dist[V])
        D = int(dist.max())
        p, q = alpha.numerator, alpha.denominator
        self.scale = q**D
        w = [p**int(k) * q ** (D - int(k)) for k in delta]
        bound = self.scale * (len(U) + 1)
        dtype = np.int64 if bound < 2**62 else object
        self.U, self.V = U, V
        self.w = np.array(w, dtype=dtype)

    def energy_scaled(self, a: np.ndarray, b: np.ndarray):
        diff = np.abs(a[self.U].astype(np.int64) - b[self.V])
        if self.w.dtype == object:
            return sum(int(wi) for wi, di in zip(self.w, diff) if di)
        return int((self.w * diff).sum())


def centered_energy_series(
    g: Graph,
    x,
    r: int,
    alpha: Fraction | None = None,
    orb: Orbit | None = None,
    length: int | None = None,
) -> EnergySeries:
    if alpha is None:
        alpha = default_alpha(g)
    cw = CenteredWeights(g, r, alpha)
    if orb is None:
        orb = orbit(g, x)
    length = length or _series_length(orb)
    vals = [
        Fraction(cw.energy_scaled(orb.state(t + 1), orb.state(t)), cw.scale)
        for t in range(length)
    ]
    return EnergySeries(vals, "centered", orb.transient, orb.period, center=r, alpha=cw.alpha)


# --------------------------------------------------------------------------
# invariant checks


def global_energy_violations(series: EnergySeries, m: int) -> list[str]:
    """Problems with a global series: drop < 1 in the transient, change on the
    attractor, or a value outside ``[0, |E|]``."""
    out = []
    vals = series.values
    for t in range(len(vals) - 1):
        if t < series.transient:
            if vals[t + 1] > vals[t] - 1:
                out.append(f"t={t}: E^{t+1}={vals[t + 1]} not <= E^{t}-1={vals[t] - 1}")
        elif vals[t + 1] != vals[t]:
            out.append(f"t={t}: energy changed on the attractor")
    for t, v in enumerate(vals):
        if not 0 <= v <= m:
            out.append(f"t={t}: E={v} outside [0, {m}]")
    return out


def centered_drop_violations(g: Graph, orb: Orbit, r: int, alpha: Fraction | None = None) -> list[int]:
    """Times ``t >= 1`` with ``E_r^t - E_r^{t-1} > -c_r^t``."""
    if alpha is None:
        alpha = default_alpha(g)
    cw = CenteredWeights(g, r, alpha)
    bad = []
    prev = cw.energy_scaled(orb.state(1), orb.state(0))
    for t in range(1, orb.transient + orb.period + 1):
        cur = cw.energy_scaled(orb.state(t + 1), orb.state(t))
        c = int(orb.state(t + 1)[r] != orb.state(t - 1)[r])
        if cur - prev > -c * cw.scale:
            bad.append(t)
        prev = cur
    return bad


def centered_literal_violations(g: Graph, orb: Orbit, r: int, alpha: Fraction | None = None) -> list[int]:
    """Times ``1 <= t < transient`` with ``E_r^{t+1} - E_r^t > -c_r^t``.

    This pairs the drop over ``x^t .. x^{t+2}`` with the change over
    ``x^{t-1} .. x^{t+1}``; it is not implied by the dynamics and does fail
    on small instances.  Kept so the mismatch stays measurable.
    """
    if alpha is None:
        alpha = default_alpha(g)
    cw = CenteredWeights(g, r, alpha)
    E = [cw.energy_scaled(orb.state(t + 1), orb.state(t)) for t in range(orb.transient + 1)]
    bad = []
    for t in range(1, orb.transient):
        c = int(orb.state(t + 1)[r] != orb.state(t - 1)[r])
        if E[t + 1] - E[t] > -c * cw.scale:
            bad.append(t)
    return bad


def centered_budget(g: Graph, orb: Orbit, r: int, alpha: Fraction | None = None) -> tuple[int, Fraction, Fraction]:
    """``(sum_t c_r^t, E_r^0, E_r^1)``; the first never exceeds the second."""
    if alpha is None:
        alpha = default_alpha(g)
    cw = CenteredWeights(g, r, alpha)
    total = sum(
        int(orb.state(t + 1)[r] != orb.state(t - 1)[r]) for t in range(1, orb.transient + orb.period + 1)
    )
    e0 = Fraction(cw.energy_scaled(orb.state(1), orb.state(0)), cw.scale)
    e1 = Fraction(cw.energy_scaled(orb.state(2), orb.state(1)), cw.scale)
    return total, e0, e1


def global_energy_batch(g: Graph, states: Sequence[np.ndarray]) -> np.ndarray:
    """``E[t, i]`` for a stack of batched states ``states[t]`` of shape ``(B, n)``."""
    U, V = _pairs(g)
    out = np.empty((len(states) - 1, states[0].shape[0]), dtype=np.int64)
    for t in range(len(states) - 1):
        a = states[t + 1][:, U].astype(np.int64)
        b = states[t][:, V]
        out[t] = np.abs(a - b).sum(axis=1)
    return out


def orbit_batch(g: Graph, X: np.ndarray, steps: int) -> list[np.ndarray]:
    states = [np.asarray(X, dtype=np.uint8)]
    for _ in range(steps):
        states.append(step_batch(g, states[-1]))
    return states


# --------------------------------------------------------------------------
# change statistics


@dataclass
class ChangeStats:
    counts: np.ndarray
    family: str
    n: int
    samples: int
    max_transient: int = 0

    @property
    def max_changes(self) -> int:
        return int(self.counts.max()) if len(self.counts) else 0


def change_stats(g: Graph, xs: Iterable, family: str = "") -> ChangeStats:
    """Per-node two-step change counts, maximised over the given configurations."""
    best = np.zeros(g.n, dtype=np.int64)
    k = 0
    max_t = 0
    for x in xs:
        orb = orbit(g, x)
        log = two_step_changes(g, x, orb)
        best = np.maximum(best, log.counts())
        max_t = max(max_t, orb.transient)
        k += 1
    return ChangeStats(best, family or g.name, g.n, k, max_t)


def change_counts_fast(g: Graph, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched two-step change counts for the rows of ``X``.

    Returns ``(counts, transients)`` with ``counts`` of shape ``(B, n)``.  Used
    by the scaling runs on large graphs; :func:`change_stats` is the reference.
    """
    X = np.asarray(X, dtype=np.uint8)
    B = X.shape[0]
    prev2, prev1 = X, step_batch(g, X)
    counts = np.zeros((B, g.n), dtype=np.int64)
    transient = np.full(B, -1, dtype=np.int64)
    t = 0
    for _ in range(g.m + 2):
        nxt = step_batch(g, prev1)
        diff = nxt != prev2
        counts += diff
        done = ~diff.any(axis=1) & (transient < 0)
        transient[done] = t
        if (transient >= 0).all():
            return counts, transient
        prev2, prev1 = prev1, nxt
        t += 1
    raise RuntimeError("batched orbit did not settle within |E| + 2 steps")


def cert_bits(entries: int, N: int) -> int:
    """Bits of an ELECTION-PRED node certificate with ``entries`` change pairs."""
    return (2 + entries) * (1 + math.ceil(math.log2(N * N + 1)))


FAMILIES: dict[str, Callable[[int, np.random.Generator], Graph]] = {
    "torus": lambda s, rng: gr.torus_graph(s, s),
    "grid": lambda s, rng: gr.grid_graph(s, s),
    "path": lambda s, rng: gr.path_graph(s),
    "cycle": lambda s, rng: gr.cycle_graph(s),
    "cubic": lambda s, rng: gr.random_cubic(s, rng),
    "deg4": lambda s, rng: gr.random_bounded_degree(s, 4, rng),
}


@dataclass
class ScalingRow:
    family: str
    n: int
    sample_count: int
    max_changes: int
    honest_cert_bits: int
    seed: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


CSV_COLUMNS = ["family", "n", "sample_count", "max_changes", "honest_cert_bits", "seed"]


def scaling_experiment(
    family: str | Callable,
    sizes: Sequence[int],
    samples: int,
    seed: int,
    graphs_per_size: int = 1,
) -> list[ScalingRow]:
    """Max two-step change count and honest certificate size per size.

    ``sizes`` are family parameters (side length for tori and grids, node
    count otherwise).  Random configurations are uniform.
    """
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if list(sizes) != sorted(sizes):
        raise ValueError("sizes must be increasing")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    name = family if isinstance(family, str) else getattr(family, "__name__", "custom")
    make = FAMILIES[family] if isinstance(family, str) else family
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    rows = []
    for size in sizes:
        best, n = 0, 0
        for _ in range(graphs_per_size):
            g = make(size, rng)
            n = g.n
            X = rng.integers(0, 2, size=(samples, g.n), dtype=np.uint8)
            counts, _ = change_counts_fast(g, X)
            best = max(best, int(counts.max()))
        rows.append(ScalingRow(name, n, samples * graphs_per_size, best, cert_bits(best, n), seed))
    return rows


def rows_to_csv(rows: Sequence[ScalingRow]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row.as_dict())
    return buf.getvalue()


def fit_log_growth(ns: Sequence[int], values: Sequence[int]) -> dict:
    """Least-squares fit ``value ~ a + b log2 n`` plus the envelope constant
    ``c = max value / log2 n``."""
    L = np.log2(np.asarray(ns, dtype=float))
    y = np.asarray(values, dtype=float)
    A = np.vstack([np.ones_like(L), L]).T
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (a + b * L)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return {"intercept": float(a), "slope": float(b), "r2": r2, "c": float((y / L).max())}
