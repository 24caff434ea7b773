"""Simulated version of the pause-and-measure protocol.

A sweep evaluates the four diagonal observables over a grid of pause points
``s_p``.  The *sampled* method mimics the device workflow: for each random
gauge the Gibbs diagonal distribution is sampled a fixed number of times,
the samples are mapped back through the gauge, observables are computed per
gauge, and a bootstrap over gauges gives means and confidence intervals.
Pairs of graphs are then compared through difference curves.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import zlib
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from scipy.stats import norm

from .graph import Graph, VertexPermutation, adjacency_power, relabel
from .thermal import (
    MAX_DENSE_N,
    OBSERVABLES,
    IsingInstance,
    ProbeParams,
    QmcParams,
    Schedule,
    ThermalError,
    default_schedule,
    diagonal_distribution,
    correlations_from_distribution,
    observables_from_correlations,
    thermal_qmc,
    thermal_stochastic,
)

#: Pause points used on the device.
PAPER_GRID = tuple(k / 10 for k in range(1, 10))
#: Separation (|difference| over combined standard error) needed to call a pair distinguishable.
SEPARATION_THRESHOLD = 5.0
#: Smallest combined uncertainty used in the separation; the resolution of the exact path.
SEPARATION_FLOOR = 1e-9
METHODS = ("dense", "stochastic", "qmc", "sampled")


class ExperimentError(ValueError):
    """Raised for inconsistent configurations or curves."""


def linear_grid(points: int) -> tuple[float, ...]:
    """``points`` evenly spaced pause points on [0, 1], endpoints included, as exact ``k / (points - 1)``."""
    if points < 2:
        raise ExperimentError("a grid needs at least two points")
    return tuple(k / (points - 1) for k in range(points))


def _digest(g: Graph) -> int:
    return zlib.crc32(g.to_text().encode())


def _sub_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0] & 0x7FFFFFFF)


# ---------------------------------------------------------------------------
# Configurations and results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MimicConfig:
    """Gauge sampling and bootstrap settings."""

    num_gauges: int = 200
    anneals_per_gauge: int = 1000
    bootstrap_resamples: int = 1000
    confidence: float = 0.95
    seed: int = 0

    def __post_init__(self):
        if min(self.num_gauges, self.anneals_per_gauge, self.bootstrap_resamples) < 1:
            raise ExperimentError("gauge, anneal and resample counts must be positive")
        if self.num_gauges < 2:
            raise ExperimentError("at least two gauges are needed for a bootstrap")
        if not 0.0 < self.confidence < 1.0:
            raise ExperimentError("confidence must lie in (0, 1)")


@dataclass(frozen=True)
class SweepConfig:
    """Pause-point grid, schedule and evaluation method.

    ``method`` is one of ``dense`` (exact, n <= 14), ``stochastic`` (Krylov
    probes), ``qmc`` (path-integral Monte Carlo) or ``sampled`` (gauge
    sampling from the exact distribution).  ``beta`` overrides the
    schedule's inverse temperature when given.
    """

    s_grid: tuple[float, ...] = PAPER_GRID
    schedule: Schedule = field(default_factory=default_schedule)
    method: str = "dense"
    seed: int = 0
    beta: float | None = None
    probes: ProbeParams = field(default_factory=ProbeParams)
    qmc: QmcParams = field(default_factory=QmcParams)
    mimic: MimicConfig = field(default_factory=MimicConfig)
    confidence: float = 0.95

    def __post_init__(self):
        grid = tuple(float(s) for s in self.s_grid)
        if not grid:
            raise ExperimentError("the s grid is empty")
        if any(not 0.0 <= s <= 1.0 for s in grid):
            raise ExperimentError("s values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ExperimentError("s values must be strictly increasing")
        object.__setattr__(self, "s_grid", grid)
        if self.method not in METHODS:
            raise ExperimentError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")

    @property
    def effective_schedule(self) -> Schedule:
        return self.schedule if self.beta is None else self.schedule.with_beta(self.beta)


@dataclass(frozen=True)
class ObservableCurve:
    """One observable of one graph versus pause point.

    ``stderr`` is the standard error behind the interval (zero for exact
    values); ``ci_low``/``ci_high`` are the reported confidence bounds.
    """

    graph_name: str
    observable_name: str
    s: tuple[float, ...]
    mean: tuple[float, ...]
    ci_low: tuple[float, ...]
    ci_high: tuple[float, ...]
    stderr: tuple[float, ...]
    embedding_id: int | None = None

    def __post_init__(self):
        k = len(self.s)
        if not all(len(x) == k for x in (self.mean, self.ci_low, self.ci_high, self.stderr)):
            raise ExperimentError("curve columns have different lengths")
        if any(b <= a for a, b in zip(self.s, self.s[1:])):
            raise ExperimentError("curve points must be sorted by s")
        lo = tuple(min(float(a), float(m)) for a, m in zip(self.ci_low, self.mean))
        hi = tuple(max(float(a), float(m)) for a, m in zip(self.ci_high, self.mean))
        object.__setattr__(self, "ci_low", lo)
        object.__setattr__(self, "ci_high", hi)
        for name in ("s", "mean", "stderr"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))

    @property
    def points(self) -> list[tuple[float, float, float, float]]:
        return list(zip(self.s, self.mean, self.ci_low, self.ci_high))

    def at(self, s: float) -> int:
        for k, x in enumerate(self.s):
            if abs(x - s) < 1e-12:
                return k
        raise ExperimentError(f"s={s} is not on this curve's grid")


@dataclass(frozen=True)
class Verdict:
    pair: tuple[str, str]
    distinguishable: bool
    best_sp: float
    best_observable: str
    separation: float

    def as_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "distinguishable": self.distinguishable,
            "best_sp": self.best_sp,
            "best_observable": self.best_observable,
            "separation": self.separation,
        }


# ---------------------------------------------------------------------------
# Gauges and sampling
# ---------------------------------------------------------------------------


def gauge_transform(inst: IsingInstance, signs: Sequence[int]) -> IsingInstance:
    """``J_ij -> a_i a_j J_ij`` and ``h_i -> a_i h_i``."""
    a = [int(x) for x in signs]
    if len(a) != inst.n:
        raise ExperimentError(f"expected {inst.n} signs, got {len(a)}")
    if any(x not in (-1, 1) for x in a):
        raise ExperimentError("gauge signs must be +1 or -1")
    couplings = [a[i - 1] * a[j - 1] * c for (i, j), c in zip(inst.edges, inst.couplings)]
    fields = [x * h for x, h in zip(a, inst.fields)]
    return IsingInstance(inst.n, inst.edges, tuple(couplings), tuple(fields))


def gauge_mask(signs: Sequence[int]) -> int:
    """Basis-state bit mask of the spins a gauge flips."""
    return sum(1 << i for i, x in enumerate(signs) if x == -1)


@lru_cache(maxsize=512)
def _dense_p(inst: IsingInstance, s: float, sched: Schedule) -> np.ndarray:
    p = diagonal_distribution(inst, s, sched)
    p.setflags(write=False)
    return p


def exact_distribution(inst: IsingInstance, s: float, sched: Schedule) -> np.ndarray:
    """Memoized exact diagonal distribution (read-only)."""
    return _dense_p(inst, float(s), sched)


class MimicRows(NamedTuple):
    """Per-gauge observable estimates, one row per gauge, columns in ``OBSERVABLES`` order."""

    values: np.ndarray
    signs: np.ndarray


def _gauge_observables(states: np.ndarray, g: Graph, a2: np.ndarray) -> np.ndarray:
    n = g.n
    S = len(states)
    z = 1.0 - 2.0 * ((states[:, None] >> np.arange(n)[None, :]) & 1)
    singles = z.mean(axis=0)
    c = z.T @ z / S
    u, v = g.edge_array().T
    energy = c[u, v].sum() + singles.sum()
    mag = singles.sum()
    omega2 = (a2 * c).sum()
    if n > 1 and S > 1:
        # (S c^2 - 1) / (S - 1) is unbiased for the squared correlation
        sq = (S * c * c - 1.0) / (S - 1.0)
        off = sq.sum() - np.trace(sq)
        q2 = math.sqrt(max(off, 0.0) / (n * (n - 1)))
    else:
        q2 = 0.0
    return np.array([energy, mag, q2, omega2])


def mimic_run(
    g: Graph,
    s_p: float,
    cfg: MimicConfig | None = None,
    sweepcfg: SweepConfig | None = None,
    recompute_gauges: bool = False,
) -> MimicRows:
    """Gauge-averaged sampling of the Gibbs state at ``s_p``.

    For every gauge the instance is sign-transformed, ``anneals_per_gauge``
    basis states are drawn from its exact diagonal distribution, samples are
    mapped back through the gauge, and the four observables are computed
    from that gauge's samples.

    The gauge-transformed distribution is ``p(z XOR mask)``, since the gauge
    is conjugation by spin flips that commute with the transverse field.
    ``recompute_gauges=True`` diagonalizes every gauge instead (slow; used
    to check that identity).
    """
    cfg = cfg or MimicConfig()
    sweepcfg = sweepcfg or SweepConfig()
    if g.n > MAX_DENSE_N:
        raise ExperimentError(
            f"mimic sampling needs the exact distribution (n <= {MAX_DENSE_N}); use a stochastic or qmc sweep"
        )
    sched = sweepcfg.effective_schedule
    inst = IsingInstance.from_graph(g)
    p = exact_distribution(inst, s_p, sched)
    a2 = adjacency_power(g, 2).astype(float)
    idx = np.arange(p.size, dtype=np.int64)
    rows = np.empty((cfg.num_gauges, len(OBSERVABLES)))
    signs = np.empty((cfg.num_gauges, g.n), dtype=np.int64)
    tag = _digest(g)
    for k in range(cfg.num_gauges):
        rng = np.random.default_rng([cfg.seed, tag, k])
        a = rng.choice(np.array([-1, 1]), size=g.n)
        mask = gauge_mask(a)
        if recompute_gauges:
            pa = diagonal_distribution(gauge_transform(inst, a), s_p, sched)
        else:
            pa = p[idx ^ mask]
        cdf = np.cumsum(pa)
        u = rng.random(cfg.anneals_per_gauge) * cdf[-1]
        drawn = np.minimum(np.searchsorted(cdf, u, side="right"), p.size - 1)
        rows[k] = _gauge_observables(drawn ^ mask, g, a2)
        signs[k] = a
    return MimicRows(rows, signs)


class Bootstrap(NamedTuple):
    mean: float
    ci_low: float
    ci_high: float
    stderr: float


def bootstrap(values: Sequence[float], resamples: int = 1000, confidence: float = 0.95, seed: int = 0) -> Bootstrap:
    """Percentile bootstrap of the mean; ``stderr`` is the spread of the resampled means."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise ExperimentError("bootstrap needs at least two values")
    if resamples < 1 or not 0.0 < confidence < 1.0:
        raise ExperimentError("need resamples >= 1 and confidence in (0, 1)")
    rng = np.random.default_rng(seed)
    means = x[rng.integers(0, x.size, size=(resamples, x.size))].mean(axis=1)
    lo, hi = np.quantile(means, [(1 - confidence) / 2, (1 + confidence) / 2])
    mean = float(x.mean())
    se = float(means.std(ddof=1)) if resamples > 1 else 0.0
    return Bootstrap(mean, float(min(lo, mean)), float(max(hi, mean)), se)


def bootstrap_ci(values: Sequence[float], resamples: int, confidence: float, seed: int) -> tuple[float, float, float]:
    """``(mean, ci_low, ci_high)`` from a percentile bootstrap over ``values``."""
    b = bootstrap(values, resamples, confidence, seed)
    return b.mean, b.ci_low, b.ci_high


# ---------------------------------------------------------------------------
# Sweeps and comparisons
# ---------------------------------------------------------------------------


def _point(g: Graph, s: float, cfg: SweepConfig, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Means, standard errors and optional explicit (lo, hi) bounds at one pause point."""
    inst = IsingInstance.from_graph(g)
    sched = cfg.effective_schedule
    tag = _digest(g)
    if cfg.method == "dense":
        if g.n > MAX_DENSE_N:
            raise ExperimentError(f"dense sweeps are capped at n={MAX_DENSE_N}")
        p = exact_distribution(inst, s, sched)
        obs = observables_from_correlations(correlations_from_distribution(p, g.n), g)
        return np.array([obs.value(o) for o in OBSERVABLES]), np.zeros(4), None
    if cfg.method == "stochastic":
        params = replace(cfg.probes, seed=_sub_seed(cfg.seed, tag, k))
        obs = thermal_stochastic(inst, s, sched, params).observables
    elif cfg.method == "qmc":
        params = replace(cfg.qmc, seed=_sub_seed(cfg.seed, tag, k))
        obs = thermal_qmc(inst, s, sched, params).observables
    else:
        mc = replace(cfg.mimic, seed=_sub_seed(cfg.seed, k))
        rows = mimic_run(g, s, mc, cfg).values
        means, ses, bounds = np.empty(4), np.empty(4), np.empty((2, 4))
        for j in range(4):
            b = bootstrap(rows[:, j], mc.bootstrap_resamples, mc.confidence, _sub_seed(mc.seed, tag, j))
            means[j], ses[j], bounds[0, j], bounds[1, j] = b.mean, b.stderr, b.ci_low, b.ci_high
        return means, ses, bounds
    return np.array([obs.value(o) for o in OBSERVABLES]), np.array([obs.error(o) for o in OBSERVABLES]), None


def sweep(g: Graph, cfg: SweepConfig | None = None, name: str = "G", embedding_id: int | None = None) -> list[ObservableCurve]:
    """Observables of ``g`` over the pause-point grid, one curve per observable.

    Exact curves carry zero-width intervals; estimated curves carry
    ``mean +- z * stderr`` (normal) or bootstrap percentile intervals.
    """
    cfg = cfg or SweepConfig()
    z = norm.ppf(0.5 + cfg.confidence / 2)
    cols = [[] for _ in range(4)]
    for k, s in enumerate(cfg.s_grid):
        means, ses, bounds = _point(g, s, cfg, k)
        for j in range(4):
            lo, hi = (means[j] - z * ses[j], means[j] + z * ses[j]) if bounds is None else bounds[:, j]
            cols[j].append((means[j], lo, hi, ses[j]))
    curves = []
    for j, obs in enumerate(OBSERVABLES):
        m, lo, hi, se = zip(*cols[j])
        curves.append(ObservableCurve(name, obs, cfg.s_grid, m, lo, hi, se, embedding_id))
    return curves


def difference_curve(c1: ObservableCurve, c2: ObservableCurve) -> ObservableCurve:
    """Pointwise ``c1 - c2`` with interval half-widths and standard errors added in quadrature."""
    if c1.observable_name != c2.observable_name:
        raise ExperimentError("curves measure different observables")
    if len(c1.s) != len(c2.s) or any(abs(a - b) > 1e-12 for a, b in zip(c1.s, c2.s)):
        raise ExperimentError("curves are on different s grids")
    m1, m2 = np.array(c1.mean), np.array(c2.mean)
    d = m1 - m2
    up = np.hypot(np.array(c1.ci_high) - m1, m2 - np.array(c2.ci_low))
    down = np.hypot(m1 - np.array(c1.ci_low), np.array(c2.ci_high) - m2)
    se = np.hypot(c1.stderr, c2.stderr)
    return ObservableCurve(
        f"{c1.graph_name}-{c2.graph_name}", c1.observable_name, c1.s, d, d - down, d + up, se, None
    )


def separation(diff: ObservableCurve) -> np.ndarray:
    """``|difference| / max(stderr, SEPARATION_FLOOR)`` at every grid point."""
    return np.abs(diff.mean) / np.maximum(diff.stderr, SEPARATION_FLOOR)


def average_embeddings(curves: Sequence[ObservableCurve]) -> ObservableCurve:
    """Mean over embeddings of one graph's curves for one observable.

    The uncertainty is the larger of the standard error across embeddings
    and the pooled within-embedding error over ``sqrt(k)``, so identical
    exact curves keep zero error and noisy ones are never over-trusted.
    """
    if not curves:
        raise ExperimentError("no curves to average")
    k = len(curves)
    means = np.array([c.mean for c in curves])
    ses = np.array([c.stderr for c in curves])
    m = means.mean(axis=0)
    across = means.std(axis=0, ddof=1) / math.sqrt(k) if k > 1 else np.zeros_like(m)
    within = np.sqrt((ses**2).mean(axis=0) / k)
    se = np.maximum(across, within)
    z = norm.ppf(0.975)
    c0 = curves[0]
    return ObservableCurve(c0.graph_name, c0.observable_name, c0.s, m, m - z * se, m + z * se, se, None)


def _embedded_graph(g: Graph, assignment: Mapping[int, int]) -> Graph:
    """``g`` relabeled by the rank of each vertex's qubit (same vertex count)."""
    order = sorted(range(1, g.n + 1), key=lambda v: assignment[v])
    rank = {v: r + 1 for r, v in enumerate(order)}
    return relabel(g, VertexPermutation([rank[v] for v in range(1, g.n + 1)]))


def discriminate(
    graphs: Mapping[str, Graph],
    cfg: SweepConfig | None = None,
    embeddings_per_graph: Mapping[str, Sequence[Mapping[int, int]]] | None = None,
    threshold: float = SEPARATION_THRESHOLD,
) -> tuple[list[Verdict], dict[str, list[ObservableCurve]]]:
    """Pairwise distinguishability verdicts over all four observables.

    With embeddings, each graph is simulated once per embedding (as the
    qubit-ordered relabeling the embedding induces, with its own random
    streams) and the curves are averaged.  Returns the verdicts and the
    per-graph curves.
    """
    if len(graphs) < 2:
        raise ExperimentError("need at least two graphs")
    cfg = cfg or SweepConfig()
    curves: dict[str, list[ObservableCurve]] = {}
    for name, g in graphs.items():
        embs = (embeddings_per_graph or {}).get(name)
        if not embs:
            curves[name] = sweep(g, cfg, name)
            continue
        per = []
        for e_id, assignment in enumerate(embs):
            sub = replace(cfg, seed=_sub_seed(cfg.seed, e_id))
            per.append(sweep(_embedded_graph(g, assignment), sub, name, e_id))
        curves[name] = [average_embeddings([p[j] for p in per]) for j in range(4)]
    verdicts = []
    for a, b in itertools.combinations(graphs, 2):
        best = (-1.0, PAPER_GRID[0], OBSERVABLES[0])
        for j, obs in enumerate(OBSERVABLES):
            sep = separation(difference_curve(curves[a][j], curves[b][j]))
            k = int(np.argmax(sep))
            if sep[k] > best[0]:
                best = (float(sep[k]), curves[a][j].s[k], obs)
        verdicts.append(Verdict((a, b), best[0] >= threshold, best[1], best[2], best[0]))
    return verdicts, curves


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

CURVE_COLUMNS = ("graph", "observable", "s_p", "mean", "ci_low", "ci_high", "embedding_id")


def curves_to_csv(curves: Sequence[ObservableCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for c in curves:
        eid = "" if c.embedding_id is None else c.embedding_id
        for s, m, lo, hi in c.points:
            w.writerow([c.graph_name, c.observable_name, repr(s), repr(m), repr(lo), repr(hi), eid])
    return buf.getvalue()


def curves_to_json(curves: Sequence[ObservableCurve]) -> str:
    out = []
    for c in curves:
        out.append({
            "graph": c.graph_name,
            "observable": c.observable_name,
            "embedding_id": c.embedding_id,
            "points": [
                {"s_p": s, "mean": m, "ci_low": lo, "ci_high": hi, "stderr": se}
                for (s, m, lo, hi), se in zip(c.points, c.stderr)
            ],
        })
    return json.dumps(out, indent=1)


def verdicts_to_json(verdicts: Sequence[Verdict]) -> str:
    return json.dumps([v.as_dict() for v in verdicts], indent=1)


__all__ = [
    "CURVE_COLUMNS",
    "Bootstrap",
    "ExperimentError",
    "MimicConfig",
    "MimicRows",
    "ObservableCurve",
    "PAPER_GRID",
    "SEPARATION_FLOOR",
    "SEPARATION_THRESHOLD",
    "SweepConfig",
    "Verdict",
    "average_embeddings",
    "bootstrap",
    "bootstrap_ci",
    "curves_to_csv",
    "curves_to_json",
    "difference_curve",
    "discriminate",
    "exact_distribution",
    "gauge_mask",
    "gauge_transform",
    "linear_grid",
    "mimic_run",
    "separation",
    "sweep",
    "verdicts_to_json",
]
