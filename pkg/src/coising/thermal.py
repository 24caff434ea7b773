"""Thermal states of the annealing Hamiltonian and their diagonal observables.

The Hamiltonian at anneal fraction ``s`` is::

    H(s) = A(s) * sum_i sigma^x_i + B(s) * H_p
    H_p  = sum_{(i,j)} J_ij z_i z_j + sum_i h_i z_i

Basis state ``z`` is an integer whose bit ``i - 1`` is 0 when vertex ``i``
points up (``z_i = +1``) and 1 when it points down.  Everything measured
here is diagonal in that basis, so a thermal state is fully described, for
our purposes, by its diagonal distribution ``p(z)``.

Three evaluation paths are provided:

* :func:`thermal_dense` returns the exact ``p`` (n <= 14), either from a
  full eigendecomposition or from Chebyshev moments of ``exp(-beta H)``
  on basis columns;
* :func:`thermal_stochastic` is a finite-temperature Lanczos estimate with
  random probe vectors, limited by the memory needed for Krylov bases;
* :func:`thermal_qmc` is a discrete imaginary-time path-integral Monte Carlo
  that only stores spin world lines and therefore reaches n = 33.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import networkx as nx
import numba as nb
import numpy as np
from networkx.algorithms.isomorphism import GraphMatcher, categorical_edge_match, categorical_node_match
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.special import ive
from scipy.sparse.linalg import LinearOperator, eigsh

from .graph import Graph, adjacency_power

#: Largest spin count accepted by :func:`thermal_dense`.
MAX_DENSE_N = 14
#: Up to this size :func:`thermal_dense` diagonalizes the full matrix.
EIGH_MAX_N = 10
#: Largest spin count for which state vectors are built at all.
MAX_STATEVECTOR_N = 30
#: Default cap on working memory for Krylov bases, in bytes.
MEMORY_BUDGET = 2 * 1024**3

#: Planck constant [J s] and Boltzmann constant [J/K].
PLANCK = 6.62607015e-34
BOLTZMANN = 1.380649e-23
#: Device temperature [K].
DEVICE_TEMPERATURE = 0.012
#: Inverse temperature at 12 mK for energies measured in GHz (h * 1 GHz units).
BETA_12MK_PER_GHZ = PLANCK * 1e9 / (BOLTZMANN * DEVICE_TEMPERATURE)

OBSERVABLES = ("energy", "magnetization", "q2", "omega2")


class ThermalError(ValueError):
    """Raised for inputs outside the supported size or schedule range."""


class ScheduleError(ValueError):
    """Raised for malformed schedules and out-of-range queries."""


# ---------------------------------------------------------------------------
# Instances and schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsingInstance:
    """Couplings ``J_ij`` on edges ``(i, j)`` (1-based, i < j) and fields ``h_i``."""

    n: int
    edges: tuple[tuple[int, int], ...]
    couplings: tuple[float, ...]
    fields: tuple[float, ...]

    def __post_init__(self):
        if len(self.edges) != len(self.couplings):
            raise ThermalError("one coupling per edge is required")
        if len(self.fields) != self.n:
            raise ThermalError(f"expected {self.n} fields, got {len(self.fields)}")
        pairs = sorted(
            ((min(i, j), max(i, j)), float(c)) for (i, j), c in zip(self.edges, self.couplings)
        )
        for (i, j), _ in pairs:
            if i == j or i < 1 or j > self.n:
                raise ThermalError(f"bad edge ({i}, {j}) for n={self.n}")
        object.__setattr__(self, "edges", tuple(p for p, _ in pairs))
        object.__setattr__(self, "couplings", tuple(c for _, c in pairs))
        object.__setattr__(self, "fields", tuple(float(h) for h in self.fields))

    @classmethod
    def from_graph(cls, g: Graph, coupling: float = 1.0, field: float = 1.0) -> "IsingInstance":
        """Uniform instance on ``g``; the defaults give ``J = h = +1``."""
        return cls(g.n, g.edges, (coupling,) * g.num_edges, (field,) * g.n)

    @property
    def graph(self) -> Graph:
        """Underlying graph (edges with nonzero coupling)."""
        return Graph(self.n, [e for e, c in zip(self.edges, self.couplings) if c != 0.0])

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """0-based endpoint arrays and coupling values."""
        e = np.array(self.edges, dtype=np.int64).reshape(-1, 2) - 1
        return e[:, 0].copy(), e[:, 1].copy(), np.array(self.couplings, dtype=np.float64)

    def diagonal(self) -> np.ndarray:
        """Problem energy ``H_p(z)`` for every basis state ``z``."""
        if self.n > MAX_STATEVECTOR_N:
            raise ThermalError(f"n={self.n} is too large for a state vector")
        u, v, j = self.edge_arrays()
        return _problem_diagonal(self.n, u, v, j, np.array(self.fields))

    def key(self) -> tuple:
        return (self.n, self.edges, self.couplings, self.fields)


@nb.njit(cache=True)
def _problem_diagonal(n, u, v, j, h):
    N = 1 << n
    out = np.empty(N)
    for z in range(N):
        acc = 0.0
        for k in range(u.size):
            same = ((z >> u[k]) ^ (z >> v[k])) & 1
            acc += j[k] * (1.0 - 2.0 * same)
        for i in range(n):
            acc += h[i] * (1.0 - 2.0 * ((z >> i) & 1))
        out[z] = acc
    return out


def spin_table(n: int) -> np.ndarray:
    """``(n, 2**n)`` array of spins ``z_i(z)`` in {+1, -1}."""
    idx = np.arange(1 << n, dtype=np.int64)
    return (1 - 2 * ((idx[None, :] >> np.arange(n)[:, None]) & 1)).astype(np.float64)


@dataclass(frozen=True)
class Schedule:
    """Annealing functions ``A(s)``, ``B(s)`` and the inverse temperature.

    ``kind="linear"`` is the dimensionless ``A = 1 - s``, ``B = s``;
    ``kind="tabulated"`` interpolates linearly between rows of ``table``
    (``(s, A, B)`` triples) and refuses to extrapolate.
    """

    kind: str = "linear"
    table: tuple[tuple[float, float, float], ...] | None = None
    beta: float = 4.0

    def __post_init__(self):
        if self.kind not in ("linear", "tabulated"):
            raise ScheduleError(f"unknown schedule kind {self.kind!r}")
        if not self.beta >= 0.0 or not math.isfinite(self.beta):
            raise ScheduleError(f"beta must be finite and non-negative, got {self.beta}")
        if self.kind == "tabulated":
            if not self.table or len(self.table) < 2:
                raise ScheduleError("a tabulated schedule needs at least two rows")
            t = np.array(self.table, dtype=float)
            if np.any(np.diff(t[:, 0]) <= 0):
                raise ScheduleError("s values must be strictly increasing")
            if t[0, 0] < 0 or t[-1, 0] > 1:
                raise ScheduleError("s values must lie in [0, 1]")
            if np.any(t[:, 1:] < 0):
                raise ScheduleError("A and B must be non-negative")
            if np.any(np.diff(t[:, 1]) > 0) or np.any(np.diff(t[:, 2]) < 0):
                raise ScheduleError("A must be non-increasing and B non-decreasing")

    def __call__(self, s: float) -> tuple[float, float]:
        """``(A(s), B(s))``."""
        s = float(s)
        if self.kind == "linear":
            if not 0.0 <= s <= 1.0:
                raise ScheduleError(f"s={s} outside [0, 1]")
            return 1.0 - s, s
        t = self.table
        if not t[0][0] <= s <= t[-1][0]:
            raise ScheduleError(f"s={s} outside the tabulated range [{t[0][0]}, {t[-1][0]}]")
        arr = np.array(t)
        return float(np.interp(s, arr[:, 0], arr[:, 1])), float(np.interp(s, arr[:, 0], arr[:, 2]))

    def A(self, s: float) -> float:
        return self(s)[0]

    def B(self, s: float) -> float:
        return self(s)[1]

    def with_beta(self, beta: float) -> "Schedule":
        return Schedule(self.kind, self.table, float(beta))

    def describe(self) -> dict:
        return {"kind": self.kind, "beta": self.beta, "rows": None if self.table is None else len(self.table)}


def default_schedule() -> Schedule:
    """Linear dimensionless schedule ``A = 1 - s``, ``B = s`` at ``beta = 4``."""
    return Schedule("linear", None, 4.0)


def load_schedule(text: str, beta: float | None = None) -> Schedule:
    """Tabulated schedule from CSV text with header ``s,A,B``.

    ``beta`` defaults to the 12 mK value for GHz energy units.
    """
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        raise ScheduleError("empty schedule")
    header = [c.strip() for c in rows[0]]
    if header[:3] != ["s", "A", "B"]:
        raise ScheduleError(f"expected header 's,A,B', got {','.join(header)!r}")
    table = []
    for lineno, r in enumerate(rows[1:], start=2):
        try:
            s, a, b = (float(c) for c in r[:3])
        except ValueError:
            raise ScheduleError(f"line {lineno}: could not parse {r!r}") from None
        table.append((s, a, b))
    return Schedule("tabulated", tuple(table), BETA_12MK_PER_GHZ if beta is None else float(beta))


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObservableSet:
    """Thermal averages of ``H_p``, ``M_z``, ``Q_2`` and ``Omega^2`` with standard errors."""

    energy: float
    magnetization: float
    q2: float
    omega2: float
    energy_err: float = 0.0
    magnetization_err: float = 0.0
    q2_err: float = 0.0
    omega2_err: float = 0.0

    def value(self, name: str) -> float:
        return float(getattr(self, name))

    def error(self, name: str) -> float:
        return float(getattr(self, name + "_err"))

    def as_dict(self) -> dict[str, float]:
        out = {}
        for name in OBSERVABLES:
            out[name] = self.value(name)
            out[name + "_err"] = self.error(name)
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ObservableSet":
        return cls(**json.loads(text))


@dataclass(frozen=True)
class CorrelationMatrix:
    """``values[i, j] = <z_i z_j>`` (unit diagonal) and ``singles[i] = <z_i>``."""

    values: np.ndarray = field(compare=False)
    singles: np.ndarray = field(compare=False)

    @property
    def n(self) -> int:
        return len(self.singles)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "values": self.values.tolist(), "singles": self.singles.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "CorrelationMatrix":
        d = json.loads(text)
        return cls(np.array(d["values"], dtype=float), np.array(d["singles"], dtype=float))


def _omega_weights(g: Graph) -> np.ndarray:
    return adjacency_power(g, 2).astype(np.float64)


def _observables(c: np.ndarray, singles: np.ndarray, g: Graph, a2: np.ndarray | None = None) -> tuple[float, ...]:
    n = g.n
    u, v = g.edge_array().T
    energy = float(c[u, v].sum() + singles.sum())
    mag = float(singles.sum())
    if n > 1:
        off = (c * c).sum() - np.trace(c * c)
        q2 = math.sqrt(max(off, 0.0) / (n * (n - 1)))
    else:
        q2 = 0.0
    if a2 is None:
        a2 = _omega_weights(g)
    omega2 = float((a2 * c).sum())
    return energy, mag, q2, omega2


def observables_from_correlations(c: CorrelationMatrix, g: Graph) -> ObservableSet:
    """The four observables implied by a correlation matrix on graph ``g``.

    ``Q_2`` uses ``N = n`` and ``Omega^2`` sums over all ordered pairs,
    diagonal included.
    """
    if c.n != g.n or c.values.shape != (g.n, g.n):
        raise ThermalError(f"correlations are for n={c.n}, graph has n={g.n}")
    return ObservableSet(*_observables(c.values, c.singles, g))


def correlations_from_distribution(p: np.ndarray, n: int) -> CorrelationMatrix:
    """Exact correlations of a distribution over basis states."""
    zs = spin_table(n)
    singles = zs @ p
    values = (zs * p) @ zs.T
    np.fill_diagonal(values, 1.0)
    return CorrelationMatrix(values, singles)


# ---------------------------------------------------------------------------
# Matrix-free Hamiltonian
# ---------------------------------------------------------------------------


@nb.njit(cache=True)
def _apply(diag, a, n, v, out):
    N = diag.size
    for z in range(N):
        acc = diag[z] * v[z]
        for i in range(n):
            acc += a * v[z ^ (1 << i)]
        out[z] = acc


def apply_hamiltonian(inst: IsingInstance, s: float, sched: Schedule, v: np.ndarray) -> np.ndarray:
    """``H(s) v`` without forming the matrix."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (1 << inst.n,):
        raise ThermalError(f"vector length {v.shape} does not match 2**{inst.n}")
    a, b = sched(s)
    out = np.empty_like(v)
    _apply(b * inst.diagonal(), a, inst.n, v, out)
    return out


def dense_hamiltonian(inst: IsingInstance, s: float, sched: Schedule) -> np.ndarray:
    """Full ``2**n x 2**n`` matrix of ``H(s)``."""
    if inst.n > MAX_DENSE_N:
        raise ThermalError(f"dense matrices are capped at n={MAX_DENSE_N}")
    a, b = sched(s)
    N = 1 << inst.n
    idx = np.arange(N)
    h = np.diag(b * inst.diagonal())
    for i in range(inst.n):
        h[idx, idx ^ (1 << i)] += a
    return h


# ---------------------------------------------------------------------------
# Dense (exact) path
# ---------------------------------------------------------------------------


class DenseThermal(NamedTuple):
    observables: ObservableSet
    correlations: CorrelationMatrix
    p: np.ndarray


def _automorphism_orbits(inst: IsingInstance, limit: int = 512) -> np.ndarray:
    """Representative basis state for every state, under instance symmetries.

    Permutations of the spins that preserve all couplings and fields commute
    with ``H(s)``, so ``p`` is constant on their orbits.
    """
    n = inst.n
    g = nx.Graph()
    for i, h in enumerate(inst.fields):
        g.add_node(i, h=h)
    for (i, j), c in zip(inst.edges, inst.couplings):
        g.add_edge(i - 1, j - 1, J=c)
    gm = GraphMatcher(g, g, node_match=categorical_node_match("h", None), edge_match=categorical_edge_match("J", None))
    N = 1 << n
    idx = np.arange(N, dtype=np.int64)
    rep = idx.copy()
    images = []
    for count, m in enumerate(gm.isomorphisms_iter()):
        if count >= limit:
            break
        if all(k == v for k, v in m.items()):
            continue
        img = np.zeros(N, dtype=np.int64)
        for k, v in m.items():
            img |= ((idx >> k) & 1) << v
        images.append(img)
    changed = True
    while changed:
        changed = False
        for img in images:
            new = np.minimum(rep, rep[img])
            if np.any(new != rep):
                rep, changed = new, True
        rep = rep[rep]
    return rep


@nb.njit(cache=True)
def _cheb_diag(d, a, n, coef, c, h, cols, w):
    """``sum_k coef[k] <z|T_k(H')|z>`` for each ``z`` in ``cols``, ``H' = (H - c) / h``.

    Only ``T_k |z>`` up to half the degree is built: the diagonal moments
    follow from ``T_2k = 2 T_k^2 - 1`` and ``T_2k+1 = 2 T_k T_k+1 - T_1``.
    """
    N = d.size
    K = coef.size
    steps = K // 2 + 1
    out = np.zeros(cols.size)
    t0 = np.zeros((N, w))
    t1 = np.zeros((N, w))
    t2 = np.zeros((N, w))
    dd = (d - c) / h
    ai = a / h
    nbr = np.empty(w)
    sq = np.empty(w)
    cr = np.empty(w)
    mu = np.zeros((2 * steps + 2, w))
    for start in range(0, cols.size, w):
        width = min(w, cols.size - start)
        t0[:] = 0.0
        for j in range(width):
            t0[cols[start + j], j] = 1.0
        sq[:] = 0.0
        for z in range(N):
            nbr[:] = 0.0
            for i in range(n):
                zz = z ^ (1 << i)
                for j in range(w):
                    nbr[j] += t0[zz, j]
            for j in range(w):
                v = dd[z] * t0[z, j] + ai * nbr[j]
                t1[z, j] = v
                sq[j] += v * v
        for j in range(width):
            mu[0, j] = 1.0
            mu[1, j] = dd[cols[start + j]]
            mu[2, j] = 2.0 * sq[j] - 1.0
        for k in range(1, steps):
            sq[:] = 0.0
            cr[:] = 0.0
            for z in range(N):
                nbr[:] = 0.0
                for i in range(n):
                    zz = z ^ (1 << i)
                    for j in range(w):
                        nbr[j] += t1[zz, j]
                dz = 2.0 * dd[z]
                for j in range(w):
                    v = dz * t1[z, j] + 2.0 * ai * nbr[j] - t0[z, j]
                    t2[z, j] = v
                    sq[j] += v * v
                    cr[j] += v * t1[z, j]
            for j in range(w):
                mu[2 * k + 1, j] = 2.0 * cr[j] - mu[1, j]
                mu[2 * k + 2, j] = 2.0 * sq[j] - 1.0
            t0, t1, t2 = t1, t2, t0
        for j in range(width):
            acc = 0.0
            for k in range(K):
                acc += coef[k] * mu[k, j]
            out[start + j] = acc
    return out


def _spectral_bounds(d: np.ndarray, a: float, n: int) -> tuple[float, float]:
    """Lowest and highest eigenvalue of ``H`` by Lanczos."""
    N = d.size
    out = np.empty(N)

    def mv(x):
        _apply(d, a, n, np.ascontiguousarray(x, dtype=np.float64).ravel(), out)
        return out.copy()

    op = LinearOperator((N, N), matvec=mv, dtype=np.float64)
    v0 = np.random.default_rng(0).standard_normal(N)
    lo = float(eigsh(op, k=1, which="SA", tol=1e-12, v0=v0)[0][0])
    hi = float(eigsh(op, k=1, which="LA", tol=1e-8, v0=v0)[0][0])
    return lo, hi


def _diagonal_chebyshev(d: np.ndarray, a: float, n: int, beta: float, rep: np.ndarray | None) -> np.ndarray:
    """Unnormalized ``<z|exp(-beta (H - lo))|z>`` for all ``z``."""
    e0, e1 = _spectral_bounds(d, a, n)
    lo = e0 - 1e-3
    # a Ritz value can only undershoot the top eigenvalue; pad generously
    hi = min(e1 + 1e-2 * (1.0 + abs(e1)), float(d.max()) + n * abs(a))
    c, h = 0.5 * (hi + lo), 0.5 * (hi - lo)
    t = beta * h
    ks = np.arange(int(2 * t + 80))
    coef = 2.0 * ive(ks, t) * np.where(ks % 2 == 0, 1.0, -1.0)
    coef[0] *= 0.5
    keep = np.nonzero(np.abs(coef) > 1e-18)[0]
    coef = coef[: keep.max() + 1]
    if rep is None:
        cols = np.arange(d.size, dtype=np.int64)
        return _cheb_diag(d, a, n, coef, c, h, cols, 32)
    cols = np.unique(rep)
    vals = _cheb_diag(d, a, n, coef, c, h, cols, 32)
    return vals[np.searchsorted(cols, rep)]


def diagonal_distribution(inst: IsingInstance, s: float, sched: Schedule, method: str = "auto") -> np.ndarray:
    """Exact measurement distribution ``p(z)`` of the Gibbs state of ``H(s)``."""
    if inst.n > MAX_DENSE_N:
        raise ThermalError(f"n={inst.n} exceeds the dense cap n={MAX_DENSE_N}; use a stochastic method")
    if method not in ("auto", "eigh", "chebyshev"):
        raise ThermalError(f"unknown dense method {method!r}")
    a, b = sched(s)
    beta = sched.beta
    d = b * inst.diagonal()
    N = d.size
    if beta == 0.0 or b == 0.0:
        return np.full(N, 1.0 / N)
    if a == 0.0:
        w = np.exp(-beta * (d - d.min()))
        return w / w.sum()
    if method == "eigh" or (method == "auto" and inst.n <= EIGH_MAX_N):
        vals, vecs = eigh(dense_hamiltonian(inst, s, sched), check_finite=False)
        w = np.exp(-beta * (vals - vals[0]))
        p = (vecs * vecs) @ w
    else:
        rep = _automorphism_orbits(inst) if inst.n > EIGH_MAX_N else None
        p = _diagonal_chebyshev(d, a, inst.n, beta, rep)
    return p / p.sum()


def thermal_dense(inst: IsingInstance, s: float, sched: Schedule, method: str = "auto") -> DenseThermal:
    """Exact Gibbs averages at ``s``.

    Parameters
    ----------
    inst, s, sched
        Problem instance, anneal fraction and schedule.
    method : {"auto", "eigh", "chebyshev"}
        ``eigh`` diagonalizes ``H(s)``; ``chebyshev`` expands
        ``exp(-beta H)`` in diagonal Chebyshev moments of each basis column (one column per symmetry
        orbit), which is exact to ~1e-14 and several times faster at n >= 12.
        ``auto`` picks ``eigh`` up to ``EIGH_MAX_N`` spins.

    Returns
    -------
    DenseThermal
        Observables (zero errors), correlations and ``p``.
    """
    p = diagonal_distribution(inst, s, sched, method)
    corr = correlations_from_distribution(p, inst.n)
    return DenseThermal(observables_from_correlations(corr, inst.graph), corr, p)


def classical_gibbs(inst: IsingInstance, beta_eff: float) -> np.ndarray:
    """Boltzmann distribution ``exp(-beta_eff H_p) / Z`` by direct enumeration."""
    d = inst.diagonal()
    w = np.exp(-beta_eff * (d - d.min()))
    return w / w.sum()


def observables_of_samples(states: np.ndarray, g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Sample means of ``z_i`` and ``z_i z_j`` over integer basis states."""
    z = 1.0 - 2.0 * ((states[:, None] >> np.arange(g.n)[None, :]) & 1)
    singles = z.mean(axis=0)
    pairs = z.T @ z / len(states)
    return singles, pairs


# ---------------------------------------------------------------------------
# Stochastic path: finite-temperature Lanczos with random probes
# ---------------------------------------------------------------------------


class StochasticThermal(NamedTuple):
    observables: ObservableSet
    correlations: CorrelationMatrix
    converged: bool
    residual: float


@dataclass(frozen=True)
class ProbeParams:
    num_probes: int = 50
    krylov_dim: int = 80
    seed: int = 0
    tol: float = 1e-8

    def __post_init__(self):
        if self.num_probes < 2:
            raise ThermalError("at least two probes are needed for an error estimate")
        if self.krylov_dim < 20:
            raise ThermalError("krylov_dim must be at least 20")


def _lanczos(d, a, n, v0, m):
    """Lanczos basis with full reorthogonalization, stopping on breakdown."""
    N = v0.size
    V = np.empty((m, N))
    alpha = np.empty(m)
    betas = np.empty(m)
    V[0] = v0 / np.linalg.norm(v0)
    w = np.empty(N)
    k = 0
    for k in range(m):
        _apply(d, a, n, V[k], w)
        alpha[k] = V[k] @ w
        w -= V[: k + 1].T @ (V[: k + 1] @ w)
        w -= V[: k + 1].T @ (V[: k + 1] @ w)
        betas[k] = np.linalg.norm(w)
        if k + 1 == m or betas[k] < 1e-12 * max(1.0, abs(alpha[k])):
            break
        V[k + 1] = w / betas[k]
    size = k + 1
    return V[:size], alpha[:size], betas[:size]


def _ratio_stats(num: np.ndarray, den: np.ndarray, fn) -> tuple[np.ndarray, np.ndarray]:
    """Ratio estimate ``fn(sum num / sum den)`` and its jackknife standard error."""
    R = len(den)
    tot_n, tot_d = num.sum(axis=0), den.sum()
    full = fn(tot_n / tot_d)
    jack = np.array([fn((tot_n - num[r]) / (tot_d - den[r])) for r in range(R)])
    err = np.sqrt((R - 1) / R * ((jack - jack.mean(axis=0)) ** 2).sum(axis=0))
    return full, err


def thermal_stochastic(
    inst: IsingInstance,
    s: float,
    sched: Schedule,
    params: ProbeParams | None = None,
    memory_budget: int = MEMORY_BUDGET,
) -> StochasticThermal:
    """Finite-temperature Lanczos estimate of the Gibbs averages.

    Each Rademacher probe ``r`` is propagated as ``exp(-beta H / 2) r`` in an
    ``m``-dimensional Krylov space; diagonal observables are read off the
    squared amplitudes.  Probe ``k`` draws from ``default_rng([seed, k])``,
    so results do not depend on evaluation order.  Standard errors are
    jackknife estimates over probes.
    """
    params = params or ProbeParams()
    n = inst.n
    need = (params.krylov_dim + 4) * 8 * (1 << n)
    if n > MAX_STATEVECTOR_N or need > memory_budget:
        raise ThermalError(
            f"Krylov bases for n={n} need {need / 2**30:.1f} GiB (budget {memory_budget / 2**30:.1f} GiB); "
            "use thermal_qmc"
        )
    a, b = sched(s)
    beta = sched.beta
    d = b * inst.diagonal()
    N = d.size
    zs = spin_table(n)
    g = inst.graph
    a2 = _omega_weights(g)
    R = params.num_probes
    dens = np.empty(R)
    nums = np.empty((R, n + n * n))
    shift = None
    worst = 0.0
    for r in range(R):
        rng = np.random.default_rng([params.seed, r])
        v0 = rng.integers(0, 2, N).astype(np.float64) * 2.0 - 1.0
        norm0 = math.sqrt(N)
        V, alpha, betas = _lanczos(d, a, n, v0, params.krylov_dim)
        k = len(alpha)
        theta, S = eigh_tridiagonal(alpha, betas[: k - 1])
        if shift is None:
            shift = theta[0]
        coeff = S @ (np.exp(-0.5 * beta * (theta - shift)) * S[0]) * norm0
        phi = V.T @ coeff
        if k == params.krylov_dim:
            worst = max(worst, abs(betas[-1] * coeff[-1]) / max(np.linalg.norm(coeff), 1e-300))
        w = phi * phi
        dens[r] = w.sum()
        nums[r, :n] = zs @ w
        nums[r, n:] = ((zs * w) @ zs.T).ravel()

    def stats(x):
        singles = x[:n]
        c = x[n:].reshape(n, n).copy()
        np.fill_diagonal(c, 1.0)
        return np.array(_observables(c, singles, g, a2))

    vals, errs = _ratio_stats(nums, dens, stats)
    tot = nums.sum(axis=0) / dens.sum()
    c = tot[n:].reshape(n, n).copy()
    np.fill_diagonal(c, 1.0)
    obs = ObservableSet(*vals, *errs)
    return StochasticThermal(obs, CorrelationMatrix(c, tot[:n].copy()), worst <= params.tol, worst)


# ---------------------------------------------------------------------------
# Path-integral Monte Carlo
# ---------------------------------------------------------------------------


class QmcThermal(NamedTuple):
    observables: ObservableSet
    correlations: CorrelationMatrix
    slices: int
    sweeps: int


@dataclass(frozen=True)
class QmcParams:
    """Trotter step, sweep counts, tempering ladder and seed for :func:`thermal_qmc`.

    ``replicas`` copies run at inverse temperatures spaced geometrically from
    ``beta * beta_min_fraction`` up to the target ``beta`` and exchange
    configurations after every sweep; only the target replica is measured.
    """

    dtau: float = 0.02
    sweeps: int = 20000
    thermalize: int = 2000
    bins: int = 40
    replicas: int = 10
    beta_min_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.dtau <= 0:
            raise ThermalError("dtau must be positive")
        if self.sweeps < self.bins or self.bins < 2:
            raise ThermalError("need at least two bins and one sweep per bin")
        if self.replicas < 1 or not 0 < self.beta_min_fraction <= 1:
            raise ThermalError("need replicas >= 1 and 0 < beta_min_fraction <= 1")

    def ladder(self, beta: float) -> np.ndarray:
        if self.replicas == 1:
            return np.array([beta])
        return beta * self.beta_min_fraction ** (np.arange(self.replicas - 1, -1, -1) / (self.replicas - 1))


@nb.njit(cache=True)
def _worldline_update(z, i, nbr_ptr, nbr_idx, nbr_j, h_i, db, t, u):
    """Heat-bath resample of spin ``i``'s periodic world line given its neighbours.

    Slice ``tau`` carries weight ``exp(-db * b_tau * z_tau)`` with local
    field ``b_tau``; consecutive slices carry relative weight 1 (equal) or
    ``t`` (flipped).  ``u`` holds M uniforms.
    """
    M = z.shape[1]
    fld = np.empty(M)
    for tau in range(M):
        acc = h_i
        for k in range(nbr_ptr[i], nbr_ptr[i + 1]):
            acc += nbr_j[k] * z[nbr_idx[k], tau]
        fld[tau] = db * acc
    # forward messages for both choices of the first slice; fw[s0, tau, x]
    fw = np.empty((2, M, 2))
    logz = np.zeros(2)
    for s0 in range(2):
        fw[s0, 0, 0] = math.exp(-fld[0]) if s0 == 0 else 0.0
        fw[s0, 0, 1] = math.exp(fld[0]) if s0 == 1 else 0.0
        norm = fw[s0, 0, 0] + fw[s0, 0, 1]
        fw[s0, 0, 0] /= norm
        fw[s0, 0, 1] /= norm
        lz = math.log(norm)
        for tau in range(1, M):
            up = (fw[s0, tau - 1, 0] + t * fw[s0, tau - 1, 1]) * math.exp(-fld[tau])
            dn = (t * fw[s0, tau - 1, 0] + fw[s0, tau - 1, 1]) * math.exp(fld[tau])
            norm = up + dn
            fw[s0, tau, 0] = up / norm
            fw[s0, tau, 1] = dn / norm
            lz += math.log(norm)
        if M == 1:
            close = 1.0
        else:
            close = fw[s0, M - 1, 0] * (1.0 if s0 == 0 else t) + fw[s0, M - 1, 1] * (t if s0 == 0 else 1.0)
        logz[s0] = lz + math.log(close) if close > 0 else -np.inf
    mx = max(logz[0], logz[1])
    p0 = math.exp(logz[0] - mx) / (math.exp(logz[0] - mx) + math.exp(logz[1] - mx))
    s0 = 0 if u[0] < p0 else 1
    # backward sampling with the ring closed on slice 0
    nxt = s0
    for tau in range(M - 1, 0, -1):
        w0 = fw[s0, tau, 0] * (1.0 if nxt == 0 else t)
        w1 = fw[s0, tau, 1] * (t if nxt == 0 else 1.0)
        x = 0 if u[tau] * (w0 + w1) < w0 else 1
        z[i, tau] = 1 - 2 * x
        nxt = x
    z[i, 0] = 1 - 2 * s0


@nb.njit(cache=True)
def _path_stats(z, u_e, v_e, j_e, h):
    """Number of flipped time bonds and the slice-summed problem energy."""
    n, M = z.shape
    flips = 0
    energy = 0.0
    for tau in range(M):
        nx_ = (tau + 1) % M
        for i in range(n):
            energy += h[i] * z[i, tau]
            if M > 1 and z[i, tau] != z[i, nx_]:
                flips += 1
        for k in range(u_e.size):
            energy += j_e[k] * z[u_e[k], tau] * z[v_e[k], tau]
    return flips, energy


@nb.njit(cache=True)
def _qmc_run(n, M, nbr_ptr, nbr_idx, nbr_j, u_e, v_e, j_e, h, a, b, betas, sweeps, thermalize, bins, seed):
    np.random.seed(seed)
    R = betas.size
    quantum = M > 1
    dts = betas / M
    ts = np.zeros(R)
    lc = np.zeros(R)
    ls = np.zeros(R)
    for r in range(R):
        if quantum:
            ts[r] = math.tanh(dts[r] * a)
            lc[r] = math.log(math.cosh(dts[r] * a))
            ls[r] = math.log(math.sinh(dts[r] * a))
    zs = np.ones((R, n, M), dtype=np.int64)
    for r in range(R):
        for i in range(n):
            if np.random.random() < 0.5:
                for tau in range(M):
                    zs[r, i, tau] = -1
    slot = np.arange(R)  # slot[r] = configuration index held at temperature r
    per_bin = sweeps // bins
    singles = np.zeros((bins, n))
    pairs = np.zeros((bins, n, n))
    zf = np.empty((n, M))
    u = np.empty(M)
    for sweep in range(thermalize + per_bin * bins):
        for r in range(R):
            z = zs[slot[r]]
            for i in range(n):
                for k in range(M):
                    u[k] = np.random.random()
                _worldline_update(z, i, nbr_ptr, nbr_idx, nbr_j, h[i], dts[r] * b, ts[r], u)
        if R > 1:
            start = sweep % 2
            for r in range(start, R - 1, 2):
                f1, e1 = _path_stats(zs[slot[r]], u_e, v_e, j_e, h)
                f2, e2 = _path_stats(zs[slot[r + 1]], u_e, v_e, j_e, h)
                # log weight of (flips f, energy e) at replica q:
                # (bonds - f) log cosh + f log sinh - dt_q * b * e
                d = 0.0
                if quantum:
                    d += (f2 - f1) * ((ls[r] - lc[r]) - (ls[r + 1] - lc[r + 1]))
                d -= b * (dts[r] - dts[r + 1]) * (e2 - e1)
                if d >= 0 or np.random.random() < math.exp(d):
                    tmp = slot[r]
                    slot[r] = slot[r + 1]
                    slot[r + 1] = tmp
        if sweep >= thermalize:
            bi = (sweep - thermalize) // per_bin
            z = zs[slot[R - 1]]
            for i in range(n):
                for tau in range(M):
                    zf[i, tau] = z[i, tau]
            singles[bi] += zf.sum(axis=1) / M
            pairs[bi] += (zf @ zf.T) / M
    return singles / per_bin, pairs / per_bin


def thermal_qmc(inst: IsingInstance, s: float, sched: Schedule, params: QmcParams | None = None) -> QmcThermal:
    """Discrete imaginary-time path-integral estimate of the Gibbs averages.

    The transverse term is first rotated to ``-A sum sigma^x`` (conjugation by
    ``prod sigma^z``, which leaves diagonal observables unchanged), making all
    path weights positive.  Imaginary time ``beta`` is cut into
    ``M = ceil(beta / dtau)`` slices; each spin's world line is resampled
    exactly given its neighbours, and replicas at lower ``beta`` (same ``M``)
    exchange configurations to cross classical barriers.  Errors are
    jackknife estimates over bins.  Systematic error is O(dtau^2).
    """
    params = params or QmcParams()
    n = inst.n
    a, b = sched(s)
    beta = sched.beta
    g = inst.graph
    a2 = _omega_weights(g)
    if b == 0.0 or beta == 0.0:
        corr = CorrelationMatrix(np.eye(n), np.zeros(n))
        return QmcThermal(observables_from_correlations(corr, g), corr, 0, 0)
    M = 1 if a == 0.0 else max(2, math.ceil(beta / params.dtau))
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (i, j), c in zip(inst.edges, inst.couplings):
        adj[i - 1].append((j - 1, c))
        adj[j - 1].append((i - 1, c))
    ptr = np.zeros(n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(x) for x in adj])
    idx = np.array([k for x in adj for k, _ in x], dtype=np.int64)
    jv = np.array([c for x in adj for _, c in x], dtype=np.float64)
    u_e, v_e, j_e = inst.edge_arrays()
    seed = int(np.random.SeedSequence(params.seed).generate_state(1)[0] & 0x7FFFFFFF)
    singles, pairs = _qmc_run(
        n, M, ptr, idx, jv, u_e, v_e, j_e, np.array(inst.fields), a, b, params.ladder(beta),
        params.sweeps, params.thermalize, params.bins, seed,
    )

    def stats(x):
        s1 = x[:n]
        c = x[n:].reshape(n, n).copy()
        np.fill_diagonal(c, 1.0)
        return np.array(_observables(c, s1, g, a2))

    data = np.concatenate([singles, pairs.reshape(params.bins, -1)], axis=1)
    vals, errs = _ratio_stats(data, np.ones(params.bins), stats)
    tot = data.mean(axis=0)
    c = tot[n:].reshape(n, n).copy()
    np.fill_diagonal(c, 1.0)
    return QmcThermal(ObservableSet(*vals, *errs), CorrelationMatrix(c, tot[:n].copy()), M, params.sweeps)


__all__ = [
    "BETA_12MK_PER_GHZ",
    "CorrelationMatrix",
    "DenseThermal",
    "IsingInstance",
    "MAX_DENSE_N",
    "OBSERVABLES",
    "ObservableSet",
    "ProbeParams",
    "QmcParams",
    "QmcThermal",
    "Schedule",
    "ScheduleError",
    "StochasticThermal",
    "ThermalError",
    "apply_hamiltonian",
    "classical_gibbs",
    "correlations_from_distribution",
    "default_schedule",
    "dense_hamiltonian",
    "diagonal_distribution",
    "load_schedule",
    "observables_from_correlations",
    "thermal_dense",
    "thermal_qmc",
    "thermal_stochastic",
]
