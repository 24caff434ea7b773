"""Acceptance criteria, one test per criterion at the stated tolerance.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Criterion 8 runs its reduced smoke variant; set COISING_FULL_ACCEPTANCE=1
for the hours-scale version.
"""

import itertools
import json
import os
import time
from collections import Counter

import numpy as np

from coising.catalog import NAMES, TUPLES, catalog_get
from coising.chimera import chimera_graph, find_native_embeddings, verify_embedding
from coising.cli import main
from coising.experiment import (
    PAPER_GRID,
    SEPARATION_THRESHOLD,
    MimicConfig,
    SweepConfig,
    difference_curve,
    discriminate,
    linear_grid,
    mimic_run,
    separation,
    sweep,
)
from coising.graph import VertexPermutation, are_isomorphic, random_graph, relabel
from coising.polynomial import (
    RootedGraph,
    classical_spectrum,
    classical_spectrum_auto,
    compose_rooted,
    rooted_spectrum,
    vertex_identify,
)
from coising.thermal import (
    OBSERVABLES,
    IsingInstance,
    ProbeParams,
    QmcParams,
    default_schedule,
    thermal_dense,
    thermal_stochastic,
)
from conftest import ACCEPTANCE_LINES

SCHED = default_schedule()
FULL = os.environ.get("COISING_FULL_ACCEPTANCE") == "1"

#: Location of the |Delta E| peak for (G13, G13p) under the linear schedule at
#: beta = 4, from a parabola through the largest point of the 41-point grid
#: and its neighbours.  Frozen from the first run.
GOLDEN_PEAK_S = 0.43401681


def record(number, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


# ---------------------------------------------------------------------------


def test_criterion_1_catalog_co_ising():
    t0 = time.perf_counter()
    bad = []
    for family, members in TUPLES.items():
        polys = {m: classical_spectrum_auto(catalog_get(m)) for m in members}
        first = polys[members[0]]
        bad += [f"{family}:{m}" for m in members if polys[m] != first]
    # full enumeration cross-checks
    for a, b in (("G13", "G13p"), ("G27", "G27p")):
        full = classical_spectrum(catalog_get(a))
        if not (full == classical_spectrum(catalog_get(b)) == classical_spectrum_auto(catalog_get(a))):
            bad.append(f"enumeration:{a}")
    dt = time.perf_counter() - t0
    record(1, not bad and dt < 60, f"mismatched={bad or 'none'} time={dt:.1f}s")


def test_criterion_2_non_isomorphism():
    t0 = time.perf_counter()
    iso_pairs = [
        (a, b) for members in TUPLES.values() for a, b in itertools.combinations(members, 2)
        if are_isomorphic(catalog_get(a), catalog_get(b))[0]
    ]
    rng = np.random.default_rng(2020)
    missed = []
    for name in NAMES:
        g = catalog_get(name)
        for _ in range(20):
            h = relabel(g, VertexPermutation.random(g.n, rng))
            found, p = are_isomorphic(g, h)
            if not found or relabel(g, p) != h:
                missed.append(name)
    dt = time.perf_counter() - t0
    record(2, not iso_pairs and not missed and dt < 60,
           f"isomorphic within tuples={iso_pairs or 'none'} failed relabelings={len(missed)} time={dt:.1f}s")


def _peak_location(s, d):
    k = int(np.argmax(np.abs(d)))
    y0, y1, y2 = np.abs(d[k - 1 : k + 2])
    h = s[1] - s[0]
    return s[k] + 0.5 * h * (y0 - y2) / (y0 - 2 * y1 + y2)


def test_criterion_3_energy_difference_curve():
    t0 = time.perf_counter()
    cfg = SweepConfig(s_grid=linear_grid(41), schedule=SCHED)
    e1 = np.array(sweep(catalog_get("G13"), cfg, "G13")[0].mean)
    e2 = np.array(sweep(catalog_get("G13p"), cfg, "G13p")[0].mean)
    dt = time.perf_counter() - t0
    s = np.array(cfg.s_grid)
    d = e1 - e2
    residual = max(abs(d[0]), abs(d[-1]))
    k = int(np.argmax(np.abs(d)))
    interior = 0 < k < len(s) - 1
    peak = _peak_location(s, d) if interior else float(s[k])
    checks = [residual < 1e-9, np.abs(d).max() >= 1e3 * residual, np.abs(d).max() > 0, interior, dt < 600]
    if GOLDEN_PEAK_S is not None:
        checks.append(abs(peak - GOLDEN_PEAK_S) <= 1e-6 * GOLDEN_PEAK_S)
    record(3, all(checks),
           f"|dE(0)|={abs(d[0]):.1e} |dE(1)|={abs(d[-1]):.1e} max|dE|={np.abs(d).max():.4g} "
           f"at s={s[k]:.3f} (refined {peak:.8f}, golden {GOLDEN_PEAK_S}) time={dt:.0f}s")


def test_criterion_4_classical_endpoint():
    g = catalog_get("G13")
    got = thermal_dense(IsingInstance.from_graph(g), 1.0, SCHED).observables
    # independent enumeration in plain Python
    beta = SCHED.beta
    states = list(itertools.product((1, -1), repeat=13))
    energies = [sum(z[i - 1] * z[j - 1] for i, j in g.edges) + sum(z) for z in states]
    e_min = min(energies)
    w = np.array([np.exp(-beta * (e - e_min)) for e in energies])
    w /= w.sum()
    Z = np.array(states, dtype=float)
    corr = (Z * w[:, None]).T @ Z
    a = g.adjacency_matrix()
    want = {
        "energy": float(w @ np.array(energies)),
        "magnetization": float(w @ Z.sum(axis=1)),
        "q2": float(np.sqrt(((corr**2).sum() - 13) / (13 * 12))),
        "omega2": float(((a @ a) * corr).sum()),
    }
    rel = {k: abs(got.value(k) - v) / abs(v) for k, v in want.items()}
    worst = max(rel.values())
    record(4, worst < 1e-10, f"max relative error={worst:.1e}")


def test_criterion_5_stochastic_vs_dense():
    t0 = time.perf_counter()
    failures = []
    count = 0
    for k in range(10):
        n = 10 + k % 3
        g = random_graph(n, 0.3, 500 + k)
        inst = IsingInstance.from_graph(g)
        for s in (0.3, 0.5, 0.7):
            exact = thermal_dense(inst, s, SCHED).observables
            est = thermal_stochastic(inst, s, SCHED, ProbeParams(50, 80, seed=k)).observables
            for name in OBSERVABLES:
                count += 1
                tol = max(3 * est.error(name), 1e-2 * abs(exact.value(name)) + 1e-3)
                if abs(est.value(name) - exact.value(name)) > tol:
                    failures.append((k, s, name))
    dt = time.perf_counter() - t0
    record(5, not failures and dt < 300, f"{count - len(failures)}/{count} within tolerance, time={dt:.0f}s")


def _random_graph_small(rng, max_n):
    n = int(rng.integers(1, max_n + 1))
    return random_graph(n, float(rng.uniform(0.1, 0.7)), rng)


def test_criterion_6_composition_law():
    rng = np.random.default_rng(6)
    bad_law = bad_identity = 0
    for _ in range(200):
        g1, g2 = _random_graph_small(rng, 8), _random_graph_small(rng, 8)
        r1 = RootedGraph(g1, int(rng.integers(1, g1.n + 1)))
        r2 = RootedGraph(g2, int(rng.integers(1, g2.n + 1)))
        bad_law += compose_rooted(rooted_spectrum(r1), rooted_spectrum(r2)) != rooted_spectrum(vertex_identify(r1, r2))
    for _ in range(200):
        g = _random_graph_small(rng, 12)
        zr = rooted_spectrum(RootedGraph(g, int(rng.integers(1, g.n + 1))))
        both = Counter(zr.terms) + Counter(zr.reflect_m().terms)
        bad_identity += dict(both) != classical_spectrum(g).terms
    record(6, bad_law == 0 and bad_identity == 0,
           f"composition failures={bad_law}/200 identity failures={bad_identity}/200")


def test_criterion_7_mimic_pipeline():
    t0 = time.perf_counter()
    g13, g13p, g13i = catalog_get("G13"), catalog_get("G13p"), catalog_get("G13i")
    mimic = MimicConfig(200, 1000, 1000, 0.95, seed=7)

    exact = thermal_dense(IsingInstance.from_graph(g13), 0.5, SCHED).observables
    rows = mimic_run(g13, 0.5, mimic).values
    mean = rows.mean(axis=0)
    se = rows.std(axis=0, ddof=1) / np.sqrt(len(rows))
    z = {name: abs(mean[j] - exact.value(name)) / se[j] for j, name in enumerate(OBSERVABLES)}
    fidelity = all(v <= 3 for v in z.values())

    cfg = SweepConfig(s_grid=PAPER_GRID, method="sampled", seed=7, mimic=mimic)
    curves = {name: sweep(g, cfg, name) for name, g in (("G13", g13), ("G13p", g13p), ("G13i", g13i))}
    iso_covers = all(
        all(lo <= 0.0 <= hi for lo, hi in zip(d.ci_low, d.ci_high))
        for d in (difference_curve(a, b) for a, b in zip(curves["G13"], curves["G13i"]))
    )
    best = (0.0, None, None, None)
    for a, b in zip(curves["G13"], curves["G13p"]):
        d = difference_curve(a, b)
        sep = separation(d)
        k = int(np.argmax(sep))
        if sep[k] > best[0]:
            best = (float(sep[k]), a.observable_name, d.s[k], (d.ci_low[k], d.ci_high[k]))
    excludes = best[3] is not None and not (best[3][0] <= 0.0 <= best[3][1])
    dt = time.perf_counter() - t0
    ok = fidelity and iso_covers and excludes and best[0] >= SEPARATION_THRESHOLD and dt < 900
    record(7, ok,
           "z-scores vs exact " + " ".join(f"{k}={v:.2f}" for k, v in z.items())
           + f"; iso CI covers 0 everywhere={iso_covers}; best (G13,G13p) separation={best[0]:.1f}"
           f" via {best[1]} at s={best[2]}; time={dt:.0f}s")


def test_criterion_8_discrimination_at_scale():
    t0 = time.perf_counter()
    if FULL:
        cfg = SweepConfig(s_grid=PAPER_GRID[3:8], method="qmc", seed=8, qmc=QmcParams(sweeps=40000, thermalize=4000))
    else:
        cfg = SweepConfig(s_grid=(0.5, 0.7, 0.9), method="qmc", seed=8,
                          qmc=QmcParams(sweeps=2000, thermalize=200, bins=20))
    summary = []
    ok = True
    for family, control in (("G25", "G25p1"), ("G33", "G33")):
        graphs = {m: catalog_get(m) for m in TUPLES[family]}
        graphs[control + "i"] = catalog_get(control + "i")
        verdicts, _ = discriminate(graphs, cfg)
        for v in verdicts:
            is_control = v.pair == (control, control + "i")
            if v.pair[1].endswith("i") and not is_control:
                continue
            good = (not v.distinguishable) if is_control else v.distinguishable
            ok &= good
            summary.append(f"{v.pair[0]}/{v.pair[1]}={v.separation:.1f}{'' if good else '!'}")
    dt = time.perf_counter() - t0
    budget = float("inf") if FULL else 1200
    record(8, ok and dt < budget,
           f"{'full' if FULL else 'smoke'} qmc separations " + " ".join(summary) + f"; time={dt:.0f}s")


def test_criterion_9_chimera():
    t0 = time.perf_counter()
    topo = chimera_graph(16)
    counts = {}
    for name in NAMES:
        g = catalog_get(name)
        res = find_native_embeddings(g, topo, 5, seed=9, name=name)
        valid = [e for e in res.embeddings if verify_embedding(g, topo, e)]
        counts[name] = len({e.key() for e in valid})
    dt = time.perf_counter() - t0
    short = {k: v for k, v in counts.items() if v < 5}
    record(9, topo.num_qubits == 2048 and len(topo.couplers) == 6016 and not short and dt < 300,
           f"qubits={topo.num_qubits} couplers={len(topo.couplers)} graphs short of 5={short or 'none'} time={dt:.1f}s")


def test_criterion_10_determinism(tmp_path, capsys):
    small = tmp_path / "g8.txt"
    small.write_text(random_graph(8, 0.4, 10).to_text())
    commands = {
        "spectrum": ["spectrum", "--catalog", "G13", "--compare", "G13p"],
        "check": ["check", "G25p1", "G25p2"],
        "compose": ["compose", str(small), "1", str(small), "2"],
        "search-trees": ["search-trees", "--max-n", "6"],
        "sweep-dense": ["sweep", str(small), "--grid", "0.2,0.5,0.8"],
        "sweep-sampled": ["sweep", str(small), "--method", "sampled", "--gauges", "20", "--anneals", "100",
                          "--resamples", "100", "--format", "json"],
        "sweep-stochastic": ["sweep", str(small), "--method", "stochastic", "--probes", "6", "--krylov-dim", "30"],
        "sweep-qmc": ["sweep", str(small), "--method", "qmc", "--sweeps", "200", "--grid", "0.5"],
        "discriminate": ["discriminate", "--catalog", "G13,G13i", "--method", "sampled", "--grid", "1.0",
                         "--gauges", "20", "--anneals", "100", "--resamples", "100", "--embeddings", "2"],
        "mimic": ["mimic", "--catalog", "G13", "--sp", "1.0", "--gauges", "20", "--anneals", "100"],
        "embed": ["embed", "--catalog", "G33", "--k", "5"],
        "catalog": ["catalog", "G17", "--format", "json"],
    }
    differing = []
    for name, argv in commands.items():
        outs = []
        for rep in range(2):
            d = tmp_path / f"{name}-{rep}"
            assert main(argv + ["--seed", "10", "--out", str(d)]) == 0, name
            files = {p.name: p.read_bytes() for p in sorted(d.iterdir())}
            manifest = json.loads(files.pop("manifest.json"))
            manifest.pop("wall_time")
            manifest["argv"] = [a for a in manifest["argv"] if a != str(d)]
            outs.append((files, manifest))
        if outs[0] != outs[1]:
            differing.append(name)
    capsys.readouterr()
    record(10, not differing, f"{len(commands) - len(differing)}/{len(commands)} commands byte-identical;"
           f" differing={differing or 'none'}")
