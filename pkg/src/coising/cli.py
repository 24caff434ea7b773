"""``coising`` command-line front end.

Every command prints its result to stdout, or, with ``--out DIR``, writes
its output files there together with a ``manifest.json`` recording the
command, configuration, seed, package version, input digests, output paths
and wall time.  Exit codes: 0 success, 1 computation failure, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad input detected after argument parsing (missing file, unknown graph)."""


class ComputationError(Exception):
    """A computation finished without a usable result."""


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------


def _load_graph(spec: str):
    """Catalog name (``G13``, ``G13i``) or path to a graph file; returns (name, graph, digest)."""
    from .catalog import catalog_get
    from .graph import GraphError, parse_graph

    path = Path(spec)
    if path.exists():
        text = path.read_text()
        try:
            g = parse_graph(text)
        except GraphError as exc:
            raise UsageError(f"{spec}: {exc}") from None
        return path.stem, g, hashlib.sha256(text.encode()).hexdigest()
    try:
        g = catalog_get(spec)
    except KeyError as exc:
        raise UsageError(f"{spec!r} is neither a readable file nor a catalog graph ({exc.args[0]})") from None
    return spec, g, hashlib.sha256(g.to_text().encode()).hexdigest()


def _graph_specs(args) -> list[str]:
    specs = list(getattr(args, "graphs", None) or [])
    if getattr(args, "catalog", None):
        specs += [s.strip() for s in args.catalog.split(",") if s.strip()]
    return specs


def _schedule(args):
    from .thermal import ScheduleError, default_schedule, load_schedule

    path = args.schedule or os.environ.get("COISING_SCHEDULE")
    if path:
        try:
            sched = load_schedule(Path(path).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read schedule {path}: {exc.strerror}") from None
        except ScheduleError as exc:
            raise UsageError(f"{path}: {exc}") from None
    else:
        sched = default_schedule()
    if args.beta is not None:
        sched = sched.with_beta(args.beta)
    return sched


def _grid(args) -> tuple[float, ...]:
    from .experiment import PAPER_GRID, linear_grid

    if args.grid_points:
        return linear_grid(args.grid_points)
    if args.grid:
        try:
            return tuple(float(x) for x in args.grid.split(","))
        except ValueError:
            raise UsageError(f"bad --grid {args.grid!r}") from None
    return PAPER_GRID


def _sweep_config(args):
    from .experiment import ExperimentError, MimicConfig, SweepConfig
    from .thermal import ProbeParams, QmcParams, ThermalError

    try:
        return SweepConfig(
            s_grid=_grid(args),
            schedule=_schedule(args),
            method=args.method,
            seed=args.seed,
            probes=ProbeParams(args.probes, args.krylov_dim, args.seed),
            qmc=QmcParams(dtau=args.dtau, sweeps=args.sweeps, thermalize=max(args.sweeps // 10, 1), seed=args.seed),
            mimic=MimicConfig(args.gauges, args.anneals, args.resamples, 0.95, args.seed),
        )
    except (ExperimentError, ThermalError) as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# Outputs
# ---------------------------------------------------------------------------


class Output:
    """Collects named outputs; writes them (plus a manifest) under ``--out`` or prints them."""

    def __init__(self, args, command: str):
        self.args = args
        self.command = command
        self.files: dict[str, str] = {}
        self.inputs: dict[str, str] = {}
        self.config: dict = {}
        self.start = time.perf_counter()

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def finish(self) -> None:
        out = self.args.out
        if out is None:
            for name, text in self.files.items():
                if len(self.files) > 1:
                    print(f"# {name}")
                sys.stdout.write(text if text.endswith("\n") else text + "\n")
            return
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            (d / name).write_text(text if text.endswith("\n") else text + "\n")
        manifest = {
            "command": self.command,
            "argv": sys.argv[1:],
            "config": self.config,
            "seed": self.args.seed,
            "version": __version__,
            "inputs": self.inputs,
            "outputs": sorted(self.files),
            "wall_time": round(time.perf_counter() - self.start, 3),
        }
        (d / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True, default=str) + "\n")
        print(f"wrote {len(self.files)} file(s) and manifest.json to {d}")


def _fmt(args, csv_text: str, json_text: str) -> tuple[str, str]:
    return ("csv", csv_text) if args.format == "csv" else ("json", json_text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_spectrum(args, out: Output) -> int:
    from .polynomial import SpectrumError, classical_spectrum_auto

    specs = _graph_specs(args)
    if len(specs) != 1:
        raise UsageError("spectrum takes exactly one graph (a file or --catalog NAME)")
    name, g, digest = _load_graph(specs[0])
    out.inputs[name] = digest
    try:
        poly = classical_spectrum_auto(g)
    except SpectrumError as exc:
        raise ComputationError(str(exc)) from None
    out.add(f"{name}.spectrum.json", poly.to_json())
    if args.compare:
        other, g2, d2 = _load_graph(args.compare)
        out.inputs[other] = d2
        same = classical_spectrum_auto(g2) == poly
        out.add("compare.txt", f"CO-ISING: {'true' if same else 'false'}")
    return EXIT_OK


def cmd_check(args, out: Output) -> int:
    from .graph import are_isomorphic
    from .polynomial import co_ising

    specs = _graph_specs(args)
    if len(specs) != 2:
        raise UsageError("check takes exactly two graphs")
    (n1, g1, d1), (n2, g2, d2) = (_load_graph(s) for s in specs)
    out.inputs.update({n1: d1, n2: d2})
    iso, perm = are_isomorphic(g1, g2)
    result = {
        "pair": [n1, n2],
        "co_ising": co_ising(g1, g2),
        "isomorphic": iso,
        "witness": None if perm is None else list(perm.mapping),
    }
    out.add("check.json", json.dumps(result, indent=1))
    return EXIT_OK


def cmd_compose(args, out: Output) -> int:
    from .polynomial import RootedGraph, compose_rooted, rooted_spectrum, vertex_identify

    (n1, g1, d1), (n2, g2, d2) = _load_graph(args.first), _load_graph(args.second)
    out.inputs.update({n1: d1, n2: d2})
    try:
        r1, r2 = RootedGraph(g1, args.root1), RootedGraph(g2, args.root2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    joined = vertex_identify(r1, r2)
    poly = rooted_spectrum(joined)
    law = compose_rooted(rooted_spectrum(r1), rooted_spectrum(r2)) == poly
    out.add("composite.txt", joined.graph.to_text())
    out.add("composite.rooted_spectrum.json", poly.to_json())
    out.add("composition_law.txt", f"COMPOSITION LAW HOLDS: {'true' if law else 'false'}")
    return EXIT_OK if law else EXIT_FAIL


def cmd_search_trees(args, out: Output) -> int:
    from .trees import MAX_TREE_ORDER, find_co_rooted_trees

    if not 1 <= args.max_n <= MAX_TREE_ORDER:
        raise UsageError(f"--max-n must be in 1..{MAX_TREE_ORDER}")
    pairs = find_co_rooted_trees(args.max_n)
    doc = [
        {"n": a.graph.n, "first": {"edges": [list(e) for e in a.graph.edges], "root": a.root},
         "second": {"edges": [list(e) for e in b.graph.edges], "root": b.root}}
        for a, b in pairs
    ]
    out.config = {"max_n": args.max_n}
    out.add("co_rooted_trees.json", json.dumps(doc, indent=1))
    return EXIT_OK


def _describe(cfg) -> dict:
    return {
        "s_grid": list(cfg.s_grid),
        "schedule": cfg.schedule.describe(),
        "method": cfg.method,
        "probes": [cfg.probes.num_probes, cfg.probes.krylov_dim],
        "qmc": {"dtau": cfg.qmc.dtau, "sweeps": cfg.qmc.sweeps, "replicas": cfg.qmc.replicas},
        "mimic": {"gauges": cfg.mimic.num_gauges, "anneals": cfg.mimic.anneals_per_gauge,
                  "resamples": cfg.mimic.bootstrap_resamples},
    }


def cmd_sweep(args, out: Output) -> int:
    from .experiment import ExperimentError, curves_to_csv, curves_to_json, sweep
    from .thermal import ThermalError

    specs = _graph_specs(args)
    if not specs:
        raise UsageError("sweep needs at least one graph")
    cfg = _sweep_config(args)
    out.config = _describe(cfg)
    loaded = [_load_graph(s) for s in specs]
    if args.dry_run:
        return EXIT_OK
    for name, g, digest in loaded:
        out.inputs[name] = digest
        try:
            curves = sweep(g, cfg, name)
        except (ExperimentError, ThermalError) as exc:
            raise ComputationError(str(exc)) from None
        ext, text = _fmt(args, curves_to_csv(curves), curves_to_json(curves))
        out.add(f"{name}.curves.{ext}", text)
    return EXIT_OK


def _embeddings_for(loaded, k: int, m: int, seed: int):
    from .chimera import chimera_graph, find_native_embeddings

    topo = chimera_graph(m)
    embs = {}
    for name, g, _ in loaded:
        res = find_native_embeddings(g, topo, k, seed, name=name)
        if len(res.embeddings) < k:
            raise ComputationError(f"found only {len(res.embeddings)} of {k} embeddings for {name}")
        embs[name] = [e.assignment for e in res.embeddings]
    return embs


def cmd_discriminate(args, out: Output) -> int:
    from .experiment import ExperimentError, curves_to_csv, curves_to_json, discriminate, verdicts_to_json
    from .thermal import ThermalError

    specs = _graph_specs(args)
    if len(specs) < 2:
        raise UsageError("discriminate needs at least two graphs")
    cfg = _sweep_config(args)
    out.config = _describe(cfg) | {"embeddings": args.embeddings}
    loaded = [_load_graph(s) for s in specs]
    if args.dry_run:
        return EXIT_OK
    graphs = {}
    for name, g, digest in loaded:
        out.inputs[name] = digest
        graphs[name] = g
    embs = _embeddings_for(loaded, args.embeddings, args.m, args.seed) if args.embeddings else None
    try:
        verdicts, curves = discriminate(graphs, cfg, embs)
    except (ExperimentError, ThermalError) as exc:
        raise ComputationError(str(exc)) from None
    out.add("verdicts.json", verdicts_to_json(verdicts))
    every = [c for name in graphs for c in curves[name]]
    ext, text = _fmt(args, curves_to_csv(every), curves_to_json(every))
    out.add(f"curves.{ext}", text)
    return EXIT_OK


def cmd_mimic(args, out: Output) -> int:
    import numpy as np

    from .experiment import ExperimentError, bootstrap, mimic_run
    from .thermal import OBSERVABLES

    specs = _graph_specs(args)
    if len(specs) != 1:
        raise UsageError("mimic takes exactly one graph")
    cfg = _sweep_config(args)
    out.config = _describe(cfg) | {"s_p": args.sp}
    name, g, digest = _load_graph(specs[0])
    out.inputs[name] = digest
    if args.dry_run:
        return EXIT_OK
    try:
        rows = mimic_run(g, args.sp, cfg.mimic, cfg)
    except ExperimentError as exc:
        raise ComputationError(str(exc)) from None
    lines = ["gauge,signs," + ",".join(OBSERVABLES)]
    for k, (vals, signs) in enumerate(zip(rows.values, rows.signs)):
        mask = "".join("+" if x > 0 else "-" for x in signs)
        lines.append(f"{k},{mask}," + ",".join(repr(float(v)) for v in vals))
    summary = {}
    for j, obs in enumerate(OBSERVABLES):
        b = bootstrap(rows.values[:, j], cfg.mimic.bootstrap_resamples, cfg.mimic.confidence, args.seed + j)
        summary[obs] = {"mean": b.mean, "ci_low": b.ci_low, "ci_high": b.ci_high,
                        "stderr": float(np.std(rows.values[:, j], ddof=1) / np.sqrt(len(rows.values)))}
    out.add(f"{name}.gauges.csv", "\n".join(lines))
    out.add(f"{name}.summary.json", json.dumps({"graph": name, "s_p": args.sp, "observables": summary}, indent=1))
    return EXIT_OK


def cmd_embed(args, out: Output) -> int:
    from .chimera import chimera_graph, find_native_embeddings

    specs = _graph_specs(args)
    if not specs:
        raise UsageError("embed needs at least one graph")
    loaded = [_load_graph(s) for s in specs]
    out.config = {"m": args.m, "k": args.k}
    if args.dry_run:
        return EXIT_OK
    topo = chimera_graph(args.m)
    status = EXIT_OK
    for name, g, digest in loaded:
        out.inputs[name] = digest
        res = find_native_embeddings(g, topo, args.k, args.seed, name=name)
        for i, e in enumerate(res.embeddings):
            out.add(f"{name}.embedding{i}.json", e.to_json())
        if len(res.embeddings) < args.k:
            print(f"{name}: found {len(res.embeddings)} of {args.k} embeddings"
                  + (" (budget exhausted)" if res.exhausted else ""), file=sys.stderr)
            status = EXIT_FAIL
    return status


def cmd_catalog(args, out: Output) -> int:
    from .catalog import TUPLES

    if not args.names:
        lines = [f"{t}: {' '.join(members)}" for t, members in TUPLES.items()]
        out.add("catalog.txt", "\n".join(lines))
        return EXIT_OK
    for spec in args.names:
        name, g, digest = _load_graph(spec)
        out.inputs[name] = digest
        out.add(f"{name}.txt" if args.format == "csv" else f"{name}.json",
                g.to_text() if args.format == "csv" else g.to_json())
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_graphs(p: argparse.ArgumentParser, nargs="*") -> None:
    p.add_argument("graphs", nargs=nargs, metavar="GRAPH", help="graph files or catalog names")
    p.add_argument("--catalog", help="comma-separated catalog names (G13, G13p, G13i, ...)")


def _add_physics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--schedule", help="CSV with header s,A,B (default: $COISING_SCHEDULE or linear)")
    p.add_argument("--beta", type=float, help="inverse temperature override")
    p.add_argument("--grid", help="comma-separated pause points (default 0.1,...,0.9)")
    p.add_argument("--grid-points", type=int, help="evenly spaced grid on [0, 1] with this many points")
    p.add_argument("--method", choices=("dense", "stochastic", "qmc", "sampled"), default="dense")
    p.add_argument("--probes", type=int, default=50, help="stochastic: random probe vectors")
    p.add_argument("--krylov-dim", type=int, default=80, help="stochastic: Krylov dimension")
    p.add_argument("--sweeps", type=int, default=20000, help="qmc: measurement sweeps")
    p.add_argument("--dtau", type=float, default=0.02, help="qmc: imaginary-time step")
    p.add_argument("--gauges", type=int, default=200, help="sampled: random gauges")
    p.add_argument("--anneals", type=int, default=1000, help="sampled: samples per gauge")
    p.add_argument("--resamples", type=int, default=1000, help="sampled: bootstrap resamples")


def build_parser() -> argparse.ArgumentParser:
    def globals_(defaults: bool) -> argparse.ArgumentParser:
        # subcommands re-declare the global flags without defaults, so a value
        # given before the command name is not reset by the subparser
        p = argparse.ArgumentParser(add_help=False)
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        p.add_argument("--seed", type=int, default=d(0), help="master random seed")
        p.add_argument("--threads", type=int, default=d(None), help="cap on worker threads")
        p.add_argument("--out", default=d(None), help="directory for output files and manifest")
        p.add_argument("--format", choices=("csv", "json"), default=d("csv"))
        p.add_argument("--dry-run", action="store_true", default=d(False), help="validate inputs without computing")
        return p

    common = globals_(False)
    parser = argparse.ArgumentParser(prog="coising", description=__doc__.splitlines()[0], parents=[globals_(True)])
    parser.add_argument("--version", action="version", version=f"coising {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="Ising polynomial of a graph")
    _add_graphs(p)
    p.add_argument("--compare", metavar="GRAPH", help="report whether a second graph is co-Ising")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("check", parents=[common], help="co-Ising and isomorphism test for two graphs")
    _add_graphs(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compose", parents=[common], help="glue two rooted graphs at their roots")
    p.add_argument("first")
    p.add_argument("root1", type=int)
    p.add_argument("second")
    p.add_argument("root2", type=int)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("search-trees", parents=[common], help="pairs of co-rooted trees")
    p.add_argument("--max-n", type=int, required=True)
    p.set_defaults(func=cmd_search_trees)

    p = sub.add_parser("sweep", parents=[common], help="observable curves over pause points")
    _add_graphs(p)
    _add_physics(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("discriminate", parents=[common], help="pairwise distinguishability verdicts")
    _add_graphs(p)
    _add_physics(p)
    p.add_argument("--embeddings", type=int, default=0, help="average over this many Chimera embeddings")
    p.add_argument("--m", type=int, default=16, help="Chimera size for --embeddings")
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("mimic", parents=[common], help="per-gauge sampled observables at one pause point")
    _add_graphs(p)
    _add_physics(p)
    p.add_argument("--sp", type=float, required=True, help="pause point")
    p.set_defaults(func=cmd_mimic)

    p = sub.add_parser("embed", parents=[common], help="native Chimera embeddings")
    _add_graphs(p)
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--k", type=int, default=5)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("catalog", parents=[common], help="list catalog tuples or print graphs")
    p.add_argument("names", nargs="*")
    p.set_defaults(func=cmd_catalog)
    return parser


def _limit_threads(n: int | None) -> None:
    """Cap BLAS/OpenMP pools; the numba kernels are single-threaded already."""
    if not n:
        return
    from threadpoolctl import threadpool_limits

    threadpool_limits(n)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _limit_threads(args.threads)
    out = Output(args, args.command)
    try:
        code = args.func(args, out)
    except UsageError as exc:
        print(f"coising {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComputationError as exc:
        print(f"coising {args.command}: computation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.dry_run:
        print(f"dry run: inputs for {args.command} are valid")
        return code
    out.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
