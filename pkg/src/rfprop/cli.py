"""Command-line interface.

Four subcommands: ``pe`` exports positional encodings, ``eigcheck`` prints
a convergence report against the dense reference spectrum, ``count`` runs
the substructure counters, and ``bench`` times propagation on synthetic
regular graphs.

Exit codes are part of the contract:

    0  success
    2  argument errors (including semantic ones like k > n)
    3  I/O errors and malformed input files
    4  numeric faults (overflow, rank collapse, undefined ratios)
    5  eigcheck finished without reaching the angle tolerance
    6  a dense-oracle computation was requested above its size cap
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .counting import (
    closed_walks,
    count_with_guarantee,
    hutchinson_trace,
    quadrangle_exact,
    triangle_estimate,
    triangle_exact,
)
from .diagnostics import convergence_report
from .errors import EdgeListError, OracleCapError
from .formats import (
    read_features_any,
    sha256_file,
    write_features_csv,
    write_features_rfpf,
    write_manifest,
)
from .graph import (
    load_edge_list,
    operator_from_name,
    random_regular_graph,
    raw_adjacency,
)
from .linalg import ORACLE_CAP, spmm
from .propagation import (
    RfpConfig,
    assemble_features,
    random_block,
    run_trajectory,
    run_trajectory_set,
)

EXIT_OK = 0
EXIT_ARGS = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_NOT_CONVERGED = 5
EXIT_ORACLE_CAP = 6


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfprop",
        description="Positional encodings and substructure counts from "
        "propagated random features.",
    )
    parser.add_argument("--version", action="version", version=f"rfprop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("pe", help="export positional-encoding features")
    pe.add_argument("--graph", required=True, help="edge-list file")
    pe.add_argument(
        "--operator", choices=["adj-norm", "lap-norm", "adj-raw"], default="adj-norm"
    )
    pe.add_argument("--k", type=int, required=True, help="columns per trajectory")
    pe.add_argument("--steps", type=int, required=True, help="propagation steps")
    pe.add_argument("--norm", choices=["l2", "qr", "none"], default="qr")
    pe.add_argument("--norm-every", type=int, default=1, help="steps between renormalizations")
    pe.add_argument("--dist", choices=["normal", "rademacher"], default="normal")
    pe.add_argument("--trajectories", type=int, default=1)
    pe.add_argument("--seed", type=int, default=0)
    pe.add_argument("--features", help="optional input features (CSV or RFPF) to prepend")
    pe.add_argument("--out", required=True, help="output path")
    pe.add_argument("--format", choices=["rfpf", "csv"], default="rfpf")
    pe.add_argument("--workers", type=int, default=1, help="threads; never changes output")
    pe.set_defaults(func=cmd_pe)

    eig = sub.add_parser("eigcheck", help="convergence report against the dense spectrum")
    eig.add_argument("--graph", required=True)
    eig.add_argument(
        "--operator", choices=["adj-norm", "lap-norm", "adj-raw"], default="adj-norm"
    )
    eig.add_argument("--k", type=int, required=True)
    eig.add_argument("--steps", type=int, required=True)
    eig.add_argument("--seed", type=int, default=0)
    eig.add_argument("--tolerance", type=float, default=1e-6, help="angle threshold, radians")
    eig.set_defaults(func=cmd_eigcheck)

    count = sub.add_parser("count", help="count triangles, quadrangles or closed walks")
    count.add_argument("--graph", required=True)
    count.add_argument(
        "--what", choices=["triangles", "quadrangles", "walks"], required=True
    )
    count.add_argument("--walk-length", type=int, help="length for --what walks")
    count.add_argument(
        "--mode", choices=["exact", "estimate", "guaranteed"], default="exact"
    )
    count.add_argument("--samples", type=int, default=1000, help="probes in estimate mode")
    count.add_argument("--epsilon", type=float, default=0.5)
    count.add_argument("--delta", type=float, default=0.1)
    count.add_argument("--seed", type=int, default=0)
    count.set_defaults(func=cmd_count)

    bench = sub.add_parser("bench", help="time propagation on random regular graphs")
    bench.add_argument(
        "--sizes",
        nargs="+",
        required=True,
        metavar="N,M",
        help="one or more n,m pairs for synthetic d-regular graphs (d = 2m/n)",
    )
    bench.add_argument("--k", type=int, default=8)
    bench.add_argument("--steps", type=int, default=8)
    bench.add_argument("--repeats", type=int, default=3)
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(func=cmd_bench)

    return parser


def cmd_pe(args) -> int:
    graph = load_edge_list(args.graph)
    op = operator_from_name(args.operator, graph)
    cfg = RfpConfig(
        k=args.k,
        steps=args.steps,
        normalization=args.norm,
        norm_every=args.norm_every,
        distribution=args.dist,
        trajectories=args.trajectories,
        seed=args.seed,
    )
    f_in = None
    if args.features:
        f_in = read_features_any(args.features)
        if f_in.shape[0] != graph.n:
            raise ValueError(
                f"input features have {f_in.shape[0]} rows but the graph "
                f"has {graph.n} nodes"
            )
    started = time.perf_counter()
    runs = run_trajectory_set(op, cfg, workers=args.workers)
    features = assemble_features(runs, f_in)
    wall = time.perf_counter() - started
    if args.format == "rfpf":
        write_features_rfpf(args.out, features)
    else:
        write_features_csv(args.out, features)
    manifest_path = args.out + ".manifest"
    manifest = {
        "toolkit_version": __version__,
        "graph": args.graph,
        "graph_sha256": sha256_file(args.graph),
        "operator": args.operator,
        "k": cfg.k,
        "steps": cfg.steps,
        "normalization": cfg.normalization,
        "norm_every": cfg.norm_every,
        "distribution": cfg.distribution,
        "trajectories": cfg.trajectories,
        "seed": cfg.seed,
        "features_in": args.features or "",
        "format": args.format,
        "n": features.shape[0],
        "d": features.shape[1],
        "wall_time_s": f"{wall:.6f}",
        "outputs": args.out,
    }
    write_manifest(manifest_path, manifest)
    print(f"wrote {args.out} (n={features.shape[0]}, d={features.shape[1]})")
    return EXIT_OK


def cmd_eigcheck(args) -> int:
    graph = load_edge_list(args.graph)
    if graph.n > ORACLE_CAP:
        raise OracleCapError(graph.n, ORACLE_CAP, what="eigcheck oracle")
    op = operator_from_name(args.operator, graph)
    cfg = RfpConfig(
        k=args.k,
        steps=args.steps,
        normalization="qr",
        norm_every=1,
        distribution="normal",
        trajectories=1,
        seed=args.seed,
    )
    trajectory = run_trajectory(op, cfg, 0)
    report = convergence_report(op, trajectory, tolerance=args.tolerance)
    print("p\tmax_angle\tresidual")
    for row in report.per_step:
        angle = "" if row.max_principal_angle is None else repr(row.max_principal_angle)
        print(f"{row.p}\t{angle}\t{row.eigen_residual!r}")
    gap = "" if report.oracle_gap is None else repr(report.oracle_gap)
    print(f"oracle_gap={gap}")
    print(f"degenerate={str(report.degenerate).lower()}")
    print(f"converged_at={'' if report.converged_at is None else report.converged_at}")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_count(args) -> int:
    graph = load_edge_list(args.graph)
    lines = [f"what={args.what}", f"mode={args.mode}"]
    if args.what == "triangles":
        if args.mode == "exact":
            lines.append(f"exact={triangle_exact(graph)}")
        elif args.mode == "estimate":
            result = triangle_estimate(graph, args.samples, args.seed)
            lines.append(f"estimate={result.estimate!r}")
            lines.append(f"m_used={result.m_used}")
        else:
            result = count_with_guarantee(graph, args.epsilon, args.delta, args.seed)
            if result.warning:
                lines.append(f"warning={result.warning}")
            lines.append(f"estimate={result.estimate!r}")
            lines.append(f"exact={result.exact}")
            lines.append(f"epsilon={result.epsilon!r}")
            lines.append(f"delta={result.delta!r}")
            lines.append(f"m_used={result.m_used}")
            lines.append(
                f"m_required={'' if result.m_required is None else result.m_required}"
            )
    elif args.what == "quadrangles":
        if args.mode != "exact":
            raise ValueError("quadrangles support only --mode exact")
        lines.append(f"exact={quadrangle_exact(graph)}")
    else:
        if args.walk_length is None:
            raise ValueError("--what walks requires --walk-length")
        if args.mode == "exact":
            lines.append(f"exact={closed_walks(graph, args.walk_length)}")
        elif args.mode == "estimate":
            estimate = hutchinson_trace(
                raw_adjacency(graph), args.walk_length, args.samples, args.seed
            )
            lines.append(f"estimate={estimate.value!r}")
            lines.append(f"m_used={estimate.samples}")
        else:
            raise ValueError("walks support --mode exact or estimate")
    print("\n".join(lines))
    return EXIT_OK


def _parse_sizes(tokens) -> list:
    sizes = []
    for token in tokens:
        parts = token.split(",")
        if len(parts) != 2:
            raise ValueError(f"size {token!r} is not an n,m pair")
        try:
            n, m = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"size {token!r} is not an n,m pair") from None
        if n < 2 or m < 1:
            raise ValueError(f"size {token!r} must have n >= 2 and m >= 1")
        if (2 * m) % n != 0:
            raise ValueError(
                f"size {token!r} is not regular: 2m/n = {2 * m / n:.3f} "
                "must be an integer degree"
            )
        d = (2 * m) // n
        if d >= n:
            raise ValueError(f"size {token!r} needs degree {d} < n")
        sizes.append((n, m, d))
    return sizes


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    if args.repeats < 1:
        raise ValueError(f"repeats must be at least 1, got {args.repeats}")
    print("n\tm\td\tbest_s\tper_step_per_edge_s")
    per_edge_times = []
    for index, (n, m, d) in enumerate(sizes):
        graph = random_regular_graph(n, d, seed=args.seed + index)
        op = operator_from_name("adj-norm", graph)
        x0 = random_block("normal", args.seed, index, n, args.k)
        spmm(op, x0)  # warm up so the first timing does not pay setup costs
        best = float("inf")
        for _ in range(args.repeats):
            x = x0
            started = time.perf_counter()
            for _ in range(args.steps):
                x = spmm(op, x)
            best = min(best, time.perf_counter() - started)
        per_edge = best / (args.steps * m)
        per_edge_times.append(per_edge)
        print(f"{n}\t{m}\t{d}\t{best:.6f}\t{per_edge:.3e}")
    if len(sizes) > 1:
        ratio = max(per_edge_times) / min(per_edge_times)
        print(f"per_edge_ratio={ratio:.3f}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except OracleCapError as exc:
        print(f"rfprop: {exc}", file=sys.stderr)
        return EXIT_ORACLE_CAP
    except ArithmeticError as exc:
        # covers NumericFaultError plus builtin overflow from exact counters
        print(f"rfprop: numeric fault: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except EdgeListError as exc:
        print(f"rfprop: bad input: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"rfprop: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"rfprop: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except RuntimeError as exc:
        print(f"rfprop: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
