"""Command-line front end: ``localhit <subcommand> [options]``.

Exit codes: 0 success, 1 usage or input error, 2 estimator failure after
retries, 3 exact oracle infeasible for the graph size.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bench as B
from .exact import OracleCapError, exact_effective_resistance, hitting_time
from .generators import (
    complete_graph,
    cycle_graph,
    generate_ba,
    generate_barbell,
    generate_er,
    generate_sbm,
    path_graph,
    star_graph,
)
from .graph import Graph, GraphError, load_graph, read_edge_list, write_edge_list
from .mixing import binary_search_mixing, mixing_test
from .pairs import STRATEGIES
from .walks import THREADS_ENV, threads

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_INFEASIBLE = 0, 1, 2, 3
DATA_DIR = Path(__file__).parent / "data"

# Built-in values of the shared flags; a config file may override them, flags override both.
COMMON_DEFAULTS = {
    "seed": 0,
    "threads": None,
    "walks": 10_000,
    "t_max": None,
    "epsilon": 0.1,
    "lambda_": "auto",
    "t_mix": "auto",
    "out": None,
    "graph": None,
}

log = logging.getLogger("localhit")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _auto_or_float(s: str):
    if s == "auto":
        return s
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {s!r}") from None


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--graph", action="append", help="edge list (.txt) or saved graph (.npz); "
                   "'football' for the bundled graph if present. Repeatable for bench.")
    g.add_argument("--seed", type=int)
    g.add_argument("--threads", type=int, help=f"thread count (default: ${THREADS_ENV} or all cores)")
    g.add_argument("--walks", type=int)
    g.add_argument("--t-max", type=int, dest="t_max")
    g.add_argument("--epsilon", type=float)
    g.add_argument("--lambda", type=_auto_or_float, dest="lambda_", metavar="NUM|auto")
    g.add_argument("--t-mix", type=_auto_or_float, dest="t_mix", metavar="NUM|auto")
    g.add_argument("--out", help="output path")
    g.add_argument("--config", help="JSON file with defaults for the options above")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = _Parser(prog="localhit", description="Local hitting-time estimation toolkit.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="write a synthetic graph as an edge list")
    g.add_argument("model", choices=["er", "ba", "sbm", "barbell", "complete", "path", "cycle", "star"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, default=0.01)
    g.add_argument("--k", type=int, default=10)
    g.add_argument("--blocks", type=int, default=5)
    g.add_argument("--p-intra", type=float, default=0.05)
    g.add_argument("--p-inter", type=float, default=0.01)

    e = sub.add_parser("exact", parents=[common], help="print H(u,v), H(v,u) and R_eff(u,v)")
    e.add_argument("u")
    e.add_argument("v")

    s = sub.add_parser("estimate", parents=[common], help="estimate H(u,v)")
    s.add_argument("u")
    s.add_argument("v")
    s.add_argument("--algo", choices=B.ALGOS, default="meeting")
    s.add_argument("--retries", type=int, default=3)
    s.add_argument("--with-exact", action="store_true", help="also print the exact value")

    b = sub.add_parser("bench", parents=[common], help="estimators vs. reference, CSV out")
    b.add_argument("--samplers", default=",".join(STRATEGIES))
    b.add_argument("--algos", default=",".join(B.ALGOS))
    b.add_argument("--pairs", type=int, default=50)
    b.add_argument("--repeats", type=int, default=1)
    b.add_argument("--no-exact", action="store_true",
                   help="reference = mean of 100 meeting-time runs instead of the exact solver")
    b.add_argument("--timing", action="store_true", help="record wall times (output no longer byte-stable)")
    b.add_argument("--size-sweep", choices=["er", "ba", "sbm"], help="sweep synthetic graph sizes instead")
    b.add_argument("--sizes", type=_int_list, default=[200, 400, 600, 800, 1000])
    b.add_argument("--walk-counts", type=_int_list, help="sweep walk counts on --graph instead")

    lb = sub.add_parser("lowerbound", parents=[common], help="barbell variance study")
    lb.add_argument("--n-list", type=_int_list, default=[4, 6, 8, 10, 12])
    lb.add_argument("--r-list", type=_int_list, default=[1, 2, 4])
    lb.add_argument("--repeats", type=int, default=2000)

    pb = sub.add_parser("parallel-bench", parents=[common], help="meeting-time wall time vs threads")
    pb.add_argument("--threads-list", type=_int_list, default=[1, 2, 4, 8])
    pb.add_argument("--ba", type=_int_list, metavar="N,K", help="use a BA(N, K) graph instead of --graph")
    pb.add_argument("--pair", type=_int_list, metavar="U,V")
    pb.add_argument("--repeats", type=int, default=5)

    mt = sub.add_parser("mix-test", parents=[common], help="(eps, t)-mixing test or bisection")
    mt.add_argument("--t", type=int, help="test this t; omit to bisect for the smallest accepted t")
    mt.add_argument("--t-hi", type=int)
    mt.add_argument("--delta", type=float, default=0.1)
    return p


# --------------------------------------------------------------------------------------


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise UsageError("config file must hold a JSON object")
    out = {}
    for k, val in raw.items():
        key = k.replace("-", "_")
        key = "lambda_" if key == "lambda" else key
        if key not in COMMON_DEFAULTS:
            raise UsageError(f"unknown config key {k!r}")
        out[key] = val
    return out


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset shared options from the config file, then the built-in defaults."""
    cfg = _load_config(args.config)
    for key, default in COMMON_DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, cfg.get(key, default))
    if isinstance(args.graph, str):
        args.graph = [args.graph]
    return args


def load_any(source: str) -> tuple[str, Graph]:
    if source == "football":
        path = DATA_DIR / "football.txt"
        if not path.exists():
            raise UsageError("the Football graph is not bundled with this installation; pass an edge list")
    else:
        path = Path(source)
    if not path.exists():
        raise UsageError(f"no such graph file: {source}")
    G = load_graph(path) if path.suffix == ".npz" else read_edge_list(path)
    return path.stem, G


def _one_graph(args) -> tuple[str, Graph]:
    if not args.graph:
        raise UsageError("--graph is required")
    return load_any(args.graph[0])


def node_index(G: Graph, label: str) -> int:
    """Internal index of a node given by its id in the input file."""
    try:
        x = int(label)
    except ValueError:
        raise UsageError(f"node ids are integers, got {label!r}") from None
    if G.labels is None:
        if not 0 <= x < G.n:
            raise UsageError(f"node {x} out of range")
        return x
    i = int(np.searchsorted(G.labels, x))
    if i >= G.n or G.labels[i] != x:
        raise UsageError(f"node {x} not in graph")
    return i


def algo_config(args) -> B.AlgoConfig:
    lam = None if args.lambda_ == "auto" else float(args.lambda_)
    t_mix = None if args.t_mix == "auto" else float(args.t_mix)
    return B.AlgoConfig(walks=int(args.walks), t_max=args.t_max, epsilon=float(args.epsilon),
                        lam=lam, t_mix=t_mix, retries=getattr(args, "retries", 3))


def _fmt(x) -> str:
    return f"{x:.10g}"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------------------


def cmd_generate(args) -> int:
    if not args.out:
        raise UsageError("generate needs --out")
    seed, n = args.seed, args.n
    landmarks = None
    if args.model == "er":
        G = generate_er(n, args.p, seed)
    elif args.model == "ba":
        G = generate_ba(n, args.k, seed)
    elif args.model == "sbm":
        sizes = [n // args.blocks + (1 if i < n % args.blocks else 0) for i in range(args.blocks)]
        G = generate_sbm(sizes, args.p_intra, args.p_inter, seed)
    elif args.model == "barbell":
        bb = generate_barbell(n)
        G, landmarks = bb.graph, bb.landmarks()
    else:
        G = {"complete": complete_graph, "path": path_graph, "cycle": cycle_graph,
             "star": star_graph}[args.model](n)
    write_edge_list(G, args.out, header=f"model={args.model} seed={seed}")
    if landmarks is not None:
        Path(str(args.out) + ".landmarks.json").write_text(json.dumps(landmarks, indent=1))
    print(f"wrote {args.out}: n={G.n} m={G.m}")
    return EXIT_OK


def cmd_exact(args) -> int:
    _, G = _one_graph(args)
    u, v = node_index(G, args.u), node_index(G, args.v)
    huv, hvu = hitting_time(G, u, v), hitting_time(G, v, u)
    r = exact_effective_resistance(G, u, v)
    print(f"H(u,v)\t{_fmt(huv)}\nH(v,u)\t{_fmt(hvu)}\nR_eff\t{_fmt(r)}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    gid, G = _one_graph(args)
    u, v = node_index(G, args.u), node_index(G, args.v)
    cfg = algo_config(args)
    if args.algo == "sampling" and cfg.walks < 30:
        warnings.warn(f"walk sampling with {cfg.walks} walk(s): estimate has the full variance "
                      "of a single hitting time", RuntimeWarning, stacklevel=1)
    ctx = B.GraphContext(gid, G)
    est = B.run_algo(ctx, u, v, args.algo, cfg, args.seed)
    if est.failed:
        print(f"estimate failed: walkers still alive after {cfg.retries} retries "
              f"(last t_max={est.info.get('t_max')})", file=sys.stderr)
        return EXIT_FAILED
    print(f"algo\t{args.algo}\nestimate\t{_fmt(est.value)}\nwalks\t{est.walks_used}\n"
          f"steps\t{est.total_steps}\nwall_time\t{est.wall_time:.4f}")
    if args.with_exact:
        h = ctx.exact(u, v)
        print(f"exact\t{_fmt(h)}\nrel_error\t{_fmt(abs(est.value - h) / h if h else 0.0)}")
    return EXIT_OK


def _write_bench(records, args):
    cells = B.summarize(records)
    problems = B.validate_summary(records, cells)
    if problems:
        raise RuntimeError("summary validation failed: " + "; ".join(problems))
    if args.out:
        B.write_records(records, args.out)
        spath = Path(args.out).with_suffix(".summary.csv")
        B.write_summary(cells, spath)
        # post-hoc check against what actually landed on disk
        problems = B.validate_summary(B.read_records(args.out), B.read_summary(spath))
        if problems:
            raise RuntimeError("on-disk summary validation failed: " + "; ".join(problems))
        print(f"wrote {len(records)} rows to {args.out} and summary to {spath}")
    else:
        sys.stdout.write(B.records_to_csv(records))
    for c in cells:
        print(c, file=sys.stderr if not args.out else sys.stdout)


def cmd_bench(args) -> int:
    cfg = algo_config(args)
    algos = [a for a in args.algos.split(",") if a]
    if args.size_sweep:
        recs = B.size_sweep(args.size_sweep, args.sizes, algos, repeats=args.repeats, cfg=cfg,
                            seed=args.seed, timing=True)
    elif args.walk_counts:
        gid, G = _one_graph(args)
        recs = B.walk_sweep(gid, G, args.walk_counts, algos, pairs=args.pairs, repeats=args.repeats,
                            cfg=cfg, seed=args.seed, timing=True)
    else:
        if not args.graph:
            raise UsageError("--graph is required")
        graphs = [load_any(gs) for gs in args.graph]
        samplers = [s for s in args.samplers.split(",") if s]
        for s in samplers:
            if s not in STRATEGIES:
                raise UsageError(f"unknown sampler {s!r}")
        recs = B.run_bench(graphs, samplers, algos, pairs=args.pairs, repeats=args.repeats, cfg=cfg,
                           seed=args.seed, exact=not args.no_exact, timing=args.timing)
    _write_bench(recs, args)
    return EXIT_OK


def cmd_lowerbound(args) -> int:
    rows, fit = B.lowerbound_study(args.n_list, args.r_list, repeats=args.repeats, seed=args.seed)
    if args.out:
        B.write_dataclass_rows(rows, args.out)
    else:
        for r in rows:
            print(r)
    print(f"H exponent\t{fit['h_exponent']:.3f}\nvariance exponent\t{fit['var_exponent']:.3f}")
    return EXIT_OK


def cmd_parallel_bench(args) -> int:
    if args.ba:
        if len(args.ba) != 2:
            raise UsageError("--ba takes N,K")
        G = generate_ba(args.ba[0], args.ba[1], args.seed)
    else:
        _, G = _one_graph(args)
    u, v = (args.pair if args.pair else (0, G.n - 1))
    rows, identical = B.parallel_bench(G, u, v, args.threads_list, walks=args.walks,
                                       t_max=args.t_max or 10**6, repeats=args.repeats, seed=args.seed)
    print(f"# cores available: {B.cpu_count()}")
    print("threads\tgranted\tmean_s\tsd_s\testimate")
    for r in rows:
        print(f"{r.threads}\t{r.threads_effective}\t{r.mean_time:.4f}\t{r.sd_time:.4f}\t{r.estimate!r}")
    print(f"identical estimates across thread counts: {identical}")
    return EXIT_OK if identical else EXIT_FAILED


def cmd_mix_test(args) -> int:
    _, G = _one_graph(args)
    eps = args.epsilon
    if args.t is not None:
        res = mixing_test(G, args.t, eps, args.delta, seed=args.seed)
        print(f"t\t{res.t}\nverdict\t{'accept' if res.accept else 'reject'}\n"
              f"starts\t{res.starts_tested}{' (subsampled)' if res.subsampled else ''}\n"
              f"samples\t{res.samples_used}")
    else:
        t = binary_search_mixing(G, eps, args.delta, t_hi=args.t_hi, seed=args.seed)
        print(f"t_mix_estimate\t{t}")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "exact": cmd_exact,
    "estimate": cmd_estimate,
    "bench": cmd_bench,
    "lowerbound": cmd_lowerbound,
    "parallel-bench": cmd_parallel_bench,
    "mix-test": cmd_mix_test,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve(args)
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"localhit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with threads(args.threads):
            return COMMANDS[args.cmd](args)
    except OracleCapError as exc:
        print(f"localhit: oracle infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except B.EstimatorFailure as exc:
        print(f"localhit: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (UsageError, GraphError, OSError, ValueError) as exc:
        print(f"localhit: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
