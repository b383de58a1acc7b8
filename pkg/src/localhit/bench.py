"""Benchmark harness: estimator-vs-oracle tables, sweeps, lower-bound and thread studies.

Every routine returns plain records and writes RFC-4180 CSV. Seeds are derived
per task from ``numpy.random.SeedSequence`` so output does not depend on the
order in which tasks run, and rows are sorted by a canonical key before writing.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
import os
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .estimators import (
    EstimatorParams,
    HtEstimate,
    cutoff_estimate,
    meeting_time_estimate,
    theoretical_params,
    walk_sampling_estimate,
)
from .exact import DENSE_SOLVE_CAP, SPECTRAL_CAP, OracleCapError, exact_hitting_to, spectral_info
from .generators import generate_ba, generate_barbell, generate_er, generate_sbm
from .graph import Graph, largest_component
from .pairs import STRATEGIES, PairSampler, sample_pairs
from .walks import sample_hitting_times, threads

__all__ = [
    "ALGOS",
    "AlgoConfig",
    "BenchRecord",
    "SummaryCell",
    "GraphContext",
    "EstimatorFailure",
    "derive_seed",
    "run_algo",
    "run_bench",
    "summarize",
    "validate_summary",
    "write_records",
    "read_records",
    "records_to_csv",
    "records_from_csv",
    "write_summary",
    "read_summary",
    "size_sweep",
    "walk_sweep",
    "LowerBoundRow",
    "lowerbound_study",
    "fit_exponent",
    "ParallelRow",
    "parallel_bench",
]

log = logging.getLogger(__name__)

ALGOS = ("meeting", "cutoff", "sampling")
# Reference runs in --no-exact mode.
REFERENCE_RUNS = 100
# Largest graph for which the exact oracle is attempted.
EXACT_CAP = 200_000


class EstimatorFailure(RuntimeError):
    """The meeting estimator failed even after doubling ``t_max`` on every retry."""


def derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(2, np.uint64)[0] >> np.uint64(1))


# --------------------------------------------------------------------------------------
# records and CSV
# --------------------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchRecord:
    """One estimator run. ``exact`` holds the reference value, whose provenance is
    ``reference`` ("exact" or "meeting100"). Errors are set iff a reference exists
    and the run did not fail."""

    graph_id: str
    n: int
    m: int
    u: int
    v: int
    sampler: str
    algo: str
    estimate: float | None
    exact: float | None
    rel_error: float | None
    abs_error: float | None
    walks: int
    steps: int
    wall_time: float | None
    seed: int
    failed: bool
    repeat: int = 0
    reference: str = "exact"

    def sort_key(self):
        return (self.graph_id, self.sampler, self.algo, self.walks, self.u, self.v, self.repeat, self.seed)


FIELDS = [f.name for f in dataclasses.fields(BenchRecord)]
_INT = {"n", "m", "u", "v", "walks", "steps", "seed", "repeat"}
_FLOAT = {"estimate", "exact", "rel_error", "abs_error", "wall_time"}


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _parse(name: str, s: str):
    if name in _FLOAT:
        return None if s == "" else float(s)
    if name in _INT:
        return int(s)
    if name == "failed":
        if s not in ("true", "false"):
            raise ValueError(f"bad boolean {s!r}")
        return s == "true"
    return s


def records_to_csv(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(FIELDS)
    for r in sorted(records, key=BenchRecord.sort_key):
        w.writerow([_fmt(getattr(r, f)) for f in FIELDS])
    return buf.getvalue()


def records_from_csv(text: str) -> list[BenchRecord]:
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows or rows[0] != FIELDS:
        raise ValueError("not a bench CSV (header mismatch)")
    return [BenchRecord(**{f: _parse(f, s) for f, s in zip(FIELDS, row)}) for row in rows[1:]]


def write_records(records: Iterable[BenchRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(records_to_csv(records))


def read_records(path) -> list[BenchRecord]:
    with open(path, newline="") as fh:
        return records_from_csv(fh.read())


@dataclass(frozen=True)
class SummaryCell:
    graph_id: str
    sampler: str
    algo: str
    count: int
    failed: int
    mean_rel_error: float
    sd_rel_error: float

    def __str__(self):
        return (f"{self.graph_id:>12} {self.sampler:>17} {self.algo:>9}  "
                f"{self.mean_rel_error:.3f} ± {self.sd_rel_error:.3f}  (n={self.count}, failed={self.failed})")


def summarize(records: Sequence[BenchRecord]) -> list[SummaryCell]:
    """Mean ± sd (ddof=1) of relative error per (graph, sampler, algo) cell."""
    cells: dict[tuple, list[BenchRecord]] = {}
    for r in records:
        cells.setdefault((r.graph_id, r.sampler, r.algo), []).append(r)
    out = []
    for key in sorted(cells):
        rows = cells[key]
        errs = np.array([r.rel_error for r in rows if r.rel_error is not None], dtype=float)
        mean = float(errs.mean()) if len(errs) else math.nan
        sd = float(errs.std(ddof=1)) if len(errs) > 1 else math.nan
        out.append(SummaryCell(*key, len(errs), sum(r.failed for r in rows), mean, sd))
    return out


def write_summary(cells: Sequence[SummaryCell], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        names = [f.name for f in dataclasses.fields(SummaryCell)]
        w.writerow(names)
        for c in cells:
            w.writerow([_fmt(getattr(c, f)) for f in names])


def read_summary(path) -> list[SummaryCell]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    names = [f.name for f in dataclasses.fields(SummaryCell)]
    if not rows or rows[0] != names:
        raise ValueError("not a summary CSV (header mismatch)")
    out = []
    for row in rows[1:]:
        g, s, a, c, f, mean, sd = row
        out.append(SummaryCell(g, s, a, int(c), int(f), float(mean), float(sd)))
    return out


def validate_summary(records: Sequence[BenchRecord], cells: Sequence[SummaryCell],
                     rtol: float = 1e-12) -> list[str]:
    """Recompute every summary cell from the raw rows; return a list of mismatches."""
    fresh = {(c.graph_id, c.sampler, c.algo): c for c in summarize(records)}
    problems = []
    for c in cells:
        f = fresh.pop((c.graph_id, c.sampler, c.algo), None)
        if f is None:
            problems.append(f"cell {c.graph_id}/{c.sampler}/{c.algo} has no rows")
            continue
        if (f.count, f.failed) != (c.count, c.failed):
            problems.append(f"cell {c.graph_id}/{c.sampler}/{c.algo}: counts differ")
        for a, b, what in ((f.mean_rel_error, c.mean_rel_error, "mean"), (f.sd_rel_error, c.sd_rel_error, "sd")):
            if not (math.isnan(a) and math.isnan(b)) and not math.isclose(a, b, rel_tol=rtol, abs_tol=1e-15):
                problems.append(f"cell {c.graph_id}/{c.sampler}/{c.algo}: {what} {b} != {a}")
    problems.extend(f"cell {'/'.join(k)} missing from summary" for k in fresh)
    return problems


# --------------------------------------------------------------------------------------
# running estimators
# --------------------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgoConfig:
    """Estimator settings shared by a bench run.

    ``walks`` is the ensemble size (meeting), walks per level (cutoff) and
    sample count (sampling). ``t_max`` caps meeting runs and truncates sampled
    walks; ``None`` means the theoretical cap. ``epsilon`` is the absolute
    accuracy that fixes the cutoff length. ``lam``/``t_mix`` of ``None`` are
    computed exactly.
    """

    walks: int = 10_000
    t_max: int | None = None
    epsilon: float = 0.1
    lam: float | None = None
    t_mix: float | None = None
    retries: int = 3


@dataclass(eq=False)
class GraphContext:
    """A graph plus lazily computed, cached oracle quantities."""

    graph_id: str
    G: Graph
    _hv: dict = field(default_factory=dict, repr=False)

    @cached_property
    def spectral(self):
        return spectral_info(self.G)

    def lam(self, cfg: AlgoConfig) -> float:
        return cfg.lam if cfg.lam is not None else self.spectral.lam

    def t_mix(self, cfg: AlgoConfig) -> float:
        if cfg.t_mix is not None:
            return cfg.t_mix
        if self.G.n > SPECTRAL_CAP:
            raise OracleCapError("t_mix needs the spectral oracle; pass t_mix or t_max")
        if self.spectral.t_mix is None:
            raise ValueError("walk is periodic, so t_mix is undefined; pass t_max or make the walk lazy")
        return max(1, self.spectral.t_mix)

    def t_max(self, u: int, v: int, cfg: AlgoConfig) -> int:
        if cfg.t_max is not None:
            return cfg.t_max
        return theoretical_params(self.G, u, v, 1.0, self.t_mix(cfg)).t_max

    def exact(self, u: int, v: int) -> float:
        if u == v:
            return 0.0
        if v not in self._hv:
            if self.G.n > EXACT_CAP:
                raise OracleCapError(f"exact oracle limited to {EXACT_CAP} nodes; use no_exact")
            self._hv[v] = exact_hitting_to(self.G, v, dense_cap=DENSE_SOLVE_CAP).h
        return float(self._hv[v][u])


def run_algo(ctx: GraphContext, u: int, v: int, algo: str, cfg: AlgoConfig, seed: int) -> HtEstimate:
    """One estimate of ``H(u, v)``. Failed meeting runs are retried with doubled ``t_max``."""
    G = ctx.G
    if algo == "meeting":
        t_max = ctx.t_max(u, v, cfg)
        for attempt in range(cfg.retries + 1):
            est = meeting_time_estimate(G, u, v, EstimatorParams(walks=cfg.walks, t_max=t_max, seed=seed))
            if not est.failed:
                break
            log.warning("meeting run failed at t_max=%d (attempt %d)", t_max, attempt + 1)
            t_max *= 2
        est.info["attempts"] = attempt + 1
        return est
    if algo == "cutoff":
        return cutoff_estimate(G, u, v, ctx.lam(cfg), cfg.epsilon, r=cfg.walks, seed=seed)
    if algo == "sampling":
        return walk_sampling_estimate(G, u, v, cfg.walks, ctx.t_max(u, v, cfg), seed=seed)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGOS}")


def _record(ctx, u, v, sampler, algo, est: HtEstimate, ref, reference, seed, repeat, timing, walks):
    G = ctx.G
    value = float(est.value) if not est.failed else None
    ref = None if ref is None else float(ref)
    rel = abs_err = None
    if ref is not None and value is not None:
        abs_err = abs(value - ref)
        rel = abs_err / abs(ref) if ref != 0 else (0.0 if abs_err == 0 else math.inf)
    return BenchRecord(ctx.graph_id, G.n, G.m, int(u), int(v), sampler, algo, value,
                       ref, rel, abs_err, walks, int(est.total_steps),
                       float(est.wall_time) if timing else None, seed, bool(est.failed), repeat,
                       reference)


def meeting_reference(ctx: GraphContext, u: int, v: int, cfg: AlgoConfig, seed: int,
                      runs: int = REFERENCE_RUNS) -> float:
    """Mean of ``runs`` meeting-time estimates, the reference when no exact oracle is used."""
    vals = []
    for i in range(runs):
        est = run_algo(ctx, u, v, "meeting", cfg, derive_seed(seed, i))
        if est.failed:
            raise EstimatorFailure(f"reference run {i} failed for pair ({u}, {v})")
        vals.append(est.value)
    return float(np.mean(vals))


def run_bench(graphs: Sequence[tuple[str, Graph]], samplers: Sequence[str] = STRATEGIES,
              algos: Sequence[str] = ALGOS, pairs: int = 50, repeats: int = 1,
              cfg: AlgoConfig = AlgoConfig(), seed: int = 0, exact: bool = True,
              timing: bool = False) -> list[BenchRecord]:
    """One record per (graph, sampler, pair, algo, repeat).

    With ``exact=False`` the reference for each pair is the mean of 100
    meeting-time runs. ``timing=False`` leaves ``wall_time`` empty so the output
    is a pure function of the seed.
    """
    for a in algos:
        if a not in ALGOS:
            raise ValueError(f"unknown algorithm {a!r}")
    out = []
    for gi, (gid, G) in enumerate(graphs):
        ctx = GraphContext(gid, G)
        for si, s in enumerate(samplers):
            plist = sample_pairs(G, PairSampler(s, derive_seed(seed, gi, si)), pairs)
            for pi, (u, v) in enumerate(plist):
                if exact:
                    ref, kind = ctx.exact(u, v), "exact"
                else:
                    ref = meeting_reference(ctx, u, v, cfg, derive_seed(seed, gi, si, pi, 99))
                    kind = "meeting100"
                for ai, a in enumerate(algos):
                    for rep in range(repeats):
                        sd = derive_seed(seed, gi, si, pi, ai, rep)
                        est = run_algo(ctx, u, v, a, cfg, sd)
                        out.append(_record(ctx, u, v, s, a, est, ref, kind, sd, rep, timing, cfg.walks))
    return sorted(out, key=BenchRecord.sort_key)


def _connected(G: Graph) -> Graph:
    return G if G.is_connected() else largest_component(G)


def synthetic_graph(model: str, n: int, seed: int, p: float = 0.01, k: int = 10,
                    blocks: int = 5, p_intra: float = 0.05, p_inter: float = 0.01) -> Graph:
    """ER, BA or SBM graph as in the synthetic experiments, restricted to its largest component."""
    if model == "er":
        return _connected(generate_er(n, p, seed))
    if model == "ba":
        return _connected(generate_ba(n, k, seed))
    if model == "sbm":
        sizes = [n // blocks + (1 if i < n % blocks else 0) for i in range(blocks)]
        return _connected(generate_sbm(sizes, p_intra, p_inter, seed))
    raise ValueError(f"unknown model {model!r}")


def size_sweep(model: str, sizes: Sequence[int], algos: Sequence[str] = ALGOS, repeats: int = 5,
               cfg: AlgoConfig = AlgoConfig(), seed: int = 0, timing: bool = True,
               **model_kw) -> list[BenchRecord]:
    """Error and runtime versus graph size, estimating H(first node, last node)."""
    out = []
    for size in sizes:
        G = synthetic_graph(model, size, derive_seed(seed, size), **model_kw)
        ctx = GraphContext(f"{model}-{size}", G)
        u, v = 0, G.n - 1
        ref = ctx.exact(u, v)
        for ai, a in enumerate(algos):
            for rep in range(repeats):
                sd = derive_seed(seed, size, ai, rep)
                est = run_algo(ctx, u, v, a, cfg, sd)
                out.append(_record(ctx, u, v, "first-last", a, est, ref, "exact", sd, rep, timing, cfg.walks))
    return sorted(out, key=BenchRecord.sort_key)


def walk_sweep(graph_id: str, G: Graph, walk_counts: Sequence[int], algos: Sequence[str] = ALGOS,
               pairs: int = 10, repeats: int = 1, cfg: AlgoConfig = AlgoConfig(), seed: int = 0,
               timing: bool = True) -> list[BenchRecord]:
    """Error and runtime versus number of random walks on uniformly drawn pairs."""
    ctx = GraphContext(graph_id, G)
    plist = sample_pairs(G, PairSampler("uniform", derive_seed(seed, 0)), pairs)
    out = []
    for w in walk_counts:
        c = dataclasses.replace(cfg, walks=int(w))
        for pi, (u, v) in enumerate(plist):
            ref = ctx.exact(u, v)
            for ai, a in enumerate(algos):
                for rep in range(repeats):
                    sd = derive_seed(seed, w, pi, ai, rep)
                    est = run_algo(ctx, u, v, a, c, sd)
                    out.append(_record(ctx, u, v, "uniform", a, est, ref, "exact", sd, rep, timing, int(w)))
    return sorted(out, key=BenchRecord.sort_key)


# --------------------------------------------------------------------------------------
# lower-bound study on the barbell
# --------------------------------------------------------------------------------------


@dataclass(frozen=True)
class LowerBoundRow:
    n: int
    nodes: int
    exact_h: float
    single_var: float
    r: int
    mean_var: float
    repeats: int


def fit_exponent(x, y) -> float:
    """Slope of ``log y`` against ``log x``; NaN with fewer than two distinct x."""
    if len(set(np.asarray(x, float).tolist())) < 2:
        return math.nan
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def lowerbound_study(n_list: Sequence[int] = (4, 6, 8, 10, 12), r_list: Sequence[int] = (1, 2, 4),
                     repeats: int = 2000, seed: int = 0, cap_factor: float = 200.0):
    """Hitting time u_1 -> u_n on barbells and the spread of walk-sampling means.

    For each size: the exact hitting time, the variance of a single first-hit
    time, and for each ``r`` the empirical variance of the mean of ``r`` hits
    over ``repeats`` independent means. Walks are capped at ``cap_factor * H``;
    a truncated walk raises, since it would bias the variance.

    Returns ``(rows, {"h_exponent": ..., "var_exponent": ...})``.
    """
    rows = []
    singles = []
    hs = []
    for n in n_list:
        B = generate_barbell(n)
        G = B.graph
        h = float(exact_hitting_to(G, B.un).h[B.u1])
        cap = int(cap_factor * h) + 1
        single = None
        for r in r_list:
            times = sample_hitting_times(G, B.u1, B.un, r * repeats, cap, seed=derive_seed(seed, n, r))
            if np.any(times < 0):
                raise RuntimeError(f"walk truncated at {cap} steps on barbell n={n}; raise cap_factor")
            times = times.astype(float)
            if single is None:
                single = float(times.var(ddof=1))
            means = times.reshape(repeats, r).mean(axis=1)
            rows.append(LowerBoundRow(n, G.n, h, single, int(r), float(means.var(ddof=1)), repeats))
        singles.append(single)
        hs.append(h)
    fit = {"h_exponent": fit_exponent(n_list, hs), "var_exponent": fit_exponent(n_list, singles)}
    return rows, fit


def write_dataclass_rows(rows: Sequence, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        names = [f.name for f in dataclasses.fields(rows[0])] if rows else []
        w.writerow(names)
        for r in rows:
            w.writerow([_fmt(getattr(r, f)) for f in names])


# --------------------------------------------------------------------------------------
# thread scaling
# --------------------------------------------------------------------------------------


@dataclass(frozen=True)
class ParallelRow:
    threads: int
    threads_effective: int
    mean_time: float
    sd_time: float
    estimate: float | None


def parallel_bench(G: Graph, u: int, v: int, threads_list: Sequence[int] = (1, 2, 4, 8),
                   walks: int = 10_000, t_max: int = 10**6, repeats: int = 5, seed: int = 0):
    """Meeting-estimator wall time per thread count with a fixed seed.

    Returns ``(rows, identical)`` where ``identical`` says whether every run at
    every thread count produced the bitwise-same estimate. A warm-up run keeps
    JIT compilation out of the timings. ``threads_effective`` records the count
    actually granted (numba caps it at its pool size).
    """
    params = EstimatorParams(walks=walks, t_max=t_max, seed=seed)
    meeting_time_estimate(G, u, v, params)
    rows, values = [], []
    for k in threads_list:
        with threads(k) as got:
            times = []
            for _ in range(repeats):
                t0 = time.perf_counter()
                est = meeting_time_estimate(G, u, v, params)
                times.append(time.perf_counter() - t0)
                values.append(est.value)
        rows.append(ParallelRow(int(k), int(got), float(np.mean(times)),
                                float(np.std(times, ddof=1)) if repeats > 1 else 0.0, est.value))
    identical = all(x == values[0] for x in values)
    return rows, identical


def cpu_count() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1
