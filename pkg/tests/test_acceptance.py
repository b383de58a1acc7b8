"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import json
import math
import os
import subprocess
import sys
import time

import numpy as np

from localhit import bench as B
from localhit.cli import DATA_DIR
from localhit.estimators import (
    EstimatorParams,
    cutoff_estimate,
    cutoff_length,
    cutoff_samples,
    meeting_time_estimate,
)
from localhit.exact import (
    exact_hitting_to,
    hitting_series,
    hitting_time,
    laplacian_resistance,
    meeting_survival,
    series_cutoff,
    spectral_info,
)
from localhit.generators import (
    complete_graph,
    cycle_graph,
    generate_ba,
    generate_barbell,
    generate_er,
    generate_sbm,
    path_graph,
    star_graph,
)
from localhit.graph import from_edges, largest_component, read_edge_list
from localhit.mixing import categorical_sampler, l1_closeness_test, mixing_test

from .oracles import hitting_times_fraction, numpy_meeting_times


def _adj(G):
    return [G.neighbors_of(w).tolist() for w in range(G.n)]


def _aperiodic_graphs(count, n_max, seed):
    """Connected non-bipartite ER graphs with 8..n_max nodes."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(8, n_max + 1))
        G = largest_component(generate_er(n, float(rng.uniform(0.2, 0.45)), int(rng.integers(2**31))))
        if G.n >= 5 and not spectral_info(G, with_t_mix=False).degenerate:
            out.append(G)
    return out


def test_criterion_01_closed_form_hitting_times(criterion):
    t0 = time.perf_counter()
    bad = []

    def check(name, got, want):
        if abs(got - want) > 1e-9:
            bad.append(f"{name}: {got} != {want}")

    h = exact_hitting_to(path_graph(3), 2).h
    check("P3 0->2", h[0], 4)
    check("P3 1->2", h[1], 3)
    for n in range(2, 21):
        check(f"K{n}", exact_hitting_to(complete_graph(n), 0).h[1], n - 1)
    for n in range(2, 21):
        S = star_graph(n)
        check(f"star{n} center->leaf", exact_hitting_to(S, 1).h[0], 2 * n - 1)
        check(f"star{n} leaf->leaf", exact_hitting_to(S, 1).h[2], 2 * n)
    for n in range(3, 21):
        h = exact_hitting_to(cycle_graph(n), 0).h
        for k in range(n):
            check(f"C{n} k={k}", h[k], k * (n - k))
    elapsed = time.perf_counter() - t0
    # absorbing-chain elimination in exact rationals, n <= 10
    for G in (path_graph(3), complete_graph(7), star_graph(9), cycle_graph(10)):
        want = [float(x) for x in hitting_times_fraction(_adj(G), 1)]
        for a, b in zip(exact_hitting_to(G, 1).h, want):
            check("rational", a, b)
    ok = not bad and elapsed < 1.0
    criterion(1, "closed-form hitting times", ok, f"{len(bad)} mismatches, {elapsed:.3f}s")


def test_criterion_02_resistance_identity(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for i in range(50):
        n = int(rng.integers(5, 51))
        if i % 2:
            G = generate_ba(n, int(rng.integers(1, 4)), int(rng.integers(2**31)))
        else:
            G = largest_component(generate_er(n, 0.2, int(rng.integers(2**31))))
        H = np.column_stack([exact_hitting_to(G, v).h for v in range(G.n)])
        for u in range(G.n):
            for v in range(u + 1, G.n):
                lhs = 2 * G.m * laplacian_resistance(G, u, v)
                worst = max(worst, abs(lhs - (H[u, v] + H[v, u])))
    elapsed = time.perf_counter() - t0
    criterion(2, "2m R_eff = H(u,v) + H(v,u)", worst <= 1e-6 and elapsed < 30,
              f"max abs diff {worst:.2e}, {elapsed:.1f}s")


def test_criterion_03_series_identity(criterion):
    t0 = time.perf_counter()
    graphs = _aperiodic_graphs(20, 30, seed=3)
    worst = 0.0
    for G in graphs:
        lam = spectral_info(G, with_t_mix=False).lam
        k = series_cutoff(lam, G.n, 1e-6)
        for u, v in ((0, G.n - 1), (G.n // 2, 0)):
            worst = max(worst, abs(hitting_series(G, u, v, k)[-1] - hitting_time(G, u, v)))
    elapsed = time.perf_counter() - t0
    criterion(3, "truncated series matches H", worst <= 1e-4 and elapsed < 30,
              f"max abs diff {worst:.2e}, {elapsed:.1f}s")


def test_criterion_04_meeting_unbiased(criterion):
    t0 = time.perf_counter()
    graphs = _aperiodic_graphs(10, 20, seed=4)
    z_max, failures, details = 0.0, 0, []
    for gi, G in enumerate(graphs):
        u, v = 0, G.n - 1
        vals = np.empty(10_000)
        for s in range(len(vals)):
            est = meeting_time_estimate(G, u, v, EstimatorParams(walks=1000, t_max=10**5, seed=gi * 10**6 + s))
            failures += est.failed
            vals[s] = est.value if not est.failed else np.nan
        h = hitting_time(G, u, v)
        z = abs(np.nanmean(vals) - h) / (np.nanstd(vals, ddof=1) / math.sqrt(len(vals)))
        z_max = max(z_max, z)
        details.append(f"{z:.2f}")
    elapsed = time.perf_counter() - t0
    ok = z_max <= 3 and failures == 0 and elapsed < 300
    criterion(4, "meeting estimator unbiased", ok,
              f"|z| per graph {' '.join(details)}, failures {failures}, {elapsed:.0f}s")


def test_criterion_05_football_table(criterion):
    path = DATA_DIR / "football.txt"
    if not path.exists():
        criterion(5, "Football relative errors", False, f"Football graph not available at {path}")
    t0 = time.perf_counter()
    G = read_edge_list(path)
    recs = B.run_bench([("football", G)], ["uniform"], ["meeting", "sampling"], pairs=50,
                       cfg=B.AlgoConfig(walks=10_000), seed=0)
    cells = {c.algo: c for c in B.summarize(recs)}
    meet, samp = cells["meeting"].mean_rel_error, cells["sampling"].mean_rel_error
    elapsed = time.perf_counter() - t0
    ok = (G.n, G.m) == (115, 613) and meet <= 0.05 and samp <= 0.08 and elapsed < 600
    criterion(5, "Football relative errors", ok,
              f"n={G.n} m={G.m} meeting {meet:.3f} sampling {samp:.3f}, {elapsed:.0f}s")


def test_criterion_06_cutoff_guarantee(criterion):
    t0 = time.perf_counter()
    G_er = _aperiodic_graphs(1, 20, seed=6)[0]
    while G_er.n != 20:
        G_er = largest_component(generate_er(20, 0.3, seed=int(G_er.m)))
    rates = []
    for name, G in (("K10", complete_graph(10)), ("ER20", G_er)):
        u, v = 0, G.n - 1
        h = hitting_time(G, u, v)
        lam = spectral_info(G, with_t_mix=False).lam
        eps = 0.1 * h
        pi_v = G.degree(v) / (2 * G.m)
        r = min(cutoff_samples(cutoff_length(G.n, lam, eps), eps, pi_v), 10**6)
        ok = sum(abs(cutoff_estimate(G, u, v, lam, eps, r=r, seed=s).value - h) <= eps for s in range(100))
        rates.append((name, ok / 100, r))
    elapsed = time.perf_counter() - t0
    good = all(rate >= 0.85 for _, rate, _ in rates) and elapsed < 600
    criterion(6, "cutoff estimator success rate", good,
              ", ".join(f"{n} {rate:.2f} (r={r})" for n, rate, r in rates) + f", {elapsed:.0f}s")


def test_criterion_07_meeting_tail(criterion):
    t0 = time.perf_counter()
    graphs = [
        complete_graph(5),
        from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]),
        *_aperiodic_graphs(3, 15, seed=7),
    ]
    r2s, z_max = [], 0.0
    slopes = []
    for gi, G in enumerate(graphs):
        u, v = 0, G.n - 1
        surv = meeting_survival(G, u, v, 400)
        keep = surv > 1e-10
        t = np.arange(len(surv))[keep][1:]
        y = np.log(surv[keep][1:])
        slope, icept = np.polyfit(t, y, 1)
        r2 = 1 - np.sum((y - (slope * t + icept)) ** 2) / np.sum((y - y.mean()) ** 2)
        r2s.append(r2)
        slopes.append(slope)
        N = 100_000
        T = numpy_meeting_times(_adj(G), u, v, N, seed=gi)
        for s in range(0, 30):
            p = surv[s]
            emp = np.mean(T > s)
            sd = math.sqrt(max(p * (1 - p), 1e-12) / N)
            z_max = max(z_max, abs(emp - p) / sd)
    elapsed = time.perf_counter() - t0
    ok = min(r2s) >= 0.95 and max(slopes) < 0 and z_max <= 3 and elapsed < 120
    criterion(7, "meeting tail log-linear, Monte Carlo agrees", ok,
              f"min R2 {min(r2s):.4f}, max slope {max(slopes):.3f}, max |z| {z_max:.2f}, {elapsed:.0f}s")


def test_criterion_08_lower_bound_growth(criterion):
    t0 = time.perf_counter()
    rows, fit = B.lowerbound_study(tuple(range(4, 13)), (1,), repeats=2000, seed=8)
    elapsed = time.perf_counter() - t0
    ok = abs(fit["h_exponent"] - 3.0) <= 0.3 and fit["var_exponent"] > 4 and elapsed < 600
    criterion(8, "barbell growth exponents", ok,
              f"H exponent {fit['h_exponent']:.3f}, variance exponent {fit['var_exponent']:.3f}, {elapsed:.0f}s")


def test_criterion_09_tester_calibration(criterion):
    t0 = time.perf_counter()
    delta, trials = 0.1, 200
    rng = np.random.default_rng(9)
    uni = np.full(100, 0.01)
    zipf = 1 / np.arange(1, 101)
    zipf /= zipf.sum()
    point = np.zeros(100)
    point[0] = 1
    half = np.r_[np.full(50, 0.02), np.zeros(50)]

    def err_rate(p, q, eps, want_accept):
        sp, sq = categorical_sampler(p), categorical_sampler(q)
        return sum(l1_closeness_test(sp, sq, 100, eps, delta, rng).accept != want_accept
                   for _ in range(trials)) / trials

    rates = {
        "uniform=uniform": err_rate(uni, uni, 0.5, True),
        "zipf=zipf": err_rate(zipf, zipf, 0.5, True),
        "point vs uniform": err_rate(point, uni, 0.5, False),
        "half vs uniform": err_rate(half, uni, 1.0, False),
    }
    K3, bb = complete_graph(3), generate_barbell(4).graph
    rates["K3 t=20"] = sum(not mixing_test(K3, 20, 0.5, delta, seed=s).accept for s in range(trials)) / trials
    rates["barbell t=5"] = sum(mixing_test(bb, 5, 0.5, delta, seed=s).accept for s in range(trials)) / trials
    elapsed = time.perf_counter() - t0
    ok = max(rates.values()) <= delta + 0.05 and elapsed < 300
    criterion(9, "closeness and mixing tester error rates", ok,
              ", ".join(f"{k} {v:.3f}" for k, v in rates.items()) + f", {elapsed:.0f}s")


def test_criterion_10_generator_fidelity(criterion):
    t0 = time.perf_counter()
    er = np.array([generate_er(1000, 0.01, s).m for s in range(20)])
    ba = {generate_ba(1000, 10, s).m for s in range(20)}
    sbm = np.array([generate_sbm([200] * 5, 0.05, 0.01, s).m for s in range(20)])
    elapsed = time.perf_counter() - t0
    ok = (abs(er.mean() - 5007.4) <= 3 * 32.0 and ba == {9900}
          and abs(sbm.mean() - 9021.4) <= 3 * 51.8 and elapsed < 60)
    criterion(10, "generator edge counts", ok,
              f"ER mean {er.mean():.1f}, BA {sorted(ba)}, SBM mean {sbm.mean():.1f}, {elapsed:.1f}s")


_PARALLEL_SCRIPT = """
import json
from localhit import bench as B
from localhit.generators import generate_ba
G = generate_ba(10_000, 10, seed=11)
rows, identical = B.parallel_bench(G, 0, G.n - 1, (1, 2, 4, 8), walks=10_000, t_max=10**6, repeats=5, seed=11)
print(json.dumps({"identical": identical, "cores": B.cpu_count(),
                  "rows": [[r.threads, r.threads_effective, r.mean_time, r.estimate] for r in rows]}))
"""


def test_criterion_11_determinism_and_speedup(criterion):
    t0 = time.perf_counter()
    env = dict(os.environ, NUMBA_NUM_THREADS="8")
    out = subprocess.run([sys.executable, "-c", _PARALLEL_SCRIPT], env=env, capture_output=True,
                         text=True, timeout=300, check=True)
    res = json.loads(out.stdout.strip().splitlines()[-1])
    rows = res["rows"]
    speedup = rows[0][2] / rows[-1][2]
    granted = [r[1] for r in rows]
    elapsed = time.perf_counter() - t0
    ok = res["identical"] and speedup >= 2.0 and elapsed < 300
    criterion(11, "identical across threads, 1->8 speedup >= 2", ok,
              f"identical {res['identical']}, threads granted {granted}, cores {res['cores']}, "
              f"speedup {speedup:.2f}, {elapsed:.0f}s")
