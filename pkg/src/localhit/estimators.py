"""Local hitting-time estimators built on the walk engine.

* ``meeting_time_estimate`` -- paired ensembles from u and v, co-located pairs
  cancelled; sums visits to v until every walker has met a partner.
* ``cutoff_estimate`` -- truncated spectral series with transition
  probabilities into v estimated by fixed-length walks from v and from u.
* ``walk_sampling_estimate`` -- plain average of first-hit times.
"""
from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels as K
from .exact import mixing_time
from .graph import Graph, stationary
from .walks import as_seed, sample_endpoints, sample_hitting_times

__all__ = [
    "EstimatorParams",
    "HtEstimate",
    "TheoreticalParams",
    "theoretical_params",
    "meeting_time_estimate",
    "effective_resistance_meeting",
    "cutoff_length",
    "cutoff_samples",
    "cutoff_estimate",
    "walk_sampling_estimate",
]

log = logging.getLogger(__name__)

DEFAULT_WALKS = 10_000
# Above this many walks per level the cutoff estimator insists on an explicit r.
MAX_AUTO_R = 10**9


@dataclass(frozen=True)
class EstimatorParams:
    """Knobs shared by the estimators.

    ``walks`` and ``t_max`` are practical overrides. Leaving ``walks=None``
    uses the theoretical ensemble size (needs ``epsilon`` and ``t_mix``);
    leaving ``t_max=None`` uses the theoretical step cap, computing ``t_mix``
    exactly when it is not given.
    """

    epsilon: float | None = None
    t_mix: float | None = None
    lam: float | None = None
    walks: int | None = DEFAULT_WALKS
    t_max: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.walks is not None and self.walks < 1:
            raise ValueError("walks must be >= 1")
        if self.t_max is not None and self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.lam is not None and not 0.0 <= self.lam < 1.0:
            raise ValueError("lam must lie in [0, 1)")


@dataclass
class HtEstimate:
    value: float | None
    failed: bool
    walks_used: int
    total_steps: int
    wall_time: float
    info: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TheoreticalParams:
    t_max_real: float
    t_max: int
    walks_real: float
    walks: int


def theoretical_params(G: Graph, u: int, v: int, epsilon: float, t_mix: float) -> TheoreticalParams:
    """Step cap and ensemble size for which the meeting estimator is provably
    ``epsilon``-accurate with probability ``1 - 2/n``.

    ``t_max = 100 t_mix ln(n / (pi(u) pi(v))) / ||pi||^2`` and
    ``walks = 2 t_max^2 ln n / (pi(v)^2 epsilon^2)``, the latter evaluated at
    the ceiled ``t_max``.
    """
    if t_mix < 1 or epsilon <= 0:
        raise ValueError("need t_mix >= 1 and epsilon > 0")
    st = stationary(G)
    pi_u, pi_v = st.pi[u], st.pi[v]
    t_real = 100.0 * t_mix * math.log(G.n / (pi_u * pi_v)) / st.pi_norm_sq
    t_max = math.ceil(t_real)
    w_real = 2.0 * t_max**2 * math.log(G.n) / (pi_v**2 * epsilon**2)
    return TheoreticalParams(t_real, t_max, w_real, math.ceil(w_real))


def _resolve_t_mix(G: Graph, params: EstimatorParams) -> float:
    if params.t_mix is not None:
        return params.t_mix
    return max(1, mixing_time(G))


def meeting_time_estimate(G: Graph, u: int, v: int, params: EstimatorParams = EstimatorParams(),
                          record_trace: bool = False) -> HtEstimate:
    """Estimate ``H(u, v)`` from walks that stop upon meeting.

    Two ensembles of ``walks`` walkers start at u and v. At every step
    ``t = 0..t_max`` the estimate gains ``(y_v - x_v) / (walks * pi(v))`` where
    ``x_w``, ``y_w`` count live walkers at w; then, at every vertex, as many
    u-walkers and v-walkers as possible are removed in pairs (lowest walker
    index first) and the survivors step. The run fails if some u-walker is
    still alive after step ``t_max``; ``value`` is then ``None``.
    """
    t0 = time.perf_counter()
    if u == v:
        return HtEstimate(0.0, False, 0, 0, time.perf_counter() - t0)
    if not G.is_aperiodic():
        warnings.warn("walk is periodic; walkers of opposite parity never meet", RuntimeWarning,
                      stacklevel=2)
    info: dict = {}
    theory = None
    if params.t_max is None or params.walks is None:
        t_mix = _resolve_t_mix(G, params)
        eps = params.epsilon if params.epsilon is not None else 1.0
        theory = theoretical_params(G, u, v, eps, t_mix)
        info["theoretical"] = theory
        log.info("theoretical t_max=%d walks=%d", theory.t_max, theory.walks)
    ell = params.walks if params.walks is not None else theory.walks
    t_max = params.t_max if params.t_max is not None else theory.t_max
    pi_v = G.degree(v) / (2.0 * G.m)
    acc, t_last, survivors, steps, balanced, trace = K.meeting_kernel(
        G.offsets, G.neighbors, G.laziness, int(u), int(v), int(ell), int(t_max),
        K.seed_key(as_seed(params.seed)), record_trace)
    info.update(t_max=t_max, t_last=int(t_last), survivors=int(survivors), balanced=bool(balanced))
    if record_trace:
        info["trace"] = trace[: t_last + 1]
    failed = survivors > 0
    value = None if failed else float(acc) / (ell * pi_v)
    return HtEstimate(value, failed, int(ell), int(steps), time.perf_counter() - t0, info)


def effective_resistance_meeting(G: Graph, u: int, v: int,
                                 params: EstimatorParams = EstimatorParams()) -> HtEstimate:
    """``(H~(u,v) + H~(v,u)) / 2m`` from two meeting-time runs.

    Each hitting time is requested at accuracy ``epsilon * m / 2`` so the
    resistance is ``epsilon``-accurate. Fails when either run fails.
    """
    t0 = time.perf_counter()
    if u == v:
        return HtEstimate(0.0, False, 0, 0, 0.0)
    eps = None if params.epsilon is None else params.epsilon * G.m / 2.0
    seed = as_seed(params.seed)
    fw = meeting_time_estimate(G, u, v, replace(params, epsilon=eps, seed=seed))
    bw = meeting_time_estimate(G, v, u, replace(params, epsilon=eps, seed=seed + 1))
    failed = fw.failed or bw.failed
    value = None if failed else (fw.value + bw.value) / (2.0 * G.m)
    return HtEstimate(value, failed, fw.walks_used + bw.walks_used,
                      fw.total_steps + bw.total_steps, time.perf_counter() - t0,
                      {"forward": fw, "backward": bw})


def cutoff_length(n: int, lam: float, epsilon: float) -> int:
    """Number of series terms ``ceil(log(n / (eps - eps*lam)) / log(1/lam))``, at least 1."""
    if not 0.0 < lam < 1.0:
        raise ValueError("cutoff needs 0 < lam < 1 (periodic or disconnected walk?)")
    ell = math.log(n / (epsilon - epsilon * lam)) / math.log(1.0 / lam)
    return max(1, math.ceil(ell))


def cutoff_samples(ell: int, epsilon: float, pi_v: float) -> int:
    """Walks per level ``ceil(32 ell^2 ln(40 ell) / (eps^2 pi(v)^2))``."""
    return math.ceil(32.0 * ell**2 * math.log(40.0 * ell) / (epsilon**2 * pi_v**2))


def cutoff_estimate(G: Graph, u: int, v: int, lam: float, epsilon: float, r: int | None = None,
                    r_cap: int | None = None, ell: int | None = None, seed=0) -> HtEstimate:
    """Estimate ``H(u, v)`` from ``sum_i (P^i[v,v] - P^i[u,v]) / pi(v)``.

    Level ``i`` runs ``r`` length-``i`` walks from v and ``r`` from u and adds
    ``(2m / deg v) (T_v - T'_v) / r``, where ``T_v`` and ``T'_v`` count the walks
    of each set that end at v. Counting walks from v that end at u instead
    estimates ``P^i[v,u]``, which differs from ``P^i[u,v]`` unless
    ``deg u = deg v``; the error then grows linearly in the number of levels.
    ``r`` defaults to the theoretical count, optionally clipped to ``r_cap``.
    """
    t0 = time.perf_counter()
    if u == v:
        return HtEstimate(0.0, False, 0, 0, 0.0)
    if lam >= 1.0:
        raise ValueError("lam >= 1: walk is periodic or graph disconnected")
    levels = ell if ell is not None else cutoff_length(G.n, lam, epsilon)
    pi_v = G.degree(v) / (2.0 * G.m)
    r_theory = cutoff_samples(levels, epsilon, pi_v)
    if r is None:
        if r_cap is None and r_theory > MAX_AUTO_R:
            raise ValueError(f"theoretical r = {r_theory} walks per level; pass r or r_cap")
        r = r_theory if r_cap is None else min(r_theory, r_cap)
    scale = 2.0 * G.m / G.degree(v)
    key_seed = as_seed(seed)
    est = 0.0
    per_level = np.empty(levels)
    for i in range(levels):
        from_v = sample_endpoints(G, v, i, r, seed=key_seed, stream0=2 * i * r)
        from_u = sample_endpoints(G, u, i, r, seed=key_seed, stream0=(2 * i + 1) * r)
        per_level[i] = scale * (np.count_nonzero(from_v == v) - np.count_nonzero(from_u == v)) / r
        est += per_level[i]
    steps = r * levels * (levels - 1)
    info = {"levels": levels, "r": r, "r_theory": r_theory, "per_level": per_level}
    return HtEstimate(est, False, 2 * r * levels, steps, time.perf_counter() - t0, info)


def walk_sampling_estimate(G: Graph, u: int, v: int, r: int, length_cap: int, seed=0) -> HtEstimate:
    """Mean first-hit time of ``r`` walks from u; truncated walks count as ``length_cap``."""
    t0 = time.perf_counter()
    if r < 1 or length_cap < 1:
        raise ValueError("need r >= 1 and length_cap >= 1")
    times = sample_hitting_times(G, u, v, r, length_cap, seed=seed)
    truncated = int(np.count_nonzero(times < 0))
    times = np.where(times < 0, length_cap, times)
    var = float(times.var(ddof=1)) if r > 1 else float("nan")
    info = {"truncated": truncated, "sample_var": var, "length_cap": length_cap}
    return HtEstimate(float(times.mean()), False, r, int(times.sum()),
                      time.perf_counter() - t0, info)
