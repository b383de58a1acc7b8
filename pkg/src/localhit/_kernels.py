"""Numba kernels for walk simulation.

Randomness is counter based: the uniform consumed by walker ``s`` at step ``t``
is a pure function of ``(key, s, t)``. Results therefore do not depend on how
walkers are split across threads.
"""
from __future__ import annotations

import numba
import numpy as np
from numba import njit, prange

# Try OpenMP before TBB: an outdated system TBB otherwise triggers a warning on
# first parallel launch before numba falls back anyway.
if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

_G1 = np.uint64(0x9E3779B97F4A7C15)
_G2 = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53

# Parallel loops only pay off above this many walkers per step.
PARALLEL_MIN = 4096


@njit(inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(inline="always")
def stream_key(key, stream):
    return mix64(key + (np.uint64(stream) + _ONE) * _G1)


@njit(inline="always")
def uniform(skey, counter):
    z = mix64(skey ^ (np.uint64(counter) * _G2 + _G1))
    return np.float64(z >> _S11) * _TO_UNIT


@njit(inline="always")
def next_node(offsets, neighbors, lazy, node, u):
    if lazy > 0.0:
        if u < lazy:
            return node
        u = (u - lazy) / (1.0 - lazy)
    lo = offsets[node]
    deg = offsets[node + 1] - lo
    j = np.int64(u * deg)
    if j >= deg:
        j = deg - 1
    return neighbors[lo + j]


def seed_key(seed: int) -> np.uint64:
    """Map an arbitrary integer seed to a 64-bit stream key (splitmix64 finalizer)."""
    mask = (1 << 64) - 1
    z = (int(seed) ^ int(_M2)) & mask
    z = ((z ^ (z >> 30)) * int(_M1)) & mask
    z = ((z ^ (z >> 27)) * int(_M2)) & mask
    return np.uint64(z ^ (z >> 31))


@njit(parallel=True, cache=True)
def hit_times(offsets, neighbors, lazy, start, target, count, cap, key, stream0):
    out = np.empty(count, dtype=np.int64)
    for k in prange(count):
        sk = stream_key(key, stream0 + k)
        node = start
        t = 0
        while node != target and t < cap:
            node = next_node(offsets, neighbors, lazy, node, uniform(sk, t))
            t += 1
        out[k] = t if node == target else -1
    return out


@njit(parallel=True, cache=True)
def endpoints(offsets, neighbors, lazy, start, length, count, key, stream0):
    out = np.empty(count, dtype=np.int64)
    for k in prange(count):
        sk = stream_key(key, stream0 + k)
        node = start
        for t in range(length):
            node = next_node(offsets, neighbors, lazy, node, uniform(sk, t))
        out[k] = node
    return out


@njit(parallel=True, cache=True)
def endpoints_multi(offsets, neighbors, lazy, starts, length, key, stream0):
    count = starts.shape[0]
    out = np.empty(count, dtype=np.int64)
    for k in prange(count):
        sk = stream_key(key, stream0 + k)
        node = starts[k]
        for t in range(length):
            node = next_node(offsets, neighbors, lazy, node, uniform(sk, t))
        out[k] = node
    return out


@njit(parallel=True, cache=True)
def _advance_par(offsets, neighbors, lazy, pos, ids, count, key, mul, add, t):
    for a in prange(count):
        i = ids[a]
        sk = stream_key(key, i * mul + add)
        pos[i] = next_node(offsets, neighbors, lazy, pos[i], uniform(sk, t))


@njit(cache=True)
def _advance_seq(offsets, neighbors, lazy, pos, ids, count, key, mul, add, t):
    for a in range(count):
        i = ids[a]
        sk = stream_key(key, i * mul + add)
        pos[i] = next_node(offsets, neighbors, lazy, pos[i], uniform(sk, t))


@njit(cache=True)
def advance_ids(offsets, neighbors, lazy, pos, ids, count, key, mul, add, t):
    """Move walkers ``ids[:count]`` one step; walker ``i`` uses stream ``i*mul + add``."""
    if count >= PARALLEL_MIN:
        _advance_par(offsets, neighbors, lazy, pos, ids, count, key, mul, add, t)
    else:
        _advance_seq(offsets, neighbors, lazy, pos, ids, count, key, mul, add, t)


@njit(cache=True)
def meeting_kernel(offsets, neighbors, lazy, u, v, ell, t_max, key, record):
    """Paired-ensemble simulation with elimination of co-located walker pairs.

    Returns ``(acc, t_last, survivors, steps, balanced, trace)`` where ``acc`` is
    the integer sum over steps of ``y_v - x_v``, ``survivors`` the number of
    u-walkers alive after the elimination at the last processed step, ``steps``
    the number of single-walker moves made and ``balanced`` whether every step
    removed equally many walkers from both ensembles.
    """
    n = offsets.shape[0] - 1
    xpos = np.full(ell, u, dtype=np.int64)
    ypos = np.full(ell, v, dtype=np.int64)
    xid = np.arange(ell, dtype=np.int64)
    yid = np.arange(ell, dtype=np.int64)
    nx = ell
    ny = ell
    cx = np.zeros(n, dtype=np.int64)
    cy = np.zeros(n, dtype=np.int64)
    zx = np.zeros(n, dtype=np.int64)
    zy = np.zeros(n, dtype=np.int64)
    trace = np.zeros(t_max + 1 if record else 1, dtype=np.int64)
    acc = np.int64(0)
    steps = np.int64(0)
    balanced = True
    t_last = 0
    for t in range(t_max + 1):
        t_last = t
        for a in range(nx):
            cx[xpos[xid[a]]] += 1
        for b in range(ny):
            cy[ypos[yid[b]]] += 1
        diff = cy[v] - cx[v]
        acc += diff
        if record:
            trace[t] = diff
        for a in range(nx):
            w = xpos[xid[a]]
            z = min(cx[w], cy[w])
            zx[w] = z
            zy[w] = z
        w_x = 0
        for a in range(nx):
            i = xid[a]
            w = xpos[i]
            cx[w] = 0
            if zx[w] > 0:
                zx[w] -= 1
            else:
                xid[w_x] = i
                w_x += 1
        w_y = 0
        for b in range(ny):
            j = yid[b]
            w = ypos[j]
            cy[w] = 0
            if zy[w] > 0:
                zy[w] -= 1
            else:
                yid[w_y] = j
                w_y += 1
        if nx - w_x != ny - w_y:
            balanced = False
        nx = w_x
        ny = w_y
        if nx == 0 and ny == 0:
            break
        if t == t_max:
            break
        advance_ids(offsets, neighbors, lazy, xpos, xid, nx, key, 2, 0, t)
        advance_ids(offsets, neighbors, lazy, ypos, yid, ny, key, 2, 1, t)
        steps += nx + ny
    return acc, t_last, nx, steps, balanced, trace

