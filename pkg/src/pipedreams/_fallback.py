"""Pure numpy implementations of the kernels in ``_kernels.pyx``.

Same signatures, same random draws, same results. Loops run over time steps
(or letters) and vectorise across trials.
"""

from __future__ import annotations

import numpy as np

from .rng import box_code, uniforms

NU = np.array([0, 2, -2, 0], dtype=np.int64)
_CHUNK_CELLS = 1 << 22


def _bit_inversions(perms: np.ndarray) -> np.ndarray:
    """Inversion counts of each row of ``perms`` (values 1..n), Fenwick tree per row."""
    perms = np.atleast_2d(perms)
    T, n = perms.shape
    tree = np.zeros((T, n + 1), dtype=np.int64)
    inv = np.zeros(T, dtype=np.int64)
    rows = np.arange(T)
    for i in range(n - 1, -1, -1):
        v = perms[:, i].astype(np.int64)
        j = v - 1
        while True:
            live = j > 0
            if not live.any():
                break
            inv[live] += tree[rows[live], j[live]]
            j = np.where(live, j - (j & -j), 0)
        j = v.copy()
        while True:
            live = j <= n
            if not live.any():
                break
            tree[rows[live], j[live]] += 1
            j = np.where(live, j + (j & -j), n + 1)
    return inv


def count_inversions(perm) -> int:
    perm = np.asarray(perm, dtype=np.int64)
    n = perm.shape[0]
    tree = [0] * (n + 1)
    inv = 0
    for i in range(n - 1, -1, -1):
        v = int(perm[i])
        j = v - 1
        while j > 0:
            inv += tree[j]
            j -= j & -j
        j = v
        while j <= n:
            tree[j] += 1
            j += j & -j
    return inv


def disjoint_runs(diags: np.ndarray) -> np.ndarray:
    """Boundaries of maximal runs whose consecutive letters differ by at least 2.

    Letters in such a run are strictly increasing with gaps >= 2, so their
    swaps act on disjoint position pairs and may be applied simultaneously.
    """
    diags = np.asarray(diags)
    if diags.size == 0:
        return np.array([0], dtype=np.int64)
    breaks = np.flatnonzero(np.diff(diags.astype(np.int64)) < 2) + 1
    return np.concatenate(([0], breaks, [diags.size])).astype(np.int64)


def _apply_runs(perms: np.ndarray, diags: np.ndarray, mask: np.ndarray, bounds: np.ndarray) -> None:
    for s, e in zip(bounds[:-1], bounds[1:]):
        a = diags[s:e].astype(np.int64) - 1
        m = mask[:, s:e]
        left = perms[:, a]
        right = perms[:, a + 1]
        perms[:, a] = np.where(m, right, left)
        perms[:, a + 1] = np.where(m, left, right)


def apply_swaps(diags, mask, n: int) -> np.ndarray:
    diags = np.asarray(diags, dtype=np.int32)
    mask = np.asarray(mask, dtype=bool)[None, :]
    perms = np.arange(1, n + 1, dtype=np.int64)[None, :].copy()
    _apply_runs(perms, diags, mask, disjoint_runs(diags))
    return perms[0]


def subword_inversions(diags, p: float, keys, n: int) -> np.ndarray:
    diags = np.asarray(diags, dtype=np.int32)
    keys = np.asarray(keys, dtype=np.uint64)
    K = diags.shape[0]
    bounds = disjoint_runs(diags)
    counters = np.arange(K, dtype=np.uint64)
    out = np.empty(keys.shape[0], dtype=np.int64)
    chunk = max(1, _CHUNK_CELLS // max(K, 1))
    for lo in range(0, keys.shape[0], chunk):
        ks = keys[lo:lo + chunk]
        mask = uniforms(ks[:, None], counters[None, :]) < p
        perms = np.tile(np.arange(1, n + 1, dtype=np.int64), (ks.shape[0], 1))
        _apply_runs(perms, diags, mask, bounds)
        out[lo:lo + ks.shape[0]] = _bit_inversions(perms)
    return out


def pair_first_kiss(ell: int, init, p: float, cap: int, keys) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    init = np.asarray(init, dtype=np.int64)
    T = keys.shape[0]
    out = np.full(T, -1, dtype=np.int64)
    if ell == 0:
        out[:] = 0
        return out
    x1 = np.zeros(T, dtype=np.int64)
    y1 = np.zeros(T, dtype=np.int64)
    x2 = np.full(T, ell // 2, dtype=np.int64)
    y2 = np.full(T, -(ell // 2), dtype=np.int64)
    f1 = (init >> 1) & 1
    f2 = init & 1
    live = np.arange(T)
    for step in range(1, cap + 1):
        if live.size == 0:
            break
        k = keys[live]
        c1 = uniforms(k, box_code(x1[live], y1[live])) < p
        c2 = uniforms(k, box_code(x2[live], y2[live])) < p
        f1[live] = np.where(c1, f1[live], 1 - f1[live])
        f2[live] = np.where(c2, f2[live], 1 - f2[live])
        x1[live] += f1[live]
        y1[live] += 1 - f1[live]
        x2[live] += f2[live]
        y2[live] += 1 - f2[live]
        met = (x1[live] == x2[live]) & (y1[live] == y2[live])
        out[live[met]] = step
        live = live[~met]
    return out


def _chain_step(state: np.ndarray, u: np.ndarray, cum: np.ndarray) -> np.ndarray:
    rows = cum[state]
    return (u[:, None] >= rows[:, :3]).sum(axis=1)


def psi_hitting(z: int, init, cum, cap: int, keys) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    cum = np.asarray(cum, dtype=np.float64)
    T = keys.shape[0]
    out = np.full(T, -1, dtype=np.int64)
    if z <= 0:
        out[:] = 0
        return out
    state = np.asarray(init, dtype=np.int64).copy()
    psi = np.zeros(T, dtype=np.int64)
    live = np.arange(T)
    for step in range(1, cap + 1):
        if live.size == 0:
            break
        u = uniforms(keys[live], step - 1)
        state[live] = _chain_step(state[live], u, cum)
        psi[live] += NU[state[live]]
        hit = psi[live] >= z
        out[live[hit]] = step
        live = live[~hit]
    return out


def psi_sample(k: int, init, cum, keys) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    cum = np.asarray(cum, dtype=np.float64)
    state = np.asarray(init, dtype=np.int64).copy()
    psi = np.zeros(keys.shape[0], dtype=np.int64)
    for step in range(1, k + 1):
        u = uniforms(keys, step - 1)
        state = _chain_step(state, u, cum)
        psi += NU[state]
    return psi


def pipe_turns(k: int, facing0: int, p: float, keys):
    keys = np.asarray(keys, dtype=np.uint64)
    T = keys.shape[0]
    x = np.zeros(T, dtype=np.int64)
    y = np.zeros(T, dtype=np.int64)
    f = np.full(T, facing0, dtype=np.int64)
    steps = np.zeros(T, dtype=np.int64)
    turns = np.zeros(T, dtype=np.int64)
    live = np.flatnonzero(turns < k)
    while live.size:
        c = uniforms(keys[live], box_code(x[live], y[live])) < p
        f_new = np.where(c, f[live], 1 - f[live])
        x[live] += f_new
        y[live] += 1 - f_new
        steps[live] += 1
        turns[live] += f_new != f[live]
        f[live] = f_new
        live = live[turns[live] < k]
    return steps, x - y


def pipe_first_passage(z: int, cap: int, facing0: int, p: float, keys) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    T = keys.shape[0]
    out = np.full(T, -1, dtype=np.int64)
    if z <= 0:
        out[:] = 0
        return out
    x = np.zeros(T, dtype=np.int64)
    y = np.zeros(T, dtype=np.int64)
    f = np.full(T, facing0, dtype=np.int64)
    live = np.arange(T)
    for step in range(1, cap + 1):
        if live.size == 0:
            break
        c = uniforms(keys[live], box_code(x[live], y[live])) < p
        f[live] = np.where(c, f[live], 1 - f[live])
        x[live] += f[live]
        y[live] += 1 - f[live]
        hit = np.abs(x[live] - y[live]) >= z
        out[live[hit]] = step
        live = live[~hit]
    return out
