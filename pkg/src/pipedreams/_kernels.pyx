# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Semantics are mirrored line for line by ``_fallback.py``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int8_t, int32_t, int64_t, uint8_t, uint32_t, uint64_t
from libc.stdlib cimport calloc, free, malloc

cnp.import_array()

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef double TO_UNIT = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double u01(uint64_t key, uint64_t ctr) noexcept nogil:
    return <double>(mix64(key + (ctr + 1) * GAMMA) >> 11) * TO_UNIT


cdef inline uint64_t box_code(int64_t x, int64_t y) noexcept nogil:
    return ((<uint64_t>(<uint32_t>x)) << 32) | (<uint64_t>(<uint32_t>y))


cdef int64_t _inversions(int64_t* perm, int64_t n, int64_t* tree) noexcept nogil:
    # Fenwick tree over values 1..n, scanning right to left.
    cdef int64_t i, j, v, inv = 0
    for i in range(n + 1):
        tree[i] = 0
    for i in range(n - 1, -1, -1):
        v = perm[i] - 1
        j = v
        while j > 0:
            inv += tree[j]
            j -= j & (-j)
        j = v + 1
        while j <= n:
            tree[j] += 1
            j += j & (-j)
    return inv


def count_inversions(const int64_t[::1] perm):
    cdef int64_t n = perm.shape[0]
    cdef int64_t* buf = <int64_t*>malloc((2 * n + 1) * sizeof(int64_t))
    cdef int64_t i, inv
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        buf[n + 1 + i] = perm[i]
    with nogil:
        inv = _inversions(buf + n + 1, n, buf)
    free(buf)
    return inv


def apply_swaps(const int32_t[::1] diags, const uint8_t[::1] mask, int64_t n):
    """Frontier product: swap positions d, d+1 for every letter whose mask bit is set."""
    out = np.arange(1, n + 1, dtype=np.int64)
    cdef int64_t[::1] perm = out
    cdef Py_ssize_t j, K = diags.shape[0]
    cdef int64_t a, tmp
    with nogil:
        for j in range(K):
            if mask[j]:
                a = diags[j] - 1
                tmp = perm[a]
                perm[a] = perm[a + 1]
                perm[a + 1] = tmp
    return out


def subword_inversions(const int32_t[::1] diags, double p, const uint64_t[::1] keys, int64_t n):
    """Inversion count of the random subword product, one value per trial key."""
    cdef Py_ssize_t T = keys.shape[0], K = diags.shape[0], t, j
    out = np.empty(T, dtype=np.int64)
    cdef int64_t[::1] res = out
    cdef int64_t* perm = <int64_t*>malloc(n * sizeof(int64_t))
    cdef int64_t* tree = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t a, tmp, i
    cdef uint64_t key
    if perm == NULL or tree == NULL:
        free(perm)
        free(tree)
        raise MemoryError()
    with nogil:
        for t in range(T):
            key = keys[t]
            for i in range(n):
                perm[i] = i + 1
            for j in range(K):
                if u01(key, j) < p:
                    a = diags[j] - 1
                    tmp = perm[a]
                    perm[a] = perm[a + 1]
                    perm[a + 1] = tmp
            res[t] = _inversions(perm, n, tree)
    free(perm)
    free(tree)
    return out


def pair_first_kiss(int64_t ell, const int8_t[::1] init, double p, int64_t cap,
                    const uint64_t[::1] keys):
    """First kiss of two pipes in the infinite shape; -1 when none occurs by ``cap``.

    Tiles come from the keyed box field, so a shared box gives both pipes the
    same tile without special casing.
    """
    cdef Py_ssize_t T = keys.shape[0], t
    out = np.empty(T, dtype=np.int64)
    cdef int64_t[::1] res = out
    cdef int64_t x1, y1, x2, y2, step, hit
    cdef int f1, f2
    cdef uint64_t key
    with nogil:
        for t in range(T):
            if ell == 0:
                res[t] = 0
                continue
            key = keys[t]
            x1 = 0
            y1 = 0
            x2 = ell // 2
            y2 = -(ell // 2)
            f1 = (init[t] >> 1) & 1
            f2 = init[t] & 1
            hit = -1
            for step in range(1, cap + 1):
                if not (u01(key, box_code(x1, y1)) < p):
                    f1 = 1 - f1
                if not (u01(key, box_code(x2, y2)) < p):
                    f2 = 1 - f2
                if f1:
                    x1 += 1
                else:
                    y1 += 1
                if f2:
                    x2 += 1
                else:
                    y2 += 1
                if x1 == x2 and y1 == y2:
                    hit = step
                    break
            res[t] = hit
    return out


def psi_hitting(int64_t z, const int8_t[::1] init, const double[:, ::1] cum, int64_t cap,
                const uint64_t[::1] keys):
    """Hitting time of level ``z`` by the additive functional of the facing chain."""
    cdef Py_ssize_t T = keys.shape[0], t
    out = np.empty(T, dtype=np.int64)
    cdef int64_t[::1] res = out
    cdef int64_t psi, step, hit
    cdef int s
    cdef double u
    cdef int nu[4]
    nu[0] = 0
    nu[1] = 2
    nu[2] = -2
    nu[3] = 0
    with nogil:
        for t in range(T):
            if z <= 0:
                res[t] = 0
                continue
            s = init[t]
            psi = 0
            hit = -1
            for step in range(1, cap + 1):
                u = u01(keys[t], step - 1)
                if u < cum[s, 0]:
                    s = 0
                elif u < cum[s, 1]:
                    s = 1
                elif u < cum[s, 2]:
                    s = 2
                else:
                    s = 3
                psi += nu[s]
                if psi >= z:
                    hit = step
                    break
            res[t] = hit
    return out


def psi_sample(int64_t k, const int8_t[::1] init, const double[:, ::1] cum, const uint64_t[::1] keys):
    """psi_k for each trial key."""
    cdef Py_ssize_t T = keys.shape[0], t
    out = np.empty(T, dtype=np.int64)
    cdef int64_t[::1] res = out
    cdef int64_t psi, step
    cdef int s
    cdef double u
    cdef int nu[4]
    nu[0] = 0
    nu[1] = 2
    nu[2] = -2
    nu[3] = 0
    with nogil:
        for t in range(T):
            s = init[t]
            psi = 0
            for step in range(1, k + 1):
                u = u01(keys[t], step - 1)
                if u < cum[s, 0]:
                    s = 0
                elif u < cum[s, 1]:
                    s = 1
                elif u < cum[s, 2]:
                    s = 2
                else:
                    s = 3
                psi += nu[s]
            res[t] = psi
    return out


def pipe_turns(int64_t k, int facing0, double p, const uint64_t[::1] keys):
    """Time of the k-th turn and the diagonal displacement at that time."""
    cdef Py_ssize_t T = keys.shape[0], t
    tau_arr = np.empty(T, dtype=np.int64)
    disp_arr = np.empty(T, dtype=np.int64)
    cdef int64_t[::1] tau = tau_arr
    cdef int64_t[::1] disp = disp_arr
    cdef int64_t x, y, step, turns
    cdef int f, f_new
    with nogil:
        for t in range(T):
            x = 0
            y = 0
            f = facing0
            step = 0
            turns = 0
            while turns < k:
                f_new = f if u01(keys[t], box_code(x, y)) < p else 1 - f
                if f_new:
                    x += 1
                else:
                    y += 1
                step += 1
                if f_new != f:
                    turns += 1
                f = f_new
            tau[t] = step
            disp[t] = x - y
    return tau_arr, disp_arr


def pipe_first_passage(int64_t z, int64_t cap, int facing0, double p, const uint64_t[::1] keys):
    """First time the diagonal moves ``z`` away from its start; -1 if not by ``cap``."""
    cdef Py_ssize_t T = keys.shape[0], t
    out = np.empty(T, dtype=np.int64)
    cdef int64_t[::1] res = out
    cdef int64_t x, y, step, hit, dev
    cdef int f
    with nogil:
        for t in range(T):
            if z <= 0:
                res[t] = 0
                continue
            x = 0
            y = 0
            f = facing0
            hit = -1
            for step in range(1, cap + 1):
                if not (u01(keys[t], box_code(x, y)) < p):
                    f = 1 - f
                if f:
                    x += 1
                else:
                    y += 1
                dev = x - y
                if dev >= z or -dev >= z:
                    hit = step
                    break
            res[t] = hit
    return out
