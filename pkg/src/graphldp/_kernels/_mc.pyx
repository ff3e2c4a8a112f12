# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Monte Carlo kernels (hot single-symbol paths).

Contracts match the pure NumPy backend; the coupled and allocation kernels
consume uniforms in exactly the same order as the pure versions do, so the
two backends produce bitwise-identical outputs for those kernels given the
same generator state.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.stdlib cimport free, malloc
from libc.string cimport memset
from numpy.random cimport bitgen_t

cnp.import_array()

__all__ = [
    "allocation_empty_counts",
    "allocation_profile_hist",
    "conditional_isolated_counts",
    "coupled_discrepancy_stats",
]

cdef const char* CAPSULE_NAME = b"BitGenerator"


cdef bitgen_t* _bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, CAPSULE_NAME):
        raise ValueError("invalid BitGenerator capsule")
    return <bitgen_t*> PyCapsule_GetPointer(capsule, CAPSULE_NAME)


cdef inline Py_ssize_t _bounded(double u, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t v = <Py_ssize_t>(u * k)
    if v >= k:
        v = k - 1
    return v


cdef inline Py_ssize_t _tri_code(Py_ssize_t u, Py_ssize_t v, Py_ssize_t n) noexcept nogil:
    # row-major upper-triangle code of the pair u < v
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def conditional_isolated_counts(int n, int m_edges, object rng, Py_ssize_t num_samples):
    """Isolated-vertex counts of uniform m-edge graphs on n vertices."""
    if n < 1:
        raise ValueError("n must be positive")
    if num_samples < 0:
        raise ValueError("num_samples must be non-negative")
    cdef Py_ssize_t n_codes = (<Py_ssize_t>n) * (n - 1) // 2
    if m_edges < 0 or m_edges > n_codes:
        raise ValueError(f"m_edges must lie in 0..{n_codes}")
    out = np.full(num_samples, n, dtype=np.int64)
    if m_edges == 0 or num_samples == 0:
        return out

    u_np, v_np = np.triu_indices(n, k=1)
    u_arr = np.ascontiguousarray(u_np, dtype=np.int64)
    v_arr = np.ascontiguousarray(v_np, dtype=np.int64)
    cdef cnp.int64_t[::1] u_tab = u_arr
    cdef cnp.int64_t[::1] v_tab = v_arr
    cdef cnp.int64_t[::1] out_view = out

    bit_generator = rng.bit_generator
    cdef bitgen_t* gen = _bitgen(bit_generator)
    cdef char* used = <char*> malloc(n_codes)
    cdef char* covered = <char*> malloc(n)
    cdef Py_ssize_t* chosen = <Py_ssize_t*> malloc(m_edges * sizeof(Py_ssize_t))
    if used == NULL or covered == NULL or chosen == NULL:
        free(used); free(covered); free(chosen)
        raise MemoryError()
    memset(used, 0, n_codes)

    cdef Py_ssize_t s, e, code, vtx, cnt
    lock = bit_generator.lock
    try:
        with lock, nogil:
            for s in range(num_samples):
                memset(covered, 0, n)
                for e in range(m_edges):
                    code = _bounded(gen.next_double(gen.state), n_codes)
                    while used[code]:
                        code = _bounded(gen.next_double(gen.state), n_codes)
                    used[code] = 1
                    chosen[e] = code
                    covered[u_tab[code]] = 1
                    covered[v_tab[code]] = 1
                cnt = 0
                for vtx in range(n):
                    cnt += covered[vtx]
                out_view[s] = n - cnt
                for e in range(m_edges):
                    used[chosen[e]] = 0
    finally:
        free(used); free(covered); free(chosen)
    return out


def coupled_discrepancy_stats(int n, int m_steps, object rng, Py_ssize_t num_samples):
    """Discrepancy counts and occupancy distance of shared-draw samples.

    Per sample: the number of placement steps whose drawn pair was a
    self-loop or an existing edge, and the total variation between the
    graph degree distribution and the ball-count distribution.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if num_samples < 0:
        raise ValueError("num_samples must be non-negative")
    cdef Py_ssize_t n_codes = (<Py_ssize_t>n) * (n - 1) // 2
    if m_steps < 0 or m_steps > n_codes:
        raise ValueError(f"m_steps must lie in 0..{n_codes}")

    b_out = np.zeros(num_samples, dtype=np.int64)
    tv_out = np.zeros(num_samples, dtype=np.float64)
    if num_samples == 0:
        return b_out, tv_out
    cdef cnp.int64_t[::1] b_view = b_out
    cdef double[::1] tv_view = tv_out

    u_np, v_np = np.triu_indices(n, k=1)
    u_arr = np.ascontiguousarray(u_np, dtype=np.int64)
    v_arr = np.ascontiguousarray(v_np, dtype=np.int64)
    cdef cnp.int64_t[::1] u_tab = u_arr
    cdef cnp.int64_t[::1] v_tab = v_arr

    bit_generator = rng.bit_generator
    cdef bitgen_t* gen = _bitgen(bit_generator)
    cdef Py_ssize_t hist_size = 2 * m_steps + 1
    cdef char* used = <char*> malloc(n_codes if n_codes else 1)
    cdef cnp.int64_t* balls = <cnp.int64_t*> malloc(n * sizeof(cnp.int64_t))
    cdef cnp.int64_t* deg = <cnp.int64_t*> malloc(n * sizeof(cnp.int64_t))
    cdef Py_ssize_t* chosen = <Py_ssize_t*> malloc((m_steps if m_steps else 1) * sizeof(Py_ssize_t))
    cdef cnp.int64_t* hist_d = <cnp.int64_t*> malloc(hist_size * sizeof(cnp.int64_t))
    cdef cnp.int64_t* hist_b = <cnp.int64_t*> malloc(hist_size * sizeof(cnp.int64_t))
    if (used == NULL or balls == NULL or deg == NULL or chosen == NULL
            or hist_d == NULL or hist_b == NULL):
        free(used); free(balls); free(deg); free(chosen); free(hist_d); free(hist_b)
        raise MemoryError()
    memset(used, 0, n_codes if n_codes else 1)

    cdef Py_ssize_t s, k, v1, v2, code, q, seen, t, free_count, cnt, vtx
    cdef double d0, d1, d2, acc
    cdef cnp.int64_t collisions
    lock = bit_generator.lock
    try:
        with lock, nogil:
            for s in range(num_samples):
                memset(balls, 0, n * sizeof(cnp.int64_t))
                memset(deg, 0, n * sizeof(cnp.int64_t))
                collisions = 0
                cnt = 0
                for k in range(m_steps):
                    d0 = gen.next_double(gen.state)
                    d1 = gen.next_double(gen.state)
                    d2 = gen.next_double(gen.state)
                    v1 = _bounded(d0, n)
                    v2 = _bounded(d1, n)
                    balls[v1] += 1
                    balls[v2] += 1
                    if v1 != v2:
                        if v1 < v2:
                            code = _tri_code(v1, v2, n)
                        else:
                            code = _tri_code(v2, v1, n)
                        if not used[code]:
                            used[code] = 1
                            chosen[cnt] = code
                            cnt += 1
                            deg[v1] += 1
                            deg[v2] += 1
                            continue
                    collisions += 1
                    free_count = n_codes - cnt
                    t = _bounded(d2, free_count)
                    seen = 0
                    code = -1
                    for q in range(n_codes):
                        if not used[q]:
                            if seen == t:
                                code = q
                                break
                            seen += 1
                    used[code] = 1
                    chosen[cnt] = code
                    cnt += 1
                    deg[u_tab[code]] += 1
                    deg[v_tab[code]] += 1
                b_view[s] = collisions
                memset(hist_d, 0, hist_size * sizeof(cnp.int64_t))
                memset(hist_b, 0, hist_size * sizeof(cnp.int64_t))
                for vtx in range(n):
                    hist_d[deg[vtx]] += 1
                    hist_b[balls[vtx]] += 1
                acc = 0.0
                for q in range(hist_size):
                    if hist_d[q] >= hist_b[q]:
                        acc += hist_d[q] - hist_b[q]
                    else:
                        acc += hist_b[q] - hist_d[q]
                tv_view[s] = 0.5 * acc / n
                for k in range(cnt):
                    used[chosen[k]] = 0
    finally:
        free(used); free(balls); free(deg); free(chosen); free(hist_d); free(hist_b)
    return b_out, tv_out


def allocation_profile_hist(int n_bins, int n_balls, object rng, Py_ssize_t num_samples):
    """Histogram of bin occupancies over i.i.d. uniform ball placements."""
    if n_bins < 1:
        raise ValueError("n must be positive")
    if num_samples < 0:
        raise ValueError("num_samples must be non-negative")
    if n_balls < 0:
        raise ValueError("n_balls must be non-negative")
    hist = np.zeros(n_balls + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] hist_view = hist
    if num_samples == 0:
        return hist
    if n_balls == 0:
        hist[0] = num_samples * n_bins
        return hist

    bit_generator = rng.bit_generator
    cdef bitgen_t* gen = _bitgen(bit_generator)
    cdef cnp.int64_t* counts = <cnp.int64_t*> malloc(n_bins * sizeof(cnp.int64_t))
    if counts == NULL:
        raise MemoryError()
    cdef Py_ssize_t s, ball, b, c
    lock = bit_generator.lock
    try:
        with lock, nogil:
            for s in range(num_samples):
                memset(counts, 0, n_bins * sizeof(cnp.int64_t))
                for ball in range(n_balls):
                    c = _bounded(gen.next_double(gen.state), n_bins)
                    counts[c] += 1
                for b in range(n_bins):
                    hist_view[counts[b]] += 1
    finally:
        free(counts)
    return hist


def allocation_empty_counts(int n_bins, int n_balls, object rng, Py_ssize_t num_samples):
    """Per-sample number of empty bins after i.i.d. uniform placements."""
    if n_bins < 1:
        raise ValueError("n must be positive")
    if num_samples < 0:
        raise ValueError("num_samples must be non-negative")
    if n_balls < 0:
        raise ValueError("n_balls must be non-negative")
    out = np.zeros(num_samples, dtype=np.int64)
    cdef cnp.int64_t[::1] out_view = out
    if num_samples == 0:
        return out
    if n_balls == 0:
        out[:] = n_bins
        return out

    bit_generator = rng.bit_generator
    cdef bitgen_t* gen = _bitgen(bit_generator)
    cdef cnp.int64_t* counts = <cnp.int64_t*> malloc(n_bins * sizeof(cnp.int64_t))
    if counts == NULL:
        raise MemoryError()
    cdef Py_ssize_t s, ball, b, c, empty
    lock = bit_generator.lock
    try:
        with lock, nogil:
            for s in range(num_samples):
                memset(counts, 0, n_bins * sizeof(cnp.int64_t))
                for ball in range(n_balls):
                    c = _bounded(gen.next_double(gen.state), n_bins)
                    counts[c] += 1
                empty = 0
                for b in range(n_bins):
                    if counts[b] == 0:
                        empty += 1
                out_view[s] = empty
    finally:
        free(counts)
    return out
