"""Pure NumPy Monte Carlo kernels (fallback backend).

Single-symbol hot paths used by the validation experiments: isolated-vertex
counts of the conditioned graph, shared-draw graph/allocation discrepancy
statistics, and bin occupancy histograms of the allocation.  The compiled
backend implements the same contracts; the coupled and allocation kernels
consume uniforms in exactly the same order in both backends, so those two
produce bitwise-identical outputs for the same generator state.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "allocation_empty_counts",
    "allocation_profile_hist",
    "conditional_isolated_counts",
    "coupled_discrepancy_stats",
]


def _check_args(n: int, num_samples: int) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    if num_samples < 0:
        raise ValueError("num_samples must be non-negative")


def conditional_isolated_counts(
    n: int, m_edges: int, rng: np.random.Generator, num_samples: int
) -> np.ndarray:
    """Isolated-vertex counts of uniform m-edge graphs on n vertices.

    Each sample draws ``m_edges`` distinct vertex pairs uniformly (edge
    codes are rejection-sampled per row until distinct) and reports the
    number of vertices touched by no edge.
    """
    _check_args(n, num_samples)
    n_codes = n * (n - 1) // 2
    if m_edges < 0 or m_edges > n_codes:
        raise ValueError(f"m_edges must lie in 0..{n_codes}")
    out = np.full(num_samples, n, dtype=np.int64)
    if m_edges == 0 or num_samples == 0:
        return out
    u_tab, v_tab = np.triu_indices(n, k=1)
    codes = rng.integers(0, n_codes, size=(num_samples, m_edges))
    if m_edges > 1:
        while True:
            ordered = np.sort(codes, axis=1)
            bad = (np.diff(ordered, axis=1) == 0).any(axis=1)
            count = int(bad.sum())
            if count == 0:
                break
            codes[bad] = rng.integers(0, n_codes, size=(count, m_edges))
    covered = np.zeros((num_samples, n), dtype=bool)
    rows = np.repeat(np.arange(num_samples), m_edges)
    flat = covered.ravel()
    flat[rows * n + u_tab[codes].ravel()] = True
    flat[rows * n + v_tab[codes].ravel()] = True
    return n - covered.sum(axis=1)


def coupled_discrepancy_stats(
    n: int, m_steps: int, rng: np.random.Generator, num_samples: int
) -> tuple[np.ndarray, np.ndarray]:
    """Discrepancy counts and occupancy distance of shared-draw samples.

    Runs the single-symbol coupled construction: each step drops two balls
    at uniform vertices and, when the drawn pair is a fresh non-loop, adds
    it as an edge; otherwise the edge is redrawn uniformly from the unused
    pairs and the discrepancy count increments.  Returns per-sample arrays
    (discrepancy counts, total variation between the empirical degree
    distribution of the graph and the ball-count distribution).

    Each step consumes exactly three uniforms, in the same order as the
    compiled backend.
    """
    _check_args(n, num_samples)
    n_codes = n * (n - 1) // 2
    if m_steps < 0 or m_steps > n_codes:
        raise ValueError(f"m_steps must lie in 0..{n_codes}")
    u_tab, v_tab = np.triu_indices(n, k=1)
    code_of = np.zeros((n, n), dtype=np.int64)
    code_of[u_tab, v_tab] = np.arange(n_codes)
    code_of[v_tab, u_tab] = np.arange(n_codes)

    b_out = np.zeros(num_samples, dtype=np.int64)
    tv_out = np.zeros(num_samples, dtype=np.float64)
    hist_size = 2 * m_steps + 1
    for s in range(num_samples):
        draws = rng.random((m_steps, 3))
        balls = np.zeros(n, dtype=np.int64)
        deg = np.zeros(n, dtype=np.int64)
        used = np.zeros(n_codes, dtype=bool)
        collisions = 0
        for k in range(m_steps):
            v1 = min(int(draws[k, 0] * n), n - 1)
            v2 = min(int(draws[k, 1] * n), n - 1)
            balls[v1] += 1
            balls[v2] += 1
            if v1 != v2:
                code = code_of[v1, v2]
                if not used[code]:
                    used[code] = True
                    deg[v1] += 1
                    deg[v2] += 1
                    continue
            collisions += 1
            free = np.flatnonzero(~used)
            code = free[min(int(draws[k, 2] * len(free)), len(free) - 1)]
            used[code] = True
            deg[u_tab[code]] += 1
            deg[v_tab[code]] += 1
        b_out[s] = collisions
        hist_deg = np.bincount(deg, minlength=hist_size)
        hist_balls = np.bincount(balls, minlength=hist_size)
        tv_out[s] = 0.5 * np.abs(hist_deg - hist_balls).sum() / n
    return b_out, tv_out


def _occupancy(
    n_bins: int, n_balls: int, rng: np.random.Generator, num_samples: int
) -> np.ndarray:
    codes = (rng.random((num_samples, n_balls)) * n_bins).astype(np.int64)
    np.minimum(codes, n_bins - 1, out=codes)
    counts = np.zeros((num_samples, n_bins), dtype=np.int64)
    rows = np.repeat(np.arange(num_samples), n_balls)
    np.add.at(counts, (rows, codes.ravel()), 1)
    return counts


def allocation_profile_hist(
    n_bins: int, n_balls: int, rng: np.random.Generator, num_samples: int
) -> np.ndarray:
    """Histogram of bin occupancies over i.i.d. uniform ball placements.

    Entry k counts, summed over samples, the bins that received exactly k
    balls; the array has length ``n_balls + 1`` and sums to
    ``num_samples * n_bins``.  Uniforms are consumed ball by ball in the
    same order as the compiled backend.
    """
    _check_args(n_bins, num_samples)
    if n_balls < 0:
        raise ValueError("n_balls must be non-negative")
    hist = np.zeros(n_balls + 1, dtype=np.int64)
    if num_samples == 0:
        return hist
    if n_balls == 0:
        hist[0] = num_samples * n_bins
        return hist
    counts = _occupancy(n_bins, n_balls, rng, num_samples)
    agg = np.bincount(counts.ravel(), minlength=n_balls + 1)
    return agg.astype(np.int64)


def allocation_empty_counts(
    n_bins: int, n_balls: int, rng: np.random.Generator, num_samples: int
) -> np.ndarray:
    """Per-sample number of empty bins after i.i.d. uniform placements."""
    _check_args(n_bins, num_samples)
    if n_balls < 0:
        raise ValueError("n_balls must be non-negative")
    if num_samples == 0:
        return np.zeros(0, dtype=np.int64)
    if n_balls == 0:
        return np.full(num_samples, n_bins, dtype=np.int64)
    counts = _occupancy(n_bins, n_balls, rng, num_samples)
    return (counts == 0).sum(axis=1).astype(np.int64)
