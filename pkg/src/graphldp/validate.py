"""Monte Carlo and exact-oracle experiments for the predicted decay rates.

The central operation estimates, for a grid of sizes n, the probability of
a configured rare event under one of the samplers, and reports the decay
exponent -(1/n) log p with binomial (Wilson) uncertainty.  Single-symbol
configurations route through the compiled kernels; everything else falls
back to the general samplers.

Sampling is chunked: chunk i of size index k derives its generator from
the seed sequence (seed, k, i), so results are bit-identical for any
worker count and chunk schedule.

An exact combinatorial oracle for the isolated-vertex event (inclusion
exclusion over subsets of isolated vertices) provides ground truth for
small and moderate n without any sampling.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _kernels
from .measures import (
    DegreeMeasure,
    DomainError,
    PairMeasure,
    SymbolAlphabet,
    SymbolMeasure,
    poisson_pmf,
    quantize_targets,
    total_variation,
)
from .samplers import (
    GraphParams,
    allocation_empirical_measures,
    edge_budget,
    empirical_measures,
    sample_allocation,
    sample_colored_graph,
    sample_conditional_graph,
    sample_coupled,
)

__all__ = [
    "CouplingProbeResult",
    "DecayEstimate",
    "EventSpec",
    "ExperimentConfig",
    "LlnResult",
    "PerNEstimate",
    "coupling_probe",
    "estimate_event_rate",
    "exact_isolated_tail",
    "lln_probe",
    "wilson_interval",
    "write_coupling_csv",
    "write_decay_csv",
    "write_manifest",
]

MODELS = ("conditional-graph", "allocation", "coupled", "bernoulli-graph")
EVENT_KINDS = (
    "isolated-fraction-ge",
    "degree-tv-le",
    "coupling-tv-ge",
    "always",
    "never",
)

DEFAULT_CHUNK = 1 << 15


def _as_fraction(value) -> Fraction:
    """Decimal-faithful conversion: floats go through their short repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise DomainError(f"cannot interpret {value!r} as an exact fraction")


@dataclass(frozen=True)
class EventSpec:
    """Named event predicate with parameters.

    ``isolated-fraction-ge``: the proportion of degree-0 vertices (empty
    bins) is at least ``threshold`` (held exactly, as a fraction).
    ``degree-tv-le``: the empirical degree measure lies within total
    variation ``radius`` of ``target``.  ``coupling-tv-ge``: the distance
    between the coupled pair of neighbourhood measures is at least
    ``threshold`` (coupled model only).  ``always`` / ``never`` are
    plumbing probes.
    """

    kind: str
    threshold: Fraction | float | None = None
    target: DegreeMeasure | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise DomainError(f"unknown event kind {self.kind!r}")
        if self.kind == "isolated-fraction-ge":
            object.__setattr__(self, "threshold", _as_fraction(self.threshold))
            if not 0 <= self.threshold <= 1:
                raise DomainError("isolated-fraction threshold must lie in [0, 1]")
        if self.kind == "coupling-tv-ge":
            if self.threshold is None or float(self.threshold) <= 0:
                raise DomainError("coupling threshold must be positive")
        if self.kind == "degree-tv-le":
            if self.target is None or self.radius is None or self.radius < 0:
                raise DomainError("degree-tv-le needs a target measure and radius >= 0")

    def count_threshold(self, n: int) -> int:
        """Smallest integer count c with c/n >= threshold, computed exactly."""
        t = _as_fraction(self.threshold)
        return -((-t.numerator * n) // t.denominator)

    def to_jsonable(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.threshold is not None:
            t = self.threshold
            out["threshold"] = (
                f"{t.numerator}/{t.denominator}" if isinstance(t, Fraction) else t
            )
        if self.radius is not None:
            out["radius"] = self.radius
        if self.target is not None:
            out["target"] = self.target.to_jsonable()
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    """One decay experiment: model, targets, size grid, event, budget.

    Targets are given either as a single-symbol mean ``c`` (edge budget
    n c / 2, rounded to the nearest feasible integer with the effective c
    reported per n) or as explicit (nu, pi) measures quantized per n.
    """

    model: str
    event: EventSpec
    n_grid: tuple[int, ...]
    samples_per_n: int
    seed: int
    c: float | None = None
    nu: SymbolMeasure | None = None
    pi: PairMeasure | None = None
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}")
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("n_grid must be non-empty and strictly increasing")
        if any(n < 1 for n in grid):
            raise DomainError("sizes must be positive")
        if self.samples_per_n < 1:
            raise DomainError("samples_per_n must be >= 1")
        if (self.c is None) == (self.nu is None and self.pi is None):
            if self.c is None:
                raise DomainError("provide either c or (nu, pi) targets")
        if self.c is not None and self.c < 0:
            raise DomainError("c must be non-negative")
        if (self.nu is None) != (self.pi is None):
            raise DomainError("nu and pi must be provided together")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        if self.chunk_size < 1:
            raise DomainError("chunk_size must be >= 1")
        if self.model == "coupled" and self.event.kind == "degree-tv-le":
            raise DomainError("degree-tv-le is not defined for the coupled model")
        if self.event.kind == "coupling-tv-ge" and self.model != "coupled":
            raise DomainError("coupling-tv-ge requires the coupled model")

    def is_single_symbol(self) -> bool:
        if self.c is not None:
            return True
        return self.nu.alphabet.size == 1

    def targets_for(self, n: int) -> tuple[SymbolMeasure, PairMeasure, float]:
        """Quantized per-n targets plus the effective single-symbol mean."""
        if self.c is not None:
            m_edges = _edge_count(n, self.c)
            alphabet = SymbolAlphabet.of_size(1)
            nu_n = SymbolMeasure(alphabet, (Fraction(1),))
            pi_n = PairMeasure(alphabet, ((Fraction(2 * m_edges, n),),))
            return nu_n, pi_n, 2.0 * m_edges / n
        nu_n, pi_n = quantize_targets(self.nu, self.pi, n)
        return nu_n, pi_n, float(pi_n.total_mass)

    def to_jsonable(self) -> dict:
        out: dict = {
            "model": self.model,
            "event": self.event.to_jsonable(),
            "n_grid": list(self.n_grid),
            "samples_per_n": self.samples_per_n,
            "seed": self.seed,
            "workers": self.workers,
            "chunk_size": self.chunk_size,
        }
        if self.c is not None:
            out["c"] = self.c
        if self.nu is not None:
            out["nu"] = self.nu.to_jsonable()
            out["pi"] = self.pi.to_jsonable()
        return out


def _edge_count(n: int, c: float) -> int:
    """Nearest feasible edge budget to n c / 2."""
    cap = n * (n - 1) // 2
    m_edges = int(math.floor(n * c / 2.0 + 0.5))
    return max(0, min(m_edges, cap))


@dataclass(frozen=True)
class PerNEstimate:
    """Event-frequency estimate at one size n."""

    n: int
    effective_c: float
    samples: int
    hits: int
    p_hat: float
    wilson_low: float
    wilson_high: float
    censored: bool
    rate: float | None
    rate_lower_bound: float

    def to_jsonable(self) -> dict:
        return {
            "n": self.n,
            "effective_c": self.effective_c,
            "samples": self.samples,
            "hits": self.hits,
            "p_hat": self.p_hat,
            "wilson_low": self.wilson_low,
            "wilson_high": self.wilson_high,
            "censored": self.censored,
            "rate": self.rate,
            "rate_lower_bound": self.rate_lower_bound,
        }


@dataclass(frozen=True)
class DecayEstimate:
    """Per-n event frequencies plus an extrapolated asymptotic rate."""

    config: ExperimentConfig
    per_n: tuple[PerNEstimate, ...]

    def extrapolated_rate(self) -> tuple[float, float] | None:
        """Weighted linear fit of rate against 1/n, reported at 1/n = 0.

        Returns (rate, standard error), or None when fewer than two
        uncensored sizes are available.  Weights are the delta-method
        variances of -(1/n) log p_hat.
        """
        xs, ys, ws = [], [], []
        for est in self.per_n:
            if est.censored or est.rate is None or est.p_hat in (0.0, 1.0):
                continue
            var = (1.0 - est.p_hat) / (est.samples * est.p_hat)
            var /= est.n * est.n
            if var <= 0:
                continue
            xs.append(1.0 / est.n)
            ys.append(est.rate)
            ws.append(1.0 / var)
        if len(xs) < 2:
            return None
        x = np.array(xs)
        y = np.array(ys)
        w = np.array(ws)
        design = np.column_stack([np.ones_like(x), x])
        wd = design * w[:, None]
        normal = design.T @ wd
        coef = np.linalg.solve(normal, wd.T @ y)
        cov = np.linalg.inv(normal)
        return float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0)))

    def to_jsonable(self) -> dict:
        summary = self.extrapolated_rate()
        return {
            "type": "decay_estimate",
            "config": self.config.to_jsonable(),
            "per_n": [est.to_jsonable() for est in self.per_n],
            "extrapolated_rate": None if summary is None else summary[0],
            "extrapolated_rate_stderr": None if summary is None else summary[1],
        }


def wilson_interval(hits: int, total: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if total < 1:
        raise DomainError("total must be >= 1")
    if not 0 <= hits <= total:
        raise DomainError("hits must lie in 0..total")
    p = hits / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (p + z2 / (2.0 * total)) / denom
    half = z * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom
    low = 0.0 if hits == 0 else max(0.0, center - half)
    high = 1.0 if hits == total else min(1.0, center + half)
    return low, high


def _chunk_sizes(total: int, chunk: int) -> list[int]:
    full, rest = divmod(total, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _chunk_rng(seed: int, n_index: int, chunk_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, n_index, chunk_index]))


def _run_chunks(
    cfg: ExperimentConfig,
    n_index: int,
    worker: Callable[[np.random.Generator, int], int],
) -> int:
    """Sum worker(rng, chunk_size) over deterministic per-chunk streams."""
    sizes = _chunk_sizes(cfg.samples_per_n, cfg.chunk_size)
    specs = [
        (_chunk_rng(cfg.seed, n_index, i), size) for i, size in enumerate(sizes)
    ]
    if cfg.workers == 1 or len(specs) == 1:
        return sum(worker(rng, size) for rng, size in specs)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return sum(pool.map(lambda spec: worker(*spec), specs))


# ---------------------------------------------------------------------------
# event evaluation


def _kernel_hit_counter(
    cfg: ExperimentConfig, n: int, nu_n: SymbolMeasure, pi_n: PairMeasure
) -> Callable[[np.random.Generator, int], int] | None:
    """Fast single-symbol chunk worker, or None if no kernel applies."""
    if not cfg.is_single_symbol():
        return None
    symbol = nu_n.alphabet.symbols[0]
    m_edges = edge_budget(pi_n, n)[(symbol, symbol)]
    event = cfg.event
    if cfg.model == "conditional-graph" and event.kind == "isolated-fraction-ge":
        threshold = event.count_threshold(n)

        def worker(rng, size):
            counts = _kernels.conditional_isolated_counts(n, m_edges, rng, size)
            return int((counts >= threshold).sum())

        return worker
    if cfg.model == "allocation" and event.kind == "isolated-fraction-ge":
        threshold = event.count_threshold(n)
        n_balls = 2 * m_edges

        def worker(rng, size):
            counts = _kernels.allocation_empty_counts(n, n_balls, rng, size)
            return int((counts >= threshold).sum())

        return worker
    if cfg.model == "coupled" and event.kind == "coupling-tv-ge":
        eps = float(event.threshold)

        def worker(rng, size):
            _b, tv = _kernels.coupled_discrepancy_stats(n, m_edges, rng, size)
            return int((tv >= eps).sum())

        return worker
    return None


def _general_hit_counter(
    cfg: ExperimentConfig, n: int, nu_n: SymbolMeasure, pi_n: PairMeasure
) -> Callable[[np.random.Generator, int], int]:
    event = cfg.event
    model = cfg.model

    if event.kind == "isolated-fraction-ge":
        threshold = event.count_threshold(n)

        def predicate(sample) -> bool:
            if model == "allocation":
                isolated = sum(1 for p in sample.profiles if p.degree == 0)
            else:
                deg = sample.degree_sequence()
                isolated = sum(1 for d in deg if d == 0)
            return isolated >= threshold

    elif event.kind == "degree-tv-le":
        target, radius = event.target, event.radius

        def predicate(sample) -> bool:
            measures = (
                allocation_empirical_measures(sample)
                if model == "allocation"
                else empirical_measures(sample)
            )
            return total_variation(measures[3], target) <= radius

    elif event.kind == "coupling-tv-ge":
        eps = float(event.threshold)

        def predicate(sample) -> bool:
            mu_graph = empirical_measures(sample.graph)[2]
            mu_alloc = allocation_empirical_measures(sample.allocation)[2]
            return total_variation(mu_graph, mu_alloc) >= eps

    else:
        raise DomainError(f"event {event.kind!r} has no sampling predicate")

    if model == "bernoulli-graph":
        if cfg.c is None:
            raise DomainError("bernoulli-graph validation requires c targets")
        params = GraphParams(n, nu_n, ((cfg.c,),))

        def draw(rng):
            return sample_colored_graph(params, rng)

    elif model == "conditional-graph":

        def draw(rng):
            return sample_conditional_graph(nu_n, pi_n, n, rng)

    elif model == "allocation":

        def draw(rng):
            return sample_allocation(nu_n, pi_n, n, rng)

    else:  # coupled

        def draw(rng):
            return sample_coupled(nu_n, pi_n, n, rng)

    def worker(rng, size):
        return sum(1 for _ in range(size) if predicate(draw(rng)))

    return worker


def _estimate_at_n(cfg: ExperimentConfig, n_index: int, n: int) -> PerNEstimate:
    nu_n, pi_n, effective_c = cfg.targets_for(n)
    total = cfg.samples_per_n
    if cfg.event.kind == "always":
        hits = total
    elif cfg.event.kind == "never":
        hits = 0
    else:
        worker = _kernel_hit_counter(cfg, n, nu_n, pi_n)
        if worker is None:
            worker = _general_hit_counter(cfg, n, nu_n, pi_n)
        hits = _run_chunks(cfg, n_index, worker)
    p_hat = hits / total
    low, high = wilson_interval(hits, total)
    censored = hits == 0
    rate = None if censored else -math.log(p_hat) / n
    rate_lower_bound = -math.log(high) / n if high > 0 else math.inf
    return PerNEstimate(
        n=n,
        effective_c=effective_c,
        samples=total,
        hits=hits,
        p_hat=p_hat,
        wilson_low=low,
        wilson_high=high,
        censored=censored,
        rate=rate,
        rate_lower_bound=rate_lower_bound,
    )


def estimate_event_rate(cfg: ExperimentConfig) -> DecayEstimate:
    """Estimate the event decay exponent over the configured size grid.

    For each n the model is sampled ``samples_per_n`` times and the event
    frequency reported as -(1/n) log p_hat with a Wilson 95% interval.
    Sizes with zero hits are reported as censored (the interval still
    yields a rate lower bound); they are never dropped silently.
    """
    per_n = tuple(
        _estimate_at_n(cfg, idx, n) for idx, n in enumerate(cfg.n_grid)
    )
    return DecayEstimate(config=cfg, per_n=per_n)


# ---------------------------------------------------------------------------
# coupling probe


@dataclass(frozen=True)
class CouplingPerN:
    """Coupled-model statistics at one size."""

    n: int
    steps: int
    samples: int
    hits: int
    p_hat: float
    wilson_low: float
    wilson_high: float
    censored: bool
    rate: float | None
    mean_discrepancies: float
    std_discrepancies: float
    mean_tv: float
    bound_violations: int

    def to_jsonable(self) -> dict:
        return {
            "n": self.n,
            "steps": self.steps,
            "samples": self.samples,
            "hits": self.hits,
            "p_hat": self.p_hat,
            "wilson_low": self.wilson_low,
            "wilson_high": self.wilson_high,
            "censored": self.censored,
            "rate": self.rate,
            "mean_discrepancies": self.mean_discrepancies,
            "std_discrepancies": self.std_discrepancies,
            "mean_tv": self.mean_tv,
            "bound_violations": self.bound_violations,
        }


@dataclass(frozen=True)
class CouplingProbeResult:
    """Exceedance decay plus discrepancy diagnostics of the coupling."""

    eps: float
    per_n: tuple[CouplingPerN, ...]

    def to_jsonable(self) -> dict:
        return {
            "type": "coupling_probe",
            "eps": self.eps,
            "per_n": [p.to_jsonable() for p in self.per_n],
        }


def coupling_probe(
    nu: SymbolMeasure | None,
    pi: PairMeasure | None,
    n_grid: Sequence[int],
    eps: float,
    samples: int,
    seed: int,
    *,
    c: float | None = None,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> CouplingProbeResult:
    """Sample the coupled construction and summarise its discrepancies.

    Per n, reports the frequency of {distance >= eps} between the two
    empirical neighbourhood measures, the mean and standard deviation of
    the total discrepancy count, the mean distance, and the number of
    samples violating the per-sample bound distance <= 4 B / n.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    cfg = ExperimentConfig(
        model="coupled",
        event=EventSpec("coupling-tv-ge", threshold=eps),
        n_grid=tuple(n_grid),
        samples_per_n=samples,
        seed=seed,
        c=c,
        nu=nu,
        pi=pi,
        workers=workers,
        chunk_size=chunk_size,
    )
    per_n = []
    for idx, n in enumerate(cfg.n_grid):
        nu_n, pi_n, _ = cfg.targets_for(n)
        budget = edge_budget(pi_n, n)
        symbols = pi_n.alphabet.symbols
        m_steps = sum(
            budget[(symbols[i], symbols[j])]
            for i in range(len(symbols))
            for j in range(i, len(symbols))
        )
        if cfg.is_single_symbol():

            def stats_worker(rng, size, n=n, m_steps=m_steps):
                b, tv = _kernels.coupled_discrepancy_stats(n, m_steps, rng, size)
                hits = int((tv >= eps).sum())
                violations = int((tv > 4.0 * b / n + 1e-12).sum())
                return np.array(
                    [hits, b.sum(), (b * b).sum(), violations], dtype=np.float64
                ), tv.sum()

        else:

            def stats_worker(rng, size, n=n, nu_n=nu_n, pi_n=pi_n):
                hits = 0
                b_sum = 0.0
                b_sq = 0.0
                tv_sum = 0.0
                violations = 0
                for _ in range(size):
                    sample = sample_coupled(nu_n, pi_n, n, rng)
                    b = sample.total_discrepancies()
                    mu_graph = empirical_measures(sample.graph)[2]
                    mu_alloc = allocation_empirical_measures(sample.allocation)[2]
                    tv = total_variation(mu_graph, mu_alloc)
                    hits += tv >= eps
                    b_sum += b
                    b_sq += b * b
                    tv_sum += tv
                    violations += tv > 4.0 * b / n + 1e-12
                return np.array(
                    [hits, b_sum, b_sq, violations], dtype=np.float64
                ), tv_sum

        sizes = _chunk_sizes(samples, chunk_size)
        specs = [(_chunk_rng(seed, idx, i), size) for i, size in enumerate(sizes)]
        if workers == 1 or len(specs) == 1:
            results = [stats_worker(rng, size) for rng, size in specs]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda spec: stats_worker(*spec), specs))
        acc = sum((r[0] for r in results), np.zeros(4))
        tv_total = sum(r[1] for r in results)
        hits = int(acc[0])
        mean_b = acc[1] / samples
        var_b = max(acc[2] / samples - mean_b * mean_b, 0.0)
        low, high = wilson_interval(hits, samples)
        censored = hits == 0
        per_n.append(
            CouplingPerN(
                n=n,
                steps=m_steps,
                samples=samples,
                hits=hits,
                p_hat=hits / samples,
                wilson_low=low,
                wilson_high=high,
                censored=censored,
                rate=None if censored else -math.log(hits / samples) / n,
                mean_discrepancies=float(mean_b),
                std_discrepancies=float(math.sqrt(var_b)),
                mean_tv=float(tv_total / samples),
                bound_violations=int(acc[3]),
            )
        )
    return CouplingProbeResult(eps=eps, per_n=tuple(per_n))


# ---------------------------------------------------------------------------
# law-of-large-numbers probe


@dataclass(frozen=True)
class LlnResult:
    """Distance between the sample-averaged occupancy law and its limit."""

    n: int
    samples: int
    distance: float

    def to_jsonable(self) -> dict:
        return {"n": self.n, "samples": self.samples, "distance": self.distance}


def lln_probe(
    nu: SymbolMeasure | None,
    pi: PairMeasure | None,
    n: int,
    samples: int,
    seed: int,
    *,
    c: float | None = None,
) -> LlnResult:
    """Total variation between the mean allocation law and its limit.

    Averages the empirical occupancy measure over ``samples`` allocation
    draws and returns its total variation distance to the product-Poisson
    reference with the quantized intensities (tail mass beyond the
    observed support counts fully).
    """
    cfg = ExperimentConfig(
        model="allocation",
        event=EventSpec("always"),
        n_grid=(n,),
        samples_per_n=samples,
        seed=seed,
        c=c,
        nu=nu,
        pi=pi,
    )
    nu_n, pi_n, _ = cfg.targets_for(n)
    rng = _chunk_rng(seed, 0, 0)
    if cfg.is_single_symbol():
        symbol = nu_n.alphabet.symbols[0]
        n_balls = 2 * edge_budget(pi_n, n)[(symbol, symbol)]
        intensity = n_balls / n
        hist = _kernels.allocation_profile_hist(n, n_balls, rng, samples)
        mean_pmf = hist / (samples * n)
        ref = np.array([poisson_pmf(intensity, k) for k in range(n_balls + 1)])
        distance = 0.5 * (np.abs(mean_pmf - ref).sum() + (1.0 - ref.sum()))
        return LlnResult(n=n, samples=samples, distance=float(distance))

    from .measures import poi_mass  # local import to avoid cycle noise

    acc: dict = {}
    for _ in range(samples):
        outcome = sample_allocation(nu_n, pi_n, n, rng)
        mu = allocation_empirical_measures(outcome)[2]
        for key, w in mu.items():
            acc[key] = acc.get(key, 0.0) + float(w) / samples
    ref_mass = 0.0
    distance = 0.0
    for key, w in acc.items():
        q = poi_mass(nu_n, pi_n, key[0], key[1])
        ref_mass += q
        distance += abs(w - q)
    distance = 0.5 * (distance + (1.0 - ref_mass))
    return LlnResult(n=n, samples=samples, distance=float(distance))


# ---------------------------------------------------------------------------
# exact oracle for the isolated-vertex tail


def exact_isolated_tail(n: int, m_edges: int, j: int) -> Fraction:
    """Exact P(at least j isolated vertices) for a uniform m-edge graph.

    Inclusion exclusion over the number of isolated vertices: with
    g(t) = C(C(n-t, 2), m) / C(C(n, 2), m) the probability that a fixed
    set of t vertices is isolated, P(I >= j) equals
    sum_{t=j..n} (-1)^(t-j) C(t-1, j-1) C(n, t) g(t).
    """
    if n < 1:
        raise DomainError("n must be positive")
    n_codes = comb(n, 2)
    if not 0 <= m_edges <= n_codes:
        raise DomainError(f"m_edges must lie in 0..{n_codes}")
    if j <= 0:
        return Fraction(1)
    if j > n:
        return Fraction(0)
    denom = comb(n_codes, m_edges)
    total = Fraction(0)
    for t in range(j, n + 1):
        free = comb(comb(n - t, 2), m_edges)
        if free == 0:
            continue
        term = comb(t - 1, j - 1) * comb(n, t) * Fraction(free, denom)
        total += term if (t - j) % 2 == 0 else -term
    return total


# ---------------------------------------------------------------------------
# persistence


def write_decay_csv(path: str, estimate: DecayEstimate) -> None:
    """One row per n; '.' decimals, LF endings, no thousands separators."""
    tmp = path + ".tmp"
    with open(tmp, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "n",
                "effective_c",
                "samples",
                "hits",
                "p_hat",
                "wilson_low",
                "wilson_high",
                "censored",
                "rate",
                "rate_lower_bound",
            ]
        )
        for est in estimate.per_n:
            writer.writerow(
                [
                    est.n,
                    repr(est.effective_c),
                    est.samples,
                    est.hits,
                    repr(est.p_hat),
                    repr(est.wilson_low),
                    repr(est.wilson_high),
                    int(est.censored),
                    "" if est.rate is None else repr(est.rate),
                    repr(est.rate_lower_bound),
                ]
            )
    os.replace(tmp, path)


def write_coupling_csv(path: str, probe: CouplingProbeResult) -> None:
    """One row per n of the coupling probe; same conventions as decay CSV."""
    tmp = path + ".tmp"
    with open(tmp, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "n",
                "steps",
                "samples",
                "hits",
                "p_hat",
                "wilson_low",
                "wilson_high",
                "censored",
                "rate",
                "mean_discrepancies",
                "std_discrepancies",
                "mean_tv",
                "bound_violations",
            ]
        )
        for est in probe.per_n:
            writer.writerow(
                [
                    est.n,
                    est.steps,
                    est.samples,
                    est.hits,
                    repr(est.p_hat),
                    repr(est.wilson_low),
                    repr(est.wilson_high),
                    int(est.censored),
                    "" if est.rate is None else repr(est.rate),
                    repr(est.mean_discrepancies),
                    repr(est.std_discrepancies),
                    repr(est.mean_tv),
                    est.bound_violations,
                ]
            )
    os.replace(tmp, path)


def write_manifest(
    path: str,
    subcommand: str,
    params: Mapping,
    outputs: Sequence[str],
    started: float,
) -> None:
    """Atomic JSON manifest: config, content hash, outputs, wall clock."""
    from . import __version__

    payload = json.dumps(params, sort_keys=True, separators=(",", ":"))
    manifest = {
        "subcommand": subcommand,
        "parameters": params,
        "content_sha256": hashlib.sha256(payload.encode()).hexdigest(),
        "tool_version": __version__,
        "kernel_backend": _kernels.backend_name(),
        "outputs": sorted(outputs),
        "wall_clock_seconds": round(time.time() - started, 3),
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
