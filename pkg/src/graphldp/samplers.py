"""Samplers for symbolled graphs, conditioned graphs and random allocations.

Three related models are implemented:

* the unconditioned sparse model: vertices draw i.i.d. symbols and each
  pair {u, v} is joined independently with probability kernel(a,b)/n;
* the conditioned model: given exact empirical targets (nu_n, pi_n) the
  symbol sequence is a uniform permutation with the prescribed counts and,
  for every symbol pair, the prescribed number of edges is drawn uniformly
  without replacement from the admissible slots;
* the allocation surrogate: the edges incident to symbol-a vertices are
  replaced by i.i.d. uniform placements of symbol-b balls into the
  symbol-a bins.

A coupled sampler runs the conditioned model and the surrogate on shared
uniform draws and records every step at which the two constructions are
forced apart.

Vertices are indexed 0..n-1.  All samplers take a ``numpy.random.Generator``
and are deterministic given the generator state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .measures import (
    DegreeMeasure,
    DomainError,
    LocalProfile,
    NeighbourhoodMeasure,
    PairMeasure,
    SymbolAlphabet,
    SymbolMeasure,
)

__all__ = [
    "AllocationOutcome",
    "ColoredGraph",
    "CoupledSample",
    "FeasibilityError",
    "GraphParams",
    "allocation_empirical_measures",
    "collision_prob",
    "edge_budget",
    "empirical_measures",
    "sample_allocation",
    "sample_colored_graph",
    "sample_conditional_graph",
    "sample_coupled",
]


class FeasibilityError(ValueError):
    """The requested targets cannot be realised by any graph or allocation."""


@dataclass(frozen=True)
class GraphParams:
    """Parameters of the unconditioned sparse symbolled graph.

    ``kernel[i][j]`` scales the connection probability of symbol pair
    (i, j): vertices of symbols a and b are joined with probability
    min(kernel(a,b)/n, 1).  The kernel must be symmetric and non-negative.
    """

    n: int
    symbol_law: SymbolMeasure
    kernel: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be positive")
        m = self.symbol_law.alphabet.size
        rows = tuple(tuple(float(x) for x in row) for row in self.kernel)
        object.__setattr__(self, "kernel", rows)
        if len(rows) != m or any(len(row) != m for row in rows):
            raise DomainError(f"kernel must be a {m}x{m} matrix")
        for i in range(m):
            for j in range(m):
                if rows[i][j] < 0:
                    raise DomainError("kernel entries must be non-negative")
                if rows[i][j] != rows[j][i]:
                    raise DomainError("kernel must be symmetric")

    def edge_probability(self, i: int, j: int) -> float:
        return min(self.kernel[i][j] / self.n, 1.0)


@dataclass(frozen=True)
class ColoredGraph:
    """A simple undirected graph with one symbol per vertex.

    Edges are stored as (u, v) with u < v; vertex indices run 0..n-1.
    """

    n: int
    alphabet: SymbolAlphabet
    symbols: tuple[int, ...]  # alphabet index per vertex
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if len(self.symbols) != self.n:
            raise DomainError("one symbol per vertex is required")
        m = self.alphabet.size
        if any(not 0 <= s < m for s in self.symbols):
            raise DomainError("symbol index out of range")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise DomainError(f"edge ({u},{v}) is not canonical for n={self.n}")

    def symbol_name(self, v: int) -> str:
        return self.alphabet.symbols[self.symbols[v]]

    def degree_sequence(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    def to_jsonable(self) -> dict:
        return {
            "type": "colored_graph",
            "n": self.n,
            "alphabet": list(self.alphabet.symbols),
            "symbols": [self.alphabet.symbols[s] for s in self.symbols],
            "edges": sorted([u, v] for u, v in self.edges),
        }

    @classmethod
    def from_jsonable(cls, data: Mapping) -> "ColoredGraph":
        alphabet = SymbolAlphabet(tuple(data["alphabet"]))
        symbols = tuple(alphabet.index(s) for s in data["symbols"])
        edges = frozenset((min(u, v), max(u, v)) for u, v in data["edges"])
        return cls(int(data["n"]), alphabet, symbols, edges)


@dataclass(frozen=True)
class AllocationOutcome:
    """Result of dropping symbolled balls into symbolled bins.

    ``profiles[v]`` counts, per ball symbol, the balls that landed in bin v.
    Bins carry the same symbol sequence as the graph vertices they stand for.
    """

    n: int
    alphabet: SymbolAlphabet
    symbols: tuple[int, ...]
    profiles: tuple[LocalProfile, ...]

    def __post_init__(self):
        if len(self.symbols) != self.n or len(self.profiles) != self.n:
            raise DomainError("one symbol and one profile per bin are required")
        m = self.alphabet.size
        if any(len(p.counts) != m for p in self.profiles):
            raise DomainError("profile length does not match the alphabet")

    def to_jsonable(self) -> dict:
        return {
            "type": "allocation",
            "n": self.n,
            "alphabet": list(self.alphabet.symbols),
            "symbols": [self.alphabet.symbols[s] for s in self.symbols],
            "profiles": [list(p.counts) for p in self.profiles],
        }

    @classmethod
    def from_jsonable(cls, data: Mapping) -> "AllocationOutcome":
        alphabet = SymbolAlphabet(tuple(data["alphabet"]))
        symbols = tuple(alphabet.index(s) for s in data["symbols"])
        profiles = tuple(LocalProfile(tuple(c)) for c in data["profiles"])
        return cls(int(data["n"]), alphabet, symbols, profiles)


@dataclass(frozen=True)
class CoupledSample:
    """Joint draw of a conditioned graph and its allocation surrogate.

    ``discrepancies[i][j]`` counts the placement steps for symbol pair
    (i, j) at which the shared draw could not be used as a fresh edge
    (self-loop or repeated pair) and the graph edge was redrawn.  The matrix
    is symmetric and each unordered pair is counted once.
    """

    graph: ColoredGraph
    allocation: AllocationOutcome
    discrepancies: tuple[tuple[int, ...], ...]

    def total_discrepancies(self) -> int:
        m = len(self.discrepancies)
        return sum(
            self.discrepancies[i][j] for i in range(m) for j in range(i, m)
        )


# ---------------------------------------------------------------------------
# unconditioned model


def sample_colored_graph(params: GraphParams, rng: np.random.Generator) -> ColoredGraph:
    """Draw one graph from the unconditioned sparse model."""
    n = params.n
    m = params.symbol_law.alphabet.size
    law = np.array([float(w) for w in params.symbol_law.weights])
    law = law / law.sum()
    symbols = rng.choice(m, size=n, p=law)
    prob = np.array(
        [[params.edge_probability(i, j) for j in range(m)] for i in range(m)]
    )
    pair_prob = prob[symbols[:, None], symbols[None, :]]
    draws = rng.random((n, n))
    iu, jv = np.triu_indices(n, k=1)
    hit = draws[iu, jv] < pair_prob[iu, jv]
    edges = frozenset(
        (int(u), int(v)) for u, v in zip(iu[hit], jv[hit])
    )
    return ColoredGraph(n, params.symbol_law.alphabet, tuple(int(s) for s in symbols), edges)


# ---------------------------------------------------------------------------
# empirical statistics


def empirical_measures(
    graph: ColoredGraph,
) -> tuple[SymbolMeasure, PairMeasure, NeighbourhoodMeasure, DegreeMeasure]:
    """Exact empirical (symbol, pair, neighbourhood, degree) measures.

    All weights are fractions with denominator n, so the identities linking
    the four measures hold exactly.
    """
    n = graph.n
    m = graph.alphabet.size
    sym_counts = [0] * m
    for s in graph.symbols:
        sym_counts[s] += 1
    nu = SymbolMeasure(
        graph.alphabet, tuple(Fraction(c, n) for c in sym_counts)
    )

    pair_counts = [[0] * m for _ in range(m)]
    neighbour_counts = [[0] * m for _ in range(n)]
    for u, v in graph.edges:
        su, sv = graph.symbols[u], graph.symbols[v]
        pair_counts[su][sv] += 1
        pair_counts[sv][su] += 1
        neighbour_counts[u][sv] += 1
        neighbour_counts[v][su] += 1
    pi = PairMeasure(
        graph.alphabet,
        tuple(tuple(Fraction(c, n) for c in row) for row in pair_counts),
    )

    profile_counts: dict[tuple[str, LocalProfile], int] = {}
    for v in range(n):
        key = (
            graph.alphabet.symbols[graph.symbols[v]],
            LocalProfile(tuple(neighbour_counts[v])),
        )
        profile_counts[key] = profile_counts.get(key, 0) + 1
    mu = NeighbourhoodMeasure(
        graph.alphabet,
        {key: Fraction(c, n) for key, c in profile_counts.items()},
    )

    degree_counts: dict[int, int] = {}
    for v in range(n):
        k = sum(neighbour_counts[v])
        degree_counts[k] = degree_counts.get(k, 0) + 1
    deg = DegreeMeasure({k: Fraction(c, n) for k, c in degree_counts.items()})
    return nu, pi, mu, deg


def allocation_empirical_measures(
    outcome: AllocationOutcome,
) -> tuple[SymbolMeasure, PairMeasure, NeighbourhoodMeasure, DegreeMeasure]:
    """Empirical measures of an allocation, mirroring the graph statistics.

    The bin profile plays the role of the neighbourhood profile; the pair
    entry (b, a) is the per-bin average count of symbol-b balls in symbol-a
    bins, which reproduces the placement targets exactly.
    """
    n = outcome.n
    m = outcome.alphabet.size
    sym_counts = [0] * m
    for s in outcome.symbols:
        sym_counts[s] += 1
    nu = SymbolMeasure(outcome.alphabet, tuple(Fraction(c, n) for c in sym_counts))

    raw = [[0] * m for _ in range(m)]  # raw[b][a]: symbol-b balls in symbol-a bins
    profile_counts: dict[tuple[str, LocalProfile], int] = {}
    degree_counts: dict[int, int] = {}
    for v in range(n):
        a = outcome.symbols[v]
        profile = outcome.profiles[v]
        for b in range(m):
            raw[b][a] += profile.counts[b]
        key = (outcome.alphabet.symbols[a], profile)
        profile_counts[key] = profile_counts.get(key, 0) + 1
        k = profile.degree
        degree_counts[k] = degree_counts.get(k, 0) + 1

    sym = tuple(
        tuple(Fraction(raw[i][j] + raw[j][i], 2 * n) for j in range(m))
        for i in range(m)
    )
    pi = PairMeasure(outcome.alphabet, sym)
    mu = NeighbourhoodMeasure(
        outcome.alphabet, {key: Fraction(c, n) for key, c in profile_counts.items()}
    )
    deg = DegreeMeasure({k: Fraction(c, n) for k, c in degree_counts.items()})
    return nu, pi, mu, deg


# ---------------------------------------------------------------------------
# exact targets and feasibility


def edge_budget(pi_n: PairMeasure, n: int) -> dict[tuple[str, str], int]:
    """Edge counts per symbol pair implied by a quantized pair measure.

    Off-diagonal pairs get n pi(b,a) edges, the diagonal n pi(a,a)/2; every
    count must be a non-negative integer, otherwise the targets are not the
    pair measure of any n-vertex graph and :class:`DomainError` is raised.
    The mapping contains every ordered pair, with symmetric values.
    """
    symbols = pi_n.alphabet.symbols
    budget: dict[tuple[str, str], int] = {}
    for i, a in enumerate(symbols):
        for j, b in enumerate(symbols):
            w = Fraction(pi_n.entries[i][j])
            count = w * n / 2 if i == j else w * n
            if count.denominator != 1:
                raise DomainError(
                    f"pair target ({b},{a}) implies non-integer edge count {count}"
                )
            budget[(b, a)] = int(count)
    return budget


def _vertex_counts(nu_n: SymbolMeasure, n: int) -> list[int]:
    if n < 1:
        raise DomainError("n must be positive")
    counts = []
    for s, w in zip(nu_n.alphabet.symbols, nu_n.weights):
        c = Fraction(w) * n
        if c.denominator != 1:
            raise DomainError(f"symbol target {s} implies non-integer count {c}")
        counts.append(int(c))
    return counts


def _slot_capacity(count_a: int, count_b: int, same: bool) -> int:
    return count_a * (count_a - 1) // 2 if same else count_a * count_b


def _check_feasible(
    nu_n: SymbolMeasure, pi_n: PairMeasure, n: int
) -> tuple[list[int], dict[tuple[str, str], int]]:
    counts = _vertex_counts(nu_n, n)
    budget = edge_budget(pi_n, n)
    symbols = nu_n.alphabet.symbols
    for i, a in enumerate(symbols):
        for j in range(i, len(symbols)):
            b = symbols[j]
            need = budget[(b, a)]
            cap = _slot_capacity(counts[i], counts[j], i == j)
            if need > cap:
                raise FeasibilityError(
                    f"pair ({a},{b}) needs {need} edges but only {cap} "
                    f"vertex pairs exist"
                )
    return counts, budget


def _shuffled_symbols(
    counts: Sequence[int], rng: np.random.Generator
) -> np.ndarray:
    symbols = np.repeat(np.arange(len(counts)), counts)
    rng.shuffle(symbols)
    return symbols


def _class_members(symbols: np.ndarray, m: int) -> list[np.ndarray]:
    return [np.flatnonzero(symbols == i) for i in range(m)]


def _decode_same(members: np.ndarray, codes: np.ndarray) -> list[tuple[int, int]]:
    """Map slot codes to vertex pairs inside one symbol class."""
    k = len(members)
    iu, jv = np.triu_indices(k, k=1)
    return [
        (int(members[iu[c]]), int(members[jv[c]])) for c in codes
    ]


def _decode_cross(
    members_a: np.ndarray, members_b: np.ndarray, codes: np.ndarray
) -> list[tuple[int, int]]:
    kb = len(members_b)
    return [
        (int(members_a[c // kb]), int(members_b[c % kb])) for c in codes
    ]


def sample_conditional_graph(
    nu_n: SymbolMeasure,
    pi_n: PairMeasure,
    n: int,
    rng: np.random.Generator,
) -> ColoredGraph:
    """Draw a graph uniformly given exact symbol and pair-measure targets.

    The symbol sequence is a uniform permutation of the multiset fixed by
    ``nu_n``; independently for every symbol pair, the prescribed number of
    edges is drawn uniformly without replacement from the admissible vertex
    pairs.  Raises :class:`FeasibilityError` when some pair demands more
    edges than there are slots, naming the offending pair.
    """
    if nu_n.alphabet != pi_n.alphabet:
        raise DomainError("nu and pi use different alphabets")
    counts, budget = _check_feasible(nu_n, pi_n, n)
    m = nu_n.alphabet.size
    symbols = _shuffled_symbols(counts, rng)
    members = _class_members(symbols, m)
    names = nu_n.alphabet.symbols

    edges: set[tuple[int, int]] = set()
    for i in range(m):
        for j in range(i, m):
            need = budget[(names[i], names[j])]
            if need == 0:
                continue
            cap = _slot_capacity(counts[i], counts[j], i == j)
            codes = rng.choice(cap, size=need, replace=False)
            if i == j:
                pairs = _decode_same(members[i], codes)
            else:
                pairs = _decode_cross(members[i], members[j], codes)
            for u, v in pairs:
                edges.add((u, v) if u < v else (v, u))
    return ColoredGraph(n, nu_n.alphabet, tuple(int(s) for s in symbols), frozenset(edges))


def sample_allocation(
    nu_n: SymbolMeasure,
    pi_n: PairMeasure,
    n: int,
    rng: np.random.Generator,
) -> AllocationOutcome:
    """Drop symbolled balls i.i.d. uniformly into symbolled bins.

    For every ordered symbol pair (b, a), n pi(b,a) balls of symbol b are
    placed independently and uniformly at random into the n nu(a) bins of
    symbol a.  Placement is independent across pairs.  Raises
    :class:`FeasibilityError` when balls target an empty bin class.
    """
    if nu_n.alphabet != pi_n.alphabet:
        raise DomainError("nu and pi use different alphabets")
    counts = _vertex_counts(nu_n, n)
    m = nu_n.alphabet.size
    names = nu_n.alphabet.symbols
    ball_counts: dict[tuple[int, int], int] = {}
    for j in range(m):  # bin symbol a
        for i in range(m):  # ball symbol b
            w = Fraction(pi_n.entries[i][j]) * n
            if w.denominator != 1:
                raise DomainError(
                    f"pair target ({names[i]},{names[j]}) implies "
                    f"non-integer ball count {w}"
                )
            balls = int(w)
            if balls > 0 and counts[j] == 0:
                raise FeasibilityError(
                    f"{balls} balls of symbol {names[i]} target empty "
                    f"bin class {names[j]}"
                )
            ball_counts[(i, j)] = balls

    symbols = _shuffled_symbols(counts, rng)
    members = _class_members(symbols, m)
    per_bin = np.zeros((n, m), dtype=np.int64)
    for j in range(m):
        for i in range(m):
            balls = ball_counts[(i, j)]
            if balls == 0:
                continue
            targets = rng.integers(0, counts[j], size=balls)
            landed = np.bincount(targets, minlength=counts[j])
            per_bin[members[j], i] += landed
    profiles = tuple(LocalProfile(tuple(int(c) for c in row)) for row in per_bin)
    return AllocationOutcome(n, nu_n.alphabet, tuple(int(s) for s in symbols), profiles)


def sample_coupled(
    nu_n: SymbolMeasure,
    pi_n: PairMeasure,
    n: int,
    rng: np.random.Generator,
) -> CoupledSample:
    """Run the conditioned graph and the allocation on shared draws.

    For each unordered symbol pair {a, b} and each of its edge-budget steps,
    one endpoint is drawn uniformly from each symbol class; the allocation
    drops its balls at those endpoints unconditionally, while the graph
    accepts the pair as an edge only if it is a fresh non-loop.  On a
    collision the graph edge is redrawn uniformly from the unused admissible
    slots and the discrepancy counter of the pair is incremented.

    Every step consumes exactly three uniforms (two endpoints plus one
    redraw variate that is discarded when no collision occurs), so draw
    positions are independent of collision history.
    """
    if nu_n.alphabet != pi_n.alphabet:
        raise DomainError("nu and pi use different alphabets")
    counts, budget = _check_feasible(nu_n, pi_n, n)
    m = nu_n.alphabet.size
    names = nu_n.alphabet.symbols
    symbols = _shuffled_symbols(counts, rng)
    members = _class_members(symbols, m)

    per_bin = np.zeros((n, m), dtype=np.int64)
    edges: set[tuple[int, int]] = set()
    discrepancies = [[0] * m for _ in range(m)]

    for i in range(m):
        for j in range(i, m):
            steps = budget[(names[i], names[j])]
            if steps == 0:
                continue
            class_i, class_j = members[i], members[j]
            used: set[tuple[int, int]] = set()
            draws = rng.random((steps, 3))
            for step in range(steps):
                u1, u2, u3 = draws[step]
                v1 = int(class_i[int(u1 * len(class_i))])
                v2 = int(class_j[int(u2 * len(class_j))])
                per_bin[v1, j] += 1
                per_bin[v2, i] += 1
                pair = (v1, v2) if v1 < v2 else (v2, v1)
                if v1 != v2 and pair not in used:
                    used.add(pair)
                    continue
                discrepancies[i][j] += 1
                discrepancies[j][i] = discrepancies[i][j]
                free = _free_slots(class_i, class_j, i == j, used)
                pair = free[int(u3 * len(free))]
                used.add(pair)
            edges.update(used)

    graph = ColoredGraph(
        n, nu_n.alphabet, tuple(int(s) for s in symbols), frozenset(edges)
    )
    profiles = tuple(LocalProfile(tuple(int(c) for c in row)) for row in per_bin)
    allocation = AllocationOutcome(
        n, nu_n.alphabet, tuple(int(s) for s in symbols), profiles
    )
    return CoupledSample(
        graph, allocation, tuple(tuple(row) for row in discrepancies)
    )


def _free_slots(
    class_i: np.ndarray,
    class_j: np.ndarray,
    same: bool,
    used: set[tuple[int, int]],
) -> list[tuple[int, int]]:
    """All admissible vertex pairs not yet used, recomputed on demand."""
    free = []
    if same:
        k = len(class_i)
        for p in range(k):
            for q in range(p + 1, k):
                u, v = int(class_i[p]), int(class_i[q])
                pair = (u, v) if u < v else (v, u)
                if pair not in used:
                    free.append(pair)
    else:
        for u in class_i:
            for v in class_j:
                pair = (int(u), int(v)) if u < v else (int(v), int(u))
                if pair not in used:
                    free.append(pair)
    return free


def collision_prob(k: int, count_b: int, count_a: int, m_edges: int, same: bool) -> float:
    """Worst-case chance that placement step k collides, for diagnostics.

    For step k of a symbol pair with ``m_edges`` total steps and class sizes
    ``count_a``, ``count_b``, the chance that the drawn pair is a self-loop
    or one of the at most k-1 already-placed edges is at most
    (1{a=b} count_a + k - 1) / (count_a count_b).  Raises
    :class:`DomainError` when the pair has no steps or an empty class.
    """
    if m_edges <= 0:
        raise DomainError("collision probability needs at least one step")
    if not 1 <= k <= m_edges:
        raise DomainError(f"step {k} outside 1..{m_edges}")
    if count_a <= 0 or count_b <= 0:
        raise DomainError("collision probability needs non-empty classes")
    loops = count_a if same else 0
    return min(1.0, (loops + k - 1) / (count_a * count_b))
