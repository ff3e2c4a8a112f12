"""Finite measures on symbols, symbol pairs, degrees and local profiles.

The objects here are the statistics extracted from a symbolled graph or a
random allocation: the symbol law of the vertices, the symmetric edge-symbol
law, the joint law of (own symbol, counts of neighbour symbols), and its
degree projection.  Weights may be floats or exact :class:`~fractions.Fraction`
values; empirical and quantized measures use fractions so that consistency
checks and type probabilities are exact.

All containers are immutable and validate their probability-measure
invariants on construction.
"""

from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

__all__ = [
    "AlphabetMismatchError",
    "Consistency",
    "DegreeMeasure",
    "DomainError",
    "LocalProfile",
    "NeighbourhoodMeasure",
    "PairMeasure",
    "SymbolAlphabet",
    "SymbolMeasure",
    "Weight",
    "check_consistency",
    "degree_projection",
    "from_jsonable",
    "marginal_symbol",
    "pair_projection",
    "poi_mass",
    "poisson_pmf",
    "quantize_targets",
    "relative_entropy",
    "shannon_entropy",
    "total_variation",
]

Weight = Union[float, Fraction]

#: Tolerance for "sums to one" checks on float-weighted measures.
PROB_TOL = 1e-9

#: Default tolerance for consistency of a neighbourhood measure with targets.
CONSISTENCY_TOL = 1e-10


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class AlphabetMismatchError(ValueError):
    """Two measures that must share an alphabet do not."""


def _as_weight(value) -> Weight:
    """Accept ints, floats and Fractions; normalise ints to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("weights must be numeric, not bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise TypeError(f"unsupported weight type: {type(value).__name__}")


def _check_probability_vector(weights: Sequence[Weight], what: str) -> None:
    total = Fraction(0)
    exact = True
    for w in weights:
        if w < 0:
            raise DomainError(f"{what} has negative weight {w}")
        if isinstance(w, float):
            exact = False
        total += Fraction(w) if not isinstance(w, Fraction) else w
    if exact:
        if total != 1:
            raise DomainError(f"{what} weights sum to {total}, expected 1")
    elif abs(float(total) - 1.0) > PROB_TOL:
        raise DomainError(f"{what} weights sum to {float(total)!r}, expected 1")


@dataclass(frozen=True)
class SymbolAlphabet:
    """Ordered, duplicate-free set of symbol names.

    The ordering is canonical: it fixes the indexing used by every dense
    container and by serialized output.
    """

    symbols: tuple[str, ...]

    def __post_init__(self):
        if not self.symbols:
            raise DomainError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise DomainError("alphabet contains duplicate symbols")
        if not all(isinstance(s, str) and s for s in self.symbols):
            raise DomainError("symbols must be non-empty strings")

    @classmethod
    def of_size(cls, m: int) -> "SymbolAlphabet":
        """Alphabet of ``m`` symbols named a, b, c, ... then s26, s27, ..."""
        if m < 1:
            raise DomainError("alphabet size must be positive")
        letters = string.ascii_lowercase
        names = tuple(letters[i] if i < 26 else f"s{i}" for i in range(m))
        return cls(names)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise AlphabetMismatchError(
                f"symbol {symbol!r} not in alphabet {self.symbols}"
            ) from None

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class SymbolMeasure:
    """Probability measure on an alphabet, stored densely in alphabet order."""

    alphabet: SymbolAlphabet
    weights: tuple[Weight, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(_as_weight(w) for w in self.weights))
        if len(self.weights) != self.alphabet.size:
            raise DomainError(
                f"expected {self.alphabet.size} weights, got {len(self.weights)}"
            )
        _check_probability_vector(self.weights, "symbol measure")

    @classmethod
    def from_mapping(cls, alphabet: SymbolAlphabet, mapping: Mapping[str, Weight]):
        for key in mapping:
            alphabet.index(key)
        return cls(alphabet, tuple(mapping.get(s, Fraction(0)) for s in alphabet))

    @classmethod
    def uniform(cls, alphabet: SymbolAlphabet) -> "SymbolMeasure":
        m = alphabet.size
        return cls(alphabet, tuple(Fraction(1, m) for _ in range(m)))

    def weight(self, symbol: str) -> Weight:
        return self.weights[self.alphabet.index(symbol)]

    def as_dict(self) -> dict[str, Weight]:
        return dict(zip(self.alphabet.symbols, self.weights))

    def is_quantized(self, n: int) -> bool:
        """True when every weight is an integer multiple of 1/n."""
        return all(_times_is_integer(w, n) for w in self.weights)

    def to_jsonable(self) -> dict:
        return {
            "type": "symbol_measure",
            "alphabet": list(self.alphabet.symbols),
            "weights": [_weight_to_json(w) for w in self.weights],
        }


@dataclass(frozen=True)
class PairMeasure:
    """Symmetric finite measure on ordered symbol pairs.

    ``entries[i][j]`` is the mass of (symbol_i, symbol_j); symmetry must be
    exact.  The total mass is arbitrary non-negative (for an n-vertex graph it
    equals twice the edge count over n, so it is not a probability measure).
    """

    alphabet: SymbolAlphabet
    entries: tuple[tuple[Weight, ...], ...]

    def __post_init__(self):
        m = self.alphabet.size
        rows = tuple(tuple(_as_weight(w) for w in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        if len(rows) != m or any(len(row) != m for row in rows):
            raise DomainError(f"entries must form a {m}x{m} matrix")
        for i in range(m):
            for j in range(m):
                if rows[i][j] < 0:
                    raise DomainError("pair measure has a negative entry")
                if rows[i][j] != rows[j][i]:
                    raise DomainError(
                        "pair measure must be exactly symmetric: "
                        f"entry ({self.alphabet.symbols[i]},{self.alphabet.symbols[j]})"
                    )

    @classmethod
    def from_mapping(
        cls, alphabet: SymbolAlphabet, mapping: Mapping[tuple[str, str], Weight]
    ):
        m = alphabet.size
        dense = [[Fraction(0)] * m for _ in range(m)]
        for (b, a), w in mapping.items():
            i, j = alphabet.index(b), alphabet.index(a)
            dense[i][j] = w
            if (a, b) not in mapping:
                dense[j][i] = w
        return cls(alphabet, tuple(tuple(row) for row in dense))

    def entry(self, b: str, a: str) -> Weight:
        return self.entries[self.alphabet.index(b)][self.alphabet.index(a)]

    @property
    def total_mass(self) -> Weight:
        return sum((w for row in self.entries for w in row), Fraction(0))

    def is_quantized(self, n: int) -> bool:
        """True when every edge count implied by the measure is integral.

        Off-diagonal entries must be integer multiples of 1/n and diagonal
        entries of 2/n (a same-symbol edge contributes mass 2/n).
        """
        m = self.alphabet.size
        for i in range(m):
            for j in range(m):
                units = n if i != j else n / Fraction(2)
                if not _times_is_integer(self.entries[i][j], units):
                    return False
        return True

    def to_jsonable(self) -> dict:
        return {
            "type": "pair_measure",
            "alphabet": list(self.alphabet.symbols),
            "entries": [[_weight_to_json(w) for w in row] for row in self.entries],
        }


@dataclass(frozen=True, order=True)
class LocalProfile:
    """Counts of neighbour symbols around one vertex, dense in alphabet order."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if not all(isinstance(c, int) and c >= 0 for c in self.counts):
            raise DomainError("profile counts must be non-negative integers")

    @classmethod
    def zeros(cls, m: int) -> "LocalProfile":
        return cls((0,) * m)

    @property
    def degree(self) -> int:
        return sum(self.counts)

    def count(self, index: int) -> int:
        return self.counts[index]


@dataclass(frozen=True)
class NeighbourhoodMeasure:
    """Probability measure on (symbol, local profile) pairs.

    Stored sparsely; zero-weight entries are dropped so that two measures
    with the same support and weights compare equal.  Iteration order over
    :meth:`items` is canonical (symbol index, then profile counts).
    """

    alphabet: SymbolAlphabet
    support: Mapping[tuple[str, LocalProfile], Weight] = field(compare=False)
    _items: tuple = field(init=False, compare=True, repr=False)

    def __post_init__(self):
        m = self.alphabet.size
        cleaned: dict[tuple[str, LocalProfile], Weight] = {}
        for (symbol, profile), w in self.support.items():
            if not isinstance(profile, LocalProfile):
                profile = LocalProfile(tuple(profile))
            if len(profile.counts) != m:
                raise DomainError(
                    f"profile {profile.counts} has length {len(profile.counts)}, "
                    f"expected {m}"
                )
            idx = self.alphabet.index(symbol)  # validates the symbol
            w = _as_weight(w)
            if w < 0:
                raise DomainError("neighbourhood measure has negative weight")
            if w == 0:
                continue
            key = (symbol, profile)
            if key in cleaned:
                raise DomainError(f"duplicate support point {symbol}, {profile.counts}")
            cleaned[key] = w
        _check_probability_vector(tuple(cleaned.values()), "neighbourhood measure")
        ordered = sorted(
            cleaned.items(),
            key=lambda kv: (self.alphabet.index(kv[0][0]), kv[0][1].counts),
        )
        object.__setattr__(self, "support", dict(ordered))
        object.__setattr__(self, "_items", tuple(ordered))

    def items(self) -> tuple[tuple[tuple[str, LocalProfile], Weight], ...]:
        return self._items

    def weight(self, symbol: str, profile: LocalProfile) -> Weight:
        return self.support.get((symbol, profile), Fraction(0))

    def is_quantized(self, n: int) -> bool:
        return all(_times_is_integer(w, n) for _, w in self._items)

    def to_jsonable(self) -> dict:
        return {
            "type": "neighbourhood_measure",
            "alphabet": list(self.alphabet.symbols),
            "support": [
                [symbol, list(profile.counts), _weight_to_json(w)]
                for (symbol, profile), w in self._items
            ],
        }


@dataclass(frozen=True)
class DegreeMeasure:
    """Probability measure on non-negative integer degrees, stored sparsely."""

    support: Mapping[int, Weight] = field(compare=False)
    _items: tuple = field(init=False, compare=True, repr=False)

    def __post_init__(self):
        cleaned: dict[int, Weight] = {}
        for k, w in self.support.items():
            if not isinstance(k, int) or k < 0:
                raise DomainError(f"degree {k!r} must be a non-negative integer")
            w = _as_weight(w)
            if w < 0:
                raise DomainError("degree measure has negative weight")
            if w != 0:
                cleaned[k] = w
        _check_probability_vector(tuple(cleaned.values()), "degree measure")
        ordered = sorted(cleaned.items())
        object.__setattr__(self, "support", dict(ordered))
        object.__setattr__(self, "_items", tuple(ordered))

    def items(self) -> tuple[tuple[int, Weight], ...]:
        return self._items

    def weight(self, k: int) -> Weight:
        return self.support.get(k, Fraction(0))

    def mean(self) -> float:
        return float(sum(Fraction(k) * Fraction(w) for k, w in self._items))

    def to_jsonable(self) -> dict:
        return {
            "type": "degree_measure",
            "support": [[k, _weight_to_json(w)] for k, w in self._items],
        }


class Consistency:
    """Classification of a neighbourhood measure against (nu, pi) targets."""

    CONSISTENT = "consistent"
    SUB_CONSISTENT = "sub-consistent"
    INCONSISTENT = "inconsistent"


# ---------------------------------------------------------------------------
# projections


def marginal_symbol(mu: NeighbourhoodMeasure) -> SymbolMeasure:
    """First-coordinate marginal of a neighbourhood measure."""
    acc: dict[str, Weight] = {s: Fraction(0) for s in mu.alphabet}
    for (symbol, _profile), w in mu.items():
        acc[symbol] = acc[symbol] + w
    return SymbolMeasure(mu.alphabet, tuple(acc[s] for s in mu.alphabet))


def pair_projection(mu: NeighbourhoodMeasure) -> PairMeasure:
    """Edge-symbol measure induced by a neighbourhood measure.

    Entry (b, a) is the mu-mean number of b-symbol neighbours of an a-symbol
    vertex.  The result is symmetric only when ``mu`` arises from a graph;
    for an arbitrary measure the symmetrised average is returned together
    with the exact entries via :func:`check_consistency`.
    """
    m = mu.alphabet.size
    raw = [[Fraction(0)] * m for _ in range(m)]
    for (symbol, profile), w in mu.items():
        a = mu.alphabet.index(symbol)
        for b in range(m):
            if profile.counts[b]:
                raw[b][a] = raw[b][a] + w * profile.counts[b]
    sym = tuple(
        tuple((raw[i][j] + raw[j][i]) / 2 for j in range(m)) for i in range(m)
    )
    return PairMeasure(mu.alphabet, sym)


def _raw_pair_moments(mu: NeighbourhoodMeasure) -> list[list[Weight]]:
    m = mu.alphabet.size
    raw = [[Fraction(0)] * m for _ in range(m)]
    for (symbol, profile), w in mu.items():
        a = mu.alphabet.index(symbol)
        for b in range(m):
            if profile.counts[b]:
                raw[b][a] = raw[b][a] + w * profile.counts[b]
    return raw


def check_consistency(
    mu: NeighbourhoodMeasure,
    nu: SymbolMeasure,
    pi: PairMeasure,
    tol: float = CONSISTENCY_TOL,
) -> str:
    """Classify ``mu`` against target symbol and pair measures.

    Returns :data:`Consistency.CONSISTENT` when the symbol marginal matches
    ``nu`` and the mean neighbour-count moments match ``pi`` exactly within
    ``tol``, :data:`Consistency.SUB_CONSISTENT` when the moments are only
    bounded above by ``pi`` (mass may escape to infinite degrees in a limit),
    and :data:`Consistency.INCONSISTENT` otherwise.
    """
    for measure in (nu,):
        if measure.alphabet != mu.alphabet:
            raise AlphabetMismatchError("mu and nu use different alphabets")
    if pi.alphabet != mu.alphabet:
        raise AlphabetMismatchError("mu and pi use different alphabets")
    marg = marginal_symbol(mu)
    for s in mu.alphabet:
        if abs(float(marg.weight(s)) - float(nu.weight(s))) > tol:
            return Consistency.INCONSISTENT
    raw = _raw_pair_moments(mu)
    m = mu.alphabet.size
    exact = True
    for i in range(m):
        for j in range(m):
            gap = float(pi.entries[i][j]) - float(raw[i][j])
            if gap < -tol:
                return Consistency.INCONSISTENT
            if abs(gap) > tol:
                exact = False
    return Consistency.CONSISTENT if exact else Consistency.SUB_CONSISTENT


def degree_projection(mu: NeighbourhoodMeasure) -> DegreeMeasure:
    """Push a neighbourhood measure forward to total neighbour count."""
    acc: dict[int, Weight] = {}
    for (_symbol, profile), w in mu.items():
        k = profile.degree
        acc[k] = acc.get(k, Fraction(0)) + w
    return DegreeMeasure(acc)


# ---------------------------------------------------------------------------
# metrics and entropies


def _measure_items(measure) -> Iterable[tuple[object, Weight]]:
    if isinstance(measure, NeighbourhoodMeasure):
        return measure.items()
    if isinstance(measure, DegreeMeasure):
        return measure.items()
    if isinstance(measure, SymbolMeasure):
        return tuple(zip(measure.alphabet.symbols, measure.weights))
    if isinstance(measure, Mapping):
        return tuple(measure.items())
    raise TypeError(f"unsupported measure type: {type(measure).__name__}")


_MEASURE_KINDS = (NeighbourhoodMeasure, SymbolMeasure, DegreeMeasure)


def _require_same_kind(p, q) -> None:
    p_kind = next((k for k in _MEASURE_KINDS if isinstance(p, k)), None)
    q_kind = next((k for k in _MEASURE_KINDS if isinstance(q, k)), None)
    if p_kind and q_kind and p_kind is not q_kind:
        raise DomainError(
            f"cannot compare a {p_kind.__name__} with a {q_kind.__name__}"
        )
    if isinstance(p, (NeighbourhoodMeasure, SymbolMeasure)) and isinstance(
        q, (NeighbourhoodMeasure, SymbolMeasure)
    ):
        if p.alphabet != q.alphabet:
            raise AlphabetMismatchError("measures use different alphabets")


def total_variation(p, q) -> float:
    """Total variation distance between two finite probability measures.

    Accepts any pair of like measure objects (or plain mappings) whose keys
    are comparable; mass on keys absent from the other measure counts fully.
    """
    _require_same_kind(p, q)
    pd = dict(_measure_items(p))
    qd = dict(_measure_items(q))
    keys = set(pd) | set(qd)
    total = 0.0
    for k in keys:
        total += abs(float(pd.get(k, 0)) - float(qd.get(k, 0)))
    return 0.5 * total


def shannon_entropy(measure) -> float:
    """Shannon entropy in nats with the 0 log 0 = 0 convention."""
    total = 0.0
    for _k, w in _measure_items(measure):
        p = float(w)
        if p > 0:
            total -= p * math.log(p)
    return total


def relative_entropy(p, q) -> float:
    """Relative entropy H(p || q) in nats.

    ``p`` must be a probability measure; ``q`` is a non-negative reference
    measure given either as a like measure object, a mapping, or a callable
    evaluating the reference mass at a support point of ``p``.  Returns
    ``inf`` when ``p`` charges a point where ``q`` vanishes; the convention
    0 log(0/q) = 0 applies.
    """
    if callable(q) and not isinstance(q, Mapping):
        lookup: Callable = q
    else:
        _require_same_kind(p, q)
        qd = dict(_measure_items(q))

        def lookup(key):
            return qd.get(key, 0)
    total = 0.0
    for key, w in _measure_items(p):
        pm = float(w)
        if pm == 0.0:
            continue
        qm = float(lookup(key))
        if qm <= 0.0:
            return math.inf
        total += pm * math.log(pm / qm)
    return total


def poisson_pmf(mean: float, k: int) -> float:
    """Poisson(mean) probability of k, defined for mean >= 0."""
    if mean < 0:
        raise DomainError(f"poisson mean must be non-negative, got {mean}")
    if k < 0:
        raise DomainError("poisson support is the non-negative integers")
    if mean == 0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(mean) - mean - math.lgamma(k + 1))


def poi_mass(
    nu: SymbolMeasure, pi: PairMeasure, symbol: str, profile: LocalProfile
) -> float:
    """Reference mass of (symbol, profile) under the product-Poisson law.

    The reference law puts weight nu(a) on symbol a and, conditionally,
    makes the neighbour counts independent Poisson with means pi(b, a)/nu(a).
    Raises :class:`DomainError` when nu(a) is zero while some pi(., a) is
    positive, which leaves the intensity undefined.
    """
    if nu.alphabet != pi.alphabet:
        raise AlphabetMismatchError("nu and pi use different alphabets")
    a_idx = nu.alphabet.index(symbol)
    if len(profile.counts) != nu.alphabet.size:
        raise DomainError("profile length does not match the alphabet")
    na = float(nu.weights[a_idx])
    if na == 0.0:
        if any(float(pi.entries[b][a_idx]) > 0 for b in range(pi.alphabet.size)):
            raise DomainError(
                f"intensity pi(.,{symbol})/nu({symbol}) undefined: nu({symbol}) = 0"
            )
        return 0.0
    log_mass = math.log(na)
    for b in range(nu.alphabet.size):
        lam = float(pi.entries[b][a_idx]) / na
        k = profile.counts[b]
        if lam == 0.0:
            if k:
                return 0.0
            continue
        log_mass += k * math.log(lam) - lam - math.lgamma(k + 1)
    return math.exp(log_mass)


# ---------------------------------------------------------------------------
# quantization


def _times_is_integer(w: Weight, n) -> bool:
    x = Fraction(w) * Fraction(n) if isinstance(w, Fraction) else None
    if x is not None:
        return x.denominator == 1
    scaled = float(w) * float(n)
    return scaled == int(scaled)


def _largest_remainder(scaled: Sequence[Fraction], total_units: int) -> list[int]:
    """Round non-negative values to integers preserving their sum.

    Floors everything, then hands the remaining units to the largest
    remainders; ties break on lower index so the result is deterministic.
    """
    floors = [int(x) for x in scaled]
    leftover = total_units - sum(floors)
    if leftover < 0:
        raise DomainError("rounding target below the floor sum")
    order = sorted(
        range(len(scaled)), key=lambda i: (-(scaled[i] - floors[i]), i)
    )
    for i in order[:leftover]:
        floors[i] += 1
    return floors


def quantize_targets(
    nu: SymbolMeasure, pi: PairMeasure, n: int
) -> tuple[SymbolMeasure, PairMeasure]:
    """Round (nu, pi) to exact n-vertex empirical targets.

    The symbol measure is rounded to multiples of 1/n summing to one, and
    the pair measure to entries whose implied edge counts (n pi(b,a) off the
    diagonal, n pi(a,a)/2 on it) are integers, preserving symmetry.  Largest
    remainder rounding keeps each rounded entry within one unit of its
    target.  Returned weights are exact fractions.
    """
    if nu.alphabet != pi.alphabet:
        raise AlphabetMismatchError("nu and pi use different alphabets")
    if n < 1:
        raise DomainError("n must be positive")
    m = nu.alphabet.size

    nu_scaled = [Fraction(w) * n for w in nu.weights]
    nu_units = _largest_remainder(nu_scaled, n)
    nu_n = SymbolMeasure(nu.alphabet, tuple(Fraction(u, n) for u in nu_units))

    # upper-triangle entries in edge-count units
    index_pairs = [(i, j) for i in range(m) for j in range(m) if i <= j]
    edge_scaled = []
    for i, j in index_pairs:
        w = Fraction(pi.entries[i][j])
        edge_scaled.append(w * n / 2 if i == j else w * n)
    target_edges = sum(edge_scaled)
    total_units = int(target_edges) + (
        1 if target_edges - int(target_edges) >= Fraction(1, 2) else 0
    )
    units = _largest_remainder(edge_scaled, total_units)
    dense = [[Fraction(0)] * m for _ in range(m)]
    for (i, j), u in zip(index_pairs, units):
        if i == j:
            dense[i][j] = Fraction(2 * u, n)
        else:
            dense[i][j] = Fraction(u, n)
            dense[j][i] = Fraction(u, n)
    pi_n = PairMeasure(pi.alphabet, tuple(tuple(row) for row in dense))
    return nu_n, pi_n


# ---------------------------------------------------------------------------
# serialization


def _weight_to_json(w: Weight):
    if isinstance(w, Fraction):
        return f"{w.numerator}/{w.denominator}"
    return w


def _weight_from_json(value) -> Weight:
    if isinstance(value, str):
        num, _, den = value.partition("/")
        return Fraction(int(num), int(den) if den else 1)
    if isinstance(value, (int, float)):
        return Fraction(value) if isinstance(value, int) else value
    raise DomainError(f"cannot parse weight {value!r}")


def from_jsonable(data: Mapping):
    """Rebuild a measure object from its :meth:`to_jsonable` form."""
    kind = data.get("type")
    if kind == "symbol_measure":
        alphabet = SymbolAlphabet(tuple(data["alphabet"]))
        return SymbolMeasure(
            alphabet, tuple(_weight_from_json(w) for w in data["weights"])
        )
    if kind == "pair_measure":
        alphabet = SymbolAlphabet(tuple(data["alphabet"]))
        return PairMeasure(
            alphabet,
            tuple(tuple(_weight_from_json(w) for w in row) for row in data["entries"]),
        )
    if kind == "neighbourhood_measure":
        alphabet = SymbolAlphabet(tuple(data["alphabet"]))
        support = {
            (symbol, LocalProfile(tuple(counts))): _weight_from_json(w)
            for symbol, counts, w in data["support"]
        }
        return NeighbourhoodMeasure(alphabet, support)
    if kind == "degree_measure":
        return DegreeMeasure({int(k): _weight_from_json(w) for k, w in data["support"]})
    raise DomainError(f"unknown measure type {kind!r}")


def dump_json(obj, fp=None, **kwargs) -> str:
    """Serialize a measure (or any jsonable payload) deterministically."""
    payload = obj.to_jsonable() if hasattr(obj, "to_jsonable") else obj
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)
    if fp is not None:
        fp.write(text + "\n")
    return text
