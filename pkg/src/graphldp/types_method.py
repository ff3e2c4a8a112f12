"""Exact type-class enumeration and probabilities for random allocations.

Conditioned on exact symbol and pair targets (nu_n, pi_n), the allocation
process induces a finite set of achievable neighbourhood measures (the type
class).  Placements are exchangeable within each symbol class, so the
probability of any achievable measure is a ratio of factorials and powers
and can be computed in exact rational arithmetic.

A brute-force oracle enumerates every individual placement outcome and
aggregates, which is exponentially slower but independent of the counting
argument; the two must agree exactly on small instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .measures import (
    DomainError,
    LocalProfile,
    NeighbourhoodMeasure,
    PairMeasure,
    SymbolMeasure,
    marginal_symbol,
    poi_mass,
    relative_entropy,
    shannon_entropy,
    _raw_pair_moments,
)

__all__ = [
    "CorrectionTerms",
    "EnumerationBudgetError",
    "TypeClass",
    "TypeMember",
    "brute_force_type_distribution",
    "entropy_identity_check",
    "enumerate_type_class",
    "exact_type_probability",
    "stirling_corrections",
]


class EnumerationBudgetError(RuntimeError):
    """An enumeration would exceed the caller-supplied work budget."""


@dataclass(frozen=True)
class TypeMember:
    """One achievable neighbourhood measure with its exact probability."""

    measure: NeighbourhoodMeasure
    probability: Fraction


@dataclass(frozen=True)
class TypeClass:
    """All neighbourhood measures achievable from (nu_n, pi_n) at size n."""

    n: int
    nu_n: SymbolMeasure
    pi_n: PairMeasure
    members: tuple[TypeMember, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    def total_probability(self) -> Fraction:
        return sum((m.probability for m in self.members), Fraction(0))

    def to_jsonable(self) -> dict:
        return {
            "type": "type_class",
            "n": self.n,
            "distinct_types": self.size,
            "nu": self.nu_n.to_jsonable(),
            "pi": self.pi_n.to_jsonable(),
            "types": [
                {
                    "measure": member.measure.to_jsonable(),
                    "probability_num": member.probability.numerator,
                    "probability_den": member.probability.denominator,
                    "entropy": relative_entropy(
                        member.measure,
                        lambda key: poi_mass(self.nu_n, self.pi_n, key[0], key[1]),
                    ),
                }
                for member in self.members
            ],
        }


def _integer_targets(
    nu_n: SymbolMeasure, pi_n: PairMeasure, n: int
) -> tuple[list[int], list[list[int]]]:
    """Vertex counts per symbol and ball counts per (ball, bin) pair."""
    if nu_n.alphabet != pi_n.alphabet:
        raise DomainError("nu and pi use different alphabets")
    if n < 1:
        raise DomainError("n must be positive")
    m = nu_n.alphabet.size
    bins = []
    for s, w in zip(nu_n.alphabet.symbols, nu_n.weights):
        c = Fraction(w) * n
        if c.denominator != 1:
            raise DomainError(f"symbol target {s} implies non-integer count {c}")
        bins.append(int(c))
    balls = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            w = Fraction(pi_n.entries[i][j]) * n
            if w.denominator != 1:
                raise DomainError(
                    "pair target implies non-integer ball count "
                    f"({nu_n.alphabet.symbols[i]},{nu_n.alphabet.symbols[j]})"
                )
            balls[i][j] = int(w)
            if balls[i][j] > 0 and bins[j] == 0:
                raise DomainError(
                    f"balls target empty bin class {nu_n.alphabet.symbols[j]}"
                )
    return bins, balls


def _profile_multisets(
    bins: int,
    remaining: tuple[int, ...],
    bound: tuple[int, ...] | None,
    visit_counter: list[int],
    visit_budget: int,
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield multisets of profiles (lexicographically non-increasing tuples)
    over ``bins`` bins whose componentwise sum equals ``remaining``."""
    if bins == 0:
        if all(r == 0 for r in remaining):
            yield ()
        return
    ranges = [range(r, -1, -1) for r in remaining]
    for candidate in itertools.product(*ranges):
        if bound is not None and candidate > bound:
            continue
        visit_counter[0] += 1
        if visit_counter[0] > visit_budget:
            raise EnumerationBudgetError(
                f"profile enumeration exceeded {visit_budget} visited nodes"
            )
        rest = tuple(r - c for r, c in zip(remaining, candidate))
        for tail in _profile_multisets(
            bins - 1, rest, candidate, visit_counter, visit_budget
        ):
            yield (candidate, *tail)


def enumerate_type_class(
    nu_n: SymbolMeasure,
    pi_n: PairMeasure,
    n: int,
    *,
    visit_budget: int = 2_000_000,
) -> TypeClass:
    """Enumerate every achievable neighbourhood measure with its probability.

    Per symbol class the achievable profile multisets are enumerated
    depth-first in lexicographically non-increasing order; classes combine
    by cartesian product.  Probabilities are exact fractions and sum to one
    over the class.  Raises :class:`EnumerationBudgetError` when the search
    would visit more than ``visit_budget`` nodes.
    """
    bins, balls = _integer_targets(nu_n, pi_n, n)
    m = nu_n.alphabet.size
    visit_counter = [0]
    per_class: list[list[tuple[tuple[int, ...], ...]]] = []
    for j in range(m):
        targets = tuple(balls[i][j] for i in range(m))
        multisets = list(
            _profile_multisets(bins[j], targets, None, visit_counter, visit_budget)
        )
        per_class.append(multisets)

    members = []
    for combo in itertools.product(*per_class):
        support: dict[tuple[str, LocalProfile], Fraction] = {}
        for j in range(m):
            symbol = nu_n.alphabet.symbols[j]
            for profile_counts in combo[j]:
                key = (symbol, LocalProfile(profile_counts))
                support[key] = support.get(key, Fraction(0)) + Fraction(1, n)
        measure = NeighbourhoodMeasure(nu_n.alphabet, support)
        members.append(
            TypeMember(measure, exact_type_probability(measure, nu_n, pi_n, n))
        )
    return TypeClass(n, nu_n, pi_n, tuple(members))


def _class_profile_counts(
    mu_n: NeighbourhoodMeasure, n: int
) -> dict[str, list[tuple[LocalProfile, int]]]:
    by_symbol: dict[str, list[tuple[LocalProfile, int]]] = {
        s: [] for s in mu_n.alphabet
    }
    for (symbol, profile), w in mu_n.items():
        c = Fraction(w) * n
        by_symbol[symbol].append((profile, int(c)))
    return by_symbol


def exact_type_probability(
    mu_n: NeighbourhoodMeasure,
    nu_n: SymbolMeasure,
    pi_n: PairMeasure,
    n: int,
) -> Fraction:
    """Exact allocation probability of one quantized neighbourhood measure.

    Counts the placement outcomes realising ``mu_n`` (profile multisets per
    symbol class times the ways of splitting each ball group over the bins)
    against the total count of placements meeting the targets.  Measures
    that are not quantized at n or whose symbol marginal or mean
    neighbour-count moments differ from the targets have probability zero.
    """
    bins, balls = _integer_targets(nu_n, pi_n, n)
    if not mu_n.is_quantized(n):
        return Fraction(0)
    if mu_n.alphabet != nu_n.alphabet:
        raise DomainError("mu and nu use different alphabets")
    marg = marginal_symbol(mu_n)
    for a in range(nu_n.alphabet.size):
        if Fraction(marg.weights[a]) != Fraction(nu_n.weights[a]):
            return Fraction(0)
    raw = _raw_pair_moments(mu_n)
    m = nu_n.alphabet.size
    for i in range(m):
        for j in range(m):
            if Fraction(raw[i][j]) != Fraction(pi_n.entries[i][j]):
                return Fraction(0)

    by_symbol = _class_profile_counts(mu_n, n)
    prob = Fraction(1)
    for j, symbol in enumerate(nu_n.alphabet.symbols):
        class_profiles = by_symbol[symbol]
        multiplicity_den = 1
        for _, count in class_profiles:
            multiplicity_den *= math.factorial(count)
        prob *= Fraction(math.factorial(bins[j]), multiplicity_den)
        for i in range(m):
            split_den = 1
            for profile, count in class_profiles:
                split_den *= math.factorial(profile.counts[i]) ** count
            prob *= Fraction(math.factorial(balls[i][j]), split_den)
            if balls[i][j]:
                prob *= Fraction(1, bins[j] ** balls[i][j])
    return prob


def brute_force_type_distribution(
    nu_n: SymbolMeasure,
    pi_n: PairMeasure,
    n: int,
    *,
    budget: int = 2_000_000,
) -> dict[NeighbourhoodMeasure, Fraction]:
    """Distribution of the neighbourhood measure by exhaustive enumeration.

    Every individual placement (each ball choosing each bin of its class)
    is generated once via a mixed-radix odometer; outcomes aggregate by the
    induced measure.  Placements are exchangeable over bins, so fixing the
    bin symbols in canonical blocks loses no generality.  Raises
    :class:`EnumerationBudgetError` when the outcome count exceeds
    ``budget``.
    """
    bins, balls = _integer_targets(nu_n, pi_n, n)
    m = nu_n.alphabet.size

    ball_list: list[tuple[int, int]] = []  # (ball symbol, bin class)
    for j in range(m):
        for i in range(m):
            ball_list.extend([(i, j)] * balls[i][j])
    radices = [bins[j] for _, j in ball_list]
    total = 1
    for r in radices:
        total *= r
    if total > budget:
        raise EnumerationBudgetError(
            f"brute force needs {total} outcomes, budget is {budget}"
        )

    offsets = [sum(bins[:j]) for j in range(m)]
    class_slices = [slice(offsets[j], offsets[j] + bins[j]) for j in range(m)]
    per_bin = [[0] * m for _ in range(n)]
    digits = [0] * len(ball_list)
    for (i, j) in ball_list:
        per_bin[offsets[j]][i] += 1

    counter: dict[tuple, int] = {}
    while True:
        key = tuple(
            tuple(sorted(tuple(row) for row in per_bin[class_slices[j]]))
            for j in range(m)
        )
        counter[key] = counter.get(key, 0) + 1
        pos = len(digits) - 1
        while pos >= 0:
            i, j = ball_list[pos]
            old = digits[pos]
            if old + 1 < radices[pos]:
                per_bin[offsets[j] + old][i] -= 1
                per_bin[offsets[j] + old + 1][i] += 1
                digits[pos] = old + 1
                break
            per_bin[offsets[j] + old][i] -= 1
            per_bin[offsets[j]][i] += 1
            digits[pos] = 0
            pos -= 1
        if pos < 0:
            break

    out: dict[NeighbourhoodMeasure, Fraction] = {}
    for key, count in counter.items():
        support: dict[tuple[str, LocalProfile], Fraction] = {}
        for j in range(m):
            symbol = nu_n.alphabet.symbols[j]
            for profile_counts in key[j]:
                k = (symbol, LocalProfile(profile_counts))
                support[k] = support.get(k, Fraction(0)) + Fraction(1, n)
        measure = NeighbourhoodMeasure(nu_n.alphabet, support)
        out[measure] = out.get(measure, Fraction(0)) + Fraction(count, total)
    return out


def entropy_identity_check(
    mu_n: NeighbourhoodMeasure,
    nu_n: SymbolMeasure,
    pi_n: PairMeasure,
) -> float:
    """Absolute gap between two evaluations of H(mu_n || Poi_n).

    The direct evaluation sums mu log(mu/Poi) over the support; the
    rearranged evaluation expands the reference law into marginal entropy,
    pair-mass and profile-factorial terms.  ``mu_n`` must match the targets
    exactly (fraction equality), otherwise the rearrangement is invalid and
    :class:`DomainError` is raised.
    """
    marg = marginal_symbol(mu_n)
    for a in range(nu_n.alphabet.size):
        if Fraction(marg.weights[a]) != Fraction(nu_n.weights[a]):
            raise DomainError("mu marginal does not match nu exactly")
    raw = _raw_pair_moments(mu_n)
    m = nu_n.alphabet.size
    for i in range(m):
        for j in range(m):
            if Fraction(raw[i][j]) != Fraction(pi_n.entries[i][j]):
                raise DomainError("mu pair moments do not match pi exactly")

    direct = relative_entropy(
        mu_n, lambda key: poi_mass(nu_n, pi_n, key[0], key[1])
    )

    pair_term = 0.0
    for i in range(m):
        for j in range(m):
            p = float(pi_n.entries[i][j])
            va = float(nu_n.weights[j])
            if p > 0:
                pair_term += p - p * math.log(p) + p * math.log(va)
    profile_term = 0.0
    for (_symbol, profile), w in mu_n.items():
        log_fact = sum(math.lgamma(c + 1) for c in profile.counts)
        profile_term += float(w) * log_fact
    rearranged = (
        shannon_entropy(nu_n) - shannon_entropy(mu_n) + pair_term + profile_term
    )
    return abs(direct - rearranged)


@dataclass(frozen=True)
class CorrectionTerms:
    """Finite-n correction exponents, transcribed verbatim from the source.

    ``theta1`` and ``theta2`` are the candidate exponents of a sandwich
    on the exact type probability P of a measure mu_n: with
    H = H(mu_n || Poi_n) and K the type-class size,

        exp(-n H + theta1)  <=?  P  <=?  (1/K) exp(-n H + theta2).

    The displayed formulas carry suspicious factors (a 1/(2n) on the
    support-size log term, a 1/n on the second beta2 sum), so the sandwich
    is a diagnostic whose per-type status is reported, never asserted; at
    desk-scale n the lower bound is observed to fail.  The binding checks
    on exact probabilities are the enumeration oracle and the entropy
    identity.  The fields expose the ingredients (alpha: target-side
    terms, beta: measure-side terms).
    """

    n: int
    support_size: int
    type_class_size: int
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    theta1: float
    theta2: float

    def log_lower_bound(self, entropy: float) -> float:
        return -self.n * entropy + self.theta1

    def log_upper_bound(self, entropy: float) -> float:
        return -math.log(self.type_class_size) - self.n * entropy + self.theta2

    def sandwich_status(self, entropy: float, log_probability: float) -> dict:
        """Report whether each side of the diagnostic sandwich holds."""
        lower = self.log_lower_bound(entropy)
        upper = self.log_upper_bound(entropy)
        return {
            "log_lower_bound": lower,
            "log_probability": log_probability,
            "log_upper_bound": upper,
            "lower_holds": lower <= log_probability + 1e-9,
            "upper_holds": log_probability <= upper + 1e-9,
        }


def stirling_corrections(
    mu_n: NeighbourhoodMeasure,
    nu_n: SymbolMeasure,
    pi_n: PairMeasure,
    n: int,
    type_class_size: int,
) -> CorrectionTerms:
    """Correction exponents theta1, theta2 for one quantized measure.

    Requires every nu and pi mass to be positive (the terms take logs and
    reciprocals of each entry); raises :class:`DomainError` naming the
    offending entry otherwise.
    """
    if type_class_size < 1:
        raise DomainError("type class size must be positive")
    m = nu_n.alphabet.size
    names = nu_n.alphabet.symbols
    for j in range(m):
        if float(nu_n.weights[j]) <= 0:
            raise DomainError(f"correction terms need nu({names[j]}) > 0")
        for i in range(m):
            if float(pi_n.entries[i][j]) <= 0:
                raise DomainError(
                    f"correction terms need pi({names[i]},{names[j]}) > 0"
                )

    log_k = math.log(type_class_size)
    sum_log_pi = 0.0
    sum_inv_pi_plus = 0.0
    sum_inv_pi = 0.0
    for i in range(m):
        for j in range(m):
            p = float(pi_n.entries[i][j])
            sum_log_pi += math.log(p)
            sum_inv_pi_plus += 1.0 / (12.0 * p + 1.0 / n)
            sum_inv_pi += 1.0 / (12.0 * p)
    sum_log_nu = 0.0
    sum_inv_nu_plus = 0.0
    sum_inv_nu = 0.0
    for j in range(m):
        v = float(nu_n.weights[j])
        sum_log_nu += math.log(v)
        sum_inv_nu_plus += 1.0 / (12.0 * v + 1.0 / n)
        sum_inv_nu += 1.0 / (12.0 * v)

    log2pin = math.log(2.0 * math.pi * n)
    alpha1 = (
        -log_k / n
        + sum_log_pi / n
        + (m + m * m) * log2pin / (2.0 * n)
        + sum_inv_nu_plus / (n * n)
        + sum_log_nu / n
        + sum_inv_pi_plus / (n * n)
    )
    alpha2 = (
        log_k / n
        + sum_inv_pi / (n * n)
        + sum_inv_nu / (n * n)
        + sum_log_pi / n
        + (m + m * m) * log2pin / (2.0 * n)
        + sum_log_nu / n
    )

    support = mu_n.items()
    sum_log_mu = 0.0
    sum_inv_mu_plus = 0.0
    sum_inv_mu = 0.0
    for _key, w in support:
        q = float(w)
        sum_log_mu += math.log(q)
        sum_inv_mu_plus += 1.0 / (12.0 * q + 1.0 / n)
        sum_inv_mu += 1.0 / (12.0 * q)
    beta1 = sum_log_mu / n + sum_inv_mu_plus / (n * n)
    beta2 = sum_log_mu / n + sum_inv_mu / n

    support_size = len(support)
    theta1 = n * alpha1 - n * beta1 - support_size * log2pin / (2.0 * n)
    theta2 = n * alpha2 - n * beta2
    return CorrectionTerms(
        n=n,
        support_size=support_size,
        type_class_size=type_class_size,
        alpha1=alpha1,
        alpha2=alpha2,
        beta1=beta1,
        beta2=beta2,
        theta1=theta1,
        theta2=theta2,
    )
