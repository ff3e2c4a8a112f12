"""Exact type probabilities against the brute-force enumeration oracle."""

import math
from fractions import Fraction

import pytest

from graphldp import (
    DomainError,
    EnumerationBudgetError,
    LocalProfile,
    NeighbourhoodMeasure,
    PairMeasure,
    SymbolAlphabet,
    SymbolMeasure,
    brute_force_type_distribution,
    entropy_identity_check,
    enumerate_type_class,
    exact_type_probability,
    stirling_corrections,
)
from graphldp.measures import poi_mass, relative_entropy

from conftest import profile_measure, single_color_targets, two_color_targets


def log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


SMALL_INSTANCES = [
    single_color_targets(Fraction(1)) + (2,),
    single_color_targets(Fraction(1)) + (4,),
    single_color_targets(Fraction(3, 2)) + (4,),
    single_color_targets(Fraction(4, 5)) + (5,),
    two_color_targets(
        (Fraction(1, 2), Fraction(1, 2)),
        ((Fraction(1, 2), Fraction(1, 4)), (Fraction(1, 4), Fraction(1, 2))),
    )
    + (4,),
]


# ---------------------------------------------------------------------------
# enumeration and the oracle


def test_known_two_bin_type_class():
    nu, pi = single_color_targets(Fraction(1))
    tc = enumerate_type_class(nu, pi, 2)
    assert tc.size == 2
    by_measure = {m.measure: m.probability for m in tc.members}
    split = profile_measure(
        SymbolAlphabet.of_size(1),
        {("a", (0,)): Fraction(1, 2), ("a", (2,)): Fraction(1, 2)},
    )
    even = profile_measure(SymbolAlphabet.of_size(1), {("a", (1,)): Fraction(1)})
    assert by_measure[split] == Fraction(1, 2)
    assert by_measure[even] == Fraction(1, 2)


@pytest.mark.parametrize("nu,pi,n", SMALL_INSTANCES)
def test_exact_probabilities_match_brute_force(nu, pi, n):
    tc = enumerate_type_class(nu, pi, n)
    oracle = brute_force_type_distribution(nu, pi, n)
    got = {m.measure: m.probability for m in tc.members}
    assert set(got) == set(oracle)
    for measure, prob in oracle.items():
        assert got[measure] == prob  # exact rational equality


@pytest.mark.parametrize("nu,pi,n", SMALL_INSTANCES)
def test_probabilities_sum_to_one(nu, pi, n):
    tc = enumerate_type_class(nu, pi, n)
    assert tc.total_probability() == 1


def test_zero_pair_measure_has_single_type(one_color):
    nu, pi = single_color_targets(Fraction(0))
    tc = enumerate_type_class(nu, pi, 3)
    assert tc.size == 1
    member = tc.members[0]
    assert member.probability == 1
    assert member.measure == profile_measure(
        one_color, {("a", (0,)): Fraction(1)}
    )


def test_probability_zero_off_the_type_class(one_color):
    nu, pi = single_color_targets(Fraction(1))
    # wrong marginal: not quantized consistently with the targets
    off = profile_measure(one_color, {("a", (0,)): Fraction(1)})
    assert exact_type_probability(off, nu, pi, 2) == 0
    # not n-quantized at all
    thirds = profile_measure(
        one_color, {("a", (0,)): Fraction(1, 3), ("a", (1,)): Fraction(2, 3)}
    )
    assert exact_type_probability(thirds, nu, pi, 2) == 0


def test_enumeration_budget_error():
    nu, pi = single_color_targets(Fraction(1))
    with pytest.raises(EnumerationBudgetError):
        enumerate_type_class(nu, pi, 12, visit_budget=3)
    with pytest.raises(EnumerationBudgetError):
        brute_force_type_distribution(nu, pi, 12, budget=10)


def test_type_class_members_are_consistent(one_color):
    from graphldp import Consistency, check_consistency

    nu, pi = single_color_targets(Fraction(3, 2))
    tc = enumerate_type_class(nu, pi, 4)
    for member in tc.members:
        assert check_consistency(member.measure, nu, pi) is Consistency.CONSISTENT


# ---------------------------------------------------------------------------
# entropy identity


def test_entropy_identity_on_point_mass(one_color):
    nu, pi = single_color_targets(Fraction(1))
    mu = profile_measure(one_color, {("a", (1,)): Fraction(1)})
    assert entropy_identity_check(mu, nu, pi) <= 1e-10


def test_entropy_identity_zero_targets(one_color):
    nu, pi = single_color_targets(Fraction(0))
    mu = profile_measure(one_color, {("a", (0,)): Fraction(1)})
    assert entropy_identity_check(mu, nu, pi) <= 1e-15
    assert relative_entropy(mu, lambda k: poi_mass(nu, pi, k[0], k[1])) == 0.0


@pytest.mark.parametrize("nu,pi,n", SMALL_INSTANCES)
def test_entropy_identity_across_enumerated_types(nu, pi, n):
    tc = enumerate_type_class(nu, pi, n)
    for member in tc.members:
        assert entropy_identity_check(member.measure, nu, pi) <= 1e-10


def test_entropy_identity_rejects_inconsistent_input(one_color):
    nu, pi = single_color_targets(Fraction(1))
    off = profile_measure(one_color, {("a", (0,)): Fraction(1)})
    with pytest.raises(DomainError):
        entropy_identity_check(off, nu, pi)


# ---------------------------------------------------------------------------
# exact log-probability convergence


def test_log_probability_gap_decreases(one_color):
    nu, pi = single_color_targets(Fraction(1))
    gaps = []
    for n in (2, 4, 6):
        tc = enumerate_type_class(nu, pi, n)
        worst = 0.0
        for member in tc.members:
            if member.probability == 0:
                continue
            entropy = relative_entropy(
                member.measure, lambda k: poi_mass(nu, pi, k[0], k[1])
            )
            gap = abs(-log_fraction(member.probability) / n - entropy)
            worst = max(worst, gap)
        gaps.append(worst)
    assert gaps[0] > gaps[1] > gaps[2]


# ---------------------------------------------------------------------------
# correction terms


def test_correction_terms_finite_and_structured(one_color):
    nu, pi = single_color_targets(Fraction(1))
    tc = enumerate_type_class(nu, pi, 2)
    for member in tc.members:
        corr = stirling_corrections(member.measure, nu, pi, 2, tc.size)
        for v in (corr.alpha1, corr.alpha2, corr.beta1, corr.beta2,
                  corr.theta1, corr.theta2):
            assert math.isfinite(v)
        assert corr.support_size == len(member.measure.support)
        assert corr.type_class_size == tc.size


def test_correction_terms_report_sandwich_status(one_color):
    # The transcribed formulas are diagnostics: their sandwich status is
    # recorded per type, not asserted.  At this scale the upper side holds
    # on every type while the lower side fails on most, matching the
    # suspicious small factors in the source displays.
    nu, pi = single_color_targets(Fraction(1))
    statuses = []
    for n in (2, 4, 6):
        tc = enumerate_type_class(nu, pi, n)
        for member in tc.members:
            if member.probability == 0:
                continue
            entropy = relative_entropy(
                member.measure, lambda k: poi_mass(nu, pi, k[0], k[1])
            )
            corr = stirling_corrections(member.measure, nu, pi, n, tc.size)
            statuses.append(
                corr.sandwich_status(entropy, log_fraction(member.probability))
            )
    assert all(s["upper_holds"] for s in statuses)
    failures = sum(1 for s in statuses if not s["lower_holds"])
    assert failures > len(statuses) // 2


def test_correction_terms_need_positive_masses(two_colors):
    nu = SymbolMeasure(two_colors, (Fraction(1), Fraction(0)))
    pi = PairMeasure(
        two_colors, ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(0)))
    )
    mu = profile_measure(two_colors, {("a", (1, 0)): Fraction(1)})
    with pytest.raises(DomainError, match="nu|pi"):
        stirling_corrections(mu, nu, pi, 2, 1)


def test_enumerate_rejects_non_quantized_targets(one_color):
    nu, pi = single_color_targets(Fraction(1, 3))
    with pytest.raises(DomainError):
        enumerate_type_class(nu, pi, 5)
