"""Measure containers, projections, distances, and quantization."""

import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphldp import (
    AlphabetMismatchError,
    Consistency,
    DegreeMeasure,
    DomainError,
    LocalProfile,
    NeighbourhoodMeasure,
    PairMeasure,
    SymbolAlphabet,
    SymbolMeasure,
    check_consistency,
    degree_projection,
    marginal_symbol,
    pair_projection,
    poi_mass,
    quantize_targets,
    relative_entropy,
    total_variation,
)
from graphldp.measures import dump_json, from_jsonable, poisson_pmf, shannon_entropy

from conftest import profile_measure, single_color_targets, two_color_targets


# ---------------------------------------------------------------------------
# alphabets and basic containers


def test_alphabet_of_size_names():
    assert SymbolAlphabet.of_size(3).symbols == ("a", "b", "c")
    assert SymbolAlphabet.of_size(1).symbols == ("a",)


def test_alphabet_index_and_errors():
    alph = SymbolAlphabet(("x", "y"))
    assert alph.index("y") == 1
    with pytest.raises(AlphabetMismatchError):
        alph.index("z")
    with pytest.raises(DomainError):
        SymbolAlphabet(("x", "x"))
    with pytest.raises(DomainError):
        SymbolAlphabet(())


def test_symbol_measure_validation(two_colors):
    SymbolMeasure(two_colors, (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(DomainError):
        SymbolMeasure(two_colors, (Fraction(3, 4), Fraction(3, 4)))
    with pytest.raises(DomainError):
        SymbolMeasure(two_colors, (Fraction(-1, 2), Fraction(3, 2)))
    with pytest.raises(DomainError):
        SymbolMeasure(two_colors, (Fraction(1),))


def test_symbol_measure_from_mapping(two_colors):
    nu = SymbolMeasure.from_mapping(two_colors, {"a": 0.25, "b": 0.75})
    assert float(nu.weights[1]) == 0.75
    with pytest.raises((DomainError, AlphabetMismatchError)):
        SymbolMeasure.from_mapping(two_colors, {"a": 0.25, "z": 0.75})


def test_symbol_measure_quantization_predicate(two_colors):
    nu = SymbolMeasure(two_colors, (Fraction(1, 4), Fraction(3, 4)))
    assert nu.is_quantized(4)
    assert not nu.is_quantized(3)


def test_pair_measure_symmetry_required(two_colors):
    with pytest.raises(DomainError):
        PairMeasure(two_colors, ((Fraction(0), Fraction(1)), (Fraction(0), Fraction(0))))
    with pytest.raises(DomainError):
        PairMeasure(two_colors, ((Fraction(-1), Fraction(0)), (Fraction(0), Fraction(0))))


def test_pair_measure_quantization_counts_edges(one_color):
    # diagonal entries need n pi(a,a)/2 integral, so pi = 1/2 works at n = 4
    pi = PairMeasure(one_color, ((Fraction(1, 2),),))
    assert pi.is_quantized(4)
    assert not pi.is_quantized(5)


def test_local_profile_degree_and_order():
    p = LocalProfile((2, 0, 1))
    assert p.degree == 3
    assert LocalProfile((0, 1)) < LocalProfile((1, 0))
    with pytest.raises(DomainError):
        LocalProfile((-1,))


def test_neighbourhood_measure_drops_zero_weights(one_color):
    mu = NeighbourhoodMeasure(
        one_color,
        {
            ("a", LocalProfile((0,))): Fraction(1),
            ("a", LocalProfile((1,))): Fraction(0),
        },
    )
    assert len(mu.support) == 1


def test_neighbourhood_measure_equality_ignores_zeros(one_color):
    mu1 = profile_measure(one_color, {("a", (0,)): Fraction(1)})
    mu2 = NeighbourhoodMeasure(
        one_color,
        {
            ("a", LocalProfile((0,))): Fraction(1),
            ("a", LocalProfile((2,))): Fraction(0),
        },
    )
    assert mu1 == mu2
    assert hash(mu1) == hash(mu2)


def test_degree_measure_mean():
    d = DegreeMeasure({0: Fraction(1, 2), 2: Fraction(1, 2)})
    assert d.mean() == 1.0
    with pytest.raises(DomainError):
        DegreeMeasure({-1: Fraction(1)})


# ---------------------------------------------------------------------------
# projections and consistency


def test_projections_on_hand_example(two_colors):
    # n = 4: two 'a' vertices with one b-neighbour each, two 'b' vertices
    # with one a-neighbour each: a perfect matching across colors.
    mu = profile_measure(
        two_colors,
        {("a", (0, 1)): Fraction(1, 2), ("b", (1, 0)): Fraction(1, 2)},
    )
    nu = marginal_symbol(mu)
    assert nu.weights == (Fraction(1, 2), Fraction(1, 2))
    pi = pair_projection(mu)
    assert pi.entries[0][1] == Fraction(1, 2)
    assert pi.entries[1][0] == Fraction(1, 2)
    assert pi.entries[0][0] == 0
    deg = degree_projection(mu)
    assert dict(deg.items()) == {1: Fraction(1)}


def test_check_consistency_three_outcomes(two_colors):
    mu = profile_measure(
        two_colors,
        {("a", (0, 1)): Fraction(1, 2), ("b", (1, 0)): Fraction(1, 2)},
    )
    nu = marginal_symbol(mu)
    pi = pair_projection(mu)
    assert check_consistency(mu, nu, pi) is Consistency.CONSISTENT

    bigger = PairMeasure(
        two_colors,
        (
            (Fraction(1, 4), Fraction(1, 2)),
            (Fraction(1, 2), Fraction(0)),
        ),
    )
    assert check_consistency(mu, nu, bigger) is Consistency.SUB_CONSISTENT

    smaller = PairMeasure(
        two_colors,
        (
            (Fraction(0), Fraction(1, 4)),
            (Fraction(1, 4), Fraction(0)),
        ),
    )
    assert check_consistency(mu, nu, smaller) is Consistency.INCONSISTENT


def test_check_consistency_rejects_wrong_marginal(two_colors):
    mu = profile_measure(
        two_colors,
        {("a", (0, 1)): Fraction(1, 2), ("b", (1, 0)): Fraction(1, 2)},
    )
    nu = SymbolMeasure(two_colors, (Fraction(1, 4), Fraction(3, 4)))
    pi = pair_projection(mu)
    assert check_consistency(mu, nu, pi) is Consistency.INCONSISTENT


# ---------------------------------------------------------------------------
# distances and entropies


def test_total_variation_hand_value():
    p = DegreeMeasure({0: Fraction(1, 2), 1: Fraction(1, 2)})
    q = DegreeMeasure({0: Fraction(1, 4), 2: Fraction(3, 4)})
    # |1/2-1/4| + |1/2-0| + |0-3/4| = 3/2, halved
    assert total_variation(p, q) == pytest.approx(0.75)
    assert total_variation(p, p) == 0.0


@st.composite
def degree_measures(draw):
    size = draw(st.integers(1, 5))
    ks = draw(
        st.lists(st.integers(0, 8), min_size=size, max_size=size, unique=True)
    )
    raw = draw(
        st.lists(st.integers(1, 20), min_size=size, max_size=size)
    )
    total = sum(raw)
    return DegreeMeasure({k: Fraction(w, total) for k, w in zip(ks, raw)})


@given(degree_measures(), degree_measures(), degree_measures())
@settings(max_examples=60, deadline=None)
def test_total_variation_is_a_metric(p, q, r):
    dpq = total_variation(p, q)
    assert 0.0 <= dpq <= 1.0
    assert dpq == total_variation(q, p)
    assert total_variation(p, p) == 0.0
    assert dpq <= total_variation(p, r) + total_variation(r, q) + 1e-12


def test_relative_entropy_zero_iff_equal():
    p = DegreeMeasure({0: Fraction(1, 3), 1: Fraction(2, 3)})
    assert relative_entropy(p, p) == 0.0
    q = DegreeMeasure({0: Fraction(2, 3), 1: Fraction(1, 3)})
    expect = (1 / 3) * math.log((1 / 3) / (2 / 3)) + (2 / 3) * math.log(2)
    assert relative_entropy(p, q) == pytest.approx(expect, abs=1e-15)
    assert relative_entropy(p, q) > 0


def test_relative_entropy_support_violation_is_infinite():
    p = DegreeMeasure({0: Fraction(1, 2), 5: Fraction(1, 2)})
    q = DegreeMeasure({0: Fraction(1)})
    assert relative_entropy(p, q) == math.inf


def test_relative_entropy_accepts_callable_reference():
    p = DegreeMeasure({0: Fraction(1, 2), 1: Fraction(1, 2)})
    value = relative_entropy(p, lambda k: poisson_pmf(1.0, k))
    expect = 0.5 * math.log(0.5 / poisson_pmf(1.0, 0)) + 0.5 * math.log(
        0.5 / poisson_pmf(1.0, 1)
    )
    assert value == pytest.approx(expect, abs=1e-15)


def test_shannon_entropy_hand_value():
    p = DegreeMeasure({0: Fraction(1, 2), 1: Fraction(1, 2)})
    assert shannon_entropy(p) == pytest.approx(math.log(2), abs=1e-15)


def test_total_variation_rejects_mixed_kinds(one_color):
    p = DegreeMeasure({0: Fraction(1)})
    mu = profile_measure(one_color, {("a", (0,)): Fraction(1)})
    with pytest.raises(DomainError):
        total_variation(p, mu)


def test_alphabet_mismatch_raises(one_color, two_colors):
    p = profile_measure(one_color, {("a", (0,)): Fraction(1)})
    q = profile_measure(two_colors, {("a", (0, 0)): Fraction(1)})
    with pytest.raises(AlphabetMismatchError):
        total_variation(p, q)


# ---------------------------------------------------------------------------
# reference laws


def test_poisson_pmf_matches_direct_formula():
    for mean in (0.3, 1.0, 4.5):
        total = 0.0
        for k in range(60):
            pk = poisson_pmf(mean, k)
            assert pk == pytest.approx(
                math.exp(-mean) * mean**k / math.factorial(k), rel=1e-12
            )
            total += pk
        assert total == pytest.approx(1.0, abs=1e-12)
    assert poisson_pmf(0.0, 0) == 1.0
    assert poisson_pmf(0.0, 3) == 0.0
    with pytest.raises(DomainError):
        poisson_pmf(-1.0, 0)


def test_poi_mass_product_structure():
    nu, pi = two_color_targets(
        (Fraction(1, 2), Fraction(1, 2)),
        ((Fraction(1, 2), Fraction(1, 4)), (Fraction(1, 4), Fraction(1))),
    )
    # intensities at symbol 'a': pi(a,a)/nu(a) = 1, pi(b,a)/nu(a) = 1/2
    got = poi_mass(nu, pi, "a", LocalProfile((2, 1)))
    expect = 0.5 * poisson_pmf(1.0, 2) * poisson_pmf(0.5, 1)
    assert got == pytest.approx(expect, rel=1e-12)


def test_poi_mass_zero_class_rules(two_colors):
    nu = SymbolMeasure(two_colors, (Fraction(1), Fraction(0)))
    ok_pi = PairMeasure(two_colors, ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(0))))
    assert poi_mass(nu, ok_pi, "b", LocalProfile((0, 0))) == 0.0
    bad_pi = PairMeasure(
        two_colors, ((Fraction(1), Fraction(1, 2)), (Fraction(1, 2), Fraction(0)))
    )
    with pytest.raises(DomainError):
        poi_mass(nu, bad_pi, "b", LocalProfile((0, 0)))


# ---------------------------------------------------------------------------
# quantization


@given(
    st.integers(2, 60),
    st.lists(st.floats(0.01, 1.0), min_size=1, max_size=3),
)
@settings(max_examples=80, deadline=None)
def test_quantize_targets_properties(n, raw):
    m = len(raw)
    total = sum(raw)
    alphabet = SymbolAlphabet.of_size(m)
    nu = SymbolMeasure(alphabet, tuple(Fraction(str(w / total)) for w in raw[:-1])
                       + (Fraction(1) - sum(Fraction(str(w / total)) for w in raw[:-1]),))
    entries = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            entries[i][j] = entries[j][i] = Fraction(str(round(raw[i] * raw[j], 6)))
    pi = PairMeasure(alphabet, tuple(tuple(row) for row in entries))

    nu_n, pi_n = quantize_targets(nu, pi, n)
    assert nu_n.is_quantized(n)
    assert pi_n.is_quantized(n)
    # vertex counts move by less than one unit per symbol
    for a in range(m):
        assert abs(float(nu_n.weights[a] - nu.weights[a])) * n < 1.0 + 1e-9
    # pair entries stay symmetric and close to the request
    for i in range(m):
        for j in range(m):
            assert pi_n.entries[i][j] == pi_n.entries[j][i]
            # per unordered pair at most one edge unit of movement, which is
            # 2/n on a diagonal entry and 1/n off the diagonal
            slack = (2.0 if i == j else 1.0) / n + 1e-9
            assert abs(float(pi_n.entries[i][j] - pi.entries[i][j])) <= slack + 0.5 / n


def test_quantize_targets_exact_when_already_quantized(two_colors):
    nu, pi = two_color_targets(
        (Fraction(1, 2), Fraction(1, 2)),
        ((Fraction(1, 2), Fraction(1, 4)), (Fraction(1, 4), Fraction(1))),
    )
    nu_n, pi_n = quantize_targets(nu, pi, 8)
    assert nu_n.weights == nu.weights
    assert pi_n.entries == pi.entries


# ---------------------------------------------------------------------------
# serialization


def test_json_round_trips(one_color, two_colors):
    measures = [
        SymbolMeasure(two_colors, (Fraction(1, 3), Fraction(2, 3))),
        PairMeasure(one_color, ((Fraction(3, 2),),)),
        profile_measure(
            two_colors,
            {("a", (0, 1)): Fraction(1, 2), ("b", (1, 0)): Fraction(1, 2)},
        ),
        DegreeMeasure({0: Fraction(1, 4), 3: Fraction(3, 4)}),
    ]
    for original in measures:
        data = json.loads(dump_json(original))
        restored = from_jsonable(data)
        assert restored == original


def test_dump_json_is_deterministic(two_colors):
    mu = profile_measure(
        two_colors,
        {("b", (1, 0)): Fraction(1, 2), ("a", (0, 1)): Fraction(1, 2)},
    )
    assert dump_json(mu) == dump_json(mu)


def test_from_jsonable_rejects_unknown_type():
    with pytest.raises(DomainError):
        from_jsonable({"type": "mystery"})
