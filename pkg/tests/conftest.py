"""Shared fixtures and helpers for the test suite."""

from fractions import Fraction

import numpy as np
import pytest

from graphldp import (
    LocalProfile,
    NeighbourhoodMeasure,
    PairMeasure,
    SymbolAlphabet,
    SymbolMeasure,
)


@pytest.fixture
def one_color():
    return SymbolAlphabet.of_size(1)


@pytest.fixture
def two_colors():
    return SymbolAlphabet.of_size(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


def single_color_targets(pi_value) -> tuple[SymbolMeasure, PairMeasure]:
    alphabet = SymbolAlphabet.of_size(1)
    nu = SymbolMeasure(alphabet, (Fraction(1),))
    pi = PairMeasure(alphabet, ((Fraction(pi_value),),))
    return nu, pi


def two_color_targets(
    nu_weights, pi_entries
) -> tuple[SymbolMeasure, PairMeasure]:
    alphabet = SymbolAlphabet.of_size(2)
    nu = SymbolMeasure(alphabet, tuple(Fraction(w) for w in nu_weights))
    pi = PairMeasure(
        alphabet, tuple(tuple(Fraction(e) for e in row) for row in pi_entries)
    )
    return nu, pi


def profile_measure(alphabet: SymbolAlphabet, support: dict) -> NeighbourhoodMeasure:
    """Build a neighbourhood measure from {(symbol, counts): weight}."""
    return NeighbourhoodMeasure(
        alphabet,
        {
            (sym, LocalProfile(tuple(counts))): Fraction(w)
            for (sym, counts), w in support.items()
        },
    )
