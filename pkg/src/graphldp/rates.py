"""Large-deviation rate functions for sparse conditioned graphs.

Three nested levels are covered, each a relative entropy against the
product-Poisson reference law:

* neighbourhood level: the rate of a candidate neighbourhood measure is
  H(mu || Poi) when mu is consistent with the conditioning targets and
  infinite otherwise;
* degree level: the rate of a degree measure d with mean c is H(d || q_c)
  with q_c the Poisson(c) law;
* isolated-vertex level: the rate of seeing a proportion x of isolated
  vertices is the degree-level rate minimised over all degree measures
  with d(0) = x and mean c.  The minimiser is explicit: mass x at zero
  plus (1-x) times a zero-truncated Poisson whose parameter solves
  (1 - exp(-lambda))/lambda = (1 - x)/c.

A published closed form for the isolated-vertex rate omits one term; it
is evaluated verbatim as a diagnostic field next to the exact value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .measures import (
    Consistency,
    DegreeMeasure,
    DomainError,
    NeighbourhoodMeasure,
    PairMeasure,
    SymbolMeasure,
    check_consistency,
    marginal_symbol,
    poi_mass,
    poisson_pmf,
    relative_entropy,
)

__all__ = [
    "IsolatedRateResult",
    "bennett_h",
    "bennett_tail",
    "lambda_root",
    "mean_ratio",
    "minimizer_degree_profile",
    "poisson_degree_measure",
    "rate_degree",
    "rate_isolated",
    "rate_neighbourhood",
]

#: Residual tolerance required of the transcendental root.
ROOT_RESIDUAL_TOL = 1e-12

#: Mass beyond the truncation point of series expansions.
TAIL_TOL = 1e-14


def _check_xc(x: float, c: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if not c > 0.0:
        raise DomainError(f"c must be positive, got {c}")
    if math.isinf(c) or math.isnan(c) or math.isnan(x):
        raise DomainError("x and c must be finite")


def mean_ratio(lam: float) -> float:
    """(1 - exp(-lam))/lam, continuously extended to 1 at lam = 0."""
    if lam == 0.0:
        return 1.0
    return -math.expm1(-lam) / lam


def lambda_root(x: float, c: float) -> float:
    """Root of (1 - exp(-lambda))/lambda = (1 - x)/c.

    The left side decreases from 1 to 0 on [0, inf), so a unique
    non-negative root exists iff (1 - x)/c <= 1.  Returns 0.0 at the
    boundary x = 1 - c, ``inf`` at x = 1, and raises
    :class:`DomainError` when x < 1 - c (no root).  The residual of the
    returned root is below 1e-12.
    """
    _check_xc(x, c)
    target = (1.0 - x) / c
    if target > 1.0:
        raise DomainError(
            f"no non-negative root: (1-x)/c = {target} exceeds 1 (x < 1 - c)"
        )
    if target == 1.0:
        return 0.0
    if target == 0.0:
        return math.inf

    lo, hi = 0.0, 1.0
    while mean_ratio(hi) > target:
        lo, hi = hi, hi * 2.0
    root = brentq(
        lambda lam: mean_ratio(lam) - target, lo, hi, xtol=5e-324, rtol=8.9e-16
    )
    # one Newton polish step; the derivative is exact
    ratio = mean_ratio(root)
    deriv = (math.exp(-root) * root - (1.0 - math.exp(-root))) / (root * root)
    if deriv != 0.0:
        polished = root - (ratio - target) / deriv
        if polished > 0 and abs(mean_ratio(polished) - target) <= abs(ratio - target):
            root = polished
    return root


def minimizer_degree_profile(x: float, c: float) -> DegreeMeasure:
    """The degree measure attaining the isolated-vertex rate at (x, c).

    Mass x at degree 0; the remaining 1 - x follows a zero-truncated
    Poisson with parameter ``lambda_root(x, c)``.  The series is truncated
    once the omitted tail is below 1e-14; weights are floats.
    """
    lam = lambda_root(x, c)
    if lam == 0.0:
        support = {0: x, 1: 1.0 - x} if x > 0 else {1: 1.0}
        return DegreeMeasure({k: w for k, w in support.items() if w > 0})
    if math.isinf(lam):
        return DegreeMeasure({0: 1.0})
    support = {}
    if x > 0:
        support[0] = x
    scale = (1.0 - x) / math.expm1(lam)
    cumulative = 0.0
    k = 1
    while True:
        term = scale * math.exp(k * math.log(lam) - math.lgamma(k + 1))
        if term > 0:
            support[k] = term
        cumulative += term
        if cumulative >= (1.0 - x) - TAIL_TOL and k > lam:
            break
        k += 1
        if k > 10_000:
            raise RuntimeError("truncated series failed to converge")
    return DegreeMeasure(support)


def poisson_degree_measure(c: float, tail_tol: float = TAIL_TOL) -> DegreeMeasure:
    """Poisson(c) truncated so the omitted tail is below ``tail_tol``."""
    if c < 0:
        raise DomainError("poisson mean must be non-negative")
    if c == 0:
        return DegreeMeasure({0: 1.0})
    support = {}
    cumulative = 0.0
    k = 0
    while cumulative < 1.0 - tail_tol or k <= c:
        p = poisson_pmf(c, k)
        if p > 0:
            support[k] = p
        cumulative += p
        k += 1
        if k > 100_000:
            raise RuntimeError("truncated series failed to converge")
    return DegreeMeasure(support)


@dataclass(frozen=True)
class IsolatedRateResult:
    """Exact isolated-vertex rate at (x, c) with its certificate.

    ``value`` is the relative entropy of the explicit minimiser against
    Poisson(c).  ``published_closed_form`` evaluates a published formula
    for the same quantity verbatim; it disagrees with ``value`` away from
    the typical point and is reported for comparison only.
    """

    x: float
    c: float
    lam: float
    minimizer: DegreeMeasure | None
    value: float
    published_closed_form: float

    def to_jsonable(self) -> dict:
        return {
            "type": "isolated_rate",
            "x": self.x,
            "c": self.c,
            "lambda": _json_float(self.lam),
            "value": _json_float(self.value),
            "published_closed_form": _json_float(self.published_closed_form),
            "minimizer": None if self.minimizer is None else self.minimizer.to_jsonable(),
        }


def _json_float(v: float):
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _published_closed_form(x: float, c: float, lam: float) -> float:
    """x log(x e^c) + (1-x) log((1-x)/(1-e^-c)) + c log(lam) - c log(c)."""
    if math.isinf(lam):
        return math.inf
    if lam == 0.0:
        return -math.inf
    total = c * math.log(lam) - c * math.log(c)
    if x > 0:
        total += x * math.log(x) + x * c
    if x < 1:
        total += (1.0 - x) * math.log((1.0 - x) / -math.expm1(-c))
    return total


def rate_isolated(x: float, c: float) -> IsolatedRateResult:
    """Rate of observing a proportion x of isolated vertices at mean c.

    Returns ``inf`` (with no minimiser) when x < 1 - c, where no degree
    measure with mean c can put mass x at zero.  Otherwise the value is
    H(minimiser || Poisson(c)), computed from the explicit minimiser, and
    is zero exactly at the typical proportion x = exp(-c).
    """
    _check_xc(x, c)
    if (1.0 - x) / c > 1.0:
        return IsolatedRateResult(
            x=x, c=c, lam=math.nan, minimizer=None,
            value=math.inf, published_closed_form=math.nan,
        )
    lam = lambda_root(x, c)
    minimizer = minimizer_degree_profile(x, c)
    value = rate_degree(minimizer, c)
    return IsolatedRateResult(
        x=x,
        c=c,
        lam=lam,
        minimizer=minimizer,
        value=value,
        published_closed_form=_published_closed_form(x, c, lam),
    )


def rate_degree(d: DegreeMeasure, c: float) -> float:
    """Degree-measure rate H(d || Poisson(c))."""
    if c < 0:
        raise DomainError("c must be non-negative")
    if c == 0:
        return relative_entropy(d, lambda k: 1.0 if k == 0 else 0.0)
    return relative_entropy(d, lambda k: poisson_pmf(c, k))


def rate_neighbourhood(
    mu: NeighbourhoodMeasure,
    nu: SymbolMeasure,
    pi: PairMeasure,
    tol: float = 1e-10,
) -> float:
    """Neighbourhood-measure rate: H(mu || Poi) if consistent, else inf.

    Consistency requires the symbol marginal of mu to equal nu and its
    mean neighbour-count moments to equal pi, both within ``tol``.
    """
    status = check_consistency(mu, nu, pi, tol=tol)
    if status != Consistency.CONSISTENT:
        return math.inf
    return relative_entropy(mu, lambda key: poi_mass(nu, pi, key[0], key[1]))


def bennett_h(x: float) -> float:
    """(1 + x) log(1 + x) - x, the exponent shape in Bennett's bound."""
    if x < -1.0:
        raise DomainError(f"bennett_h needs x >= -1, got {x}")
    if x == -1.0:
        return 1.0
    return (1.0 + x) * math.log1p(x) - x


def bennett_tail(variance_sum: float, threshold: float) -> float:
    """Bennett upper bound exp(-v h(t/v)) for a sum with variance proxy v.

    Bounds the chance that a sum of independent, centred, unit-bounded
    terms with total variance ``variance_sum`` exceeds ``threshold``.
    """
    if variance_sum <= 0:
        raise DomainError("variance_sum must be positive")
    if threshold < 0:
        raise DomainError("threshold must be non-negative")
    return math.exp(-variance_sum * bennett_h(threshold / variance_sum))
