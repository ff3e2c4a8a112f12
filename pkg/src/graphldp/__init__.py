"""Simulation and exact computation for large deviations of sparse
symbolled graphs and their random-allocation surrogate.

The package covers four layers:

* ``measures``: exact measure containers and the projections linking them;
* ``samplers``: the unconditioned model, the conditioned model, the
  allocation surrogate and their shared-draw coupling;
* ``types_method``: exact rational probabilities of achievable
  neighbourhood measures, with a brute-force oracle;
* ``rates``: the rate functions governing the exponential decay, down to
  the explicit isolated-vertex formula;
* ``validate``: Monte Carlo and exact-oracle experiments checking the
  predicted decay rates.
"""

from .measures import (
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
    dump_json,
    from_jsonable,
    marginal_symbol,
    pair_projection,
    poi_mass,
    quantize_targets,
    relative_entropy,
    total_variation,
)
from .samplers import (
    AllocationOutcome,
    ColoredGraph,
    CoupledSample,
    FeasibilityError,
    GraphParams,
    allocation_empirical_measures,
    collision_prob,
    edge_budget,
    empirical_measures,
    sample_allocation,
    sample_colored_graph,
    sample_conditional_graph,
    sample_coupled,
)
from .types_method import (
    EnumerationBudgetError,
    TypeClass,
    TypeMember,
    brute_force_type_distribution,
    entropy_identity_check,
    enumerate_type_class,
    exact_type_probability,
    stirling_corrections,
)
from .rates import (
    IsolatedRateResult,
    bennett_h,
    bennett_tail,
    lambda_root,
    mean_ratio,
    minimizer_degree_profile,
    poisson_degree_measure,
    rate_degree,
    rate_isolated,
    rate_neighbourhood,
)
from .validate import (
    CouplingProbeResult,
    DecayEstimate,
    EventSpec,
    ExperimentConfig,
    LlnResult,
    PerNEstimate,
    coupling_probe,
    estimate_event_rate,
    exact_isolated_tail,
    lln_probe,
    wilson_interval,
)

__version__ = "0.1.0"
