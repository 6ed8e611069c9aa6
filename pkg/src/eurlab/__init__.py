"""Entropic uncertainty relations for several observables and the entanglement criteria built on them."""

from .bounds import (
    BoundValue,
    ScenarioBounds,
    certify_tightness,
    maassen_uffink,
    multi_observable_bound,
    scenario_bounds,
)
from .criteria import (
    CriterionReport,
    bipartite_criterion,
    evaluate,
    full_separability_criterion,
    gme_criterion,
    steering_criterion,
)
from .entropy import (
    ProbabilityDistribution,
    born_distribution,
    conditional_entropy,
    joint_entropy,
    shannon_entropy,
)
from .errors import DomainError, UnsupportedDimensionError
from .observables import (
    MeasurementBasis,
    ObservableScenario,
    is_mutually_unbiased,
    max_overlap,
    mub_set,
    standard_bases,
)
from .states import (
    DensityMatrix,
    PureState,
    StateFamilySpec,
    make_state,
    partial_trace,
    random_state,
    von_neumann_entropy,
)

__version__ = "0.1.0"
