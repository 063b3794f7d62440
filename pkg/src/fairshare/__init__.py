"""Fair revenue sharing for crowd-sourced systems via Shapley allocation."""

from fairshare.core import (
    Allocation,
    AxiomReport,
    Coalition,
    CoalitionGame,
    DegenerateCrowdError,
    LinearityReport,
    Method,
    PlayerId,
    PlayerTag,
    RosterTooLargeError,
    anonymous_game,
    check_axioms,
    check_linearity,
    is_supermodular,
    marginal_value,
    shapley_anonymous,
    shapley_exact,
    shapley_permutation_average,
    shapley_sample,
)
from fairshare.geo import (
    DiskCensus,
    effective_size,
    geo_founder_shapley,
    geo_shapley,
    nu_lin,
    nu_met,
    region_census,
)
from fairshare.models import (
    ProfitCssParams,
    ShareReport,
    SingleCssParams,
    WeightedCssParams,
    closed_profit,
    closed_single,
    closed_weighted,
    share_sweep,
)
from fairshare.oligopoly import (
    FineGrainRoster,
    OligopolyGraph,
    fine_major_ratio,
    shapley_coarse,
    shapley_fine_closed,
    value_coarse,
    value_fine,
)

__version__ = "0.1.0"
