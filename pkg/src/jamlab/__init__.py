"""Random sequential adsorption on random geometric graphs and clustered random graphs.

Samplers for RGG(c, d) and CRG(c, alpha), greedy RSA, the graph-free
exploration chain, the mean-field limits J* and V*, and the clustering map
alpha_d.
"""
from .core import (
    DomainError,
    Graph,
    JamlabError,
    NumericalError,
    Params,
    PreconditionError,
    SizeError,
    UndefinedValueError,
    params_new,
)
from .crg import HouseholdPartition, sample_crg, sample_households
from .explore import ExplorationState, explore_jam, explore_step, explore_trace, hypergeometric
from .mc import McSummary, ModelSpec, clt_check, run_replications
from .meanfield import (
    FluidSolution,
    VarianceSolution,
    fluid_solution,
    fluid_x,
    jamming_fraction,
    jamming_large_c,
    variance,
    variance_solution,
)
from .rgg import radius_for, sample_rgg, torus_distance
from .rng import STREAM_VERSION, RngStream, rng_derive
from .rsa import JamResult, exact_expected_jam, greedy_jam
from .special import alpha_d, empirical_clustering, inc_beta_reg

__version__ = "0.1.0"
