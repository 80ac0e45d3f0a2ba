"""pottsforge: exact Potts/Tutte partition functions, random-cluster
sampling with monotone couplings, the two-clique hyperedge gadget, and the
reduction pipeline from bipartite independent-set counting down to the
uniform-weight ferromagnetic Tutte problem."""

__version__ = "0.1.0"

from .backend import BACKEND_NAME
from .errors import CouplingViolationError, EnumerationCapError, NoCrossingError
from .exact import (
    TerminalSplit,
    exact_y_distribution,
    fk_check,
    potts,
    terminal_split,
    terminal_split_sweep,
    tutte_graph,
    tutte_graph_sweep,
    tutte_hypergraph,
)
from .gadget import (
    GadgetSpec,
    build_gadget,
    dp_weights,
    phase_constants,
    tune_rho,
    z_k,
    zeta_evaluator,
)
from .graphs import (
    BipartiteGraph,
    Partition,
    WeightedGraph,
    WeightedHypergraph,
    connected_components,
    hyper_components,
    parse_instance,
    partition_join,
    serialize_instance,
)
from .randomcluster import (
    ChainState,
    Conditioning,
    CoupledState,
    ERModel,
    RCModel,
    bicolour_bounds,
    coupled_step,
    heat_bath_step,
    rc_weight,
    red_green_split,
    run_chain,
    run_coupled,
    sample_er,
    sample_rc,
)
from .rationals import Rat, to_rat
from .reductions import (
    hyper_to_twoweight,
    implement_weight,
    ising3_reduce,
    maxis_blowup,
    parallel_compose,
    run_pipeline,
    semiregular_pad,
    semiregular_to_hypertutte,
    series_compose,
    twoweight_to_uniform,
)

__all__ = [
    "BACKEND_NAME",
    "BipartiteGraph",
    "ChainState",
    "Conditioning",
    "CoupledState",
    "CouplingViolationError",
    "ERModel",
    "EnumerationCapError",
    "GadgetSpec",
    "NoCrossingError",
    "Partition",
    "RCModel",
    "Rat",
    "TerminalSplit",
    "WeightedGraph",
    "WeightedHypergraph",
    "__version__",
    "bicolour_bounds",
    "build_gadget",
    "connected_components",
    "coupled_step",
    "dp_weights",
    "exact_y_distribution",
    "fk_check",
    "heat_bath_step",
    "hyper_components",
    "hyper_to_twoweight",
    "implement_weight",
    "ising3_reduce",
    "maxis_blowup",
    "parallel_compose",
    "parse_instance",
    "partition_join",
    "phase_constants",
    "potts",
    "rc_weight",
    "red_green_split",
    "run_chain",
    "run_coupled",
    "run_pipeline",
    "sample_er",
    "sample_rc",
    "semiregular_pad",
    "semiregular_to_hypertutte",
    "serialize_instance",
    "series_compose",
    "terminal_split",
    "terminal_split_sweep",
    "to_rat",
    "tune_rho",
    "tutte_graph",
    "tutte_graph_sweep",
    "tutte_hypergraph",
    "twoweight_to_uniform",
    "z_k",
    "zeta_evaluator",
]
