"""Single-item auctions on social networks with incentives for spreading the word.

The buyers of a networked auction only learn about it through their
neighbors. This package implements the information diffusion mechanism
(IDM), the network extension of VCG and a local second-price baseline,
plus tools to verify their incentive and revenue properties exhaustively on
small graphs.
"""
from .graph import (
    DiffusionAnalysis,
    DiffusionGraph,
    analyze,
    build_diffusion_graph,
    critical_nodes_oracle,
    critical_nodes_oracle_all,
    dependent_set_without,
    dominator_analysis,
    to_dot,
)
from .mechanisms import (
    BuyerStatus,
    MechanismKind,
    Outcome,
    classify_buyers,
    idm,
    revenue,
    run,
    second_price_local,
    vcg_network,
    welfare,
)
from .model import (
    Action,
    ActionProfile,
    Bid,
    SocialNetwork,
    as_value,
    feasibility_transform,
    is_feasible,
    make_profile,
    truthful_profile,
    utility,
)
from .scenario import load_scenario, save_scenario

__version__ = "0.1.0"
