"""Minimum PMU placement for topological observability of power networks."""

__version__ = "0.1.0"

from .bip import greedy_cover, solve_bip
from .lp import LpProblem, solve_lp
from .nlp import (SqpConfig, StartStrategy, multistart, objective_value_grad,
                  rank_by_sori, round_to_binary, solve_nlp, sqp_subproblem)
from .observability import (constraint_jacobian, constraint_values, coverage,
                            is_observable, sori)
from .oracle import min_dominating_set_exact
from .report import SolveReport
from .topology import Network, build_connectivity, load_network, parse_network, renumber
