"""Approximate correlated equilibria with near-optimal welfare."""
from .errors import (CapacityError, DimensionError, InvariantViolation, LPError,
                     NormalizationError, OracleViolation, SolverError, StructuralViolation,
                     TargetInfeasible)
from .game import (CorrelatedDistribution, ExplicitGame, SuccinctGameOracle, expected_utility,
                   expected_welfare, normalize, welfare)
from .aggregative import AggregativeGame, CongestionPayoff, LinearPayoff, TabulatedPayoff
from .regret import (RegretSpace, ScalingVector, build_regret_vector, ce_report, cce_report,
                     max_ce_regret, max_cce_regret)
from .lp import optimal_equilibrium, worst_equilibrium
from .gadgets import build_ant_gadget, build_gadget, gadget_potential, verify_gadget_structure
from .mwmp import (AggregativeDPOracle, BruteForceOracle, aggregative_dp_mwmp, brute_force_mwmp,
                   discretize_aggregative, make_oracle, modified_welfare)
from .solver import SolverConfig, binary_search_target, solve

__version__ = "0.1.0"
