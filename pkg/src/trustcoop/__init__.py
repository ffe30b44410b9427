"""Trust-degree-aware cooperation between two transmitter/receiver pairs.

Tu2 relays Tu1's symbol with probability ``alpha`` while keeping its own
receiver above a QoS target. Solvers cover every antenna configuration:

* :func:`solve_siso` closed-form power split,
* :func:`solve_miso` beam arc at Tu1 plus a split search,
* :func:`solve_simo` block-coordinate helper beams,
* :func:`solve_mimo` beam grid at Tu1 on top of the SIMO machinery,

and :mod:`trustcoop.experiments` runs Monte Carlo sweeps over them.
"""

from .channel import ChannelConfig, ChannelSet, db_to_linear, sample
from .errors import (
    ConfigError, DegenerateInputError, Infeasible, InfeasibleQoSError, InvalidInputError, NumericalError,
    TrustCoopError,
)
from .experiments import ExperimentConfig, SweepResult, emit_csv, preset, read_csv, run_sweep, solve
from .linalg import project_complement, project_onto, rank_one_extract, top_eigvec
from .mimo import solve_mimo, w1_of_lambda
from .miso import solve_miso
from .qcqp import QuadProblem, sdr_solve_and_extract, solve_boost_max, solve_leakage_min
from .rates import EffectiveLinks, RateReport, Strategy, SystemParams
from .simo import SubproblemKind, run_bcu, solve_simo
from .siso import SisoGains, optimal_beta, solve_siso

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig", "ChannelSet", "db_to_linear", "sample",
    "ConfigError", "DegenerateInputError", "Infeasible", "InfeasibleQoSError", "InvalidInputError",
    "NumericalError", "TrustCoopError",
    "ExperimentConfig", "SweepResult", "emit_csv", "preset", "read_csv", "run_sweep", "solve",
    "project_complement", "project_onto", "rank_one_extract", "top_eigvec",
    "solve_mimo", "w1_of_lambda", "solve_miso",
    "QuadProblem", "sdr_solve_and_extract", "solve_boost_max", "solve_leakage_min",
    "EffectiveLinks", "RateReport", "Strategy", "SystemParams",
    "SubproblemKind", "run_bcu", "solve_simo",
    "SisoGains", "optimal_beta", "solve_siso",
]
