"""Design-based anytime-valid confidence sequences for treatment effects."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .boundaries import asymp_width, exact_eta, exact_width, lambert_w_m1, tune_eta, EtaChoice
from .core import (
    BoundaryConfig,
    ConfidenceBand,
    Observation,
    StreamState,
    fold,
    fold_many,
    restore,
    snapshot,
)
from .dgps import DgpSpec, TruthPath, assign_bandit, generate, realize
from .engine import Decision, Engine, EngineSpec, StopRule, evaluate_stop
from .errors import ContractError, DataQualityError, DbcsError, NumericalError, PositivityError
from .estimators import EstimatePair, ipw_estimate, panel_aggregate, proxy_estimate
from .evalsuite import McReport, comparator_ci, comparator_hybrid, peeking_ttest_curve, run_mc
from .mixture import MixtureStats, kummer_1f1_1, mixture_bound, mixture_statistic

__all__ = [
    "BACKEND",
    "asymp_width",
    "exact_width",
    "lambert_w_m1",
    "tune_eta",
    "exact_eta",
    "EtaChoice",
    "BoundaryConfig",
    "ConfidenceBand",
    "Observation",
    "StreamState",
    "fold",
    "fold_many",
    "snapshot",
    "restore",
    "DgpSpec",
    "TruthPath",
    "assign_bandit",
    "generate",
    "realize",
    "Decision",
    "Engine",
    "EngineSpec",
    "StopRule",
    "evaluate_stop",
    "DbcsError",
    "DataQualityError",
    "PositivityError",
    "ContractError",
    "NumericalError",
    "EstimatePair",
    "ipw_estimate",
    "proxy_estimate",
    "panel_aggregate",
    "McReport",
    "run_mc",
    "peeking_ttest_curve",
    "comparator_ci",
    "comparator_hybrid",
    "MixtureStats",
    "kummer_1f1_1",
    "mixture_statistic",
    "mixture_bound",
]
