"""Numerical laboratory for two-period exchange economies with a
dividend-paying asset: equilibrium recursions, equilibrium-set search,
price decomposition into fundamental and bubble components, and
bubble/optimality condition checkers.
"""

from .errors import (AssumptionViolated, BracketFailure, DomainError,
                     EmptySurvivalSet, InvalidSequence, InvalidSeries,
                     ModelPreconditionFailed, NoFiniteRate, NonConvergedSet,
                     NoPositiveSteadyState, NotApplicable, OlgLabError,
                     RankViolation, ScenarioError, SmoothnessUnbounded)
from .model import (CRRA2Utility, CRRAUtility, ClosedFormSeq, Constant,
                    CustomSeparable, Economy, ExplicitList, Geometric,
                    LogUtility, PowerLaw, ToleranceSet, aggregate_supply,
                    eval_sequence)
from .euler import (EulerPoint, benchmark_rate, euler_point, euler_residual,
                    forward_rate_ratio, g_solve)
from .paths import (EquilibriumPath, PathStatus, PriceDecomposition,
                    decompose, forward_step, path_from_arrays, simulate,
                    telescoping_residual, welfare, write_path_csv)
from .eqset import (EquilibriumSetResult, SurvivalInterval, closed_form_path,
                    equilibrium_set, fundamental_path, maximal_path,
                    steady_state_a_hat, survival_interval)
from .bubbles import (BubbleTestReport, ConditionBReport, ConditionBSpec,
                      GrowthProbeReport, LimitVerdict, NoBubbleReport,
                      RegimeReport, SeriesVerdict, bubble_test_path,
                      classify_regime, condition_B_check, growth_rate_probe,
                      no_bubble_conditions, series_test)
from .pareto import (ParetoCertificate, SupportPriceReport, WelfareRankReport,
                     cass_criterion, certify, smoothness_constants,
                     strictness_constant, support_price_test, welfare_margin,
                     welfare_rank)
from .scenario import (PRESETS, apply_overrides, load_scenario,
                       parse_scenario, resolve_scenario)
from .cli import RunConfig, RunReport, run

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolated", "BracketFailure", "DomainError", "EmptySurvivalSet",
    "InvalidSequence", "InvalidSeries", "ModelPreconditionFailed",
    "NoFiniteRate", "NonConvergedSet", "NoPositiveSteadyState",
    "NotApplicable", "OlgLabError", "RankViolation", "ScenarioError",
    "SmoothnessUnbounded",
    "CRRA2Utility", "CRRAUtility", "ClosedFormSeq", "Constant",
    "CustomSeparable", "Economy", "ExplicitList", "Geometric", "LogUtility",
    "PowerLaw", "ToleranceSet", "aggregate_supply", "eval_sequence",
    "EulerPoint", "benchmark_rate", "euler_point", "euler_residual",
    "forward_rate_ratio", "g_solve",
    "EquilibriumPath", "PathStatus", "PriceDecomposition", "decompose",
    "forward_step", "path_from_arrays", "simulate", "telescoping_residual",
    "welfare", "write_path_csv",
    "EquilibriumSetResult", "SurvivalInterval", "closed_form_path",
    "equilibrium_set", "fundamental_path", "maximal_path",
    "steady_state_a_hat", "survival_interval",
    "BubbleTestReport", "ConditionBReport", "ConditionBSpec",
    "GrowthProbeReport", "LimitVerdict", "NoBubbleReport", "RegimeReport",
    "SeriesVerdict", "bubble_test_path", "classify_regime",
    "condition_B_check", "growth_rate_probe", "no_bubble_conditions",
    "series_test",
    "ParetoCertificate", "SupportPriceReport", "WelfareRankReport",
    "cass_criterion", "certify", "smoothness_constants",
    "strictness_constant", "support_price_test", "welfare_margin",
    "welfare_rank",
    "PRESETS", "apply_overrides", "load_scenario", "parse_scenario",
    "resolve_scenario",
    "RunConfig", "RunReport", "run",
]
