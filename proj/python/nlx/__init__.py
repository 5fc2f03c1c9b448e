"""Nonlinear expectations: scenario-tree duality, HJB semigroups, relaxed control, Laplace limits."""

from ._nlx import (
    EntropicExpectation,
    InvalidInput,
    NumericRefusal,
    ScenarioTree,
    WorstCaseExpectation,
    cfl_limit,
    drift_control_value,
    entropic,
    entropic_risk,
    g_heat,
    hull_distance,
    list_checks,
    relative_entropy,
    run,
)

__all__ = [
    "EntropicExpectation",
    "InvalidInput",
    "NumericRefusal",
    "ScenarioTree",
    "WorstCaseExpectation",
    "cfl_limit",
    "drift_control_value",
    "entropic",
    "entropic_risk",
    "g_heat",
    "hull_distance",
    "list_checks",
    "relative_entropy",
    "run",
]
