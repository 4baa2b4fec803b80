"""FCFS infinite bipartite matching: exact stationary laws, rates, link lengths and simulation."""

from ._core import (
    Evaluator,
    Model,
    ModelError,
    PermutationCapError,
    check_crp,
    fcfs_match,
    load_model,
    load_model_json,
    loynes_window,
    regeneration_estimates,
    reversibility_suite,
    simulate_matches,
)

__all__ = [
    "Evaluator",
    "Model",
    "ModelError",
    "PermutationCapError",
    "check_crp",
    "fcfs_match",
    "load_model",
    "load_model_json",
    "loynes_window",
    "regeneration_estimates",
    "reversibility_suite",
    "simulate_matches",
]
