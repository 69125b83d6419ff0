"""Robust recursive quantum spatial search on a 3^n x 3^n lattice."""
from .analytic import alpha_recursion, cost_formula, omega_lower_bound, omega_recursion, total_complexity
from .engine import SearchParams, SearchResult, amplify, apply_U, build_psi, run_search
from .lattice import LatticeGeometry, QuantumState, SubsquareId, flat_index, inner_product, subsquare_of, uss_state
from .noise import ErrorConfig, ErrorModel, build_local_error

__all__ = [
    "ErrorConfig", "ErrorModel", "LatticeGeometry", "QuantumState", "SearchParams", "SearchResult", "SubsquareId",
    "alpha_recursion", "amplify", "apply_U", "build_local_error", "build_psi", "cost_formula", "flat_index",
    "inner_product", "omega_lower_bound", "omega_recursion", "run_search", "subsquare_of", "total_complexity",
    "uss_state",
]
