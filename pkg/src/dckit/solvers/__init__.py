"""Outer algorithms, step-size bounds and descent monitors."""
from .algorithms import (
    criticality_residual,
    energy_along_trace,
    run,
    run_dca,
    run_rindca_exact,
    run_rindca_inexact,
    run_sdca,
)
from .bounds import BoundReport, gamma_sup_exact, gamma_sup_inexact, sigma_bar

__all__ = [
    "BoundReport",
    "criticality_residual",
    "energy_along_trace",
    "gamma_sup_exact",
    "gamma_sup_inexact",
    "run",
    "run_dca",
    "run_rindca_exact",
    "run_rindca_inexact",
    "run_sdca",
    "sigma_bar",
]
