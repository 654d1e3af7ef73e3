"""Numerical tolerances shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    simplex: float = 1e-12  # profile feasibility
    potential: float = 1e-9  # exact-potential identity
    tie: float = 1e-9  # best-response ties
    nash: float = 1e-9  # equilibrium check
    support: float = 1e-10  # weights below this count as zero
    residual: float = 1e-8  # support-enumeration linear residual
    negative_weight: float = 1e-10
    max_condition: float = 1e10  # Hessian conditioning for regularity
    time: float = 1e-12  # event localisation
    convergence: float = 1e-9

    def updated(self, **overrides: float) -> "Tolerances":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


DEFAULT_TOLERANCES = Tolerances()
