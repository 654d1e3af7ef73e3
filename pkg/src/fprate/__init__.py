"""Continuous-time fictitious play in finite potential games.

Exact event-driven simulation, equilibrium enumeration/classification and
exponential convergence-rate certificates.
"""

from fprate.config import DEFAULT_TOLERANCES, Tolerances
from fprate.errors import GameError
from fprate.game import (
    Game,
    expected_potential,
    expected_utility,
    from_simplex,
    kappa,
    to_simplex,
    validate_game,
    vertex_profile,
)
from fprate.potential import (
    PotentialGame,
    check_exact_potential,
    extract_potential,
    param_dim,
    sample_potential_game,
)
from fprate.equilibria import (
    EquilibriumRecord,
    best_response_set,
    classify_equilibrium,
    enumerate_mixed_nash,
    enumerate_nash,
    enumerate_pure_nash,
    is_nash,
    pure_best_responses,
    verify_local_br_lock,
)
from fprate.fpsim import (
    Segment,
    Trajectory,
    detect_lock_time,
    next_switch_time,
    segment_solution,
    simulate_fp,
)
from fprate.rate import (
    RateCertificate,
    distance_to_ne,
    fit_decay,
    rate_certificate,
    verify_bound,
)

__version__ = "0.1.0"
