"""Evolutionary competition of choice principles on random 2x2 symmetric games."""

__version__ = "0.1.0"

from .choice import (
    ALL_TYPES,
    FLAT_TYPES,
    SIMPLEX_TYPES,
    Belief,
    EpistemicType,
    PlayerType,
    action_values,
    choose,
    choose_with_belief,
)
from .dynamics import (
    MutationKernel,
    Trajectory,
    mutation_kernel,
    replicator_mutator_step,
    replicator_step,
    run_batch,
    run_dynamics,
    sample_initial_states,
)
from .games import Game, GameClassConfig, enumerate_games, sample_game
from .metagame import (
    MetaGame,
    build_metagame_exact,
    build_metagame_mc,
    correlated_pref_metagame,
    find_regret_threshold,
    match_fitness,
    uncorrelated_pref_metagame,
)
from .preferences import PreferenceType, SubjectiveMatrix, transform
from .stability import StabilityReport, can_invade, ess_set, is_ess
