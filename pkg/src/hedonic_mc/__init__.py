"""Random hedonic games with strict preferences: generation, exact cores, core-size statistics."""

from .analysis import (
    FitResult,
    MomentsSummary,
    export_distribution_tables,
    fit_gamma,
    fit_lognormal,
    fit_weibull,
    gof_statistics,
    model_compare,
    moments,
)
from .experiment import (
    CoreSizeHistogram,
    ExperimentConfig,
    census,
    checkpoint_resume,
    checkpoint_save,
    merge_histograms,
    run_experiment,
)
from .game import (
    PreferenceMatrix,
    coalition_from_index,
    coalition_index,
    count_games,
    decode_coalition,
    encode_coalition,
    prefers,
    validate_matrix,
)
from .generator import derive_game_stream, enumerate_all_games, random_game, random_matrix
from .partitions import bell_number, code_to_coalitions, coalition_of, partitions_iter
from .solver import CoreResult, find_core, is_blocked_by, verify_core

__version__ = "0.1.0"
