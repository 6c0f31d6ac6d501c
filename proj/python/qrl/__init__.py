"""Q-learning workbench: game environments, tabular and DQN trainers."""

from ._qrl import (
    Env,
    __version__,
    emit_plots,
    evaluate_checkpoint,
    generate_sudoku,
    hierarchical_solve,
    run_training,
)

__all__ = [
    "Env",
    "__version__",
    "emit_plots",
    "evaluate_checkpoint",
    "generate_sudoku",
    "hierarchical_solve",
    "run_training",
]
