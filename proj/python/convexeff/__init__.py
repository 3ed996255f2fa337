"""Information-bottleneck efficiency and convexity of category systems."""

from ._core import (
    ConvergenceError,
    Frontier,
    InputError,
    InvalidArgument,
    MeaningModel,
    ba_fixed_point,
    circle_certainty_world,
    compute_frontier,
    gaussian_meanings,
    geometric_grid,
    hull_contains,
    ib_objective,
    load_wcs,
    perturbed_identity,
    roc_auc,
    score,
    system_consistency,
)

__version__ = "0.1.0"
