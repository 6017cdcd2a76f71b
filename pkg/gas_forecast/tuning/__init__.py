from .driver import (
    DEFAULT_FOLDS,
    DEFAULT_GRIDS,
    GridSpec,
    SearchResult,
    cv_score,
    gp_tune,
    kfold_grid_search,
    kfold_splits,
    torus_tune,
)
