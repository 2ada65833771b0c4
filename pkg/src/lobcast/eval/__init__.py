from .folds import (ANCHORED_WALK_FORWARD, HOLDOUT_PER_STOCK, PROTOCOLS, Fold,
                    FoldPlan, check_fold_isolation, make_anchored_folds,
                    make_fold_plan, make_holdout_folds, pair_row_mask)
from .metrics import MetricsReport, confusion_matrix, macro_scores
from .stats import (NEMENYI_Q, RankComparison, friedman_test, nemenyi_cd,
                    nemenyi_compare)

__all__ = [
    "ANCHORED_WALK_FORWARD",
    "HOLDOUT_PER_STOCK",
    "Fold",
    "FoldPlan",
    "MetricsReport",
    "NEMENYI_Q",
    "PROTOCOLS",
    "RankComparison",
    "check_fold_isolation",
    "confusion_matrix",
    "friedman_test",
    "macro_scores",
    "make_anchored_folds",
    "make_fold_plan",
    "make_holdout_folds",
    "nemenyi_cd",
    "nemenyi_compare",
    "pair_row_mask",
]
