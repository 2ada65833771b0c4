from .cv import C_GRID, contiguous_folds, select_regularizer
from .mlp import AdamMLP
from .slfn import RBFPrototypeSLFN
from .svm import SGDLinearSVM
from .weighting import CLASS_ORDER, class_counts, class_weights, sample_weights

__all__ = [
    "AdamMLP",
    "C_GRID",
    "CLASS_ORDER",
    "RBFPrototypeSLFN",
    "SGDLinearSVM",
    "class_counts",
    "class_weights",
    "contiguous_folds",
    "sample_weights",
    "select_regularizer",
]
