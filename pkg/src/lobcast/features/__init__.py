from .schema import (
    FEATURE_NAMES,
    FIRST_VALID_BLOCK,
    LONG_WINDOW,
    N_FEATURES,
    SHORT_WINDOW,
    U1, U2, U3, U4, U5, U6, U7, U8, U9,
)
from .extract import day_feature_matrix, extract_features
from .scaler import ZERO_VARIANCE_EPS, ZScoreScaler
from .windows import (
    PLAIN_REPRESENTATIONS,
    WINDOW,
    build_representation,
    make_representation,
    plain_dim,
    window_view,
)
from .matrix_io import RowIndex, export_text, read_index, read_matrix, write_matrix

__all__ = [
    "FEATURE_NAMES", "N_FEATURES", "FIRST_VALID_BLOCK", "SHORT_WINDOW",
    "LONG_WINDOW", "U1", "U2", "U3", "U4", "U5", "U6", "U7", "U8", "U9",
    "day_feature_matrix", "extract_features", "ZScoreScaler",
    "ZERO_VARIANCE_EPS", "WINDOW", "PLAIN_REPRESENTATIONS",
    "window_view", "make_representation", "build_representation", "plain_dim",
    "RowIndex", "write_matrix", "read_matrix", "read_index", "export_text",
]
