"""Rank-based comparison of competing methods over shared datasets.

The Friedman statistic tests whether k methods scored on n datasets
share a common rank distribution; the Nemenyi critical difference then
says how far two average ranks must sit apart before the gap counts
as significant. Higher scores are better and receive lower ranks.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, rankdata

from ..errors import DataError

# Critical values of the studentized range at infinite degrees of
# freedom, divided by sqrt(2). Frozen here so report generation does
# not depend on a stats backend at runtime.
NEMENYI_Q = {
    0.05: {2: 1.959964, 3: 2.343701, 4: 2.569032, 5: 2.727774,
           6: 2.849705, 7: 2.948320, 8: 3.030878, 9: 3.101730,
           10: 3.163684},
    0.10: {2: 1.644854, 3: 2.052293, 4: 2.291341, 5: 2.459516,
           6: 2.588521, 7: 2.692732, 8: 2.779884, 9: 2.854606,
           10: 2.919889},
}


@dataclass(frozen=True)
class RankComparison:
    avg_ranks: np.ndarray   # one per treatment; rank 1 = best
    statistic: float
    p_value: float


def _score_matrix(scores) -> np.ndarray:
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2:
        raise DataError("scores must be a treatments x datasets matrix")
    k, n = scores.shape
    if k < 2 or n < 2:
        raise DataError(f"need at least 2 treatments and 2 datasets, got {k}x{n}")
    if not np.all(np.isfinite(scores)):
        raise DataError("scores contain non-finite values")
    return scores


def friedman_test(scores) -> RankComparison:
    """Columns are datasets; each column is ranked with midrank ties."""
    scores = _score_matrix(scores)
    k, n = scores.shape
    # negate so the highest score in a column gets rank 1
    ranks = rankdata(-scores, method="average", axis=0)
    avg = ranks.mean(axis=1)
    statistic = 12.0 * n / (k * (k + 1)) * np.sum((avg - (k + 1) / 2.0) ** 2)
    p_value = float(chi2.sf(statistic, k - 1))
    return RankComparison(avg_ranks=avg, statistic=float(statistic),
                          p_value=p_value)


def nemenyi_cd(k: int, n: int, alpha: float = 0.10) -> float:
    try:
        q = NEMENYI_Q[round(alpha, 2)][k]
    except KeyError:
        raise DataError(
            f"no tabulated critical value for k={k}, alpha={alpha}; "
            f"supported k=2..10, alpha in {sorted(NEMENYI_Q)}") from None
    return q * np.sqrt(k * (k + 1) / (6.0 * n))


def nemenyi_compare(avg_ranks, cd: float) -> np.ndarray:
    """Symmetric boolean matrix: True where a pair differs significantly."""
    r = np.asarray(avg_ranks, dtype=np.float64)
    gap = np.abs(r[:, None] - r[None, :])
    out = gap > cd
    np.fill_diagonal(out, False)
    return out
