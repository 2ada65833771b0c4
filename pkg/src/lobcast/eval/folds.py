"""Train/test fold construction over (stock, day) pairs.

Two protocols. Anchored walk-forward keeps the first day fixed: fold d
trains on days 1..d of every stock and tests on day d+1, giving 9
folds for a 10-day corpus. Per-stock hold-out trains on all days of
all stocks but one and tests on the held-out stock.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import DataError

ANCHORED_WALK_FORWARD = "anchored_walk_forward"
HOLDOUT_PER_STOCK = "holdout_per_stock"
PROTOCOLS = (ANCHORED_WALK_FORWARD, HOLDOUT_PER_STOCK)


@dataclass(frozen=True)
class Fold:
    name: str
    train_pairs: tuple  # of (stock_id, day_id)
    test_pairs: tuple


@dataclass(frozen=True)
class FoldPlan:
    protocol: str
    folds: tuple


def _check_pairs(pairs):
    pairs = [(str(s), int(d)) for s, d in pairs]
    if not pairs:
        raise DataError("no (stock, day) pairs supplied")
    if len(set(pairs)) != len(pairs):
        raise DataError("duplicate (stock, day) pairs")
    return pairs


def make_anchored_folds(pairs) -> FoldPlan:
    pairs = _check_pairs(pairs)
    days = sorted({d for _, d in pairs})
    if len(days) < 2:
        raise DataError("anchored protocol needs at least 2 distinct days")
    stocks = sorted({s for s, _ in pairs})
    have = set(pairs)
    for s in stocks:
        missing = [d for d in days if (s, d) not in have]
        if missing:
            warnings.warn(f"stock {s} missing days {missing}; those "
                          "stock-days are simply absent from the folds")
    folds = []
    for i in range(len(days) - 1):
        train_days = set(days[:i + 1])
        test_day = days[i + 1]
        train = tuple(p for p in pairs if p[1] in train_days)
        test = tuple(p for p in pairs if p[1] == test_day)
        if train and test:
            folds.append(Fold(f"day{test_day}", train, test))
    return FoldPlan(ANCHORED_WALK_FORWARD, tuple(folds))


def make_holdout_folds(pairs) -> FoldPlan:
    pairs = _check_pairs(pairs)
    stocks = sorted({s for s, _ in pairs})
    if len(stocks) < 2:
        raise DataError("hold-out protocol needs at least 2 stocks")
    folds = []
    for held in stocks:
        train = tuple(p for p in pairs if p[0] != held)
        test = tuple(p for p in pairs if p[0] == held)
        folds.append(Fold(f"stock_{held}", train, test))
    return FoldPlan(HOLDOUT_PER_STOCK, tuple(folds))


def make_fold_plan(protocol: str, pairs) -> FoldPlan:
    if protocol == ANCHORED_WALK_FORWARD:
        return make_anchored_folds(pairs)
    if protocol == HOLDOUT_PER_STOCK:
        return make_holdout_folds(pairs)
    raise DataError(f"unknown protocol {protocol!r}; expected one of {PROTOCOLS}")


def check_fold_isolation(plan: FoldPlan) -> None:
    """Raise if any fold violates its protocol's separation rule."""
    for fold in plan.folds:
        if plan.protocol == ANCHORED_WALK_FORWARD:
            max_train = max(d for _, d in fold.train_pairs)
            min_test = min(d for _, d in fold.test_pairs)
            if min_test <= max_train:
                raise DataError(
                    f"fold {fold.name}: test day {min_test} does not follow "
                    f"last training day {max_train}")
        else:
            train_stocks = {s for s, _ in fold.train_pairs}
            test_stocks = {s for s, _ in fold.test_pairs}
            overlap = train_stocks & test_stocks
            if overlap:
                raise DataError(f"fold {fold.name}: stocks {sorted(overlap)} "
                                "appear on both sides")


def pair_row_mask(stock_id, day_id, pairs) -> np.ndarray:
    """Boolean mask of rows whose (stock, day) is in the selector."""
    stock_id = np.asarray(stock_id).astype(str)
    day_id = np.asarray(day_id, dtype=np.int64)
    if not len(stock_id):
        return np.zeros(0, dtype=bool)
    # encode (stock, day) as one integer key so membership is vectorized
    stocks, inv = np.unique(stock_id, return_inverse=True)
    base = int(day_id.max()) + 2
    keys = inv.astype(np.int64) * base + day_id
    lookup = {s: i for i, s in enumerate(stocks)}
    wanted = []
    for s, d in pairs:
        idx = lookup.get(str(s))
        if idx is not None and 0 <= int(d) < base:
            wanted.append(idx * base + int(d))
    return np.isin(keys, np.asarray(wanted, dtype=np.int64))
