"""Feature extraction from replayed block arrays.

The kernel is vectorised over block ranges; the per-block entry point
runs the same kernel on a one-row range, so both produce bit-identical
values. All rolling quantities are integer event counts, which keeps
window sums exact regardless of evaluation order.
"""

import numpy as np

from ..book.blocks import DayArrays
from ..book.events import EVENT_KINDS, KIND_INDEX
from ..errors import WarmupError
from .schema import (
    FIRST_VALID_BLOCK,
    LONG_WINDOW,
    N_FEATURES,
    SHORT_WINDOW,
    U1,
    U2,
    U3,
    U4,
    U5,
    U6,
    U7,
    U8,
    U9,
)

_I_S = KIND_INDEX["S"]
_I_C = KIND_INDEX["C"]
_I_D = KIND_INDEX["D"]
_I_EV = KIND_INDEX["EV"]
_I_EH = KIND_INDEX["EH"]
_I_T = KIND_INDEX["T"]

_LEVEL = np.arange(10)


def _padded_sides(day: DayArrays, lo: int, hi: int):
    """Price-unit book rows for blocks [lo, hi), padding applied.

    Missing levels take the price of the deepest populated level on the
    same side and volume zero.
    """
    tick = day.meta.tick_size
    fill_a = np.minimum(_LEVEL[None, :], (day.n_ask[lo:hi] - 1)[:, None])
    fill_b = np.minimum(_LEVEL[None, :], (day.n_bid[lo:hi] - 1)[:, None])
    ask_p = np.take_along_axis(day.ask_p[lo:hi], fill_a, axis=1) * tick
    bid_p = np.take_along_axis(day.bid_p[lo:hi], fill_b, axis=1) * tick
    ask_v = np.where(_LEVEL[None, :] < day.n_ask[lo:hi, None], day.ask_v[lo:hi], 0).astype(np.float64)
    bid_v = np.where(_LEVEL[None, :] < day.n_bid[lo:hi, None], day.bid_v[lo:hi], 0).astype(np.float64)
    return ask_p, ask_v, bid_p, bid_v


def _window_counts(day: DayArrays, lo: int, hi: int, window: int):
    """Per-kind event counts over the trailing ``window`` blocks
    (inclusive) for each block in [lo, hi). Requires lo + 1 >= window.

    Exact integer rolling sums via zero-prefixed cumulative counts, so
    the vectorised and one-row paths agree bit for bit.
    """
    c = day.counts
    cum = np.vstack([np.zeros((1, c.shape[1]), dtype=np.int64),
                     np.cumsum(c[:hi], axis=0)])
    return cum[lo + 1: hi + 1] - cum[lo + 1 - window: hi + 1 - window]


def _interleave_u1(ask_p, ask_v, bid_p, bid_v, out):
    out[:, U1][:, 0::4] = ask_p
    out[:, U1][:, 1::4] = ask_v
    out[:, U1][:, 2::4] = bid_p
    out[:, U1][:, 3::4] = bid_v


def _kernel(day: DayArrays, lo: int, hi: int) -> np.ndarray:
    """Feature rows for block indices [lo, hi); assumes lo is valid."""
    m = hi - lo
    out = np.empty((m, N_FEATURES))

    ask_p, ask_v, bid_p, bid_v = _padded_sides(day, lo, hi)
    pask_p, pask_v, pbid_p, pbid_v = _padded_sides(day, lo - 1, hi - 1)

    _interleave_u1(ask_p, ask_v, bid_p, bid_v, out)

    out[:, U2][:, :10] = ask_p - bid_p
    out[:, U2][:, 10:] = (ask_p + bid_p) / 2.0

    u3 = out[:, U3]
    u3[:, 0] = ask_p[:, 9] - ask_p[:, 0]
    u3[:, 1] = bid_p[:, 0] - bid_p[:, 9]
    u3[:, 2:11] = np.abs(ask_p[:, 1:] - ask_p[:, :-1])
    u3[:, 11:20] = np.abs(bid_p[:, 1:] - bid_p[:, :-1])

    u4 = out[:, U4]
    u4[:, 0] = np.mean(ask_p, axis=1)
    u4[:, 1] = np.mean(bid_p, axis=1)
    u4[:, 2] = np.mean(ask_v, axis=1)
    u4[:, 3] = np.mean(bid_v, axis=1)

    u5 = out[:, U5]
    u5[:, 0] = np.sum(ask_p - bid_p, axis=1)
    u5[:, 1] = np.sum(ask_v - bid_v, axis=1)

    u6 = out[:, U6]
    u6[:, 0::4] = ask_p - pask_p
    u6[:, 1::4] = ask_v - pask_v
    u6[:, 2::4] = bid_p - pbid_p
    u6[:, 3::4] = bid_v - pbid_v

    short = _window_counts(day, lo, hi, SHORT_WINDOW)
    long = _window_counts(day, lo, hi, LONG_WINDOW)
    prev_short = _window_counts(day, lo - 1, hi - 1, SHORT_WINDOW)

    out[:, U7] = short / float(SHORT_WINDOW)

    u8 = out[:, U8]
    # short rate > long rate, exact in integers:
    # short/SHORT > long/LONG  <=>  short * LONG > long * SHORT
    u8[:, :6] = (short * LONG_WINDOW > long * SHORT_WINDOW).astype(np.float64)
    submits = short[:, _I_S] + 1.0
    u8[:, 6] = short[:, _I_T] / submits
    u8[:, 7] = short[:, _I_C] / submits
    u8[:, 8] = short[:, _I_D] / submits
    u8[:, 9] = short[:, _I_EH] / (short[:, _I_EV] + 1.0)

    u9 = out[:, U9]
    u9[:, 0] = (short[:, _I_S] - prev_short[:, _I_S]) / float(SHORT_WINDOW)
    u9[:, 1] = (short[:, _I_T] - prev_short[:, _I_T]) / float(SHORT_WINDOW)

    return out


def day_feature_matrix(day: DayArrays) -> np.ndarray:
    """Full (n_blocks, 144) matrix; warm-up rows are NaN.

    Valid rows start at FIRST_VALID_BLOCK. NaN poisoning makes any
    accidental use of a warm-up row loud.
    """
    n = day.n_blocks
    out = np.full((n, N_FEATURES), np.nan)
    if n > FIRST_VALID_BLOCK:
        out[FIRST_VALID_BLOCK:] = _kernel(day, FIRST_VALID_BLOCK, n)
    return out


def extract_features(day: DayArrays, index: int) -> np.ndarray:
    """Feature vector for one block.

    The block needs LONG_WINDOW blocks of trailing history (inclusive)
    plus the previous block for the delta group; anything earlier
    raises WarmupError.
    """
    if index < FIRST_VALID_BLOCK:
        raise WarmupError(
            f"block {index} needs {FIRST_VALID_BLOCK} blocks of history"
        )
    if index >= day.n_blocks:
        raise IndexError(f"block {index} out of range ({day.n_blocks})")
    return _kernel(day, index, index + 1)[0]
