"""Event-block subsampling and stock-day replay.

Downstream stages see one observation per BLOCK_EVENTS depth-changing
events. Events that leave the visible depth unchanged (deep activity,
hidden executions, trades) advance the stream and are counted in the
block's event-kind totals, but do not fill the block quota. The tail of
a stream that never completes its block is dropped.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import UndefinedMidError
from .events import EVENT_KINDS, KIND_INDEX, StreamMeta
from .order_book import DEPTH, BookSnapshot, OrderBook

BLOCK_EVENTS = 10
N_KINDS = len(EVENT_KINDS)


@dataclass(frozen=True)
class EventBlock:
    """Ten consecutive depth-changing events plus the book after them.

    ``kind_counts`` tallies every stream event applied since the
    previous block boundary, including the ones that left the visible
    depth unchanged; intensity features feed on these totals.
    """

    index: int
    events: tuple
    snapshot_after: BookSnapshot
    kind_counts: tuple


def block_stream(events, book: OrderBook | None = None):
    """Yield EventBlock values from an event stream.

    The caller may pass a pre-warmed book to continue a stream; by
    default replay starts from an empty book.
    """
    if book is None:
        book = OrderBook()
    pending = []
    counts = [0] * N_KINDS
    index = 0
    for event in events:
        result = book.apply_event(event)
        if result.rejected:
            continue
        counts[KIND_INDEX[event.kind]] += 1
        if result.changed_depth:
            pending.append(event)
            if len(pending) == BLOCK_EVENTS:
                yield EventBlock(
                    index=index,
                    events=tuple(pending),
                    snapshot_after=book.snapshot(),
                    kind_counts=tuple(counts),
                )
                index += 1
                pending = []
                counts = [0] * N_KINDS


@dataclass
class DayArrays:
    """Replay of one stock-day collapsed to per-block arrays.

    Prices stay in integer ticks here, zero-padded past the populated
    level counts; downstream feature code owns the conversion to price
    units and the padding fill rule.
    """

    meta: StreamMeta
    ask_p: np.ndarray     # (n, DEPTH) int64 ticks
    ask_v: np.ndarray     # (n, DEPTH) int64
    bid_p: np.ndarray
    bid_v: np.ndarray
    n_ask: np.ndarray     # (n,) int64 populated level counts
    n_bid: np.ndarray
    counts: np.ndarray    # (n, N_KINDS) int64 events since previous block
    ts: np.ndarray        # (n,) int64 block-end timestamps
    mid: np.ndarray       # (n,) float64 mid-price in price units

    @property
    def n_blocks(self) -> int:
        return len(self.ts)


def replay_day(events, meta: StreamMeta) -> DayArrays:
    """Replay a stock-day stream into block arrays.

    Raises UndefinedMidError if any block boundary leaves one side of
    the book empty; the mid-price and the padded feature rows are both
    meaningless in that state.
    """
    ask_p, ask_v, bid_p, bid_v = [], [], [], []
    n_ask, n_bid, counts, ts = [], [], [], []
    for block in block_stream(events):
        snap = block.snapshot_after
        if snap.n_asks == 0 or snap.n_bids == 0:
            raise UndefinedMidError(
                f"{meta.stock_id} day {meta.day_id}: one-sided book at "
                f"block {block.index} (ts={snap.timestamp})"
            )
        ask_p.append(snap.ask_prices)
        ask_v.append(snap.ask_volumes)
        bid_p.append(snap.bid_prices)
        bid_v.append(snap.bid_volumes)
        n_ask.append(snap.n_asks)
        n_bid.append(snap.n_bids)
        counts.append(block.kind_counts)
        ts.append(snap.timestamp)
    n = len(ts)
    shape = (n, DEPTH)
    day = DayArrays(
        meta=meta,
        ask_p=np.array(ask_p, dtype=np.int64).reshape(shape),
        ask_v=np.array(ask_v, dtype=np.int64).reshape(shape),
        bid_p=np.array(bid_p, dtype=np.int64).reshape(shape),
        bid_v=np.array(bid_v, dtype=np.int64).reshape(shape),
        n_ask=np.array(n_ask, dtype=np.int64),
        n_bid=np.array(n_bid, dtype=np.int64),
        counts=np.array(counts, dtype=np.int64).reshape((n, N_KINDS)),
        ts=np.array(ts, dtype=np.int64),
        mid=np.zeros(n),
    )
    day.mid = (day.ask_p[:, 0] + day.bid_p[:, 0]) / 2.0 * meta.tick_size
    return day
