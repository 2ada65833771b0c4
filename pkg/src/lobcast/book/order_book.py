"""Price-level limit order book with matching.

The book tracks individual orders (for cancel/delete/execute by
reference) aggregated into price levels with FIFO queues. Submitted
orders that cross the opposite side execute immediately against the
best opposing levels, oldest resting order first, until the book
uncrosses; any residual volume rests. Executions of hidden orders and
trade reports never touch the visible book.

Visible depth means the best DEPTH price levels per side. Events that
leave those levels unchanged (deep submits, deep cancels, hidden
executions, trades) still advance the stream but are not depth events.
"""

from bisect import bisect_left, insort
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

from ..errors import StreamError, UndefinedMidError
from .events import ASK, BID, CANCEL, DELETE, EXEC_HIDDEN, EXEC_VISIBLE, SUBMIT, TRADE, LobEvent

DEPTH = 10


@dataclass(frozen=True)
class BookSnapshot:
    """Top-of-book state after an event.

    Price/volume tuples always have DEPTH entries per side; levels
    beyond the populated count are padded with (0, 0). ``n_asks`` and
    ``n_bids`` give the populated counts, so padding is never ambiguous.
    """

    timestamp: int
    ask_prices: tuple
    ask_volumes: tuple
    bid_prices: tuple
    bid_volumes: tuple
    n_asks: int
    n_bids: int


class ApplyResult(NamedTuple):
    changed_depth: bool
    executed_volume: int
    rejected: bool


def mid_price(snapshot: BookSnapshot, tick_size: float = 1.0) -> float:
    """Mid-price in price units: mean of best ask and best bid ticks."""
    if snapshot.n_asks == 0 or snapshot.n_bids == 0:
        raise UndefinedMidError(
            f"mid undefined at ts={snapshot.timestamp}: "
            f"{snapshot.n_asks} ask / {snapshot.n_bids} bid levels"
        )
    return (snapshot.ask_prices[0] + snapshot.bid_prices[0]) / 2.0 * tick_size


class OrderBook:
    """Mutable book state driven by apply_event."""

    __slots__ = (
        "timestamp", "rejected_count",
        "_orders", "_bid_vol", "_ask_vol", "_bid_q", "_ask_q",
        "_bid_prices", "_ask_prices", "_bid_sig", "_ask_sig",
    )

    def __init__(self):
        self.timestamp = 0
        self.rejected_count = 0
        self._orders = {}        # ref -> [side, price, remaining]
        self._bid_vol = {}       # price -> aggregate volume
        self._ask_vol = {}
        self._bid_q = {}         # price -> deque of refs, FIFO
        self._ask_q = {}
        self._bid_prices = []    # ascending; best bid is [-1]
        self._ask_prices = []    # ascending; best ask is [0]
        empty = ((0,) * DEPTH, (0,) * DEPTH)
        self._bid_sig = empty
        self._ask_sig = empty

    # -- queries ------------------------------------------------------

    def best_bid(self):
        return self._bid_prices[-1] if self._bid_prices else None

    def best_ask(self):
        return self._ask_prices[0] if self._ask_prices else None

    def order(self, ref):
        """(side, price, remaining) for a live order, or None."""
        o = self._orders.get(ref)
        return tuple(o) if o is not None else None

    def total_volume(self) -> int:
        return sum(self._bid_vol.values()) + sum(self._ask_vol.values())

    def level_count(self, side: str) -> int:
        return len(self._bid_prices) if side == BID else len(self._ask_prices)

    def snapshot(self) -> BookSnapshot:
        ap, av = self._ask_sig
        bp, bv = self._bid_sig
        return BookSnapshot(
            timestamp=self.timestamp,
            ask_prices=ap, ask_volumes=av,
            bid_prices=bp, bid_volumes=bv,
            n_asks=min(len(self._ask_prices), DEPTH),
            n_bids=min(len(self._bid_prices), DEPTH),
        )

    # -- signatures for depth-change detection ------------------------

    def _ask_signature(self):
        prices = self._ask_prices[:DEPTH]
        vol = self._ask_vol
        p = tuple(prices) + (0,) * (DEPTH - len(prices))
        v = tuple(vol[x] for x in prices) + (0,) * (DEPTH - len(prices))
        return p, v

    def _bid_signature(self):
        prices = self._bid_prices[-DEPTH:][::-1]
        vol = self._bid_vol
        p = tuple(prices) + (0,) * (DEPTH - len(prices))
        v = tuple(vol[x] for x in prices) + (0,) * (DEPTH - len(prices))
        return p, v

    # -- mutation -----------------------------------------------------

    def _rest(self, ref, side, price, volume):
        self._orders[ref] = [side, price, volume]
        if side == BID:
            if price in self._bid_vol:
                self._bid_vol[price] += volume
                self._bid_q[price].append(ref)
            else:
                self._bid_vol[price] = volume
                self._bid_q[price] = deque((ref,))
                insort(self._bid_prices, price)
        else:
            if price in self._ask_vol:
                self._ask_vol[price] += volume
                self._ask_q[price].append(ref)
            else:
                self._ask_vol[price] = volume
                self._ask_q[price] = deque((ref,))
                insort(self._ask_prices, price)

    def _drop_level(self, side, price):
        if side == BID:
            del self._bid_vol[price]
            del self._bid_q[price]
            self._bid_prices.pop(bisect_left(self._bid_prices, price))
        else:
            del self._ask_vol[price]
            del self._ask_q[price]
            self._ask_prices.pop(bisect_left(self._ask_prices, price))

    def _reduce(self, ref, amount) -> int:
        """Take ``amount`` off a resting order; drop it when empty."""
        o = self._orders[ref]
        side, price, remaining = o
        taken = amount if amount < remaining else remaining
        o[2] = remaining - taken
        if side == BID:
            self._bid_vol[price] -= taken
            if o[2] == 0:
                self._bid_q[price].remove(ref)
                del self._orders[ref]
            if self._bid_vol[price] == 0:
                self._drop_level(BID, price)
        else:
            self._ask_vol[price] -= taken
            if o[2] == 0:
                self._ask_q[price].remove(ref)
                del self._orders[ref]
            if self._ask_vol[price] == 0:
                self._drop_level(ASK, price)
        return taken

    def _match_bid(self, price, volume) -> tuple:
        """Execute an incoming bid against resting asks. Returns
        (residual volume, executed volume)."""
        executed = 0
        while volume > 0 and self._ask_prices and self._ask_prices[0] <= price:
            lvl = self._ask_prices[0]
            q = self._ask_q[lvl]
            while volume > 0 and q:
                ref0 = q[0]
                o = self._orders[ref0]
                fill = volume if volume < o[2] else o[2]
                o[2] -= fill
                self._ask_vol[lvl] -= fill
                volume -= fill
                executed += fill
                if o[2] == 0:
                    q.popleft()
                    del self._orders[ref0]
            if self._ask_vol[lvl] == 0:
                self._drop_level(ASK, lvl)
        return volume, executed

    def _match_ask(self, price, volume) -> tuple:
        executed = 0
        while volume > 0 and self._bid_prices and self._bid_prices[-1] >= price:
            lvl = self._bid_prices[-1]
            q = self._bid_q[lvl]
            while volume > 0 and q:
                ref0 = q[0]
                o = self._orders[ref0]
                fill = volume if volume < o[2] else o[2]
                o[2] -= fill
                self._bid_vol[lvl] -= fill
                volume -= fill
                executed += fill
                if o[2] == 0:
                    q.popleft()
                    del self._orders[ref0]
            if self._bid_vol[lvl] == 0:
                self._drop_level(BID, lvl)
        return volume, executed

    def apply_event(self, event: LobEvent) -> ApplyResult:
        """Advance the book by one event.

        Unknown order references on C/D/EV are recoverable: the event is
        counted in ``rejected_count`` and the book is left untouched.
        Timestamps must be non-decreasing.
        """
        if event.timestamp < self.timestamp:
            raise StreamError(
                f"timestamp regression: {event.timestamp} < {self.timestamp}"
            )
        self.timestamp = event.timestamp
        kind = event.kind
        executed = 0

        if kind == SUBMIT:
            if event.order_ref in self._orders:
                self.rejected_count += 1
                return ApplyResult(False, 0, True)
            volume = event.volume
            if event.side == BID:
                volume, executed = self._match_bid(event.price_ticks, volume)
            else:
                volume, executed = self._match_ask(event.price_ticks, volume)
            if volume > 0:
                self._rest(event.order_ref, event.side, event.price_ticks, volume)
        elif kind == CANCEL or kind == DELETE or kind == EXEC_VISIBLE:
            o = self._orders.get(event.order_ref)
            if o is None:
                self.rejected_count += 1
                return ApplyResult(False, 0, True)
            if kind == DELETE:
                taken = self._reduce(event.order_ref, o[2])
            else:
                taken = self._reduce(event.order_ref, event.volume)
            if kind == EXEC_VISIBLE:
                executed = taken
        elif kind == EXEC_HIDDEN or kind == TRADE:
            # hidden liquidity: visible book untouched
            return ApplyResult(False, executed_volume=event.volume, rejected=False)
        else:
            self.rejected_count += 1
            return ApplyResult(False, 0, True)

        ask_sig = self._ask_signature()
        bid_sig = self._bid_signature()
        changed = ask_sig != self._ask_sig or bid_sig != self._bid_sig
        self._ask_sig = ask_sig
        self._bid_sig = bid_sig
        return ApplyResult(changed, executed, False)
