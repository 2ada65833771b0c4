"""Synthetic multi-stock, multi-day order-flow generator.

Each stock-day is produced independently from a derived random
substream, so corpora regenerate byte-identically from one seed and
stock-days can generate in parallel.

The generator steers the book toward a target mid-price path (a
discretised mean-reverting walk around a drifting anchor, projected to
the tick grid). Price pressure is realised by improving one side and
executing or deleting stale orders on the other; churn events (deep
submits, partial cancels, deep deletes, hidden executions, trades)
deliberately never touch the best prices, so the zero-dynamics
configuration produces an exactly constant mid. Executions are emitted
as explicit events against known resting orders rather than via
crossing submits, which keeps the generator's ledger and the replayed
book trivially in sync. No market realism is claimed.
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .book.blocks import replay_day
from .book.events import (ASK, BID, CANCEL, DELETE, EXEC_HIDDEN, EXEC_VISIBLE,
                          LobEvent, StreamMeta, SUBMIT, TRADE, write_events)
from .book.order_book import DEPTH, OrderBook
from .errors import DataError
from .labeling import (HORIZON_THRESHOLDS, LabelParams, count_classes,
                       label_series)
from .seeding import rng_for

TRENDING = "trending"
MEAN_REVERTING = "mean_reverting"
MIXED = "mixed"
REGIMES = (TRENDING, MEAN_REVERTING, MIXED)

SPREAD_TICKS = 2
LADDER_DEPTH = 12   # resting levels maintained behind the best price

# mixed-regime segmentation: segment length bounds in events and the
# probability that a segment trends rather than holds level
SEGMENT_EVENTS = (800, 2400)
TREND_PROB = 0.34


@dataclass(frozen=True)
class MarketConfig:
    stocks: int = 5
    days: int = 10
    events_per_day: int = 34_000  # roughly 2,000 blocks once replayed
    tick_size: float = 0.01
    base_price: float = 20.0
    drift: float = 3.0       # mid displacement of a fully trending day
    noise: float = 0.0005    # per-event mid noise std, price units
    regime: str = MIXED
    seed: int = 0

    def __post_init__(self):
        if min(self.stocks, self.days, self.events_per_day) < 1:
            raise DataError("stocks, days and events_per_day must be >= 1")
        if self.tick_size <= 0 or self.base_price <= 0:
            raise DataError("tick_size and base_price must be positive")
        if self.noise < 0:
            raise DataError("noise must be non-negative")
        if self.regime not in REGIMES:
            raise DataError(f"regime must be one of {REGIMES}")

    def stock_ids(self):
        return [f"SYN{i:02d}" for i in range(self.stocks)]


def _mid_path(rng, config: MarketConfig, n: int) -> np.ndarray:
    """Target mid in ticks, one value per prospective event."""
    tick = config.tick_size
    base = config.base_price / tick
    slope = config.drift / tick / n
    eps = rng.normal(0.0, 1.0, size=n) * (config.noise / tick)
    x = np.empty(n)
    x[0] = base

    if config.regime == TRENDING:
        for t in range(1, n):
            anchor = base + slope * t
            x[t] = x[t - 1] + 0.01 * (anchor - x[t - 1]) + slope + eps[t]
    elif config.regime == MEAN_REVERTING:
        for t in range(1, n):
            x[t] = x[t - 1] + 0.005 * (base - x[t - 1]) + eps[t]
    else:
        t = 1
        while t < n:
            end = min(n, t + int(rng.integers(*SEGMENT_EVENTS)))
            if rng.random() < TREND_PROB:
                sign = 1.0 if rng.random() < 0.5 else -1.0
                for i in range(t, end):
                    x[i] = x[i - 1] + sign * slope + eps[i]
            else:
                anchor = x[t - 1]
                for i in range(t, end):
                    x[i] = x[i - 1] + 0.01 * (anchor - x[i - 1]) + eps[i]
            t = end
    # keep the ladder safely on the positive tick grid
    np.clip(x, 0.4 * base, 2.5 * base, out=x)
    return x


class _DayState:
    """Ledger of live synthetic orders, mirrored into a real book."""

    def __init__(self, rng, start_ts: int):
        self.rng = rng
        self.ts = start_ts
        self.book = OrderBook()
        self.live = {}                    # ref -> [side, price, volume]
        self.levels = {BID: {}, ASK: {}}  # side -> price -> FIFO refs
        self.events = []
        self.next_ref = 0

    def best(self, side) -> int:
        prices = self.levels[side]
        return max(prices) if side == BID else min(prices)

    def depth(self, side) -> int:
        return len(self.levels[side])

    def draw_volume(self) -> int:
        return int(min(self.rng.lognormal(3.7, 0.6), 5000.0)) + 1

    def emit(self, kind, side, price, volume, ref):
        self.ts += int(self.rng.integers(50_000, 1_500_000))
        ev = LobEvent(self.ts, kind, side, int(price), int(volume), ref)
        if self.book.apply_event(ev).rejected:
            raise DataError(f"generator emitted a rejected event: {ev}")
        self.events.append(ev)

    def submit(self, side, price):
        ref = self.next_ref
        self.next_ref += 1
        vol = self.draw_volume()
        self.emit(SUBMIT, side, price, vol, ref)
        self.live[ref] = [side, price, vol]
        self.levels[side].setdefault(price, []).append(ref)

    def take_out(self, ref, kind):
        """Remove a whole resting order via DELETE or full EXEC_VISIBLE."""
        side, price, vol = self.live.pop(ref)
        self.emit(kind, side, price, vol, ref)
        refs = self.levels[side][price]
        refs.remove(ref)
        if not refs:
            del self.levels[side][price]

    def shrink(self, ref, kind, delta):
        """Partial CANCEL or partial EXEC_VISIBLE; the order survives."""
        entry = self.live[ref]
        self.emit(kind, entry[0], entry[1], delta, ref)
        entry[2] -= delta

    def off_book(self, kind, side, price, volume):
        ref = self.next_ref
        self.next_ref += 1
        self.emit(kind, side, price, volume, ref)


def _clear_side(state: _DayState, side, keep_from: int) -> None:
    """Take out every order on `side` priced better than `keep_from`."""
    if side == ASK:
        stale = sorted(p for p in state.levels[ASK] if p < keep_from)
    else:
        stale = sorted((p for p in state.levels[BID] if p > keep_from),
                       reverse=True)
    for price in stale:
        for ref in list(state.levels[side][price]):
            kind = EXEC_VISIBLE if state.rng.random() < 0.7 else DELETE
            state.take_out(ref, kind)


def _churn(state: _DayState) -> None:
    """One flow event that provably leaves both best prices unchanged."""
    rng = state.rng
    bid, ask = state.best(BID), state.best(ASK)
    r = rng.random()

    if r < 0.30 or state.depth(BID) < DEPTH or state.depth(ASK) < DEPTH:
        side = BID if state.depth(BID) <= state.depth(ASK) else ASK
        base, sign = (bid, -1) if side == BID else (ask, 1)
        for k in range(1, LADDER_DEPTH + 1):
            price = base + sign * k
            if price > 0 and price not in state.levels[side]:
                state.submit(side, price)
                return
        state.submit(side, base + sign * int(rng.integers(1, LADDER_DEPTH + 1)))
        return

    if r < 0.52:
        for _ in range(4):  # a few draws to find a shrinkable order
            ref = int(rng.integers(0, state.next_ref))
            entry = state.live.get(ref)
            if entry is not None and entry[2] >= 2:
                state.shrink(ref, CANCEL, int(rng.integers(1, entry[2])))
                return

    elif r < 0.70:
        for _ in range(4):
            ref = int(rng.integers(0, state.next_ref))
            entry = state.live.get(ref)
            if entry is None:
                continue
            side = entry[0]
            off_best = entry[1] != (bid if side == BID else ask)
            if off_best and state.depth(side) > 3:
                state.take_out(ref, DELETE)
                return

    elif r < 0.82:
        side = BID if rng.random() < 0.5 else ASK
        front = state.live[state.levels[side][state.best(side)][0]]
        if front[2] >= 2:
            ref = state.levels[side][state.best(side)][0]
            state.shrink(ref, EXEC_VISIBLE, int(rng.integers(1, front[2])))
            return

    elif r < 0.92:
        side = BID if rng.random() < 0.5 else ASK
        state.off_book(EXEC_HIDDEN, side, (bid + ask) // 2, state.draw_volume())
        return

    else:
        side = BID if rng.random() < 0.5 else ASK
        state.off_book(TRADE, side, (bid + ask) // 2, state.draw_volume())
        return

    # fallthrough when a draw found no suitable order: top up the ladder
    side = BID if state.depth(BID) <= state.depth(ASK) else ASK
    base, sign = (bid, -1) if side == BID else (ask, 1)
    state.submit(side, base + sign * int(rng.integers(1, LADDER_DEPTH + 1)))


def generate_day(config: MarketConfig, stock_idx: int, day_idx: int):
    """Build one stock-day; returns (events, meta). Pure per substream."""
    stock_id = config.stock_ids()[stock_idx]
    meta = StreamMeta(stock_id=stock_id, day_id=day_idx,
                      tick_size=config.tick_size)
    rng = rng_for(config.seed, "synth", stock_id, f"day{day_idx}")
    n = config.events_per_day
    path = _mid_path(rng, config, n + 8)
    state = _DayState(rng, start_ts=(34_200 + 86_400 * day_idx) * 10 ** 9)

    def targets(x):
        mid = int(round(x))
        return mid - SPREAD_TICKS // 2, mid + SPREAD_TICKS - SPREAD_TICKS // 2

    bid0, ask0 = targets(path[0])
    for k in range(DEPTH):  # alternate sides so every prefix has a mid
        state.submit(BID, bid0 - k)
        state.submit(ASK, ask0 + k)

    while len(state.events) < n:
        want_bid, want_ask = targets(path[min(len(state.events), n - 1)])
        cur_bid = state.best(BID)
        if want_bid > cur_bid:
            # up move: fresh ask first so that side never empties
            if want_ask not in state.levels[ASK]:
                state.submit(ASK, want_ask)
            _clear_side(state, ASK, keep_from=want_ask)
            if want_bid not in state.levels[BID]:
                state.submit(BID, want_bid)
        elif want_bid < cur_bid:
            if want_bid not in state.levels[BID]:
                state.submit(BID, want_bid)
            _clear_side(state, BID, keep_from=want_bid)
            if want_ask not in state.levels[ASK]:
                state.submit(ASK, want_ask)
        else:
            _churn(state)

    return state.events[:n], meta


def day_summary(events, meta: StreamMeta) -> dict:
    """Replay one generated day and count blocks and label classes."""
    day = replay_day(events, meta)
    summary = {"events": len(events), "blocks": int(len(day.mid))}
    for horizon, threshold in sorted(HORIZON_THRESHOLDS.items()):
        series = label_series(day.mid, LabelParams(horizon, threshold))
        summary[f"labels_h{horizon}"] = count_classes(series.labels)
    return summary


def generate_corpus(config: MarketConfig, out_dir) -> dict:
    """Write every stock-day event file plus a manifest; returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    totals = {h: {-1: 0, 0: 0, 1: 0} for h in sorted(HORIZON_THRESHOLDS)}
    for stock_idx, stock_id in enumerate(config.stock_ids()):
        for day_idx in range(config.days):
            events, meta = generate_day(config, stock_idx, day_idx)
            name = f"{stock_id}_day{day_idx:02d}.csv"
            write_events(out / name, events, meta)
            entry = {"file": name, "stock_id": stock_id, "day_id": day_idx}
            entry.update(day_summary(events, meta))
            files.append(entry)
            for h in totals:
                for cls, cnt in entry[f"labels_h{h}"].items():
                    totals[h][cls] += cnt
    manifest = {
        "config": asdict(config),
        "files": files,
        "label_totals": {str(h): {str(c): n for c, n in t.items()}
                         for h, t in totals.items()},
    }
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    (out / "manifest.json").write_text(text, encoding="utf-8")
    return manifest
