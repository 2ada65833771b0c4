from .events import (
    ASK,
    BID,
    CANCEL,
    DELETE,
    EVENT_HEADER,
    EVENT_KINDS,
    EXEC_HIDDEN,
    EXEC_VISIBLE,
    KIND_INDEX,
    SUBMIT,
    TRADE,
    IngestReport,
    LobEvent,
    StreamMeta,
    read_events,
    read_meta,
    write_events,
)
from .blocks import BLOCK_EVENTS, DayArrays, EventBlock, block_stream, replay_day
from .order_book import DEPTH, ApplyResult, BookSnapshot, OrderBook, mid_price

__all__ = [
    "ASK", "BID", "SUBMIT", "CANCEL", "DELETE", "EXEC_VISIBLE", "EXEC_HIDDEN",
    "TRADE", "EVENT_KINDS", "KIND_INDEX", "EVENT_HEADER", "LobEvent",
    "StreamMeta", "IngestReport", "read_events", "read_meta", "write_events",
    "BLOCK_EVENTS", "EventBlock", "DayArrays", "block_stream", "replay_day",
    "DEPTH", "BookSnapshot", "ApplyResult", "OrderBook", "mid_price",
]
