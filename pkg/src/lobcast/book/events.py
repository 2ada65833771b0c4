"""Event stream model and on-disk format.

An event file is a CSV with the exact header
``timestamp,kind,side,price_ticks,volume,order_ref`` and LF line
endings. Kinds: S (submit), C (cancel), D (delete), EV (execution of a
visible order), EH (execution of a hidden order), T (trade report).
Sides: B (bid), A (ask). Prices are integer tick counts; the tick size
lives in a key=value sidecar next to the file, together with the stock
and day identity.
"""

import os
from dataclasses import dataclass
from typing import NamedTuple

from ..errors import StreamError

SUBMIT = "S"
CANCEL = "C"
DELETE = "D"
EXEC_VISIBLE = "EV"
EXEC_HIDDEN = "EH"
TRADE = "T"

EVENT_KINDS = (SUBMIT, CANCEL, DELETE, EXEC_VISIBLE, EXEC_HIDDEN, TRADE)
KIND_INDEX = {k: i for i, k in enumerate(EVENT_KINDS)}

BID = "B"
ASK = "A"

EVENT_HEADER = "timestamp,kind,side,price_ticks,volume,order_ref"

# kinds that never touch the visible book and therefore carry no side
_SIDELESS = frozenset((EXEC_HIDDEN, TRADE))


class LobEvent(NamedTuple):
    timestamp: int
    kind: str
    side: str
    price_ticks: int
    volume: int
    order_ref: int


@dataclass(frozen=True)
class StreamMeta:
    """Identity and scale of one stock-day event stream."""

    stock_id: str
    day_id: int
    tick_size: float


@dataclass
class IngestReport:
    """Row accounting from one event-file read."""

    path: str
    accepted: int = 0
    malformed: int = 0


def meta_path(path) -> str:
    return os.fspath(path) + ".meta"


def write_events(path: str, events, meta: StreamMeta) -> None:
    """Write an event stream plus its key=value sidecar."""
    with open(path, "w", newline="\n") as fh:
        fh.write(EVENT_HEADER + "\n")
        for e in events:
            fh.write(f"{e.timestamp},{e.kind},{e.side},{e.price_ticks},{e.volume},{e.order_ref}\n")
    with open(meta_path(path), "w", newline="\n") as fh:
        fh.write(f"stock_id={meta.stock_id}\n")
        fh.write(f"day_id={meta.day_id}\n")
        fh.write(f"tick_size={meta.tick_size!r}\n")


def read_meta(path: str) -> StreamMeta:
    """Parse the sidecar for an event file path."""
    sidecar = meta_path(path)
    if not os.path.exists(sidecar):
        raise StreamError(f"{sidecar}: missing metadata sidecar")
    fields = {}
    with open(sidecar) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if "=" not in line:
                raise StreamError(f"{sidecar}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
    try:
        return StreamMeta(
            stock_id=fields["stock_id"],
            day_id=int(fields["day_id"]),
            tick_size=float(fields["tick_size"]),
        )
    except KeyError as exc:
        raise StreamError(f"{sidecar}: missing field {exc}") from None
    except ValueError as exc:
        raise StreamError(f"{sidecar}: {exc}") from None


def read_events(path: str, report: IngestReport | None = None):
    """Read an event file, validating as we go.

    Header mismatch and non-monotone timestamps are structural faults
    and raise StreamError with the offending line number. Row-level
    faults (unknown kind or side, negative volume, non-integer fields)
    are recoverable: the row is skipped and counted in the report.
    """
    if report is None:
        report = IngestReport(path=path)
    events = []
    last_ts = None
    with open(path) as fh:
        header = fh.readline().rstrip("\n").rstrip("\r")
        if header != EVENT_HEADER:
            raise StreamError(f"{path}:1: bad header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 6:
                report.malformed += 1
                continue
            try:
                ts = int(parts[0])
                price = int(parts[3])
                volume = int(parts[4])
                ref = int(parts[5])
            except ValueError:
                report.malformed += 1
                continue
            kind, side = parts[1], parts[2]
            if kind not in KIND_INDEX or side not in (BID, ASK):
                report.malformed += 1
                continue
            if volume < 0 or (kind == SUBMIT and volume == 0):
                report.malformed += 1
                continue
            if last_ts is not None and ts < last_ts:
                raise StreamError(f"{path}:{lineno}: timestamp {ts} < {last_ts}")
            last_ts = ts
            events.append(LobEvent(ts, kind, side, price, volume, ref))
            report.accepted += 1
    return events, report
