"""Binary feature-matrix container.

Layout: magic ``LOBF``, format version (u32 LE), row count (u64 LE),
column count (u64 LE), then row-major float64 little-endian payload.
A text sidecar (``<path>.index``) maps each row back to its origin
(stock, day, block-end timestamp, block index). A separate lossy text
export exists for eyeballing; the binary file is the durable form.
"""

import os
import struct
from dataclasses import dataclass

import numpy as np

from ..errors import DataError

MAGIC = b"LOBF"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


@dataclass
class RowIndex:
    """Row-aligned provenance for a feature matrix."""

    stock_id: np.ndarray   # object array of str
    day_id: np.ndarray     # int64
    timestamp: np.ndarray  # int64
    block_index: np.ndarray  # int64

    def __len__(self):
        return len(self.day_id)

    @classmethod
    def concatenate(cls, parts):
        return cls(
            stock_id=np.concatenate([p.stock_id for p in parts]),
            day_id=np.concatenate([p.day_id for p in parts]),
            timestamp=np.concatenate([p.timestamp for p in parts]),
            block_index=np.concatenate([p.block_index for p in parts]),
        )

    def take(self, rows):
        return RowIndex(self.stock_id[rows], self.day_id[rows],
                        self.timestamp[rows], self.block_index[rows])


def index_path(path: str) -> str:
    return path + ".index"


def write_matrix(path: str, X: np.ndarray, index: RowIndex | None = None) -> None:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"matrix must be 2-D, got shape {X.shape}")
    if index is not None and len(index) != len(X):
        raise DataError(f"index rows {len(index)} != matrix rows {len(X)}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, X.shape[0], X.shape[1]))
        fh.write(X.astype("<f8", copy=False).tobytes(order="C"))
    if index is not None:
        with open(index_path(path), "w", newline="\n") as fh:
            fh.write("row,stock_id,day_id,timestamp,block_index\n")
            for r in range(len(index)):
                fh.write(f"{r},{index.stock_id[r]},{index.day_id[r]},"
                         f"{index.timestamp[r]},{index.block_index[r]}\n")


def read_matrix(path: str, mmap: bool = False):
    """Load a matrix and, when present, its row index sidecar."""
    size = os.path.getsize(path)
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise DataError(f"{path}: truncated header")
        magic, version, rows, cols = _HEADER.unpack(head)
        if magic != MAGIC:
            raise DataError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise DataError(f"{path}: unsupported version {version}")
        want = _HEADER.size + rows * cols * 8
        if size != want:
            raise DataError(f"{path}: size {size} != expected {want}")
        if mmap:
            X = np.memmap(path, dtype="<f8", mode="r",
                          offset=_HEADER.size, shape=(rows, cols))
        else:
            X = np.fromfile(fh, dtype="<f8", count=rows * cols).reshape(rows, cols)
    index = read_index(index_path(path)) if os.path.exists(index_path(path)) else None
    return X, index


def read_index(path: str) -> RowIndex:
    stock, day, ts, block = [], [], [], []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "row,stock_id,day_id,timestamp,block_index":
            raise DataError(f"{path}: bad index header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            parts = line.strip().split(",")
            if len(parts) != 5:
                raise DataError(f"{path}:{lineno}: expected 5 fields")
            stock.append(parts[1])
            day.append(int(parts[2]))
            ts.append(int(parts[3]))
            block.append(int(parts[4]))
    return RowIndex(
        stock_id=np.array(stock, dtype=object),
        day_id=np.array(day, dtype=np.int64),
        timestamp=np.array(ts, dtype=np.int64),
        block_index=np.array(block, dtype=np.int64),
    )


def export_text(path: str, X: np.ndarray, names=None) -> None:
    """Lossy text export for inspection; not meant to round-trip."""
    X = np.asarray(X)
    with open(path, "w", newline="\n") as fh:
        if names is not None:
            if len(names) != X.shape[1]:
                raise DataError(f"{len(names)} names for {X.shape[1]} columns")
            fh.write(",".join(names) + "\n")
        for row in X:
            fh.write(",".join(f"{v:.10g}" for v in row) + "\n")
